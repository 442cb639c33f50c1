#pragma once

#include "dvgan/graph.hpp"
#include "dvgan/lstm.hpp"
#include "dvgan/params.hpp"

#include <map>
#include <string>
#include <vector>

namespace dvgan {

// Word -> index map with reserved PAD and UNK entries. Built from the
// train split only; unseen words fall back to UNK.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocabulary();

  // Adds every token of every sentence (tokenized the same way as
  // tokenize()).
  static Vocabulary build(const std::vector<std::string>& sentences);

  int add(const std::string& word);  // returns existing index if present
  int index(const std::string& word) const;  // kUnk when absent
  const std::string& word(int index) const;
  int size() const { return static_cast<int>(words_.size()); }

  void save(const std::string& path) const;  // "index<TAB>word" per line
  static Vocabulary load(const std::string& path);

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::map<std::string, int> index_;
};

struct ActionDescription {
  std::string raw;
  std::vector<int> tokens;
};

// Lowercases, strips punctuation, splits on whitespace. Throws
// std::invalid_argument when no token survives.
std::vector<std::string> tokenize_words(const std::string& raw);
ActionDescription tokenize(const std::string& raw, const Vocabulary& vocab);

// Sentence encoder: learned word embeddings feed a 2-layer LSTM; the final
// hidden and cell states of both layers are concatenated (4k) and linearly
// projected to the k-dim conditioning vector.
struct TextEncoder {
  std::string prefix;
  int vocab_size = 0;
  Eigen::Index hidden_size = 0;  // k

  void register_params(ParameterStore& store, Rng& rng) const;
  Var encode(Graph& g, GraphParams& p, const std::vector<int>& tokens) const;

 private:
  LstmStack lstm() const {
    return LstmStack{prefix + ".lstm", 2, hidden_size, hidden_size};
  }
};

}  // namespace dvgan
