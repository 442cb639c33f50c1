#include "dvgan/text.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dvgan {

Vocabulary::Vocabulary() {
  words_ = {"<pad>", "<unk>"};
  index_ = {{"<pad>", kPad}, {"<unk>", kUnk}};
}

Vocabulary Vocabulary::build(const std::vector<std::string>& sentences) {
  Vocabulary vocab;
  for (const std::string& s : sentences)
    for (const std::string& w : tokenize_words(s)) vocab.add(w);
  return vocab;
}

int Vocabulary::add(const std::string& word) {
  auto it = index_.find(word);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(words_.size());
  words_.push_back(word);
  index_.emplace(word, id);
  return id;
}

int Vocabulary::index(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::word(int index) const {
  if (index < 0 || index >= size()) throw std::out_of_range("vocabulary index out of range");
  return words_[static_cast<size_t>(index)];
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (int i = 0; i < size(); ++i) out << i << '\t' << words_[static_cast<size_t>(i)] << '\n';
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary: " + path);
  Vocabulary vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) throw std::runtime_error("bad vocabulary line: " + line);
    const int idx = std::stoi(line.substr(0, tab));
    const std::string word = line.substr(tab + 1);
    if (idx < vocab.size()) {
      if (vocab.words_[static_cast<size_t>(idx)] != word)
        throw std::runtime_error("vocabulary reserved entry mismatch: " + line);
      continue;
    }
    if (idx != vocab.size()) throw std::runtime_error("non-contiguous vocabulary index: " + line);
    vocab.add(word);
  }
  return vocab;
}

std::vector<std::string> tokenize_words(const std::string& raw) {
  std::string cleaned;
  cleaned.reserve(raw.size());
  for (char c : raw) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) {
      cleaned.push_back(static_cast<char>(std::tolower(uc)));
    } else if (std::isspace(uc) || std::ispunct(uc)) {
      cleaned.push_back(' ');
    }
  }
  std::vector<std::string> words;
  std::istringstream is(cleaned);
  std::string w;
  while (is >> w) words.push_back(w);
  if (words.empty()) throw std::invalid_argument("tokenize: no tokens in '" + raw + "'");
  return words;
}

ActionDescription tokenize(const std::string& raw, const Vocabulary& vocab) {
  ActionDescription desc;
  desc.raw = raw;
  for (const std::string& w : tokenize_words(raw)) desc.tokens.push_back(vocab.index(w));
  return desc;
}

void TextEncoder::register_params(ParameterStore& store, Rng& rng) const {
  store.create(prefix + ".emb", vocab_size, hidden_size, hidden_size, rng);
  lstm().register_params(store, rng);
  store.create(prefix + ".proj.W", hidden_size, 4 * hidden_size, 4 * hidden_size, rng);
  store.create(prefix + ".proj.b", 1, hidden_size, 4 * hidden_size, rng);
}

Var TextEncoder::encode(Graph& g, GraphParams& p, const std::vector<int>& tokens) const {
  if (tokens.empty()) throw std::invalid_argument("encode_text: empty token list");
  Var embedded = g.select_rows(p[prefix + ".emb"], tokens);
  const LstmStack stack = lstm();
  LstmStack::State state = stack.zero_state(g);
  stack.run(g, p, embedded, state);
  Var summary = g.concat_cols(g.concat_cols(state.h[0], state.c[0]),
                              g.concat_cols(state.h[1], state.c[1]));
  return linear(g, summary, p[prefix + ".proj.W"], p[prefix + ".proj.b"]);
}

}  // namespace dvgan
