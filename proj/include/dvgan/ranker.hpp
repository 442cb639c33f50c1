#pragma once

#include "dvgan/graph.hpp"
#include "dvgan/lstm.hpp"
#include "dvgan/motion.hpp"
#include "dvgan/params.hpp"
#include "dvgan/text.hpp"

#include <string>
#include <vector>

namespace dvgan {

enum class RankerMode { kCnn, kRnn };
std::string to_string(RankerMode m);
RankerMode ranker_mode_from_string(const std::string& s);

// Dual-encoder matching network. The animation embedding is L2-normalized
// (norm floor 1e-12) and dotted with the unnormalized text embedding.
struct RankerNets {
  std::string prefix = "R";
  RankerMode mode = RankerMode::kRnn;
  Eigen::Index frames = 0;   // N
  Eigen::Index dof = 0;      // M
  Eigen::Index hidden = 1024;
  int kernel = 3;            // CNN residual-path convolutions

  TextEncoder text() const { return TextEncoder{prefix + ".txt", vocab_size, hidden}; }
  int vocab_size = 0;

  void register_params(ParameterStore& store, Rng& rng) const;

  // Animation embedding (1 x k), not yet normalized.
  Var embed_animation(Graph& g, GraphParams& p, Var clip) const;

  // Matching score F(S, A) as a 1x1 node.
  Var score(Graph& g, GraphParams& p, Var h_txt, Var clip) const;

  // Convenience: scores of one clip against K candidate encodings.
  Var scores_against(Graph& g, GraphParams& p, const std::vector<Var>& h_txts, Var clip) const;
};

struct RankerTrainConfig {
  int candidates = 15;  // K
  int epochs = 100;
  double lr = 1e-4;
  double beta1 = 0.9;   // plain Adam defaults for the ranker
  double beta2 = 0.999;
  int batch = 16;
  std::uint64_t seed = 0;
  Eigen::Index frames = 32;
  Eigen::Index hidden = 1024;
  RankerMode mode = RankerMode::kRnn;

  std::string to_json() const;
  static RankerTrainConfig from_json(const std::string& text);
};

// (clip window source, tokenized description, description id) triples.
struct RankerExample {
  const MotionClip* clip = nullptr;  // normalized space, >= N frames
  int description_id = 0;
};

struct RankerTrainData {
  std::vector<RankerExample> examples;
  // Distinct descriptions; tokens per description id.
  std::vector<std::vector<int>> description_tokens;
};

struct RankerTrainStats {
  std::vector<double> epoch_loss;
};

// Negative log-likelihood over K candidates (true description plus K-1
// distractors drawn uniformly without replacement).
RankerTrainStats train_ranker(const RankerNets& nets, ParameterStore& params,
                              const RankerTrainData& data, const RankerTrainConfig& config,
                              Rng& rng);

// Score matrix (clips x descriptions) with a shared parameter snapshot.
Mat score_matrix(const RankerNets& nets, const ParameterStore& params,
                 const std::vector<Mat>& clips,
                 const std::vector<std::vector<int>>& description_tokens);

}  // namespace dvgan
