#pragma once

#include "dvgan/graph.hpp"
#include "dvgan/lstm.hpp"
#include "dvgan/motion.hpp"
#include "dvgan/params.hpp"
#include "dvgan/rng.hpp"

#include <string>
#include <vector>

namespace dvgan {

// Per-resolution validation scores s_i, learned mixing weights w_i and the
// combined critic value y = sum_i exp(w_i) * s_i.
struct ValidationReport {
  std::vector<double> scores;
  std::vector<double> weights;
  double value = 0.0;
};

// RNN-critic counterpart: y = w_a * s_a + w_d * s_d.
struct RnnValidationReport {
  double frame_score = 0.0;
  double diff_score = 0.0;
  double frame_weight = 0.0;
  double diff_weight = 0.0;
  double value = 0.0;
};

// Translation augmentation: shift content by s frames (positive = towards
// later frames), zero-filling the vacated span. s is drawn uniformly from
// the integers [-floor(N/2), floor(N/2)].
Eigen::Index draw_shift(Eigen::Index frames, Rng& rng);
MotionClip temporal_shift(const MotionClip& clip, Rng& rng);
Mat shift_frames(const Mat& frames, Eigen::Index shift);
Var shift_var(Graph& g, Var clip, Eigen::Index shift);

// Dense-validation convolutional critic. A size-1 convolution encodes the
// N x M clip to N x k; log2(N) residual average-pool levels halve the frame
// count down to one; a shared-over-frames two-layer MLP (size-1
// convolutions) validates every frame of every resolution against the text
// representation, and the per-resolution means are mixed into y.
struct CnnDiscriminator {
  std::string prefix = "D.cnn";
  Eigen::Index frames = 0;   // N, power of two
  Eigen::Index dof = 0;      // M
  Eigen::Index hidden = 256; // k
  int kernel = 3;            // residual-path convolutions

  int levels() const;                       // residual module count: log2(N)
  int validators() const { return levels() + 1; }

  void register_params(ParameterStore& store, Rng& rng) const;

  // Critic value as a 1x1 graph node. `scores`, when given, receives the
  // per-resolution s_i (index 0 = coarsest, one frame).
  Var forward(Graph& g, GraphParams& p, Var clip, Var h_txt,
              std::vector<Var>* scores = nullptr) const;

  ValidationReport report(Graph& g, GraphParams& p, const Mat& clip, Var h_txt) const;
};

// Recurrent critic: a pose pathway encodes every frame, a dynamics pathway
// runs adjacent-frame differences through a 2-layer LSTM; each pathway is
// validated per frame against the text and averaged.
struct RnnDiscriminator {
  std::string prefix = "D.rnn";
  Eigen::Index dof = 0;
  Eigen::Index hidden = 256;
  // Validate the recurrent outputs h (prose reading). When false, validate
  // the encoded differences d directly (literal equation reading).
  bool validate_recurrent = true;

  void register_params(ParameterStore& store, Rng& rng) const;
  Var forward(Graph& g, GraphParams& p, Var clip, Var h_txt,
              Var* frame_score = nullptr, Var* diff_score = nullptr) const;
  RnnValidationReport report(Graph& g, GraphParams& p, const Mat& clip, Var h_txt) const;

 private:
  LstmStack lstm() const { return LstmStack{prefix + ".lstm", 2, hidden, hidden}; }
};

}  // namespace dvgan
