#pragma once

#include "dvgan/graph.hpp"
#include "dvgan/lstm.hpp"
#include "dvgan/motion.hpp"
#include "dvgan/params.hpp"
#include "dvgan/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dvgan {

// Gaussian latent codes. CNN mode holds one 2^i x k matrix per level
// i = 0..levels; RNN mode holds one 1 x k vector per generated tape frame.
struct LatentStack {
  std::vector<Mat> entries;

  static LatentStack sample_cnn(int levels, Eigen::Index hidden, Rng& rng);
  static LatentStack sample_rnn(Eigen::Index tape_frames, Eigen::Index hidden, Rng& rng);
};

// Uniformly cut a consecutive length-N window out of a 2N-frame tape.
// All N+1 start offsets {0..N} are admissible.
MotionClip final_cut(const MotionClip& tape, Rng& rng);
Eigen::Index draw_cut_offset(Eigen::Index n, Rng& rng);

// Progressive-upsampling convolutional generator. Starting from a single
// frame, each residual level doubles the frame count, injecting per-level
// text-conditioned plots; a size-1 convolution decodes hidden channels to
// DOF. With the final cut enabled the top level is one doubling past N, so
// the decoded tape has 2N frames.
struct CnnGenerator {
  std::string prefix = "G.cnn";
  Eigen::Index frames = 0;   // N, power of two
  Eigen::Index dof = 0;      // M
  Eigen::Index hidden = 256; // k
  bool final_cut_enabled = true;
  int kernel = 3;

  int levels() const;        // residual module count: log2(N) (+1 with cut)
  int plot_modules() const { return levels() + 1; }
  Eigen::Index tape_frames() const { return Eigen::Index{1} << levels(); }

  void register_params(ParameterStore& store, Rng& rng) const;

  // Decoded tape (tape_frames x M) in normalized space. `level_shapes`,
  // when given, receives the (frames, channels) of every h_i.
  Var forward_tape(Graph& g, GraphParams& p, const LatentStack& z, Var h_txt,
                   std::vector<std::pair<Eigen::Index, Eigen::Index>>* level_shapes = nullptr) const;
};

// Recurrent generator: an MLP plots the initial frame, then an LSTM emits
// per-frame differences from [Linear(a_{t-1}), plot_t]. Seeded runs splice
// ground-truth frames in for t < seed length while still advancing the
// recurrent state over them.
struct RnnGenerator {
  std::string prefix = "G.rnn";
  Eigen::Index frames = 0;   // N
  Eigen::Index dof = 0;      // M
  Eigen::Index hidden = 256; // k
  bool final_cut_enabled = true;

  Eigen::Index tape_frames() const { return final_cut_enabled ? 2 * frames : frames; }

  void register_params(ParameterStore& store, Rng& rng) const;

  // Unseeded tape of `out_frames` rows (defaults to tape_frames()).
  // z must hold one latent per row.
  Var forward_tape(Graph& g, GraphParams& p, const LatentStack& z, Var h_txt,
                   Eigen::Index out_frames = -1) const;

  // Seeded completion: emits exactly `frames` rows whose first seed.rows()
  // equal `seed` (normalized space). No final cut applies.
  Var forward_completion(Graph& g, GraphParams& p, const LatentStack& z, Var h_txt,
                         const Mat& seed) const;

 private:
  LstmStack lstm() const { return LstmStack{prefix + ".lstm", 2, 2 * hidden, hidden}; }
  Var plot(Graph& g, GraphParams& p, const std::string& base, Var z_row, Var h_txt) const;
  Var step_frame(Graph& g, GraphParams& p, Var prev, Var plot_t, LstmStack::State& state) const;
};

}  // namespace dvgan
