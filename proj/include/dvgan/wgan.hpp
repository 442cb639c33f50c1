#pragma once

#include "dvgan/checkpoint.hpp"
#include "dvgan/discriminator.hpp"
#include "dvgan/generator.hpp"
#include "dvgan/graph.hpp"
#include "dvgan/motion.hpp"
#include "dvgan/params.hpp"
#include "dvgan/text.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dvgan {

// Scalar critic over one clip, used by the loss builders so tests can
// substitute analytic critics. The indexed form receives the sample index,
// letting the training loop condition each sample on its own description.
using CriticFn = std::function<Var(Graph&, Var)>;
using IndexedCriticFn = std::function<Var(Graph&, size_t, Var)>;

// lambda * mean_i (||d critic / d x||_2 - 1)^2 evaluated at the given
// points. The norm runs over all N x M coordinates of a sample. Built out
// of graph nodes end to end, so it can be differentiated again w.r.t. the
// critic's parameters.
Var gradient_penalty(Graph& g, const IndexedCriticFn& critic, const std::vector<Var>& points,
                     double lambda);
Var gradient_penalty(Graph& g, const CriticFn& critic, const std::vector<Var>& points,
                     double lambda);

// Interpolates x_hat = eps * real + (1 - eps) * fake, one eps per sample.
std::vector<Var> interpolate_pairs(Graph& g, const std::vector<Var>& real,
                                   const std::vector<Var>& fake,
                                   const std::vector<double>& eps);

struct LossPair {
  Var d_loss;        // -(mean D(real) - mean D(fake)) + penalty
  Var g_loss;        // -mean D(fake)
  Var critic_real;   // mean D(real)
  Var critic_fake;   // mean D(fake)
  Var penalty;
};

// Builds both WGAN-GP objectives in one graph. Raw critic values, no
// logarithm. The penalty is evaluated at interpolates between the given
// (unshifted) real/fake pairs.
LossPair wgan_gp_losses(Graph& g, const IndexedCriticFn& critic, const std::vector<Var>& real,
                        const std::vector<Var>& fake, const std::vector<double>& eps,
                        double lambda);
LossPair wgan_gp_losses(Graph& g, const CriticFn& critic, const std::vector<Var>& real,
                        const std::vector<Var>& fake, const std::vector<double>& eps,
                        double lambda);

enum class GeneratorMode { kCnn, kRnn };
enum class DiscriminatorMode { kCnn, kRnn };

std::string to_string(GeneratorMode m);
std::string to_string(DiscriminatorMode m);
GeneratorMode generator_mode_from_string(const std::string& s);
DiscriminatorMode discriminator_mode_from_string(const std::string& s);

struct TrainingConfig {
  double lambda = 10.0;
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  long iterations = 20000;
  int d_steps_per_g = 10;
  int batch = 64;
  Eigen::Index frames = 32;   // N
  double rate = 4.0;          // f, Hz
  Eigen::Index hidden = 256;  // k
  GeneratorMode generator = GeneratorMode::kCnn;
  DiscriminatorMode discriminator = DiscriminatorMode::kCnn;
  bool final_cut = true;
  bool augment = true;
  std::uint64_t seed = 0;
  long checkpoint_interval = 1000;

  void validate() const;
  std::string to_json() const;
  static TrainingConfig from_json(const std::string& text);
};

// Generator + discriminator + one text encoder per side, over a shared
// parameter store. The discriminator owns an independent text-encoder copy
// so d-steps and g-steps touch disjoint parameter sets.
struct GanNets {
  TrainingConfig config;
  Eigen::Index dof = 0;
  TextEncoder gen_text, disc_text;
  CnnGenerator cnn_gen;
  RnnGenerator rnn_gen;
  CnnDiscriminator cnn_disc;
  RnnDiscriminator rnn_disc;

  static GanNets build(const TrainingConfig& config, Eigen::Index dof, int vocab_size);

  void register_params(ParameterStore& store, Rng& rng) const;

  LatentStack sample_latents(Rng& rng) const;
  Eigen::Index tape_frames() const;

  Var generator_tape(Graph& g, GraphParams& p, const LatentStack& z, Var h_txt) const;
  Var discriminate(Graph& g, GraphParams& p, Var clip, Var h_txt) const;

  // Generates one N x M clip in normalized space (tape + final cut).
  Mat generate_normalized(ParameterStore& store, const std::vector<int>& tokens, Rng& rng) const;
};

// One line per outer iteration, JSON-encoded.
struct TrainingLogEntry {
  long iteration = 0;
  long d_updates = 0;
  long g_updates = 0;
  double critic_real = 0.0;
  double critic_fake = 0.0;
  double penalty = 0.0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double d_grad_norm = 0.0;
  double g_grad_norm = 0.0;
  double wall_ms = 0.0;

  std::string to_json() const;
};

// Clips paired with tokenized descriptions, already normalized.
struct TrainingSet {
  std::vector<MotionClip> clips;          // normalized space
  std::vector<std::vector<int>> tokens;   // per clip
};

class Trainer {
 public:
  Trainer(const TrainingConfig& config, TrainingSet data, int vocab_size);

  // Runs `iterations` outer iterations (10 d-steps then 1 g-step each by
  // default). Appends one log entry per iteration when `log` is given and
  // checkpoints every config.checkpoint_interval iterations when
  // `checkpoint_path` is non-empty.
  void run(const std::string& checkpoint_path = {}, std::ostream* log = nullptr,
           const std::string& extra_config_json = {});

  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }
  const GanNets& nets() const { return nets_; }
  Rng& rng() { return rng_; }
  long iterations_done() const { return iteration_; }

  Checkpoint make_checkpoint(const std::string& extra_config_json = {}) const;
  void restore(const Checkpoint& ck);

 private:
  struct Batch {
    std::vector<Mat> real;
    std::vector<const std::vector<int>*> tokens;
  };
  Batch sample_batch();
  void d_step(TrainingLogEntry& entry);
  void g_step(TrainingLogEntry& entry);

  TrainingConfig config_;
  TrainingSet data_;
  GanNets nets_;
  ParameterStore params_;
  AdamOptimizer d_opt_, g_opt_;
  Rng rng_;
  long iteration_ = 0;
  long d_updates_ = 0;
  long g_updates_ = 0;
};

}  // namespace dvgan
