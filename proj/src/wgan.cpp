#include "dvgan/wgan.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace dvgan {

using ordered_json = nlohmann::ordered_json;

namespace {

// Norm floor 1e-12: the eps inside the sqrt keeps the penalty differentiable
// at zero-gradient points without perturbing the analytic values.
constexpr double kNormEps = 1e-24;

Var mean_of(Graph& g, const std::vector<Var>& scalars) {
  return g.mean_all(g.concat_rows(scalars));
}

}  // namespace

Var gradient_penalty(Graph& g, const IndexedCriticFn& critic,
                     const std::vector<Var>& points, double lambda) {
  if (points.empty()) throw std::invalid_argument("gradient_penalty: no points");
  std::vector<Var> terms;
  terms.reserve(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    Var x = points[i];
    Var y = critic(g, i, x);
    Var gx = g.gradients(y, {x})[0];
    if (!g.value(gx).allFinite())
      throw std::runtime_error("gradient_penalty: non-finite critic gradient");
    Var norm = g.pow_const(g.add(g.sum_all(g.mul(gx, gx)), g.scalar(kNormEps)), 0.5);
    Var excess = g.sub(norm, g.scalar(1.0));
    terms.push_back(g.mul(excess, excess));
  }
  return g.scalar_mul(mean_of(g, terms), lambda);
}

Var gradient_penalty(Graph& g, const CriticFn& critic, const std::vector<Var>& points,
                     double lambda) {
  return gradient_penalty(
      g, [&critic](Graph& gg, size_t, Var x) { return critic(gg, x); }, points, lambda);
}

std::vector<Var> interpolate_pairs(Graph& g, const std::vector<Var>& real,
                                   const std::vector<Var>& fake,
                                   const std::vector<double>& eps) {
  if (real.size() != fake.size() || real.size() != eps.size())
    throw std::invalid_argument("interpolate_pairs: size mismatch");
  std::vector<Var> points;
  points.reserve(real.size());
  for (size_t i = 0; i < real.size(); ++i) {
    points.push_back(g.add(g.scalar_mul(real[i], eps[i]), g.scalar_mul(fake[i], 1.0 - eps[i])));
  }
  return points;
}

LossPair wgan_gp_losses(Graph& g, const IndexedCriticFn& critic,
                        const std::vector<Var>& real, const std::vector<Var>& fake,
                        const std::vector<double>& eps, double lambda) {
  if (real.empty() || real.size() != fake.size())
    throw std::invalid_argument("wgan_gp_losses: batch mismatch");
  std::vector<Var> real_scores, fake_scores;
  for (size_t i = 0; i < real.size(); ++i) {
    real_scores.push_back(critic(g, i, real[i]));
    fake_scores.push_back(critic(g, i, fake[i]));
  }
  LossPair out;
  out.critic_real = mean_of(g, real_scores);
  out.critic_fake = mean_of(g, fake_scores);
  out.penalty = gradient_penalty(g, critic, interpolate_pairs(g, real, fake, eps), lambda);
  if (!std::isfinite(g.value(out.penalty)(0, 0)))
    throw std::runtime_error("wgan_gp_losses: non-finite penalty");
  out.d_loss = g.add(g.neg(g.sub(out.critic_real, out.critic_fake)), out.penalty);
  out.g_loss = g.neg(out.critic_fake);
  if (!std::isfinite(g.value(out.d_loss)(0, 0)) || !std::isfinite(g.value(out.g_loss)(0, 0)))
    throw std::runtime_error("wgan_gp_losses: non-finite loss");
  return out;
}

LossPair wgan_gp_losses(Graph& g, const CriticFn& critic, const std::vector<Var>& real,
                        const std::vector<Var>& fake, const std::vector<double>& eps,
                        double lambda) {
  return wgan_gp_losses(
      g, [&critic](Graph& gg, size_t, Var x) { return critic(gg, x); }, real, fake, eps, lambda);
}

std::string to_string(GeneratorMode m) { return m == GeneratorMode::kCnn ? "cnn" : "rnn"; }
std::string to_string(DiscriminatorMode m) {
  return m == DiscriminatorMode::kCnn ? "cnn" : "rnn";
}

GeneratorMode generator_mode_from_string(const std::string& s) {
  if (s == "cnn") return GeneratorMode::kCnn;
  if (s == "rnn") return GeneratorMode::kRnn;
  throw std::invalid_argument("unknown generator mode: " + s);
}

DiscriminatorMode discriminator_mode_from_string(const std::string& s) {
  if (s == "cnn") return DiscriminatorMode::kCnn;
  if (s == "rnn") return DiscriminatorMode::kRnn;
  throw std::invalid_argument("unknown discriminator mode: " + s);
}

void TrainingConfig::validate() const {
  if (lambda < 0) throw std::invalid_argument("config: lambda must be >= 0");
  if (lr <= 0) throw std::invalid_argument("config: lr must be positive");
  if (iterations < 0) throw std::invalid_argument("config: iterations must be >= 0");
  if (d_steps_per_g < 1) throw std::invalid_argument("config: d_steps_per_g must be >= 1");
  if (batch < 1) throw std::invalid_argument("config: batch must be >= 1");
  if (frames < 2 || (frames & (frames - 1)) != 0)
    throw std::invalid_argument("config: frames must be a power of two >= 2");
  if (hidden < 1) throw std::invalid_argument("config: hidden must be >= 1");
  if (rate <= 0) throw std::invalid_argument("config: rate must be positive");
}

std::string TrainingConfig::to_json() const {
  ordered_json j;
  j["lambda"] = lambda;
  j["lr"] = lr;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["iterations"] = iterations;
  j["d_steps_per_g"] = d_steps_per_g;
  j["batch"] = batch;
  j["frames"] = frames;
  j["rate"] = rate;
  j["hidden"] = hidden;
  j["generator"] = to_string(generator);
  j["discriminator"] = to_string(discriminator);
  j["final_cut"] = final_cut;
  j["augment"] = augment;
  j["seed"] = seed;
  j["checkpoint_interval"] = checkpoint_interval;
  return j.dump();
}

TrainingConfig TrainingConfig::from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  TrainingConfig c;
  c.lambda = j.at("lambda").get<double>();
  c.lr = j.at("lr").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.iterations = j.at("iterations").get<long>();
  c.d_steps_per_g = j.at("d_steps_per_g").get<int>();
  c.batch = j.at("batch").get<int>();
  c.frames = j.at("frames").get<Eigen::Index>();
  c.rate = j.at("rate").get<double>();
  c.hidden = j.at("hidden").get<Eigen::Index>();
  c.generator = generator_mode_from_string(j.at("generator").get<std::string>());
  c.discriminator = discriminator_mode_from_string(j.at("discriminator").get<std::string>());
  c.final_cut = j.at("final_cut").get<bool>();
  c.augment = j.at("augment").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.checkpoint_interval = j.at("checkpoint_interval").get<long>();
  return c;
}

GanNets GanNets::build(const TrainingConfig& config, Eigen::Index dof, int vocab_size) {
  config.validate();
  GanNets nets;
  nets.config = config;
  nets.dof = dof;
  nets.gen_text = TextEncoder{"G.txt", vocab_size, config.hidden};
  nets.disc_text = TextEncoder{"D.txt", vocab_size, config.hidden};
  nets.cnn_gen = CnnGenerator{"G.cnn", config.frames, dof, config.hidden, config.final_cut};
  nets.rnn_gen = RnnGenerator{"G.rnn", config.frames, dof, config.hidden, config.final_cut};
  nets.cnn_disc = CnnDiscriminator{"D.cnn", config.frames, dof, config.hidden};
  nets.rnn_disc = RnnDiscriminator{"D.rnn", dof, config.hidden};
  return nets;
}

void GanNets::register_params(ParameterStore& store, Rng& rng) const {
  gen_text.register_params(store, rng);
  if (config.generator == GeneratorMode::kCnn)
    cnn_gen.register_params(store, rng);
  else
    rnn_gen.register_params(store, rng);
  disc_text.register_params(store, rng);
  if (config.discriminator == DiscriminatorMode::kCnn)
    cnn_disc.register_params(store, rng);
  else
    rnn_disc.register_params(store, rng);
}

LatentStack GanNets::sample_latents(Rng& rng) const {
  if (config.generator == GeneratorMode::kCnn)
    return LatentStack::sample_cnn(cnn_gen.levels(), config.hidden, rng);
  return LatentStack::sample_rnn(rnn_gen.tape_frames(), config.hidden, rng);
}

Eigen::Index GanNets::tape_frames() const {
  return config.generator == GeneratorMode::kCnn ? cnn_gen.tape_frames()
                                                 : rnn_gen.tape_frames();
}

Var GanNets::generator_tape(Graph& g, GraphParams& p, const LatentStack& z, Var h_txt) const {
  if (config.generator == GeneratorMode::kCnn) return cnn_gen.forward_tape(g, p, z, h_txt);
  return rnn_gen.forward_tape(g, p, z, h_txt);
}

Var GanNets::discriminate(Graph& g, GraphParams& p, Var clip, Var h_txt) const {
  if (config.discriminator == DiscriminatorMode::kCnn)
    return cnn_disc.forward(g, p, clip, h_txt);
  return rnn_disc.forward(g, p, clip, h_txt);
}

Mat GanNets::generate_normalized(ParameterStore& store, const std::vector<int>& tokens,
                                 Rng& rng) const {
  Graph g;
  GraphParams p(g, store, /*trainable=*/false);
  const LatentStack z = sample_latents(rng);
  Var h_txt = gen_text.encode(g, p, tokens);
  Var tape = generator_tape(g, p, z, h_txt);
  Mat frames = g.value(tape);
  if (config.final_cut) {
    const Eigen::Index offset = draw_cut_offset(config.frames, rng);
    return frames.middleRows(offset, config.frames);
  }
  return frames;
}

std::string TrainingLogEntry::to_json() const {
  ordered_json j;
  j["iteration"] = iteration;
  j["d_updates"] = d_updates;
  j["g_updates"] = g_updates;
  j["critic_real"] = critic_real;
  j["critic_fake"] = critic_fake;
  j["penalty"] = penalty;
  j["d_loss"] = d_loss;
  j["g_loss"] = g_loss;
  j["d_grad_norm"] = d_grad_norm;
  j["g_grad_norm"] = g_grad_norm;
  j["wall_ms"] = wall_ms;
  return j.dump();
}

Trainer::Trainer(const TrainingConfig& config, TrainingSet data, int vocab_size)
    : config_(config),
      data_(std::move(data)),
      d_opt_(config.lr, config.beta1, config.beta2),
      g_opt_(config.lr, config.beta1, config.beta2),
      rng_(config.seed) {
  config_.validate();
  if (data_.clips.empty()) throw std::invalid_argument("Trainer: empty dataset");
  if (data_.clips.size() != data_.tokens.size())
    throw std::invalid_argument("Trainer: clip/token count mismatch");
  for (const MotionClip& clip : data_.clips) {
    if (clip.frame_count() < config_.frames)
      throw std::invalid_argument("Trainer: dataset clip shorter than N frames");
  }
  nets_ = GanNets::build(config_, data_.clips.front().dof(), vocab_size);
  nets_.register_params(params_, rng_);
}

Trainer::Batch Trainer::sample_batch() {
  Batch batch;
  for (int i = 0; i < config_.batch; ++i) {
    const auto idx =
        static_cast<size_t>(rng_.uniform_int(0, static_cast<long>(data_.clips.size()) - 1));
    batch.real.push_back(sample_clip(data_.clips[idx], config_.frames, rng_).frames);
    batch.tokens.push_back(&data_.tokens[idx]);
  }
  return batch;
}

void Trainer::d_step(TrainingLogEntry& entry) {
  const Batch batch = sample_batch();
  const auto b = static_cast<size_t>(config_.batch);

  // Fakes are generated without gradient tracking: d-steps update only the
  // discriminator side.
  std::vector<Mat> fake(b);
  {
    Graph g;
    GraphParams frozen(g, params_, /*trainable=*/false);
    for (size_t i = 0; i < b; ++i) {
      const LatentStack z = nets_.sample_latents(rng_);
      Var h_txt = nets_.gen_text.encode(g, frozen, *batch.tokens[i]);
      Var tape = nets_.generator_tape(g, frozen, z, h_txt);
      if (nets_.config.final_cut) {
        const Eigen::Index offset = draw_cut_offset(config_.frames, rng_);
        fake[i] = g.value(tape).middleRows(offset, config_.frames);
      } else {
        fake[i] = g.value(tape);
      }
    }
  }

  Graph g;
  GraphParams p(g, params_, /*trainable=*/true);
  std::vector<Var> h_txt(b);
  for (size_t i = 0; i < b; ++i) h_txt[i] = nets_.disc_text.encode(g, p, *batch.tokens[i]);

  std::vector<Var> real_in(b), fake_in(b);
  for (size_t i = 0; i < b; ++i) {
    Mat real = batch.real[i];
    Mat fk = fake[i];
    if (config_.augment) {
      real = shift_frames(real, draw_shift(config_.frames, rng_));
      fk = shift_frames(fk, draw_shift(config_.frames, rng_));
    }
    real_in[i] = g.constant(real);
    fake_in[i] = g.constant(fk);
  }

  std::vector<Var> real_scores, fake_scores;
  for (size_t i = 0; i < b; ++i) {
    real_scores.push_back(nets_.discriminate(g, p, real_in[i], h_txt[i]));
    fake_scores.push_back(nets_.discriminate(g, p, fake_in[i], h_txt[i]));
  }
  Var critic_real = g.mean_all(g.concat_rows(real_scores));
  Var critic_fake = g.mean_all(g.concat_rows(fake_scores));

  // Penalty interpolates pair the unshifted real and fake samples.
  std::vector<Var> raw_real(b), raw_fake(b);
  std::vector<double> eps(b);
  for (size_t i = 0; i < b; ++i) {
    raw_real[i] = g.constant(batch.real[i]);
    raw_fake[i] = g.constant(fake[i]);
    eps[i] = rng_.uniform01();
  }
  Var penalty = gradient_penalty(
      g,
      [&](Graph& gg, size_t i, Var x) { return nets_.discriminate(gg, p, x, h_txt[i]); },
      interpolate_pairs(g, raw_real, raw_fake, eps), config_.lambda);

  Var d_loss = g.add(g.neg(g.sub(critic_real, critic_fake)), penalty);
  if (!std::isfinite(g.value(d_loss)(0, 0)))
    throw std::runtime_error("Trainer: non-finite discriminator loss");

  const std::map<std::string, Mat> grads = p.gradients(d_loss);
  double norm2 = 0.0;
  for (const auto& [name, grad] : grads) norm2 += grad.squaredNorm();
  d_opt_.step(params_, grads);
  ++d_updates_;

  entry.critic_real = g.value(critic_real)(0, 0);
  entry.critic_fake = g.value(critic_fake)(0, 0);
  entry.penalty = g.value(penalty)(0, 0);
  entry.d_loss = g.value(d_loss)(0, 0);
  entry.d_grad_norm = std::sqrt(norm2);
}

void Trainer::g_step(TrainingLogEntry& entry) {
  const Batch batch = sample_batch();
  const auto b = static_cast<size_t>(config_.batch);

  Graph g;
  GraphParams gen_params(g, params_, /*trainable=*/true);
  GraphParams disc_params(g, params_, /*trainable=*/false);

  std::vector<Var> scores;
  for (size_t i = 0; i < b; ++i) {
    const LatentStack z = nets_.sample_latents(rng_);
    Var h_txt_g = nets_.gen_text.encode(g, gen_params, *batch.tokens[i]);
    Var tape = nets_.generator_tape(g, gen_params, z, h_txt_g);
    Var clip = tape;
    if (nets_.config.final_cut) {
      const Eigen::Index offset = draw_cut_offset(config_.frames, rng_);
      clip = g.slice_rows(tape, offset, offset + config_.frames);
    }
    if (config_.augment) clip = shift_var(g, clip, draw_shift(config_.frames, rng_));
    Var h_txt_d = nets_.disc_text.encode(g, disc_params, *batch.tokens[i]);
    scores.push_back(nets_.discriminate(g, disc_params, clip, h_txt_d));
  }
  Var g_loss = g.neg(g.mean_all(g.concat_rows(scores)));
  if (!std::isfinite(g.value(g_loss)(0, 0)))
    throw std::runtime_error("Trainer: non-finite generator loss");

  const std::map<std::string, Mat> grads = gen_params.gradients(g_loss);
  double norm2 = 0.0;
  for (const auto& [name, grad] : grads) norm2 += grad.squaredNorm();
  g_opt_.step(params_, grads);
  ++g_updates_;

  entry.g_loss = g.value(g_loss)(0, 0);
  entry.g_grad_norm = std::sqrt(norm2);
}

void Trainer::run(const std::string& checkpoint_path, std::ostream* log,
                  const std::string& extra_config_json) {
  using clock = std::chrono::steady_clock;
  for (long it = 0; it < config_.iterations; ++it) {
    const auto start = clock::now();
    TrainingLogEntry entry;
    for (int d = 0; d < config_.d_steps_per_g; ++d) d_step(entry);
    g_step(entry);
    ++iteration_;
    entry.iteration = iteration_;
    entry.d_updates = d_updates_;
    entry.g_updates = g_updates_;
    entry.wall_ms =
        std::chrono::duration<double, std::milli>(clock::now() - start).count();
    if (log) (*log) << entry.to_json() << "\n";
    if (!checkpoint_path.empty() && config_.checkpoint_interval > 0 &&
        (iteration_ % config_.checkpoint_interval == 0 || it + 1 == config_.iterations)) {
      make_checkpoint(extra_config_json).save(checkpoint_path);
    }
  }
  if (!checkpoint_path.empty() && config_.iterations == 0)
    make_checkpoint(extra_config_json).save(checkpoint_path);
}

Checkpoint Trainer::make_checkpoint(const std::string& extra_config_json) const {
  Checkpoint ck;
  ordered_json j;
  j["training"] = ordered_json::parse(config_.to_json());
  if (!extra_config_json.empty()) j["artifact"] = ordered_json::parse(extra_config_json);
  ck.config_json = j.dump();
  ck.params = params_;
  for (const auto& [name, slot] : d_opt_.state()) ck.optimizer_state.emplace(name, slot);
  for (const auto& [name, slot] : g_opt_.state()) ck.optimizer_state.emplace(name, slot);
  ck.rng_state = rng_.serialize();
  return ck;
}

void Trainer::restore(const Checkpoint& ck) {
  params_ = ck.params;
  for (const auto& [name, slot] : ck.optimizer_state) {
    if (name.rfind("D.", 0) == 0)
      d_opt_.state()[name] = slot;
    else
      g_opt_.state()[name] = slot;
  }
  rng_.deserialize(ck.rng_state);
}

}  // namespace dvgan
