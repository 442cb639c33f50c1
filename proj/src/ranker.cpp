#include "dvgan/ranker.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>

namespace dvgan {

using ordered_json = nlohmann::ordered_json;

namespace {

// Norm floor 1e-12 squared, added under the sqrt.
constexpr double kNormEps = 1e-24;

int log2_exact(Eigen::Index n) {
  if (n < 1 || (n & (n - 1)) != 0)
    throw std::invalid_argument("RankerNets: frames must be a power of two");
  int l = 0;
  while ((Eigen::Index{1} << l) < n) ++l;
  return l;
}

}  // namespace

std::string to_string(RankerMode m) { return m == RankerMode::kCnn ? "cnn" : "rnn"; }

RankerMode ranker_mode_from_string(const std::string& s) {
  if (s == "cnn") return RankerMode::kCnn;
  if (s == "rnn") return RankerMode::kRnn;
  throw std::invalid_argument("unknown ranker mode: " + s);
}

void RankerNets::register_params(ParameterStore& store, Rng& rng) const {
  const Eigen::Index k = hidden;
  text().register_params(store, rng);
  store.create(prefix + ".enc.W", k, dof, dof, rng);
  store.create(prefix + ".enc.b", 1, k, dof, rng);
  if (mode == RankerMode::kCnn) {
    for (int i = log2_exact(frames) - 1; i >= 0; --i) {
      const std::string base = prefix + ".res" + std::to_string(i);
      store.create(base + ".c1.W", k, kernel * k, kernel * k, rng);
      store.create(base + ".c1.b", 1, k, kernel * k, rng);
      store.create(base + ".c2.W", k, kernel * k, kernel * k, rng);
      store.create(base + ".c2.b", 1, k, kernel * k, rng);
    }
  } else {
    store.create(prefix + ".denc.W", k, dof, dof, rng);
    store.create(prefix + ".denc.b", 1, k, dof, rng);
    LstmStack{prefix + ".lstm", 2, k, k}.register_params(store, rng);
    store.create(prefix + ".dproj.W", k, k, k, rng);
    store.create(prefix + ".dproj.b", 1, k, k, rng);
    store.create(prefix + ".comb.W", k, 2 * k, 2 * k, rng);
    store.create(prefix + ".comb.b", 1, k, 2 * k, rng);
  }
}

Var RankerNets::embed_animation(Graph& g, GraphParams& p, Var clip) const {
  if (g.cols(clip) != dof) throw std::invalid_argument("ranker: clip width != DOF");
  if (mode == RankerMode::kCnn) {
    if (g.rows(clip) != frames)
      throw std::invalid_argument("ranker: clip must have N frames");
    Var h = linear(g, clip, p[prefix + ".enc.W"], p[prefix + ".enc.b"]);
    for (int i = log2_exact(frames) - 1; i >= 0; --i) {
      const std::string base = prefix + ".res" + std::to_string(i);
      Var refined = conv1d(g, h, p[base + ".c1.W"], p[base + ".c1.b"], kernel);
      Var pooled = g.relu(g.downsample2x(refined));
      Var residual = conv1d(g, pooled, p[base + ".c2.W"], p[base + ".c2.b"], kernel);
      h = g.add(g.downsample2x(h), residual);
    }
    return h;  // 1 x k
  }
  const Eigen::Index n = g.rows(clip);
  if (n < 2) throw std::invalid_argument("ranker: need at least 2 frames");
  Var poses = linear(g, clip, p[prefix + ".enc.W"], p[prefix + ".enc.b"]);
  Var diffs = g.sub(g.slice_rows(clip, 1, n), g.slice_rows(clip, 0, n - 1));
  Var v = linear(g, diffs, p[prefix + ".denc.W"], p[prefix + ".denc.b"]);
  const LstmStack stack{prefix + ".lstm", 2, hidden, hidden};
  LstmStack::State state = stack.zero_state(g);
  Var h_d = stack.run(g, p, v, state);
  Var dyn = g.mean_rows(linear(g, h_d, p[prefix + ".dproj.W"], p[prefix + ".dproj.b"]));
  Var pose_mean = g.mean_rows(poses);
  return linear(g, g.concat_cols(dyn, pose_mean), p[prefix + ".comb.W"], p[prefix + ".comb.b"]);
}

Var RankerNets::score(Graph& g, GraphParams& p, Var h_txt, Var clip) const {
  Var anim = embed_animation(g, p, clip);
  Var norm = g.pow_const(g.add(g.sum_all(g.mul(anim, anim)), g.scalar(kNormEps)), 0.5);
  Var unit = g.mul(anim, g.broadcast_scalar(g.pow_const(norm, -1.0), 1, g.cols(anim)));
  return g.sum_all(g.mul(h_txt, unit));
}

Var RankerNets::scores_against(Graph& g, GraphParams& p, const std::vector<Var>& h_txts,
                               Var clip) const {
  Var anim = embed_animation(g, p, clip);
  Var norm = g.pow_const(g.add(g.sum_all(g.mul(anim, anim)), g.scalar(kNormEps)), 0.5);
  Var unit = g.mul(anim, g.broadcast_scalar(g.pow_const(norm, -1.0), 1, g.cols(anim)));
  std::vector<Var> scores;
  scores.reserve(h_txts.size());
  for (Var h : h_txts) scores.push_back(g.sum_all(g.mul(h, unit)));
  return g.concat_rows(scores);  // K x 1
}

std::string RankerTrainConfig::to_json() const {
  ordered_json j;
  j["candidates"] = candidates;
  j["epochs"] = epochs;
  j["lr"] = lr;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["batch"] = batch;
  j["seed"] = seed;
  j["frames"] = frames;
  j["hidden"] = hidden;
  j["mode"] = to_string(mode);
  return j.dump();
}

RankerTrainConfig RankerTrainConfig::from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  RankerTrainConfig c;
  c.candidates = j.at("candidates").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.lr = j.at("lr").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.batch = j.at("batch").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.frames = j.at("frames").get<Eigen::Index>();
  c.hidden = j.at("hidden").get<Eigen::Index>();
  c.mode = ranker_mode_from_string(j.at("mode").get<std::string>());
  return c;
}

RankerTrainStats train_ranker(const RankerNets& nets, ParameterStore& params,
                              const RankerTrainData& data, const RankerTrainConfig& config,
                              Rng& rng) {
  const int n_desc = static_cast<int>(data.description_tokens.size());
  if (config.candidates < 1) throw std::invalid_argument("train_ranker: K must be >= 1");
  if (config.candidates > n_desc)
    throw std::invalid_argument("train_ranker: K=" + std::to_string(config.candidates) +
                                " exceeds the " + std::to_string(n_desc) +
                                " distinct descriptions");
  if (data.examples.empty()) throw std::invalid_argument("train_ranker: no examples");

  AdamOptimizer opt(config.lr, config.beta1, config.beta2);
  RankerTrainStats stats;
  std::vector<size_t> order(data.examples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    // Fisher-Yates with our own RNG keeps the permutation reproducible.
    for (size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<size_t>(rng.uniform_int(0, static_cast<long>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }
    double epoch_loss = 0.0;
    size_t at = 0;
    while (at < order.size()) {
      const size_t batch_end = std::min(order.size(), at + static_cast<size_t>(config.batch));
      Graph g;
      GraphParams p(g, params, /*trainable=*/true);
      std::vector<Var> losses;
      for (size_t b = at; b < batch_end; ++b) {
        const RankerExample& ex = data.examples[order[b]];
        // Candidate 0 is always the true description; distractors are drawn
        // uniformly without replacement from the remaining pool.
        std::vector<int> candidates{ex.description_id};
        std::vector<int> pool;
        pool.reserve(static_cast<size_t>(n_desc) - 1);
        for (int d = 0; d < n_desc; ++d)
          if (d != ex.description_id) pool.push_back(d);
        for (int c = 1; c < config.candidates; ++c) {
          const auto pick =
              static_cast<size_t>(rng.uniform_int(0, static_cast<long>(pool.size()) - 1));
          candidates.push_back(pool[pick]);
          pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        const Mat window = sample_clip(*ex.clip, config.frames, rng).frames;
        std::vector<Var> h_txts;
        for (int cand : candidates)
          h_txts.push_back(nets.text().encode(
              g, p, data.description_tokens[static_cast<size_t>(cand)]));
        Var scores = nets.scores_against(g, p, h_txts, g.constant(window));  // K x 1
        Var true_score = g.slice_rows(scores, 0, 1);
        Var loss = g.sub(logsumexp_row(g, g.transpose(scores)), true_score);
        losses.push_back(loss);
      }
      Var batch_loss = g.mean_all(g.concat_rows(losses));
      epoch_loss += g.value(batch_loss)(0, 0) * static_cast<double>(batch_end - at);
      opt.step(params, p.gradients(batch_loss));
      at = batch_end;
    }
    stats.epoch_loss.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return stats;
}

Mat score_matrix(const RankerNets& nets, const ParameterStore& params,
                 const std::vector<Mat>& clips,
                 const std::vector<std::vector<int>>& description_tokens) {
  Mat out(static_cast<Eigen::Index>(clips.size()),
          static_cast<Eigen::Index>(description_tokens.size()));
  Graph g;
  GraphParams p(g, params, /*trainable=*/false);
  std::vector<Var> h_txts;
  for (const auto& tokens : description_tokens)
    h_txts.push_back(nets.text().encode(g, p, tokens));
  for (size_t i = 0; i < clips.size(); ++i) {
    Var scores = nets.scores_against(g, p, h_txts, g.constant(clips[i]));
    out.row(static_cast<Eigen::Index>(i)) = g.value(scores).transpose();
  }
  return out;
}

}  // namespace dvgan
