#include "dvgan/discriminator.hpp"

#include <stdexcept>

namespace dvgan {

namespace {

int log2_exact(Eigen::Index n, const char* what) {
  if (n < 1 || (n & (n - 1)) != 0)
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(n) +
                                " is not a power of two");
  int l = 0;
  while ((Eigen::Index{1} << l) < n) ++l;
  return l;
}

}  // namespace

Eigen::Index draw_shift(Eigen::Index frames, Rng& rng) {
  if (frames < 2) throw std::invalid_argument("draw_shift: need at least 2 frames");
  const Eigen::Index half = frames / 2;
  return static_cast<Eigen::Index>(rng.uniform_int(-half, half));
}

Mat shift_frames(const Mat& frames, Eigen::Index shift) {
  const Eigen::Index n = frames.rows();
  Mat out = Mat::Zero(n, frames.cols());
  if (shift >= 0) {
    out.middleRows(shift, n - shift) = frames.topRows(n - shift);
  } else {
    out.topRows(n + shift) = frames.bottomRows(n + shift);
  }
  return out;
}

MotionClip temporal_shift(const MotionClip& clip, Rng& rng) {
  MotionClip out;
  out.frame_rate = clip.frame_rate;
  out.channel_names = clip.channel_names;
  out.frames = shift_frames(clip.frames, draw_shift(clip.frame_count(), rng));
  return out;
}

Var shift_var(Graph& g, Var clip, Eigen::Index shift) {
  const Eigen::Index n = g.rows(clip);
  if (shift == 0) return clip;
  if (shift > 0) return g.pad_rows(g.slice_rows(clip, 0, n - shift), shift, n);
  return g.pad_rows(g.slice_rows(clip, -shift, n), 0, n);
}

int CnnDiscriminator::levels() const { return log2_exact(frames, "CnnDiscriminator"); }

void CnnDiscriminator::register_params(ParameterStore& store, Rng& rng) const {
  const Eigen::Index k = hidden;
  store.create(prefix + ".enc.W", k, dof, dof, rng);
  store.create(prefix + ".enc.b", 1, k, dof, rng);
  for (int i = levels() - 1; i >= 0; --i) {
    const std::string base = prefix + ".res" + std::to_string(i);
    store.create(base + ".c1.W", k, kernel * k, kernel * k, rng);
    store.create(base + ".c1.b", 1, k, kernel * k, rng);
    store.create(base + ".c2.W", k, kernel * k, kernel * k, rng);
    store.create(base + ".c2.b", 1, k, kernel * k, rng);
  }
  for (int i = 0; i <= levels(); ++i) {
    const std::string base = prefix + ".val" + std::to_string(i);
    store.create(base + ".h.W", k, k, k, rng);
    store.create(base + ".h.b", 1, k, k, rng);
    store.create(base + ".t.W", k, k, k, rng);
    store.create(base + ".t.b", 1, k, k, rng);
    store.create(base + ".o.W", 1, k, k, rng);
    store.create(base + ".o.b", 1, 1, k, rng);
  }
  // Mixing starts at zero: e^0 = 1 weighs every resolution equally.
  store.create_zero(prefix + ".w", 1, levels() + 1);
}

Var CnnDiscriminator::forward(Graph& g, GraphParams& p, Var clip, Var h_txt,
                              std::vector<Var>* scores_out) const {
  if (g.rows(clip) != frames || g.cols(clip) != dof)
    throw std::invalid_argument("CnnDiscriminator: clip must be N x M");
  if (g.cols(h_txt) != hidden)
    throw std::invalid_argument("CnnDiscriminator: h_txt dimension mismatch");
  const int L = levels();

  auto validate = [&](int i, Var h) {
    const std::string base = prefix + ".val" + std::to_string(i);
    Var from_clip = linear(g, h, p[base + ".h.W"], p[base + ".h.b"]);
    Var from_text = linear(g, h_txt, p[base + ".t.W"], p[base + ".t.b"]);
    Var mixed = g.relu(g.add(from_clip, g.broadcast_rows(from_text, g.rows(h))));
    Var per_frame = linear(g, mixed, p[base + ".o.W"], p[base + ".o.b"]);
    return g.mean_rows(per_frame);  // 1x1
  };

  std::vector<Var> scores(static_cast<size_t>(L + 1));
  Var h = linear(g, clip, p[prefix + ".enc.W"], p[prefix + ".enc.b"]);
  scores[static_cast<size_t>(L)] = validate(L, h);
  for (int i = L - 1; i >= 0; --i) {
    const std::string base = prefix + ".res" + std::to_string(i);
    Var refined = conv1d(g, h, p[base + ".c1.W"], p[base + ".c1.b"], kernel);
    Var pooled = g.relu(g.downsample2x(refined));
    Var residual = conv1d(g, pooled, p[base + ".c2.W"], p[base + ".c2.b"], kernel);
    h = g.add(g.downsample2x(h), residual);
    scores[static_cast<size_t>(i)] = validate(i, h);
  }

  if (scores_out) *scores_out = scores;
  Var stacked = g.concat_rows(scores);                       // (L+1) x 1
  Var weights = g.exp_(p[prefix + ".w"]);                    // 1 x (L+1)
  return g.matmul(weights, stacked);                         // 1 x 1
}

ValidationReport CnnDiscriminator::report(Graph& g, GraphParams& p, const Mat& clip,
                                          Var h_txt) const {
  std::vector<Var> scores;
  Var y = forward(g, p, g.constant(clip), h_txt, &scores);
  ValidationReport rep;
  for (Var s : scores) rep.scores.push_back(g.value(s)(0, 0));
  const Mat& w = g.value(p[prefix + ".w"]);
  for (Eigen::Index i = 0; i < w.cols(); ++i) rep.weights.push_back(w(0, i));
  rep.value = g.value(y)(0, 0);
  return rep;
}

void RnnDiscriminator::register_params(ParameterStore& store, Rng& rng) const {
  const Eigen::Index k = hidden;
  store.create(prefix + ".fenc.W", k, dof, dof, rng);
  store.create(prefix + ".fenc.b", 1, k, dof, rng);
  store.create(prefix + ".denc.W", k, dof, dof, rng);
  store.create(prefix + ".denc.b", 1, k, dof, rng);
  lstm().register_params(store, rng);
  for (const char* val : {".valA", ".valD"}) {
    const std::string base = prefix + val;
    store.create(base + ".h.W", k, k, k, rng);
    store.create(base + ".h.b", 1, k, k, rng);
    store.create(base + ".t.W", k, k, k, rng);
    store.create(base + ".t.b", 1, k, k, rng);
    store.create(base + ".o.W", 1, k, k, rng);
    store.create(base + ".o.b", 1, 1, k, rng);
  }
  store.create_zero(prefix + ".w", 1, 2);
}

Var RnnDiscriminator::forward(Graph& g, GraphParams& p, Var clip, Var h_txt, Var* frame_score,
                              Var* diff_score) const {
  const Eigen::Index n = g.rows(clip);
  if (n < 2) throw std::invalid_argument("RnnDiscriminator: need at least 2 frames");
  if (g.cols(clip) != dof) throw std::invalid_argument("RnnDiscriminator: clip width != DOF");

  auto validate = [&](const std::string& base, Var h) {
    Var from_clip = linear(g, h, p[base + ".h.W"], p[base + ".h.b"]);
    Var from_text = linear(g, h_txt, p[base + ".t.W"], p[base + ".t.b"]);
    Var mixed = g.relu(g.add(from_clip, g.broadcast_rows(from_text, g.rows(h))));
    return g.mean_rows(linear(g, mixed, p[base + ".o.W"], p[base + ".o.b"]));
  };

  Var poses = linear(g, clip, p[prefix + ".fenc.W"], p[prefix + ".fenc.b"]);
  Var diffs = g.sub(g.slice_rows(clip, 1, n), g.slice_rows(clip, 0, n - 1));
  Var encoded_diffs = linear(g, diffs, p[prefix + ".denc.W"], p[prefix + ".denc.b"]);
  LstmStack::State state = lstm().zero_state(g);
  Var recurrent = lstm().run(g, p, encoded_diffs, state);

  Var s_a = validate(prefix + ".valA", poses);
  Var s_d = validate(prefix + ".valD", validate_recurrent ? recurrent : encoded_diffs);
  if (frame_score) *frame_score = s_a;
  if (diff_score) *diff_score = s_d;

  Var w = p[prefix + ".w"];
  return g.add(g.mul(g.slice_cols(w, 0, 1), s_a), g.mul(g.slice_cols(w, 1, 2), s_d));
}

RnnValidationReport RnnDiscriminator::report(Graph& g, GraphParams& p, const Mat& clip,
                                             Var h_txt) const {
  Var s_a, s_d;
  Var y = forward(g, p, g.constant(clip), h_txt, &s_a, &s_d);
  const Mat& w = g.value(p[prefix + ".w"]);
  return RnnValidationReport{g.value(s_a)(0, 0), g.value(s_d)(0, 0), w(0, 0), w(0, 1),
                             g.value(y)(0, 0)};
}

}  // namespace dvgan
