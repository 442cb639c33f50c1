#include "dvgan/generator.hpp"

#include <cmath>
#include <stdexcept>

namespace dvgan {

namespace {

Mat sample_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal();
  return m;
}

int log2_exact(Eigen::Index n, const char* what) {
  if (n < 1 || (n & (n - 1)) != 0)
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(n) +
                                " is not a power of two");
  int l = 0;
  while ((Eigen::Index{1} << l) < n) ++l;
  return l;
}

}  // namespace

LatentStack LatentStack::sample_cnn(int levels, Eigen::Index hidden, Rng& rng) {
  LatentStack z;
  for (int i = 0; i <= levels; ++i)
    z.entries.push_back(sample_normal(Eigen::Index{1} << i, hidden, rng));
  return z;
}

LatentStack LatentStack::sample_rnn(Eigen::Index tape_frames, Eigen::Index hidden, Rng& rng) {
  LatentStack z;
  for (Eigen::Index t = 0; t < tape_frames; ++t)
    z.entries.push_back(sample_normal(1, hidden, rng));
  return z;
}

Eigen::Index draw_cut_offset(Eigen::Index n, Rng& rng) {
  return static_cast<Eigen::Index>(rng.uniform_int(0, n));
}

MotionClip final_cut(const MotionClip& tape, Rng& rng) {
  if (tape.frame_count() % 2 != 0)
    throw std::invalid_argument("final_cut: tape length must be 2N");
  const Eigen::Index n = tape.frame_count() / 2;
  const Eigen::Index offset = draw_cut_offset(n, rng);
  MotionClip out;
  out.frame_rate = tape.frame_rate;
  out.channel_names = tape.channel_names;
  out.frames = tape.frames.middleRows(offset, n);
  return out;
}

int CnnGenerator::levels() const {
  return log2_exact(frames, "CnnGenerator") + (final_cut_enabled ? 1 : 0);
}

void CnnGenerator::register_params(ParameterStore& store, Rng& rng) const {
  const Eigen::Index k = hidden;
  const int L = levels();
  for (int i = 0; i <= L; ++i) {
    const std::string base = prefix + ".plot" + std::to_string(i);
    store.create(base + ".c1.W", k, kernel * k, kernel * k, rng);
    store.create(base + ".c1.b", 1, k, kernel * k, rng);
    store.create(base + ".c2.W", k, kernel * k, kernel * k, rng);
    store.create(base + ".c2.b", 1, k, kernel * k, rng);
  }
  for (int i = 1; i <= L; ++i) {
    const std::string base = prefix + ".res" + std::to_string(i);
    store.create(base + ".c1.W", k, kernel * k, kernel * k, rng);
    store.create(base + ".c1.b", 1, k, kernel * k, rng);
    store.create(base + ".c2.W", k, kernel * k, kernel * k, rng);
    store.create(base + ".c2.b", 1, k, kernel * k, rng);
  }
  store.create(prefix + ".dec.W", dof, k, k, rng);
  store.create(prefix + ".dec.b", 1, dof, k, rng);
}

Var CnnGenerator::forward_tape(
    Graph& g, GraphParams& p, const LatentStack& z, Var h_txt,
    std::vector<std::pair<Eigen::Index, Eigen::Index>>* level_shapes) const {
  const int L = levels();
  if (static_cast<int>(z.entries.size()) != L + 1)
    throw std::invalid_argument("CnnGenerator: latent stack has " +
                                std::to_string(z.entries.size()) + " levels, config needs " +
                                std::to_string(L + 1));
  if (g.cols(h_txt) != hidden)
    throw std::invalid_argument("CnnGenerator: h_txt dimension mismatch");

  auto plot = [&](int i) {
    const Mat& zi = z.entries[static_cast<size_t>(i)];
    if (zi.rows() != (Eigen::Index{1} << i) || zi.cols() != hidden)
      throw std::invalid_argument("CnnGenerator: latent level " + std::to_string(i) +
                                  " has wrong shape");
    const std::string base = prefix + ".plot" + std::to_string(i);
    Var zv = g.constant(zi);
    Var inner = conv1d(g, zv, p[base + ".c1.W"], p[base + ".c1.b"], kernel);
    Var mixed = g.relu(g.add(inner, g.broadcast_rows(h_txt, g.rows(inner))));
    return conv1d(g, mixed, p[base + ".c2.W"], p[base + ".c2.b"], kernel);
  };

  Var h = plot(0);
  if (level_shapes) level_shapes->push_back({g.rows(h), g.cols(h)});
  for (int i = 1; i <= L; ++i) {
    const std::string base = prefix + ".res" + std::to_string(i);
    Var refined = conv1d(g, h, p[base + ".c1.W"], p[base + ".c1.b"], kernel);
    Var up = g.upsample2x(refined);
    Var mixed = g.relu(g.add(up, plot(i)));
    Var residual = conv1d(g, mixed, p[base + ".c2.W"], p[base + ".c2.b"], kernel);
    h = g.add(g.upsample2x(h), residual);
    if (level_shapes) level_shapes->push_back({g.rows(h), g.cols(h)});
  }
  return linear(g, h, p[prefix + ".dec.W"], p[prefix + ".dec.b"]);
}

void RnnGenerator::register_params(ParameterStore& store, Rng& rng) const {
  const Eigen::Index k = hidden;
  for (const char* base : {".iplot", ".plot"}) {
    store.create(prefix + base + ".l1.W", k, k, k, rng);
    store.create(prefix + base + ".l1.b", 1, k, k, rng);
    store.create(prefix + base + ".l2.W", k, k, k, rng);
    store.create(prefix + base + ".l2.b", 1, k, k, rng);
  }
  store.create(prefix + ".dec0.W", dof, k, k, rng);
  store.create(prefix + ".dec0.b", 1, dof, k, rng);
  store.create(prefix + ".in.W", k, dof, dof, rng);
  store.create(prefix + ".in.b", 1, k, dof, rng);
  lstm().register_params(store, rng);
  store.create(prefix + ".diff.W", dof, k, k, rng);
  store.create(prefix + ".diff.b", 1, dof, k, rng);
}

Var RnnGenerator::plot(Graph& g, GraphParams& p, const std::string& base, Var z_row,
                       Var h_txt) const {
  Var inner = linear(g, z_row, p[base + ".l1.W"], p[base + ".l1.b"]);
  Var mixed = g.relu(g.add(inner, h_txt));
  return linear(g, mixed, p[base + ".l2.W"], p[base + ".l2.b"]);
}

Var RnnGenerator::step_frame(Graph& g, GraphParams& p, Var prev, Var plot_t,
                             LstmStack::State& state) const {
  Var encoded = linear(g, prev, p[prefix + ".in.W"], p[prefix + ".in.b"]);
  Var d = lstm().step(g, p, g.concat_cols(encoded, plot_t), state);
  return g.add(prev, linear(g, d, p[prefix + ".diff.W"], p[prefix + ".diff.b"]));
}

Var RnnGenerator::forward_tape(Graph& g, GraphParams& p, const LatentStack& z, Var h_txt,
                               Eigen::Index out_frames) const {
  const Eigen::Index total = out_frames < 0 ? tape_frames() : out_frames;
  if (static_cast<Eigen::Index>(z.entries.size()) != total)
    throw std::invalid_argument("RnnGenerator: need one latent per tape frame");
  if (g.cols(h_txt) != hidden)
    throw std::invalid_argument("RnnGenerator: h_txt dimension mismatch");

  auto latent = [&](Eigen::Index t) { return g.constant(z.entries[static_cast<size_t>(t)]); };

  Var p0 = plot(g, p, prefix + ".iplot", latent(0), h_txt);
  Var frame = linear(g, p0, p[prefix + ".dec0.W"], p[prefix + ".dec0.b"]);
  std::vector<Var> rows{frame};
  rows.reserve(static_cast<size_t>(total));
  LstmStack::State state = lstm().zero_state(g);
  for (Eigen::Index t = 1; t < total; ++t) {
    Var pt = plot(g, p, prefix + ".plot", latent(t), h_txt);
    frame = step_frame(g, p, frame, pt, state);
    rows.push_back(frame);
  }
  return g.concat_rows(rows);
}

Var RnnGenerator::forward_completion(Graph& g, GraphParams& p, const LatentStack& z, Var h_txt,
                                     const Mat& seed) const {
  const Eigen::Index n = seed.rows();
  if (n < 1 || n >= frames)
    throw std::invalid_argument("RnnGenerator: seed length must be in [1, N)");
  if (seed.cols() != dof) throw std::invalid_argument("RnnGenerator: seed width != DOF");
  if (static_cast<Eigen::Index>(z.entries.size()) != frames)
    throw std::invalid_argument("RnnGenerator: need one latent per output frame");

  auto latent = [&](Eigen::Index t) { return g.constant(z.entries[static_cast<size_t>(t)]); };

  Var frame = g.constant(seed.row(0));
  std::vector<Var> rows{frame};
  LstmStack::State state = lstm().zero_state(g);
  for (Eigen::Index t = 1; t < frames; ++t) {
    Var pt = plot(g, p, prefix + ".plot", latent(t), h_txt);
    Var generated = step_frame(g, p, frame, pt, state);
    // Ground truth overrides the generated frame during the seed span; the
    // recurrent state above was still advanced over it.
    frame = t < n ? g.constant(seed.row(t)) : generated;
    rows.push_back(frame);
  }
  return g.concat_rows(rows);
}

}  // namespace dvgan
