#include "dvgan/lstm.hpp"

namespace dvgan {

void LstmStack::register_params(ParameterStore& store, Rng& rng) const {
  for (int l = 0; l < layers; ++l) {
    const Eigen::Index in = l == 0 ? input_size : hidden_size;
    const std::string base = prefix + ".l" + std::to_string(l);
    store.create(base + ".Wih", 4 * hidden_size, in, in, rng);
    store.create(base + ".Whh", 4 * hidden_size, hidden_size, hidden_size, rng);
    store.create(base + ".bih", 1, 4 * hidden_size, in, rng);
    store.create(base + ".bhh", 1, 4 * hidden_size, hidden_size, rng);
  }
}

LstmStack::State LstmStack::zero_state(Graph& g) const {
  State s;
  for (int l = 0; l < layers; ++l) {
    s.h.push_back(g.zeros(1, hidden_size));
    s.c.push_back(g.zeros(1, hidden_size));
  }
  return s;
}

Var LstmStack::step(Graph& g, GraphParams& p, Var input, State& state) const {
  Var x = input;
  for (int l = 0; l < layers; ++l) {
    const std::string base = prefix + ".l" + std::to_string(l);
    Var gates = g.add(linear(g, x, p[base + ".Wih"], p[base + ".bih"]),
                      linear(g, state.h[static_cast<size_t>(l)], p[base + ".Whh"],
                             p[base + ".bhh"]));
    const Eigen::Index h = hidden_size;
    Var i = g.sigmoid(g.slice_cols(gates, 0, h));
    Var f = g.sigmoid(g.slice_cols(gates, h, 2 * h));
    Var cand = g.tanh_(g.slice_cols(gates, 2 * h, 3 * h));
    Var o = g.sigmoid(g.slice_cols(gates, 3 * h, 4 * h));
    Var c = g.add(g.mul(f, state.c[static_cast<size_t>(l)]), g.mul(i, cand));
    Var hidden = g.mul(o, g.tanh_(c));
    state.c[static_cast<size_t>(l)] = c;
    state.h[static_cast<size_t>(l)] = hidden;
    x = hidden;
  }
  return x;
}

Var LstmStack::run(Graph& g, GraphParams& p, Var sequence, State& state) const {
  const Eigen::Index t = g.rows(sequence);
  std::vector<Var> outputs;
  outputs.reserve(static_cast<size_t>(t));
  for (Eigen::Index row = 0; row < t; ++row)
    outputs.push_back(step(g, p, g.slice_rows(sequence, row, row + 1), state));
  return g.concat_rows(outputs);
}

}  // namespace dvgan
