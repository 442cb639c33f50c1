#pragma once

#include "dvgan/graph.hpp"
#include "dvgan/params.hpp"

#include <string>
#include <vector>

namespace dvgan {

// Stacked LSTM. Gate pre-activations follow the usual cell:
//   [i f g o] = x Wih^T + bih + h Whh^T + bhh
//   c' = sigmoid(f) * c + sigmoid(i) * tanh(g)
//   h' = sigmoid(o) * tanh(c')
// with layer l > 0 fed the hidden state of layer l-1.
struct LstmStack {
  std::string prefix;
  int layers = 0;
  Eigen::Index input_size = 0;
  Eigen::Index hidden_size = 0;

  void register_params(ParameterStore& store, Rng& rng) const;

  struct State {
    std::vector<Var> h, c;  // per layer, 1 x hidden
  };

  State zero_state(Graph& g) const;

  // One step over a 1 x input row. Returns the top layer's hidden state.
  Var step(Graph& g, GraphParams& p, Var input, State& state) const;

  // Unrolls over the rows of a T x input matrix; returns T x hidden outputs
  // of the top layer. `state` is advanced in place.
  Var run(Graph& g, GraphParams& p, Var sequence, State& state) const;
};

}  // namespace dvgan
