#pragma once

#include "dvgan/graph.hpp"
#include "dvgan/rng.hpp"

#include <map>
#include <string>
#include <vector>

namespace dvgan {

// Named parameter arrays. std::map keeps iteration order stable so update
// order, serialization and same-seed runs are reproducible.
class ParameterStore {
 public:
  // Creates a matrix initialized uniformly in +/- 1/sqrt(fan_in).
  Mat& create(const std::string& name, Eigen::Index rows, Eigen::Index cols,
              Eigen::Index fan_in, Rng& rng);
  // Creates a matrix of zeros (used for mixing weights and biases-by-choice).
  Mat& create_zero(const std::string& name, Eigen::Index rows, Eigen::Index cols);

  bool contains(const std::string& name) const { return params_.count(name) > 0; }
  Mat& at(const std::string& name);
  const Mat& at(const std::string& name) const;

  const std::map<std::string, Mat>& all() const { return params_; }
  std::map<std::string, Mat>& all() { return params_; }

  // Names with the given prefix, sorted.
  std::vector<std::string> names_with_prefix(const std::string& prefix) const;

 private:
  std::map<std::string, Mat> params_;
};

// Per-graph binding of parameters to leaf nodes. Each parameter becomes a
// single leaf no matter how many times it is used, so gradients accumulate
// across shared uses (e.g. plot modules applied at every timestep).
class GraphParams {
 public:
  GraphParams(Graph& g, const ParameterStore& store, bool trainable = true)
      : graph_(g), store_(store), trainable_(trainable) {}

  Var operator[](const std::string& name);

  // Gradients of `loss` w.r.t. every bound parameter, keyed by name.
  std::map<std::string, Mat> gradients(Var loss);

 private:
  Graph& graph_;
  const ParameterStore& store_;
  bool trainable_;
  std::map<std::string, Var> bound_;
};

// Adam with per-parameter first/second moment state.
class AdamOptimizer {
 public:
  AdamOptimizer(double lr = 1e-4, double beta1 = 0.5, double beta2 = 0.9,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // Applies one update to every parameter present in `grads`.
  void step(ParameterStore& params, const std::map<std::string, Mat>& grads);

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }

  struct Slot {
    Mat m, v;
    long t = 0;
  };
  std::map<std::string, Slot>& state() { return state_; }
  const std::map<std::string, Slot>& state() const { return state_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::map<std::string, Slot> state_;
};

}  // namespace dvgan
