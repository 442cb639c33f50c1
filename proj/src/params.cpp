#include "dvgan/params.hpp"

#include <cmath>
#include <stdexcept>

namespace dvgan {

Mat& ParameterStore::create(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                            Eigen::Index fan_in, Rng& rng) {
  if (params_.count(name)) throw std::invalid_argument("parameter already exists: " + name);
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, fan_in)));
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = (2.0 * rng.uniform01() - 1.0) * bound;
  return params_.emplace(name, std::move(m)).first->second;
}

Mat& ParameterStore::create_zero(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  if (params_.count(name)) throw std::invalid_argument("parameter already exists: " + name);
  return params_.emplace(name, Mat::Zero(rows, cols)).first->second;
}

Mat& ParameterStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::out_of_range("no such parameter: " + name);
  return it->second;
}

const Mat& ParameterStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::out_of_range("no such parameter: " + name);
  return it->second;
}

std::vector<std::string> ParameterStore::names_with_prefix(const std::string& prefix) const {
  std::vector<std::string> names;
  for (const auto& [name, value] : params_)
    if (name.rfind(prefix, 0) == 0) names.push_back(name);
  return names;
}

Var GraphParams::operator[](const std::string& name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  const Var v = trainable_ ? graph_.leaf(store_.at(name)) : graph_.constant(store_.at(name));
  bound_.emplace(name, v);
  return v;
}

std::map<std::string, Mat> GraphParams::gradients(Var loss) {
  std::vector<std::string> names;
  std::vector<Var> vars;
  names.reserve(bound_.size());
  vars.reserve(bound_.size());
  for (const auto& [name, var] : bound_) {
    names.push_back(name);
    vars.push_back(var);
  }
  const std::vector<Var> grads = graph_.gradients(loss, vars);
  std::map<std::string, Mat> out;
  for (size_t i = 0; i < names.size(); ++i) out.emplace(names[i], graph_.value(grads[i]));
  return out;
}

void AdamOptimizer::step(ParameterStore& params, const std::map<std::string, Mat>& grads) {
  for (const auto& [name, grad] : grads) {
    Mat& value = params.at(name);
    Slot& slot = state_[name];
    if (slot.t == 0) {
      slot.m = Mat::Zero(value.rows(), value.cols());
      slot.v = Mat::Zero(value.rows(), value.cols());
    }
    ++slot.t;
    slot.m = beta1_ * slot.m + (1.0 - beta1_) * grad;
    slot.v = beta2_ * slot.v + (1.0 - beta2_) * grad.cwiseProduct(grad);
    const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(slot.t));
    const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(slot.t));
    const Mat mhat = slot.m / bias1;
    const Mat vhat = slot.v / bias2;
    value.array() -= lr_ * mhat.array() / (vhat.array().sqrt() + eps_);
  }
}

}  // namespace dvgan
