#pragma once

#include "dvgan/graph.hpp"
#include "dvgan/params.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <string>

// Central finite-difference gradient checks (h = 1e-5, 64-bit). Every
// analytic gradient entry must match the difference quotient with relative
// error below 1e-4 (absolute floor 1e-8 for near-zero pairs).
namespace gradcheck {

inline constexpr double kStep = 1e-5;
inline constexpr double kRelTol = 1e-4;
inline constexpr double kAbsTol = 1e-8;

struct Result {
  bool ok = true;
  double worst_rel = 0.0;
  std::string worst_at;
};

inline bool close(double analytic, double numeric) {
  const double diff = std::abs(analytic - numeric);
  return diff <= kAbsTol + kRelTol * std::max(std::abs(analytic), std::abs(numeric));
}

// Checks d loss / d params against central differences. `loss` must build
// the full forward pass from the store each call.
inline Result check_params(dvgan::ParameterStore& params,
                           const std::function<double()>& loss_value,
                           const std::map<std::string, dvgan::Mat>& analytic) {
  Result result;
  for (const auto& [name, grad] : analytic) {
    dvgan::Mat& value = params.at(name);
    for (Eigen::Index r = 0; r < value.rows(); ++r) {
      for (Eigen::Index c = 0; c < value.cols(); ++c) {
        const double saved = value(r, c);
        value(r, c) = saved + kStep;
        const double up = loss_value();
        value(r, c) = saved - kStep;
        const double down = loss_value();
        value(r, c) = saved;
        const double numeric = (up - down) / (2.0 * kStep);
        const double a = grad(r, c);
        const double rel = std::abs(a - numeric) /
                           std::max({std::abs(a), std::abs(numeric), 1e-12});
        if (!close(a, numeric)) {
          result.ok = false;
          if (rel > result.worst_rel) {
            result.worst_rel = rel;
            result.worst_at = name + "(" + std::to_string(r) + "," + std::to_string(c) +
                              "): analytic " + std::to_string(a) + " vs fd " +
                              std::to_string(numeric);
          }
        }
      }
    }
  }
  return result;
}

// Same for a gradient w.r.t. an input matrix.
inline Result check_input(dvgan::Mat& input, const std::function<double()>& loss_value,
                          const dvgan::Mat& analytic) {
  Result result;
  for (Eigen::Index r = 0; r < input.rows(); ++r) {
    for (Eigen::Index c = 0; c < input.cols(); ++c) {
      const double saved = input(r, c);
      input(r, c) = saved + kStep;
      const double up = loss_value();
      input(r, c) = saved - kStep;
      const double down = loss_value();
      input(r, c) = saved;
      const double numeric = (up - down) / (2.0 * kStep);
      const double a = analytic(r, c);
      if (!close(a, numeric)) {
        result.ok = false;
        const double rel =
            std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-12});
        if (rel > result.worst_rel) {
          result.worst_rel = rel;
          result.worst_at = "input(" + std::to_string(r) + "," + std::to_string(c) + ")";
        }
      }
    }
  }
  return result;
}

}  // namespace gradcheck
