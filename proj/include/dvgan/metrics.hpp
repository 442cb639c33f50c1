#pragma once

#include "dvgan/bvh.hpp"
#include "dvgan/graph.hpp"

#include <vector>

namespace dvgan {

// Row-wise softmax (temperature 1).
Mat softmax_rows(const Mat& scores);

// Inception-score decomposition from per-clip posteriors over K actions.
struct InceptionStats {
  Mat posteriors;               // clips x K, rows sum to 1
  Eigen::VectorXd marginal;     // mean posterior
  double action_entropy = 0.0;        // H(action), nats
  double conditional_entropy = 0.0;   // H(action | animation), nats
  double score = 0.0;                 // difference, >= 0
};

InceptionStats inception_from_posteriors(const Mat& posteriors);
InceptionStats inception_from_scores(const Mat& scores);  // softmax then the above

// Fraction (percent) of queries whose true candidate ranks in the top k.
// Ties resolve in favour of the lower candidate index.
double recall_at_k(const Mat& scores, const std::vector<int>& truth, int k);

// Repeats the last seed frame out to total_frames.
Mat zero_velocity_baseline(const Mat& seed, Eigen::Index total_frames);

// Per-horizon completion error: expmap channels are converted to euler
// angles per joint (radians, each joint's channel order) and the L2 norm of
// the difference over all euler components is taken at the horizon's frame.
// Frame 0 of both clips is the time origin (the last seed frame), so a
// horizon of h ms indexes frame round(h * f / 1000).
std::vector<double> completion_error(const Mat& predicted, const Mat& truth,
                                     const Skeleton& skeleton, double frame_rate,
                                     const std::vector<double>& horizons_ms);

Eigen::Index horizon_frame(double horizon_ms, double frame_rate);

inline const std::vector<double> kDefaultHorizonsMs = {80.0, 160.0, 320.0, 400.0};

}  // namespace dvgan
