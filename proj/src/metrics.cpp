#include "dvgan/metrics.hpp"

#include "dvgan/motion.hpp"
#include "dvgan/rotation.hpp"

#include <cmath>
#include <stdexcept>

namespace dvgan {

Mat softmax_rows(const Mat& scores) {
  Mat out(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const double m = scores.row(r).maxCoeff();
    Eigen::ArrayXd e = (scores.row(r).array() - m).exp();
    out.row(r) = (e / e.sum()).matrix();
  }
  return out;
}

namespace {

double entropy(const Eigen::VectorXd& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) h -= p(i) * std::log(p(i));
  }
  return h;
}

}  // namespace

InceptionStats inception_from_posteriors(const Mat& posteriors) {
  if (posteriors.rows() == 0) throw std::invalid_argument("inception: no clips");
  if (posteriors.cols() < 2) throw std::invalid_argument("inception: need K >= 2 actions");
  for (Eigen::Index r = 0; r < posteriors.rows(); ++r) {
    if (std::abs(posteriors.row(r).sum() - 1.0) > 1e-9)
      throw std::invalid_argument("inception: posterior row does not sum to 1");
  }
  InceptionStats stats;
  stats.posteriors = posteriors;
  stats.marginal = posteriors.colwise().mean().transpose();
  stats.action_entropy = entropy(stats.marginal);
  double cond = 0.0;
  for (Eigen::Index r = 0; r < posteriors.rows(); ++r)
    cond += entropy(posteriors.row(r).transpose());
  stats.conditional_entropy = cond / static_cast<double>(posteriors.rows());
  stats.score = stats.action_entropy - stats.conditional_entropy;
  return stats;
}

InceptionStats inception_from_scores(const Mat& scores) {
  return inception_from_posteriors(softmax_rows(scores));
}

double recall_at_k(const Mat& scores, const std::vector<int>& truth, int k) {
  if (scores.rows() == 0) throw std::invalid_argument("recall_at_k: no queries");
  if (static_cast<Eigen::Index>(truth.size()) != scores.rows())
    throw std::invalid_argument("recall_at_k: one truth index per query required");
  if (k < 1 || k > scores.cols())
    throw std::invalid_argument("recall_at_k: k out of range");
  int hits = 0;
  for (Eigen::Index q = 0; q < scores.rows(); ++q) {
    const int t = truth[static_cast<size_t>(q)];
    if (t < 0 || t >= scores.cols()) throw std::invalid_argument("recall_at_k: bad truth index");
    const double ts = scores(q, t);
    Eigen::Index rank = 0;
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      if (scores(q, c) > ts || (scores(q, c) == ts && c < t)) ++rank;
    }
    if (rank < k) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(scores.rows());
}

Mat zero_velocity_baseline(const Mat& seed, Eigen::Index total_frames) {
  if (seed.rows() < 1) throw std::invalid_argument("zero_velocity_baseline: empty seed");
  if (total_frames < seed.rows())
    throw std::invalid_argument("zero_velocity_baseline: total shorter than seed");
  Mat out(total_frames, seed.cols());
  out.topRows(seed.rows()) = seed;
  for (Eigen::Index f = seed.rows(); f < total_frames; ++f) out.row(f) = seed.row(seed.rows() - 1);
  return out;
}

Eigen::Index horizon_frame(double horizon_ms, double frame_rate) {
  return static_cast<Eigen::Index>(std::llround(horizon_ms * frame_rate / 1000.0));
}

namespace {

// Euler angles (radians) for every rotation triple of the skeleton, one row
// per frame; translation channels are excluded from the metric.
Mat euler_components(const Mat& frames, const Skeleton& skeleton) {
  std::vector<Eigen::Index> rot_cols;
  Eigen::Index base = 0;
  std::vector<EulerOrder> orders;
  for (const Joint& joint : skeleton.joints) {
    Eigen::Index trans = 0;
    std::array<int, 3> axes{};
    int nrot = 0;
    for (Channel c : joint.channels) {
      if (!is_rotation(c)) {
        ++trans;
        continue;
      }
      if (nrot < 3)
        axes[static_cast<size_t>(nrot)] =
            c == Channel::Xrotation ? 0 : (c == Channel::Yrotation ? 1 : 2);
      ++nrot;
    }
    if (nrot != 0 && nrot != 3)
      throw std::invalid_argument("completion_error: joint needs 0 or 3 rotation channels");
    if (nrot == 3) {
      rot_cols.push_back(base + trans);  // expmap triple follows translations
      orders.push_back(EulerOrder{axes});
    }
    base += static_cast<Eigen::Index>(joint.channels.size());
  }
  Mat out(frames.rows(), static_cast<Eigen::Index>(rot_cols.size()) * 3);
  for (size_t j = 0; j < rot_cols.size(); ++j) {
    for (Eigen::Index f = 0; f < frames.rows(); ++f) {
      const Eigen::Vector3d v(frames(f, rot_cols[j]), frames(f, rot_cols[j] + 1),
                              frames(f, rot_cols[j] + 2));
      const Eigen::Vector3d angles = rotmat_to_euler(expmap_to_rotmat(v), orders[j]);
      out(f, static_cast<Eigen::Index>(3 * j)) = angles(0);
      out(f, static_cast<Eigen::Index>(3 * j) + 1) = angles(1);
      out(f, static_cast<Eigen::Index>(3 * j) + 2) = angles(2);
    }
  }
  return out;
}

}  // namespace

std::vector<double> completion_error(const Mat& predicted, const Mat& truth,
                                     const Skeleton& skeleton, double frame_rate,
                                     const std::vector<double>& horizons_ms) {
  if (predicted.rows() != truth.rows() || predicted.cols() != truth.cols())
    throw std::invalid_argument("completion_error: shape mismatch");
  const Mat ep = euler_components(predicted, skeleton);
  const Mat et = euler_components(truth, skeleton);
  std::vector<double> errors;
  errors.reserve(horizons_ms.size());
  for (double h : horizons_ms) {
    const Eigen::Index f = horizon_frame(h, frame_rate);
    if (f < 0 || f >= predicted.rows())
      throw std::invalid_argument("completion_error: horizon beyond clip");
    errors.push_back((ep.row(f) - et.row(f)).norm());
  }
  return errors;
}

}  // namespace dvgan
