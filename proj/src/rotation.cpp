#include "dvgan/rotation.hpp"

#include <cmath>
#include <stdexcept>

namespace dvgan {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v(2), v(1),
       v(2), 0, -v(0),
       -v(1), v(0), 0;
  return m;
}

Eigen::Matrix3d axis_rotation(int axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  switch (axis) {
    case 0:
      R(1, 1) = c; R(1, 2) = -s;
      R(2, 1) = s; R(2, 2) = c;
      break;
    case 1:
      R(0, 0) = c; R(0, 2) = s;
      R(2, 0) = -s; R(2, 2) = c;
      break;
    default:
      R(0, 0) = c; R(0, 1) = -s;
      R(1, 0) = s; R(1, 1) = c;
      break;
  }
  return R;
}

// Angle about `axis` extracted from a matrix known to be a rotation about
// that single axis.
double single_axis_angle(const Eigen::Matrix3d& R, int axis) {
  const int j = (axis + 1) % 3;
  const int k = (axis + 2) % 3;
  return std::atan2(R(k, j), R(j, j));
}

}  // namespace

EulerOrder EulerOrder::from_string(const std::string& s) {
  if (s.size() != 3) throw std::invalid_argument("euler order must have 3 axes: " + s);
  EulerOrder order{};
  bool seen[3] = {false, false, false};
  for (int i = 0; i < 3; ++i) {
    const char c = static_cast<char>(::tolower(s[i]));
    if (c < 'x' || c > 'z') throw std::invalid_argument("bad euler axis: " + s);
    order.axis[i] = c - 'x';
    if (seen[order.axis[i]]) throw std::invalid_argument("repeated euler axis: " + s);
    seen[order.axis[i]] = true;
  }
  return order;
}

std::string EulerOrder::to_string() const {
  std::string s(3, 'x');
  for (int i = 0; i < 3; ++i) s[i] = static_cast<char>('x' + axis[i]);
  return s;
}

Eigen::Matrix3d expmap_to_rotmat(const Eigen::Vector3d& v) {
  const double theta = v.norm();
  if (theta < 1e-8) {
    // R = I + K + K^2/2 with K = skew(v); error is O(theta^3).
    const Eigen::Matrix3d K = skew(v);
    return Eigen::Matrix3d::Identity() + K + 0.5 * K * K;
  }
  const Eigen::Matrix3d K = skew(v / theta);
  return Eigen::Matrix3d::Identity() + std::sin(theta) * K +
         (1.0 - std::cos(theta)) * K * K;
}

Eigen::Vector3d rotmat_to_expmap(const Eigen::Matrix3d& R) {
  // sin(theta) from the skew part, cos(theta) from the trace; atan2 keeps
  // full precision at both ends of [0, pi].
  Eigen::Vector3d w(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  const double s = 0.5 * w.norm();
  const double c = 0.5 * (R.trace() - 1.0);
  const double theta = std::atan2(s, c);
  if (theta < 1e-8) return 0.5 * w;
  if (M_PI - theta > 1e-6) return (theta / (2.0 * s)) * w;
  // Near pi the skew part vanishes; recover the axis from the symmetric
  // part R + I = 2 * (cos t * I + (1-cos t) aa^T) ~ 2 aa^T.
  const Eigen::Matrix3d S = 0.5 * (R + Eigen::Matrix3d::Identity());
  int imax = 0;
  for (int i = 1; i < 3; ++i)
    if (S(i, i) > S(imax, imax)) imax = i;
  Eigen::Vector3d a = S.col(imax) / std::sqrt(S(imax, imax));
  a.normalize();
  // Pick the sign consistent with the (tiny) skew part.
  if (a.dot(w) < 0) a = -a;
  return theta * a;
}

Eigen::Matrix3d euler_to_rotmat(const Eigen::Vector3d& angles, const EulerOrder& order) {
  return axis_rotation(order.axis[0], angles(0)) *
         axis_rotation(order.axis[1], angles(1)) *
         axis_rotation(order.axis[2], angles(2));
}

Eigen::Vector3d rotmat_to_euler(const Eigen::Matrix3d& R, const EulerOrder& order) {
  const int i = order.axis[0], j = order.axis[1], k = order.axis[2];
  // Levi-Civita sign of the axis triple.
  const double eps = ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;
  const double sb = std::clamp(eps * R(i, k), -1.0, 1.0);
  const double beta = std::asin(sb);

  if (1.0 - std::abs(sb) < 1e-7) {
    // Gimbal lock: only alpha +/- gamma is determined. Set gamma = 0 and
    // read alpha from Q = R * Rj(beta)^T, a pure rotation about axis i.
    const Eigen::Matrix3d Q = R * axis_rotation(j, beta).transpose();
    return {single_axis_angle(Q, i), beta, 0.0};
  }
  const double alpha = std::atan2(-eps * R(j, k), R(k, k));
  const double gamma = std::atan2(-eps * R(i, j), R(i, i));
  return {alpha, beta, gamma};
}

double geodesic_distance(const Eigen::Matrix3d& R1, const Eigen::Matrix3d& R2) {
  const Eigen::Matrix3d D = R1.transpose() * R2;
  Eigen::Vector3d w(D(2, 1) - D(1, 2), D(0, 2) - D(2, 0), D(1, 0) - D(0, 1));
  const double s = 0.5 * w.norm();
  const double c = 0.5 * (D.trace() - 1.0);
  return std::atan2(s, c);
}

}  // namespace dvgan
