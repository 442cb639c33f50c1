#pragma once

#include <Eigen/Core>

#include <array>
#include <string>

namespace dvgan {

// Axis order for euler-angle conversions. Axes are applied left to right,
// i.e. ZXY means R = Rz(a0) * Rx(a1) * Ry(a2), matching how BVH lists
// rotation channels.
struct EulerOrder {
  std::array<int, 3> axis;  // 0=x, 1=y, 2=z

  static EulerOrder from_string(const std::string& s);  // e.g. "zxy"
  std::string to_string() const;
};

inline constexpr std::array<int, 3> kOrderZYX = {2, 1, 0};

// Rodrigues formula; falls back to the second-order series for angles
// below 1e-8 where sin(t)/t loses precision.
Eigen::Matrix3d expmap_to_rotmat(const Eigen::Vector3d& v);

// Inverse of the above (matrix log). The returned angle lies in [0, pi].
Eigen::Vector3d rotmat_to_expmap(const Eigen::Matrix3d& R);

Eigen::Matrix3d euler_to_rotmat(const Eigen::Vector3d& angles, const EulerOrder& order);

// Extracts euler angles so that euler_to_rotmat(angles, order) == R away
// from gimbal lock. At lock (|middle angle| = pi/2 within 1e-7) the third
// angle is set to 0 and the first absorbs the remaining rotation.
Eigen::Vector3d rotmat_to_euler(const Eigen::Matrix3d& R, const EulerOrder& order);

// Angle of R1^T * R2, a metric on SO(3). Accurate near zero.
double geodesic_distance(const Eigen::Matrix3d& R1, const Eigen::Matrix3d& R2);

}  // namespace dvgan
