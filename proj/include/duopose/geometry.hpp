#pragma once

#include <Eigen/Core>
#include <cmath>

#include "duopose/errors.hpp"

namespace duopose {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using RowVec2 = Eigen::RowVector2d;
using Mat23 = Eigen::Matrix<double, 2, 3>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Wraps an angle to (-pi, pi]; ties at +-pi resolve to +pi.
inline double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

/// Planar rotation by a fixed angle.
class Rot2 {
 public:
  Rot2() = default;
  explicit Rot2(double angle) : cos_(std::cos(angle)), sin_(std::sin(angle)) {}

  Vec2 apply(const Vec2& v) const {
    return {cos_ * v.x() - sin_ * v.y(), sin_ * v.x() + cos_ * v.y()};
  }

  /// Applies the transpose (inverse) rotation.
  Vec2 apply_inverse(const Vec2& v) const {
    return {cos_ * v.x() + sin_ * v.y(), -sin_ * v.x() + cos_ * v.y()};
  }

  Mat2 matrix() const {
    Mat2 m;
    m << cos_, -sin_, sin_, cos_;
    return m;
  }

 private:
  double cos_ = 1.0;
  double sin_ = 0.0;
};

/// S(a_dot) = [0, -a_dot; a_dot, 0], the planar angular-rate matrix.
inline Mat2 skew_scalar(double a_dot) {
  Mat2 m;
  m << 0.0, -a_dot, a_dot, 0.0;
  return m;
}

/// Planar rigid pose; theta is kept wrapped to (-pi, pi].
struct SE2Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  SE2Pose() = default;
  SE2Pose(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  Vec2 translation() const { return {x, y}; }
  Rot2 rotation() const { return Rot2(theta); }
};

/// Pose of `child` expressed in `parent`'s frame composed into the world frame.
inline SE2Pose compose(const SE2Pose& parent, const SE2Pose& child) {
  const Vec2 t = parent.translation() + parent.rotation().apply(child.translation());
  return {t.x(), t.y(), parent.theta + child.theta};
}

inline SE2Pose inverse(const SE2Pose& pose) {
  const Vec2 t = pose.rotation().apply_inverse(-pose.translation());
  return {t.x(), t.y(), -pose.theta};
}

/// Point in a camera frame: x right, y down, z forward along the optical axis.
struct CameraPoint {
  double x_bar = 0.0;
  double y_bar = 0.0;
  double z_bar = 0.0;
};

/// Point on the normalized image plane, s = (x_bar/z_bar, y_bar/z_bar).
struct NormalizedFeature {
  double x = 0.0;
  double y = 0.0;

  Vec2 vec() const { return {x, y}; }
};

/// Forward speed along the optical axis and heading rate.
struct UnicycleInput {
  double v_d = 0.0;
  double w_theta = 0.0;
};

/// Point in the vehicle's ground frame: px forward, py left.
struct PlanarPoint {
  double px = 0.0;
  double py = 0.0;

  Vec2 vec() const { return {px, py}; }
};

inline NormalizedFeature project(const CameraPoint& p) {
  if (!(p.z_bar > 0.0)) {
    throw NonPositiveDepth("project: z_bar must be positive");
  }
  return {p.x_bar / p.z_bar, p.y_bar / p.z_bar};
}

inline CameraPoint unproject(const NormalizedFeature& s, double z_bar) {
  if (!(z_bar > 0.0)) {
    throw NonPositiveDepth("unproject: z_bar must be positive");
  }
  return {s.x * z_bar, s.y * z_bar, z_bar};
}

// Vehicle frame has X forward (camera z) and Y left (camera -x), so that a
// positive w_theta is a counter-clockwise heading change (camera w_y = -w_theta).
inline PlanarPoint camera_to_planar(const CameraPoint& p) {
  return {p.z_bar, -p.x_bar};
}

inline CameraPoint planar_to_camera(const PlanarPoint& m, double y_bar) {
  return {-m.py, y_bar, m.px};
}

/// Integrates unicycle kinematics over dt with the exact arc solution.
inline SE2Pose unicycle_step(const SE2Pose& pose, const UnicycleInput& u, double dt) {
  const double dtheta = u.w_theta * dt;
  if (std::abs(u.w_theta) < 1e-9) {
    // Straight-line limit of the arc.
    return {pose.x + u.v_d * dt * std::cos(pose.theta),
            pose.y + u.v_d * dt * std::sin(pose.theta), pose.theta + dtheta};
  }
  const double radius = u.v_d / u.w_theta;
  return {pose.x + radius * (std::sin(pose.theta + dtheta) - std::sin(pose.theta)),
          pose.y - radius * (std::cos(pose.theta + dtheta) - std::cos(pose.theta)),
          pose.theta + dtheta};
}

/// Pose of B relative to A, expressed in A's frame.
inline SE2Pose relative_pose(const SE2Pose& pose_a, const SE2Pose& pose_b) {
  const Vec2 r = pose_a.rotation().apply_inverse(pose_b.translation() - pose_a.translation());
  return {r.x(), r.y(), pose_b.theta - pose_a.theta};
}

}  // namespace duopose
