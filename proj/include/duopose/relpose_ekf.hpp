#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "duopose/errors.hpp"
#include "duopose/geometry.hpp"

namespace duopose {

/// 3x3 covariance of the relative-pose state (r_x, r_y, theta).
using Covariance3 = Mat3;

inline Mat3 symmetrized(const Mat3& m) { return 0.5 * (m + m.transpose()); }

inline double min_eigenvalue(const Mat3& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(m);
  return eig.eigenvalues().minCoeff();
}

struct NoiseConfig {
  Mat3 q_process = (Vec3(1e-4, 1e-4, 1e-5)).asDiagonal();  // density per second
  Mat2 r_meas = 1e-2 * Mat2::Identity();                   // per-point innovation noise
  double gate_threshold = 9.21;                            // chi-square 99%, 2 dof
};

/// Which residual drives the filter. The position level compares depth-scaled
/// features directly; the velocity level compares their time derivatives.
enum class InnovationModel { position_level, velocity_level };

/// One point as estimated by one robot: measured feature, observer rates and
/// inverse depth. Rates may be NaN when a producer has none to offer.
struct PointSideEstimate {
  NormalizedFeature s;
  Vec2 s_rate = Vec2::Zero();
  double chi = 0.0;
  double chi_rate = 0.0;
};

/// Matched estimates of one point from the estimating robot (ego) and its peer.
struct PointPairObservation {
  int point_id = 0;
  PointSideEstimate ego;
  PointSideEstimate peer;
  double timestamp = 0.0;
};

/// Ground-frame point implied by a feature/inverse-depth estimate.
inline PlanarPoint planar_from_estimate(const PointSideEstimate& e) {
  return camera_to_planar(unproject(e.s, 1.0 / e.chi));
}

/// Ground-frame velocity of the same point: d/dt [z_bar * (1, -x)].
inline Vec2 planar_rate_from_estimate(const PointSideEstimate& e) {
  const double z_bar = 1.0 / e.chi;
  const double z_bar_rate = -e.chi_rate / (e.chi * e.chi);
  return {z_bar_rate, -(z_bar_rate * e.s.x + z_bar * e.s_rate.x())};
}

/// Relative-pose dynamics: ego's twist sweeps the frame, the peer's moves the
/// target. xi_dot = [v_p cos(th) - v_e + w_e r_y, v_p sin(th) - w_e r_x, w_p - w_e].
inline Vec3 relpose_dynamics(const SE2Pose& xi, const UnicycleInput& u_ego,
                             const UnicycleInput& u_peer) {
  return {u_peer.v_d * std::cos(xi.theta) - u_ego.v_d + u_ego.w_theta * xi.y,
          u_peer.v_d * std::sin(xi.theta) - u_ego.w_theta * xi.x,
          u_peer.w_theta - u_ego.w_theta};
}

/// d(xi_dot)/d(xi) of the dynamics above.
inline Mat3 relpose_jacobian(const SE2Pose& xi, const UnicycleInput& u_ego,
                             const UnicycleInput& u_peer) {
  Mat3 f = Mat3::Zero();
  f(0, 1) = u_ego.w_theta;
  f(0, 2) = -u_peer.v_d * std::sin(xi.theta);
  f(1, 0) = -u_ego.w_theta;
  f(1, 2) = u_peer.v_d * std::cos(xi.theta);
  return f;
}

struct PredictResult {
  SE2Pose state;
  Covariance3 covariance;
};

/// Euler prediction of state and covariance over dt.
inline PredictResult ekf_predict(const SE2Pose& state, const Covariance3& p,
                                 const UnicycleInput& u_ego, const UnicycleInput& u_peer,
                                 double dt, const Mat3& q_process) {
  if (!std::isfinite(state.x) || !std::isfinite(state.y) || !std::isfinite(state.theta) ||
      !std::isfinite(u_ego.v_d) || !std::isfinite(u_ego.w_theta) || !std::isfinite(u_peer.v_d) ||
      !std::isfinite(u_peer.w_theta) || !std::isfinite(dt)) {
    throw NonFiniteInput("ekf_predict: non-finite input");
  }
  const Vec3 rate = relpose_dynamics(state, u_ego, u_peer);
  const Mat3 phi = Mat3::Identity() + dt * relpose_jacobian(state, u_ego, u_peer);
  PredictResult out;
  out.state = {state.x + dt * rate.x(), state.y + dt * rate.y(), state.theta + dt * rate.z()};
  out.covariance = symmetrized(phi * p * phi.transpose() + q_process * dt);
  return out;
}

/// Predicted ground-frame location of an ego-frame point in the peer's frame.
inline PlanarPoint predict_point_in_peer(const SE2Pose& xi, const PlanarPoint& m_ego) {
  const Vec2 v = xi.rotation().apply_inverse(m_ego.vec() - xi.translation());
  return {v.x(), v.y()};
}

struct Innovation {
  Vec2 residual;
  Mat23 jacobian;  // d(residual)/d(xi)
};

/// Position-level innovation: both robots' depth-scaled features must name the
/// same ground point, so  m_peer - R^T(th) (m_ego - r) = 0  at the true pose.
inline Innovation innovation_position(const SE2Pose& xi, const PointPairObservation& obs) {
  const PlanarPoint m_ego = planar_from_estimate(obs.ego);
  const PlanarPoint m_peer = planar_from_estimate(obs.peer);
  const Rot2 rot = xi.rotation();
  const Vec2 predicted = rot.apply_inverse(m_ego.vec() - xi.translation());

  Innovation out;
  out.residual = m_peer.vec() - predicted;
  out.jacobian.leftCols<2>() = rot.matrix().transpose();
  out.jacobian.col(2) = skew_scalar(1.0) * predicted;
  return out;
}

/// Velocity-level innovation: time derivative of the position constraint,
///   pi = S(th_dot) m_peer + m_peer_dot  (built from the peer's estimates)
///   h  = R^T(th) (m_ego_dot - r_dot)    (predicted from the state and inputs)
inline Innovation innovation_velocity(const SE2Pose& xi, const PointPairObservation& obs,
                                      const UnicycleInput& u_ego, const UnicycleInput& u_peer) {
  const auto rates_present = [](const PointSideEstimate& e) {
    return std::isfinite(e.s_rate.x()) && std::isfinite(e.s_rate.y()) && std::isfinite(e.chi_rate);
  };
  if (!rates_present(obs.ego) || !rates_present(obs.peer)) {
    throw MissingRates("innovation_velocity: estimate rates are required on both sides");
  }

  const double theta_dot = u_peer.w_theta - u_ego.w_theta;
  const PlanarPoint m_peer = planar_from_estimate(obs.peer);
  const Vec2 m_peer_rate = planar_rate_from_estimate(obs.peer);
  const Vec2 m_ego_rate = planar_rate_from_estimate(obs.ego);

  const Vec2 pi = skew_scalar(theta_dot) * m_peer.vec() + m_peer_rate;
  const Vec2 r_rate = relpose_dynamics(xi, u_ego, u_peer).head<2>();
  const Rot2 rot = xi.rotation();
  const Vec2 h = rot.apply_inverse(m_ego_rate - r_rate);

  Innovation out;
  out.residual = pi - h;
  // d(r_rate)/dr = [[0, w_e], [-w_e, 0]], d(r_rate)/dth = v_p [-sin th, cos th].
  Mat2 dr_rate_dr;
  dr_rate_dr << 0.0, u_ego.w_theta, -u_ego.w_theta, 0.0;
  out.jacobian.leftCols<2>() = rot.matrix().transpose() * dr_rate_dr;
  out.jacobian.col(2) =
      skew_scalar(1.0) * h +
      rot.matrix().transpose() *
          Vec2(-u_peer.v_d * std::sin(xi.theta), u_peer.v_d * std::cos(xi.theta));
  return out;
}

struct UpdateResult {
  SE2Pose state;
  Covariance3 covariance;
  bool accepted = false;
  double mahalanobis_sq = 0.0;
};

/// Gated EKF update with Joseph-form covariance. `h_jac` is d(residual)/d(xi),
/// so the accepted correction is  state - K * residual.
inline UpdateResult ekf_update(const SE2Pose& state, const Covariance3& p, const Vec2& residual,
                               const Mat23& h_jac, const NoiseConfig& noise) {
  const Mat2 s = h_jac * p * h_jac.transpose() + noise.r_meas;
  const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  if (!std::isfinite(det) || std::abs(det) < 1e-300) {
    throw SingularInnovation("ekf_update: innovation covariance is not invertible");
  }
  Mat2 s_inv;
  s_inv << s(1, 1), -s(0, 1), -s(1, 0), s(0, 0);
  s_inv /= det;

  UpdateResult out;
  out.mahalanobis_sq = residual.dot(s_inv * residual);
  if (out.mahalanobis_sq > noise.gate_threshold) {
    out.state = state;
    out.covariance = p;
    out.accepted = false;
    return out;
  }

  const Eigen::Matrix<double, 3, 2> gain = p * h_jac.transpose() * s_inv;
  const Vec3 correction = -gain * residual;
  out.state = {state.x + correction.x(), state.y + correction.y(),
               state.theta + correction.z()};
  const Mat3 i_kh = Mat3::Identity() - gain * h_jac;
  out.covariance =
      symmetrized(i_kh * p * i_kh.transpose() + gain * noise.r_meas * gain.transpose());
  out.accepted = true;
  return out;
}

}  // namespace duopose
