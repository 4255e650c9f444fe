#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "duopose/errors.hpp"
#include "duopose/geometry.hpp"

namespace duopose {

/// Gains of the inverse-depth observer: feature-error gain H (symmetric
/// positive definite), Q = alpha * I2, and the scalar depth gain lambda.
struct DepthObserverGains {
  Mat2 h = 2.5 * Mat2::Identity();
  double alpha = 1.0;
  double lambda = 120.0;

  void validate() const {
    if (!(alpha > 0.0)) throw Error("observer gains: alpha must be positive");
    if (!(lambda > 0.0)) throw Error("observer gains: lambda must be positive");
    if (std::abs(h(0, 1) - h(1, 0)) > 1e-12) throw Error("observer gains: H must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat2> eig(h);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
      throw Error("observer gains: H must be positive definite");
    }
  }
};

struct ObserverOptions {
  double chi_min = 0.01;  // z_bar <= 100 m
  double chi_max = 10.0;  // z_bar >= 0.1 m
  enum class Integrator { euler, rk4 } integrator = Integrator::euler;
};

/// The three pieces of the normalized-feature / inverse-depth dynamics:
///   s_dot  = f_m(s, u) + omega^T * chi
///   chi_dot = f_u(s, u, chi)
struct FeatureDynamics {
  Vec2 f_m;
  RowVec2 omega;
  double f_u;
};

inline FeatureDynamics eval_dynamics(const NormalizedFeature& s, const UnicycleInput& u,
                                     double chi) {
  FeatureDynamics d;
  d.f_m = u.w_theta * Vec2(1.0 + s.x * s.x, s.x * s.y);
  d.omega = u.v_d * RowVec2(s.x, s.y);
  d.f_u = u.v_d * chi * chi + s.x * u.w_theta * chi;
  return d;
}

/// Instantaneous excitation ||omega||^2 = (x^2 + y^2) * v_d^2. The observer
/// can only converge while this stays bounded away from zero.
inline double pe_excitation(const NormalizedFeature& s, const UnicycleInput& u) {
  return (s.x * s.x + s.y * s.y) * u.v_d * u.v_d;
}

struct DepthObserverState {
  NormalizedFeature s_hat;
  double chi_hat = 0.2;
  DepthObserverGains gains;
  ObserverOptions options;
};

/// Starts an observer from the first feature measurement and a prior depth.
inline DepthObserverState make_observer(const NormalizedFeature& s0, double prior_depth,
                                        const DepthObserverGains& gains,
                                        const ObserverOptions& options = {}) {
  gains.validate();
  DepthObserverState st;
  st.s_hat = s0;
  st.chi_hat = std::clamp(1.0 / prior_depth, options.chi_min, options.chi_max);
  st.gains = gains;
  st.options = options;
  return st;
}

struct ObserverStepOutput {
  DepthObserverState new_state;
  Vec2 s_hat_rate;      // observer RHS at the pre-step state
  double chi_hat_rate;  // observer RHS at the pre-step state
};

namespace detail {

struct ObserverRates {
  Vec2 s_hat_rate;
  double chi_hat_rate;
};

inline ObserverRates observer_rates(const NormalizedFeature& s_hat, double chi_hat,
                                    const NormalizedFeature& s_meas, const UnicycleInput& u,
                                    const DepthObserverGains& g) {
  // The measured s drives f_m, omega and f_u; chi is only known through chi_hat.
  const FeatureDynamics dyn = eval_dynamics(s_meas, u, chi_hat);
  const Vec2 s_tilde = s_meas.vec() - s_hat.vec();
  ObserverRates r;
  r.s_hat_rate = dyn.f_m + dyn.omega.transpose() * chi_hat + g.h * s_tilde;
  r.chi_hat_rate = dyn.f_u + g.lambda * (dyn.omega * (g.alpha * s_tilde)).value();
  return r;
}

}  // namespace detail

/// Advances the observer by one step against a fresh feature measurement.
inline ObserverStepOutput observer_step(const DepthObserverState& state,
                                        const NormalizedFeature& s_meas, const UnicycleInput& u,
                                        double dt) {
  if (!std::isfinite(s_meas.x) || !std::isfinite(s_meas.y) || !std::isfinite(u.v_d) ||
      !std::isfinite(u.w_theta) || !std::isfinite(dt) || !std::isfinite(state.s_hat.x) ||
      !std::isfinite(state.s_hat.y) || !std::isfinite(state.chi_hat)) {
    throw NonFiniteInput("observer_step: non-finite input");
  }

  const auto rates = detail::observer_rates(state.s_hat, state.chi_hat, s_meas, u, state.gains);

  ObserverStepOutput out;
  out.s_hat_rate = rates.s_hat_rate;
  out.chi_hat_rate = rates.chi_hat_rate;
  out.new_state = state;

  if (state.options.integrator == ObserverOptions::Integrator::euler) {
    out.new_state.s_hat.x += dt * rates.s_hat_rate.x();
    out.new_state.s_hat.y += dt * rates.s_hat_rate.y();
    out.new_state.chi_hat += dt * rates.chi_hat_rate;
  } else {
    // Classic RK4 on (s_hat, chi_hat) with the measurement and input held.
    const auto f = [&](const Vec2& sh, double ch) {
      return detail::observer_rates({sh.x(), sh.y()}, ch, s_meas, u, state.gains);
    };
    const Vec2 s0 = state.s_hat.vec();
    const double c0 = state.chi_hat;
    const auto k1 = f(s0, c0);
    const auto k2 = f(s0 + 0.5 * dt * k1.s_hat_rate, c0 + 0.5 * dt * k1.chi_hat_rate);
    const auto k3 = f(s0 + 0.5 * dt * k2.s_hat_rate, c0 + 0.5 * dt * k2.chi_hat_rate);
    const auto k4 = f(s0 + dt * k3.s_hat_rate, c0 + dt * k3.chi_hat_rate);
    const Vec2 s_next =
        s0 + (dt / 6.0) * (k1.s_hat_rate + 2.0 * k2.s_hat_rate + 2.0 * k3.s_hat_rate + k4.s_hat_rate);
    out.new_state.s_hat = {s_next.x(), s_next.y()};
    out.new_state.chi_hat =
        c0 + (dt / 6.0) *
                 (k1.chi_hat_rate + 2.0 * k2.chi_hat_rate + 2.0 * k3.chi_hat_rate + k4.chi_hat_rate);
  }

  out.new_state.chi_hat =
      std::clamp(out.new_state.chi_hat, state.options.chi_min, state.options.chi_max);
  return out;
}

/// Depth estimate z_bar = 1 / chi_hat; the chi bounds keep this well defined.
inline double depth_estimate(const DepthObserverState& state) { return 1.0 / state.chi_hat; }

}  // namespace duopose
