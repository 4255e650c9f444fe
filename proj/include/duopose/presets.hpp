#pragma once

#include <string>
#include <vector>

#include "duopose/errors.hpp"
#include "duopose/scenario.hpp"

namespace duopose {

struct Preset {
  const char* name;
  const char* description;
  const char* json;
};

// Built-in scenarios. The two-robot presets shuttle each robot back and forth
// along its arc (the input pair with alternating sign) so that both landmarks
// stay inside both cameras' fields of view for the whole run; their gates are
// wide open because the noiseless feeds contain no outliers, only the known
// initialization transient of the depth filters.
inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = {
      {"depth-four-points",
       "single robot driving straight at four landmarks; depth filters only",
       R"json({
  "name": "depth-four-points",
  "duration_s": 40.0,
  "rate_hz": 20.0,
  "seed": 1,
  "robots": {
    "a": {"pose": {"x_m": 0.0, "y_m": 0.0, "theta_rad": 0.0},
           "schedule": [{"start_s": 0.0, "v_mps": 0.1, "w_radps": 0.0}]}
  },
  "points": [
    {"id": 1, "camera_a_m": [0.0, 0.0, 5.0], "prior_depth_offset_m": 1.0},
    {"id": 2, "camera_a_m": [0.0, 5.0, 5.0], "prior_depth_offset_m": 1.0},
    {"id": 3, "camera_a_m": [5.0, 0.0, 5.0], "prior_depth_offset_m": 1.0},
    {"id": 4, "camera_a_m": [5.0, 5.0, 5.0], "prior_depth_offset_m": 1.0}
  ],
  "observer": {"h": 2.5, "alpha": 1.0, "lambda": 120.0},
  "visibility": {"fov_half_angle_rad": 1.48, "min_depth_m": 0.1}
})json"},
      {"relpose-gazebo",
       "two shuttling robots sharing landmarks 1 and 4; robot A runs the pose filter",
       R"json({
  "name": "relpose-gazebo",
  "duration_s": 120.0,
  "rate_hz": 20.0,
  "seed": 2,
  "robots": {
    "a":
    {"pose": {"x_m": 0.0, "y_m": 0.0, "theta_rad": 0.0},
     "schedule": [
      {"start_s": 0.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 12.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 24.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 36.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 48.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 60.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 72.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 84.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 96.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 108.0, "v_mps": -0.1, "w_radps": 0.05}
    ]},
    "b":
    {"pose": {"x_m": -1.0, "y_m": -2.0, "theta_rad": 0.1466},
     "schedule": [
      {"start_s": 0.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 12.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 24.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 36.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 48.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 60.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 72.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 84.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 96.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 108.0, "v_mps": -0.08, "w_radps": 0.05}
    ]}
  },
  "points": [
    {"id": 1, "camera_a_m": [0.0, 0.0, 5.0], "prior_depth_offset_m": 1.0},
    {"id": 4, "camera_a_m": [5.0, 5.0, 5.0], "prior_depth_offset_m": 1.0}
  ],
  "observer": {"h": 2.5, "alpha": 1.0, "lambda": 120.0},
  "ekf": {
    "enabled": true,
    "estimator": "a",
    "innovation": "position",
    "initial_offset": {"x_m": 1.5, "y_m": 1.5, "theta_rad": 0.2617993877991494},
    "p0_diag": [2.25, 2.25, 0.06853891945200943],
    "q_process_diag": [1e-4, 1e-4, 1e-5],
    "r_meas": 0.01,
    "gate_threshold": 1e9
  },
  "visibility": {"fov_half_angle_rad": 1.48, "min_depth_m": 0.1},
  "staleness_limit_s": 0.2
})json"},
      {"relpose-gazebo-lossy",
       "relpose-gazebo under 10% message loss and 2-poll delivery delay",
       R"json({
  "name": "relpose-gazebo-lossy",
  "duration_s": 180.0,
  "rate_hz": 20.0,
  "seed": 2,
  "robots": {
    "a":
    {"pose": {"x_m": 0.0, "y_m": 0.0, "theta_rad": 0.0},
     "schedule": [
      {"start_s": 0.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 12.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 24.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 36.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 48.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 60.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 72.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 84.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 96.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 108.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 120.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 132.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 144.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 156.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 168.0, "v_mps": 0.1, "w_radps": -0.05}
    ]},
    "b":
    {"pose": {"x_m": -1.0, "y_m": -2.0, "theta_rad": 0.1466},
     "schedule": [
      {"start_s": 0.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 12.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 24.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 36.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 48.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 60.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 72.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 84.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 96.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 108.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 120.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 132.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 144.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 156.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 168.0, "v_mps": 0.08, "w_radps": -0.05}
    ]}
  },
  "points": [
    {"id": 1, "camera_a_m": [0.0, 0.0, 5.0], "prior_depth_offset_m": 1.0},
    {"id": 4, "camera_a_m": [5.0, 5.0, 5.0], "prior_depth_offset_m": 1.0}
  ],
  "observer": {"h": 2.5, "alpha": 1.0, "lambda": 120.0},
  "ekf": {
    "enabled": true,
    "estimator": "a",
    "innovation": "position",
    "initial_offset": {"x_m": 1.5, "y_m": 1.5, "theta_rad": 0.2617993877991494},
    "p0_diag": [2.25, 2.25, 0.06853891945200943],
    "q_process_diag": [1e-4, 1e-4, 1e-5],
    "r_meas": 0.01,
    "gate_threshold": 1e9
  },
  "transport": {"kind": "inproc", "loss_rate": 0.1, "delay_steps": 2},
  "report": {"pose_xy_threshold_m": 0.2, "pose_theta_threshold_rad": 0.06981317007977318},
  "visibility": {"fov_half_angle_rad": 1.48, "min_depth_m": 0.1},
  "staleness_limit_s": 0.2
})json"},
      {"relpose-noisy",
       "relpose-gazebo with feature and input noise enabled",
       R"json({
  "name": "relpose-noisy",
  "duration_s": 120.0,
  "rate_hz": 20.0,
  "seed": 5,
  "robots": {
    "a":
    {"pose": {"x_m": 0.0, "y_m": 0.0, "theta_rad": 0.0},
     "schedule": [
      {"start_s": 0.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 12.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 24.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 36.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 48.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 60.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 72.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 84.0, "v_mps": -0.1, "w_radps": 0.05},
      {"start_s": 96.0, "v_mps": 0.1, "w_radps": -0.05},
      {"start_s": 108.0, "v_mps": -0.1, "w_radps": 0.05}
    ]},
    "b":
    {"pose": {"x_m": -1.0, "y_m": -2.0, "theta_rad": 0.1466},
     "schedule": [
      {"start_s": 0.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 12.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 24.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 36.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 48.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 60.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 72.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 84.0, "v_mps": -0.08, "w_radps": 0.05},
      {"start_s": 96.0, "v_mps": 0.08, "w_radps": -0.05},
      {"start_s": 108.0, "v_mps": -0.08, "w_radps": 0.05}
    ]}
  },
  "points": [
    {"id": 1, "camera_a_m": [0.0, 0.0, 5.0], "prior_depth_offset_m": 1.0},
    {"id": 4, "camera_a_m": [5.0, 5.0, 5.0], "prior_depth_offset_m": 1.0}
  ],
  "observer": {"h": 2.5, "alpha": 1.0, "lambda": 120.0},
  "ekf": {
    "enabled": true,
    "estimator": "a",
    "innovation": "position",
    "initial_offset": {"x_m": 1.5, "y_m": 1.5, "theta_rad": 0.2617993877991494},
    "p0_diag": [2.25, 2.25, 0.06853891945200943],
    "q_process_diag": [1e-4, 1e-4, 1e-5],
    "r_meas": 0.01,
    "gate_threshold": 1e9
  },
  "noise": {"sigma_s": 1e-3, "sigma_u": 1e-3},
  "visibility": {"fov_half_angle_rad": 1.48, "min_depth_m": 0.1},
  "staleness_limit_s": 0.2
})json"},
      {"experiment-params",
       "simulated counterpart of the physical run: gentle turns, two landmarks",
       R"json({
  "name": "experiment-params",
  "duration_s": 40.0,
  "rate_hz": 20.0,
  "seed": 3,
  "robots": {
    "a": {"pose": {"x_m": 0.0, "y_m": 0.0, "theta_rad": 0.0},
           "schedule": [{"start_s": 0.0, "v_mps": 0.1, "w_radps": 0.02}]},
    "b": {"pose": {"x_m": 0.5, "y_m": 6.5, "theta_rad": 0.405},
           "schedule": [{"start_s": 0.0, "v_mps": 0.1, "w_radps": -0.03}]}
  },
  "points": [
    {"id": 1, "camera_a_m": [-2.8, -1.8, 6.0], "prior_depth_offset_m": 1.0},
    {"id": 2, "camera_a_m": [-5.9, 1.0, 7.6], "prior_depth_offset_m": 1.0}
  ],
  "observer": {"h": 2.5, "alpha": 1.0, "lambda": 120.0},
  "ekf": {
    "enabled": true,
    "estimator": "a",
    "innovation": "position",
    "initial_offset": {"x_m": 1.5, "y_m": 1.5, "theta_rad": 1.0471975511965976},
    "p0_diag": [2.25, 2.25, 1.0966227112321508],
    "q_process_diag": [1e-4, 1e-4, 1e-5],
    "r_meas": 0.01,
    "gate_threshold": 1e9
  },
  "visibility": {"fov_half_angle_rad": 1.48, "min_depth_m": 0.1},
  "staleness_limit_s": 0.2,
  "report": {"depth_threshold_m": 0.1}
})json"}};
  return list;
}

inline const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (name == p.name) return p;
  }
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

inline Json preset_config(const std::string& name) {
  return Json::parse(find_preset(name).json);
}

}  // namespace duopose
