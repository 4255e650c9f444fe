#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "duopose/agent.hpp"
#include "duopose/depth_observer.hpp"
#include "duopose/errors.hpp"
#include "duopose/geometry.hpp"
#include "duopose/relpose_ekf.hpp"
#include "duopose/simulator.hpp"

namespace duopose {

using Json = nlohmann::ordered_json;

struct ScheduleEntry {
  double start_s = 0.0;
  UnicycleInput u;
};

struct RobotSpec {
  SE2Pose pose;
  std::vector<ScheduleEntry> schedule;

  /// Piecewise-constant input lookup.
  UnicycleInput input_at(double t) const {
    UnicycleInput u = schedule.front().u;
    for (const auto& entry : schedule) {
      if (entry.start_s <= t + 1e-12) u = entry.u;
    }
    return u;
  }
};

struct PointSpec {
  int id = 0;
  CameraPoint camera_a;  // coordinates in robot A's camera frame at t = 0
  double prior_depth_offset_m = 1.0;
  std::optional<double> prior_depth_a_m;
  std::optional<double> prior_depth_b_m;
};

struct ObserverSpec {
  Mat2 h = 2.5 * Mat2::Identity();
  double alpha = 1.0;
  double lambda = 120.0;
  double chi_min = 0.01;
  double chi_max = 10.0;
  ObserverOptions::Integrator integrator = ObserverOptions::Integrator::euler;
};

struct EkfSpec {
  bool enabled = false;
  enum class Estimator { a, b, both } estimator = Estimator::a;
  InnovationModel model = InnovationModel::position_level;
  Vec3 initial_offset = Vec3::Zero();  // added to the true initial relative pose
  Vec3 p0_diag = Vec3(2.25, 2.25, 0.0685);
  Vec3 q_process_diag = Vec3(1e-4, 1e-4, 1e-5);
  double r_meas = 1e-2;
  double gate_threshold = 9.21;
};

struct TransportSpec {
  enum class Kind { inproc, udp } kind = Kind::inproc;
  double loss_rate = 0.0;
  std::uint64_t delay_steps = 0;
  std::uint16_t port_a = 17701;
  std::uint16_t port_b = 17702;
};

struct ReportSpec {
  double depth_threshold_m = 0.05;
  double depth_rel_threshold = 0.05;
  double pose_xy_threshold_m = 0.1;
  double pose_theta_threshold_rad = 2.0 * kPi / 180.0;
  double pe_window_s = 2.0;
};

struct ScenarioConfig {
  std::string name;
  double duration_s = 0.0;
  double rate_hz = 20.0;
  std::uint64_t seed = 1;
  RobotSpec robot_a;
  std::optional<RobotSpec> robot_b;
  std::vector<PointSpec> points;
  ObserverSpec observer;
  EkfSpec ekf;
  double sigma_s = 0.0;
  double sigma_u = 0.0;
  VisibilityPolicy visibility;
  TransportSpec transport;
  double staleness_limit_s = 0.2;
  ReportSpec report;

  double dt() const { return 1.0 / rate_hz; }
  int steps() const { return static_cast<int>(std::lround(duration_s * rate_hz)); }
};

namespace config_detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path, what);
}

inline void check_keys(const Json& j, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& item : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      fail(path + "." + item.key(), "unknown key");
    }
  }
}

inline const Json& child(const Json& j, const std::string& path, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

inline double num(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

inline double req_num(const Json& j, const std::string& path, const char* key) {
  return num(child(j, path, key), path + "." + key);
}

inline double opt_num(const Json& j, const std::string& path, const char* key, double def) {
  const auto it = j.find(key);
  return it == j.end() ? def : num(*it, path + "." + key);
}

inline std::string req_str(const Json& j, const std::string& path, const char* key) {
  const Json& v = child(j, path, key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

inline std::string opt_str(const Json& j, const std::string& path, const char* key,
                           const std::string& def) {
  const auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_string()) fail(path + "." + key, "expected a string");
  return it->get<std::string>();
}

inline bool opt_bool(const Json& j, const std::string& path, const char* key, bool def) {
  const auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_boolean()) fail(path + "." + key, "expected a boolean");
  return it->get<bool>();
}

inline Vec3 req_vec3(const Json& j, const std::string& path, const char* key) {
  const Json& v = child(j, path, key);
  if (!v.is_array() || v.size() != 3) fail(path + "." + key, "expected an array of 3 numbers");
  return {num(v[0], path), num(v[1], path), num(v[2], path)};
}

inline Vec3 opt_vec3(const Json& j, const std::string& path, const char* key, const Vec3& def) {
  return j.find(key) == j.end() ? def : req_vec3(j, path, key);
}

inline SE2Pose parse_pose(const Json& j, const std::string& path) {
  check_keys(j, path, {"x_m", "y_m", "theta_rad"});
  return {req_num(j, path, "x_m"), req_num(j, path, "y_m"), req_num(j, path, "theta_rad")};
}

inline RobotSpec parse_robot(const Json& j, const std::string& path) {
  check_keys(j, path, {"pose", "schedule"});
  RobotSpec robot;
  robot.pose = parse_pose(child(j, path, "pose"), path + ".pose");
  const Json& sched = child(j, path, "schedule");
  if (!sched.is_array() || sched.empty()) fail(path + ".schedule", "expected a non-empty array");
  for (std::size_t i = 0; i < sched.size(); ++i) {
    const std::string entry_path = path + ".schedule[" + std::to_string(i) + "]";
    const Json& e = sched[i];
    check_keys(e, entry_path, {"start_s", "v_mps", "w_radps"});
    ScheduleEntry entry;
    entry.start_s = opt_num(e, entry_path, "start_s", 0.0);
    entry.u.v_d = req_num(e, entry_path, "v_mps");
    entry.u.w_theta = req_num(e, entry_path, "w_radps");
    robot.schedule.push_back(entry);
  }
  if (robot.schedule.front().start_s != 0.0) {
    fail(path + ".schedule[0].start_s", "first entry must start at 0");
  }
  for (std::size_t i = 1; i < robot.schedule.size(); ++i) {
    if (robot.schedule[i].start_s <= robot.schedule[i - 1].start_s) {
      fail(path + ".schedule[" + std::to_string(i) + "].start_s",
           "start times must be strictly increasing");
    }
  }
  return robot;
}

inline Mat2 parse_h_gain(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>() * Mat2::Identity();
  if (j.is_array() && j.size() == 2 && j[0].is_array() && j[0].size() == 2 && j[1].is_array() &&
      j[1].size() == 2) {
    Mat2 h;
    h << num(j[0][0], path), num(j[0][1], path), num(j[1][0], path), num(j[1][1], path);
    return h;
  }
  fail(path, "expected a scalar or a 2x2 array");
}

}  // namespace config_detail

inline ScenarioConfig parse_scenario(const Json& root) {
  using namespace config_detail;
  const std::string top;
  check_keys(root, "<root>",
             {"name", "duration_s", "rate_hz", "seed", "robots", "points", "observer", "ekf",
              "noise", "visibility", "transport", "staleness_limit_s", "report"});

  ScenarioConfig cfg;
  cfg.name = req_str(root, "<root>", "name");
  cfg.duration_s = req_num(root, "<root>", "duration_s");
  if (!(cfg.duration_s > 0.0)) fail("duration_s", "must be positive");
  cfg.rate_hz = req_num(root, "<root>", "rate_hz");
  if (!(cfg.rate_hz > 0.0)) fail("rate_hz", "must be positive");
  const double seed = opt_num(root, "<root>", "seed", 1.0);
  if (seed < 0.0) fail("seed", "must be non-negative");
  cfg.seed = static_cast<std::uint64_t>(seed);

  const Json& robots = child(root, "<root>", "robots");
  check_keys(robots, "robots", {"a", "b"});
  cfg.robot_a = parse_robot(child(robots, "robots", "a"), "robots.a");
  if (robots.contains("b")) {
    cfg.robot_b = parse_robot(robots["b"], "robots.b");
  }

  const Json& points = child(root, "<root>", "points");
  if (!points.is_array() || points.empty()) fail("points", "expected a non-empty array");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string path = "points[" + std::to_string(i) + "]";
    const Json& p = points[i];
    check_keys(p, path,
               {"id", "camera_a_m", "prior_depth_offset_m", "prior_depth_a_m", "prior_depth_b_m"});
    PointSpec spec;
    spec.id = static_cast<int>(req_num(p, path, "id"));
    const Json& cam = child(p, path, "camera_a_m");
    if (!cam.is_array() || cam.size() != 3) fail(path + ".camera_a_m", "expected [x, y, z]");
    spec.camera_a = {num(cam[0], path), num(cam[1], path), num(cam[2], path)};
    if (!(spec.camera_a.z_bar > 0.0)) {
      fail(path + ".camera_a_m", "z must be positive (in front of robot A at t=0)");
    }
    spec.prior_depth_offset_m = opt_num(p, path, "prior_depth_offset_m", 1.0);
    if (p.contains("prior_depth_a_m")) spec.prior_depth_a_m = req_num(p, path, "prior_depth_a_m");
    if (p.contains("prior_depth_b_m")) spec.prior_depth_b_m = req_num(p, path, "prior_depth_b_m");
    cfg.points.push_back(spec);
  }
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    for (std::size_t k = i + 1; k < cfg.points.size(); ++k) {
      if (cfg.points[i].id == cfg.points[k].id) {
        fail("points[" + std::to_string(k) + "].id", "duplicate point id");
      }
    }
  }

  if (root.contains("observer")) {
    const Json& obs = root["observer"];
    check_keys(obs, "observer", {"h", "alpha", "lambda", "chi_min", "chi_max", "integrator"});
    if (obs.contains("h")) cfg.observer.h = parse_h_gain(obs["h"], "observer.h");
    cfg.observer.alpha = opt_num(obs, "observer", "alpha", cfg.observer.alpha);
    cfg.observer.lambda = opt_num(obs, "observer", "lambda", cfg.observer.lambda);
    cfg.observer.chi_min = opt_num(obs, "observer", "chi_min", cfg.observer.chi_min);
    cfg.observer.chi_max = opt_num(obs, "observer", "chi_max", cfg.observer.chi_max);
    const std::string integrator = opt_str(obs, "observer", "integrator", "euler");
    if (integrator == "euler") {
      cfg.observer.integrator = ObserverOptions::Integrator::euler;
    } else if (integrator == "rk4") {
      cfg.observer.integrator = ObserverOptions::Integrator::rk4;
    } else {
      fail("observer.integrator", "expected 'euler' or 'rk4'");
    }
    if (!(cfg.observer.alpha > 0.0)) fail("observer.alpha", "must be positive");
    if (!(cfg.observer.lambda > 0.0)) fail("observer.lambda", "must be positive");
    if (!(cfg.observer.chi_min > 0.0 && cfg.observer.chi_min < cfg.observer.chi_max)) {
      fail("observer.chi_min", "bounds must satisfy 0 < chi_min < chi_max");
    }
  }

  if (root.contains("ekf")) {
    const Json& ekf = root["ekf"];
    check_keys(ekf, "ekf",
               {"enabled", "estimator", "innovation", "initial_offset", "p0_diag",
                "q_process_diag", "r_meas", "gate_threshold"});
    cfg.ekf.enabled = opt_bool(ekf, "ekf", "enabled", true);
    const std::string estimator = opt_str(ekf, "ekf", "estimator", "a");
    if (estimator == "a") {
      cfg.ekf.estimator = EkfSpec::Estimator::a;
    } else if (estimator == "b") {
      cfg.ekf.estimator = EkfSpec::Estimator::b;
    } else if (estimator == "both") {
      cfg.ekf.estimator = EkfSpec::Estimator::both;
    } else {
      fail("ekf.estimator", "expected 'a', 'b' or 'both'");
    }
    const std::string innovation = opt_str(ekf, "ekf", "innovation", "position");
    if (innovation == "position") {
      cfg.ekf.model = InnovationModel::position_level;
    } else if (innovation == "velocity") {
      cfg.ekf.model = InnovationModel::velocity_level;
    } else {
      fail("ekf.innovation", "expected 'position' or 'velocity'");
    }
    if (ekf.contains("initial_offset")) {
      const Json& off = ekf["initial_offset"];
      check_keys(off, "ekf.initial_offset", {"x_m", "y_m", "theta_rad"});
      cfg.ekf.initial_offset = {req_num(off, "ekf.initial_offset", "x_m"),
                                req_num(off, "ekf.initial_offset", "y_m"),
                                req_num(off, "ekf.initial_offset", "theta_rad")};
    }
    cfg.ekf.p0_diag = opt_vec3(ekf, "ekf", "p0_diag", cfg.ekf.p0_diag);
    cfg.ekf.q_process_diag = opt_vec3(ekf, "ekf", "q_process_diag", cfg.ekf.q_process_diag);
    cfg.ekf.r_meas = opt_num(ekf, "ekf", "r_meas", cfg.ekf.r_meas);
    cfg.ekf.gate_threshold = opt_num(ekf, "ekf", "gate_threshold", cfg.ekf.gate_threshold);
    if (!(cfg.ekf.r_meas > 0.0)) fail("ekf.r_meas", "must be positive");
    if (!(cfg.ekf.gate_threshold > 0.0)) fail("ekf.gate_threshold", "must be positive");
    if ((cfg.ekf.p0_diag.array() < 0.0).any()) fail("ekf.p0_diag", "must be non-negative");
    if ((cfg.ekf.q_process_diag.array() < 0.0).any()) {
      fail("ekf.q_process_diag", "must be non-negative");
    }
  }

  if (root.contains("noise")) {
    const Json& noise = root["noise"];
    check_keys(noise, "noise", {"sigma_s", "sigma_u"});
    cfg.sigma_s = opt_num(noise, "noise", "sigma_s", 0.0);
    cfg.sigma_u = opt_num(noise, "noise", "sigma_u", 0.0);
    if (cfg.sigma_s < 0.0) fail("noise.sigma_s", "must be non-negative");
    if (cfg.sigma_u < 0.0) fail("noise.sigma_u", "must be non-negative");
  }

  if (root.contains("visibility")) {
    const Json& vis = root["visibility"];
    check_keys(vis, "visibility", {"fov_half_angle_rad", "min_depth_m"});
    cfg.visibility.fov_half_angle =
        opt_num(vis, "visibility", "fov_half_angle_rad", cfg.visibility.fov_half_angle);
    cfg.visibility.min_depth = opt_num(vis, "visibility", "min_depth_m", cfg.visibility.min_depth);
    if (!(cfg.visibility.fov_half_angle > 0.0 && cfg.visibility.fov_half_angle < kPi / 2.0)) {
      fail("visibility.fov_half_angle_rad", "must be in (0, pi/2)");
    }
    if (!(cfg.visibility.min_depth > 0.0)) fail("visibility.min_depth_m", "must be positive");
  }

  if (root.contains("transport")) {
    const Json& tr = root["transport"];
    check_keys(tr, "transport", {"kind", "loss_rate", "delay_steps", "port_a", "port_b"});
    const std::string kind = opt_str(tr, "transport", "kind", "inproc");
    if (kind == "inproc") {
      cfg.transport.kind = TransportSpec::Kind::inproc;
    } else if (kind == "udp") {
      cfg.transport.kind = TransportSpec::Kind::udp;
    } else {
      fail("transport.kind", "expected 'inproc' or 'udp'");
    }
    cfg.transport.loss_rate = opt_num(tr, "transport", "loss_rate", 0.0);
    if (!(cfg.transport.loss_rate >= 0.0 && cfg.transport.loss_rate < 1.0)) {
      fail("transport.loss_rate", "must be in [0, 1)");
    }
    const double delay = opt_num(tr, "transport", "delay_steps", 0.0);
    if (delay < 0.0) fail("transport.delay_steps", "must be non-negative");
    cfg.transport.delay_steps = static_cast<std::uint64_t>(delay);
    cfg.transport.port_a = static_cast<std::uint16_t>(opt_num(tr, "transport", "port_a", 17701.0));
    cfg.transport.port_b = static_cast<std::uint16_t>(opt_num(tr, "transport", "port_b", 17702.0));
  }

  cfg.staleness_limit_s = opt_num(root, "<root>", "staleness_limit_s", cfg.staleness_limit_s);
  if (!(cfg.staleness_limit_s >= 0.0)) fail("staleness_limit_s", "must be non-negative");

  if (root.contains("report")) {
    const Json& rep = root["report"];
    check_keys(rep, "report",
               {"depth_threshold_m", "depth_rel_threshold", "pose_xy_threshold_m",
                "pose_theta_threshold_rad", "pe_window_s"});
    cfg.report.depth_threshold_m =
        opt_num(rep, "report", "depth_threshold_m", cfg.report.depth_threshold_m);
    cfg.report.depth_rel_threshold =
        opt_num(rep, "report", "depth_rel_threshold", cfg.report.depth_rel_threshold);
    cfg.report.pose_xy_threshold_m =
        opt_num(rep, "report", "pose_xy_threshold_m", cfg.report.pose_xy_threshold_m);
    cfg.report.pose_theta_threshold_rad =
        opt_num(rep, "report", "pose_theta_threshold_rad", cfg.report.pose_theta_threshold_rad);
    cfg.report.pe_window_s = opt_num(rep, "report", "pe_window_s", cfg.report.pe_window_s);
  }

  if (cfg.ekf.enabled) {
    if (!cfg.robot_b) fail("robots.b", "required when the relative-pose filter is enabled");
    if (cfg.points.size() < 2) {
      fail("points", "at least 2 points are required for relative-pose scenarios");
    }
  }
  return cfg;
}

inline ScenarioConfig parse_scenario(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(root);
}

/// Serializes a fully-resolved config (all defaults filled in) for the echo
/// block of summary.json.
inline Json to_json(const ScenarioConfig& cfg) {
  Json root;
  root["name"] = cfg.name;
  root["duration_s"] = cfg.duration_s;
  root["rate_hz"] = cfg.rate_hz;
  root["seed"] = cfg.seed;

  const auto robot_json = [](const RobotSpec& r) {
    Json j;
    j["pose"] = {{"x_m", r.pose.x}, {"y_m", r.pose.y}, {"theta_rad", r.pose.theta}};
    j["schedule"] = Json::array();
    for (const auto& e : r.schedule) {
      j["schedule"].push_back(
          {{"start_s", e.start_s}, {"v_mps", e.u.v_d}, {"w_radps", e.u.w_theta}});
    }
    return j;
  };
  root["robots"]["a"] = robot_json(cfg.robot_a);
  if (cfg.robot_b) root["robots"]["b"] = robot_json(*cfg.robot_b);

  root["points"] = Json::array();
  for (const auto& p : cfg.points) {
    Json j;
    j["id"] = p.id;
    j["camera_a_m"] = {p.camera_a.x_bar, p.camera_a.y_bar, p.camera_a.z_bar};
    j["prior_depth_offset_m"] = p.prior_depth_offset_m;
    if (p.prior_depth_a_m) j["prior_depth_a_m"] = *p.prior_depth_a_m;
    if (p.prior_depth_b_m) j["prior_depth_b_m"] = *p.prior_depth_b_m;
    root["points"].push_back(j);
  }

  root["observer"] = {
      {"h", {{cfg.observer.h(0, 0), cfg.observer.h(0, 1)},
             {cfg.observer.h(1, 0), cfg.observer.h(1, 1)}}},
      {"alpha", cfg.observer.alpha},
      {"lambda", cfg.observer.lambda},
      {"chi_min", cfg.observer.chi_min},
      {"chi_max", cfg.observer.chi_max},
      {"integrator",
       cfg.observer.integrator == ObserverOptions::Integrator::euler ? "euler" : "rk4"}};

  root["ekf"] = {
      {"enabled", cfg.ekf.enabled},
      {"estimator", cfg.ekf.estimator == EkfSpec::Estimator::a      ? "a"
                    : cfg.ekf.estimator == EkfSpec::Estimator::b    ? "b"
                                                                    : "both"},
      {"innovation",
       cfg.ekf.model == InnovationModel::position_level ? "position" : "velocity"},
      {"initial_offset",
       {{"x_m", cfg.ekf.initial_offset.x()},
        {"y_m", cfg.ekf.initial_offset.y()},
        {"theta_rad", cfg.ekf.initial_offset.z()}}},
      {"p0_diag", {cfg.ekf.p0_diag.x(), cfg.ekf.p0_diag.y(), cfg.ekf.p0_diag.z()}},
      {"q_process_diag",
       {cfg.ekf.q_process_diag.x(), cfg.ekf.q_process_diag.y(), cfg.ekf.q_process_diag.z()}},
      {"r_meas", cfg.ekf.r_meas},
      {"gate_threshold", cfg.ekf.gate_threshold}};

  root["noise"] = {{"sigma_s", cfg.sigma_s}, {"sigma_u", cfg.sigma_u}};
  root["visibility"] = {{"fov_half_angle_rad", cfg.visibility.fov_half_angle},
                        {"min_depth_m", cfg.visibility.min_depth}};
  root["transport"] = {
      {"kind", cfg.transport.kind == TransportSpec::Kind::inproc ? "inproc" : "udp"},
      {"loss_rate", cfg.transport.loss_rate},
      {"delay_steps", cfg.transport.delay_steps},
      {"port_a", cfg.transport.port_a},
      {"port_b", cfg.transport.port_b}};
  root["staleness_limit_s"] = cfg.staleness_limit_s;
  root["report"] = {{"depth_threshold_m", cfg.report.depth_threshold_m},
                    {"depth_rel_threshold", cfg.report.depth_rel_threshold},
                    {"pose_xy_threshold_m", cfg.report.pose_xy_threshold_m},
                    {"pose_theta_threshold_rad", cfg.report.pose_theta_threshold_rad},
                    {"pe_window_s", cfg.report.pe_window_s}};
  return root;
}

/// Sets a numeric value at a dotted path ("observer.lambda",
/// "robots.a.schedule.0.v_mps") inside a raw config; used by parameter sweeps.
inline void set_config_value(Json& root, const std::string& path, double value) {
  Json* node = &root;
  std::size_t pos = 0;
  std::string token;
  std::vector<std::string> tokens;
  while (pos <= path.size()) {
    const std::size_t dot = path.find('.', pos);
    tokens.push_back(path.substr(pos, dot == std::string::npos ? dot : dot - pos));
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (node->is_array()) {
      char* end = nullptr;
      const long idx = std::strtol(t.c_str(), &end, 10);
      if (end == t.c_str() || *end != '\0' || idx < 0 ||
          static_cast<std::size_t>(idx) >= node->size()) {
        throw ConfigError(path, "invalid array index '" + t + "'");
      }
      node = &(*node)[static_cast<std::size_t>(idx)];
    } else if (node->is_object() && node->contains(t)) {
      node = &(*node)[t];
    } else {
      throw ConfigError(path, "no such field '" + t + "'");
    }
  }
  const std::string& leaf = tokens.back();
  if (node->is_array()) {
    char* end = nullptr;
    const long idx = std::strtol(leaf.c_str(), &end, 10);
    if (end == leaf.c_str() || *end != '\0' || idx < 0 ||
        static_cast<std::size_t>(idx) >= node->size()) {
      throw ConfigError(path, "invalid array index '" + leaf + "'");
    }
    (*node)[static_cast<std::size_t>(idx)] = value;
  } else if (node->is_object() && node->contains(leaf)) {
    (*node)[leaf] = value;
  } else {
    throw ConfigError(path, "no such field '" + leaf + "'");
  }
}

}  // namespace duopose
