#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "duopose/agent.hpp"
#include "duopose/scenario.hpp"
#include "duopose/simulator.hpp"
#include "duopose/transport.hpp"

namespace duopose {

struct DepthSample {
  AgentId agent;
  int point_id;
  double z_true;
  double z_est;
  double error;  // z_est - z_true
  double pe;
  bool visible;
};

struct PoseSample {
  AgentId agent;
  SE2Pose est;
  SE2Pose truth;
  double err_x;
  double err_y;
  double err_theta;  // wrapped
  std::uint64_t rejected_updates;  // cumulative gate rejections at this step
};

struct StepRecord {
  double time;
  std::vector<DepthSample> depth;
  std::vector<PoseSample> pose;
};

struct RunReport {
  ScenarioConfig config;
  Json resolved_config;
  std::vector<StepRecord> records;
  AgentCounters counters_a;
  AgentCounters counters_b;
  bool has_agent_b = false;
  LinkStats link_stats;
  double wall_seconds = 0.0;
};

namespace harness_detail {

inline double prior_depth_for(const PointSpec& spec, AgentId agent, double true_depth_t0,
                              std::size_t index) {
  const auto& explicit_prior =
      agent == AgentId::a ? spec.prior_depth_a_m : spec.prior_depth_b_m;
  if (explicit_prior) return *explicit_prior;
  const double prior = true_depth_t0 + spec.prior_depth_offset_m;
  if (!(prior > 0.0)) {
    throw ConfigError("points[" + std::to_string(index) + "]",
                      std::string("derived prior depth for robot ") + agent_name(agent) +
                          " is not positive; set prior_depth_" + agent_name(agent) +
                          "_m explicitly");
  }
  return prior;
}

inline AgentConfig agent_config(const ScenarioConfig& cfg, AgentId id,
                                const std::map<int, double>& priors, const SE2Pose& xi_true0) {
  AgentConfig ac;
  ac.id = id;
  ac.gains.h = cfg.observer.h;
  ac.gains.alpha = cfg.observer.alpha;
  ac.gains.lambda = cfg.observer.lambda;
  ac.observer_options.chi_min = cfg.observer.chi_min;
  ac.observer_options.chi_max = cfg.observer.chi_max;
  ac.observer_options.integrator = cfg.observer.integrator;
  ac.prior_depths = priors;
  ac.staleness_limit = cfg.staleness_limit_s;

  const bool estimates =
      cfg.ekf.enabled && (cfg.ekf.estimator == EkfSpec::Estimator::both ||
                          (id == AgentId::a && cfg.ekf.estimator == EkfSpec::Estimator::a) ||
                          (id == AgentId::b && cfg.ekf.estimator == EkfSpec::Estimator::b));
  ac.ekf.enabled = estimates;
  if (estimates) {
    ac.ekf.model = cfg.ekf.model;
    ac.ekf.noise.q_process = cfg.ekf.q_process_diag.asDiagonal();
    ac.ekf.noise.r_meas = cfg.ekf.r_meas * Mat2::Identity();
    ac.ekf.noise.gate_threshold = cfg.ekf.gate_threshold;
    ac.ekf.initial_state = {xi_true0.x + cfg.ekf.initial_offset.x(),
                            xi_true0.y + cfg.ekf.initial_offset.y(),
                            xi_true0.theta + cfg.ekf.initial_offset.z()};
    ac.ekf.initial_covariance = cfg.ekf.p0_diag.asDiagonal();
  }
  return ac;
}

}  // namespace harness_detail

/// Runs a scenario end to end and collects one record per simulation step
/// (plus the t = 0 snapshot).
inline RunReport run(const ScenarioConfig& cfg) {
  const auto wall_start = std::chrono::steady_clock::now();

  std::vector<std::pair<int, CameraPoint>> camera_points;
  for (const auto& p : cfg.points) camera_points.emplace_back(p.id, p.camera_a);
  WorldState world = make_world(cfg.robot_a.pose,
                                cfg.robot_b ? cfg.robot_b->pose : SE2Pose{}, camera_points);

  std::map<int, double> priors_a;
  std::map<int, double> priors_b;
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    const auto& spec = cfg.points[i];
    priors_a[spec.id] = harness_detail::prior_depth_for(
        spec, AgentId::a, point_in_camera(world, AgentId::a, world.points[i]).z_bar, i);
    if (cfg.robot_b) {
      priors_b[spec.id] = harness_detail::prior_depth_for(
          spec, AgentId::b, point_in_camera(world, AgentId::b, world.points[i]).z_bar, i);
    }
  }

  const SE2Pose xi_true_a0 = relative_pose(world.pose_a, world.pose_b);
  const SE2Pose xi_true_b0 = relative_pose(world.pose_b, world.pose_a);
  Agent agent_a(harness_detail::agent_config(cfg, AgentId::a, priors_a, xi_true_a0));
  std::optional<Agent> agent_b;
  if (cfg.robot_b) {
    agent_b.emplace(harness_detail::agent_config(cfg, AgentId::b, priors_b, xi_true_b0));
  }

  TransportPair link;
  std::unique_ptr<Transport> udp_a;
  std::unique_ptr<Transport> udp_b;
  Transport* transport_a = nullptr;
  Transport* transport_b = nullptr;
  if (cfg.transport.kind == TransportSpec::Kind::udp) {
    udp_a = std::make_unique<UdpTransport>(cfg.transport.port_a, cfg.transport.port_b);
    udp_b = std::make_unique<UdpTransport>(cfg.transport.port_b, cfg.transport.port_a);
    transport_a = udp_a.get();
    transport_b = udp_b.get();
  } else {
    link = (cfg.transport.loss_rate > 0.0 || cfg.transport.delay_steps > 0)
               ? make_lossy_pair(cfg.transport.loss_rate, cfg.transport.delay_steps,
                                 derive_seed(cfg.seed, 7))
               : make_inproc_pair();
    transport_a = link.a.get();
    transport_b = link.b.get();
  }

  Rng rng_meas_a(derive_seed(cfg.seed, 1));
  Rng rng_meas_b(derive_seed(cfg.seed, 2));
  Rng rng_input_a(derive_seed(cfg.seed, 3));
  Rng rng_input_b(derive_seed(cfg.seed, 4));

  const double dt = cfg.dt();
  const int steps = cfg.steps();

  RunReport report;
  report.config = cfg;
  report.resolved_config = to_json(cfg);
  report.has_agent_b = cfg.robot_b.has_value();
  report.records.reserve(static_cast<std::size_t>(steps) + 1);

  const auto depth_samples = [&](const WorldState& w, const Agent* agent, AgentId id,
                                 const std::map<int, double>& priors,
                                 const std::map<int, std::pair<double, bool>>& pe_by_point) {
    std::vector<DepthSample> out;
    for (const auto& point : w.points) {
      DepthSample s{};
      s.agent = id;
      s.point_id = point.id;
      s.z_true = point_in_camera(w, id, point).z_bar;
      const DepthObserverState* obs = nullptr;
      if (agent) {
        const auto it = agent->observers().find(point.id);
        if (it != agent->observers().end()) obs = &it->second;
      }
      s.z_est = obs ? depth_estimate(*obs) : priors.at(point.id);
      s.error = s.z_est - s.z_true;
      const auto pe_it = pe_by_point.find(point.id);
      s.pe = pe_it != pe_by_point.end() ? pe_it->second.first : 0.0;
      s.visible = pe_it != pe_by_point.end() && pe_it->second.second;
      out.push_back(s);
    }
    return out;
  };

  const auto pose_samples = [&](const WorldState& w) {
    std::vector<PoseSample> out;
    const auto add = [&](const Agent& agent, AgentId id) {
      if (!agent.estimates_pose()) return;
      PoseSample s{};
      s.agent = id;
      s.est = agent.pose_estimate();
      s.truth = relative_pose(agent_pose(w, id), agent_pose(w, other_agent(id)));
      s.err_x = s.est.x - s.truth.x;
      s.err_y = s.est.y - s.truth.y;
      s.err_theta = wrap_angle(s.est.theta - s.truth.theta);
      s.rejected_updates = agent.counters().gate_rejected;
      out.push_back(s);
    };
    add(agent_a, AgentId::a);
    if (agent_b) add(*agent_b, AgentId::b);
    return out;
  };

  const auto pe_map = [&](const std::vector<std::pair<int, NormalizedFeature>>& meas,
                          const UnicycleInput& u) {
    std::map<int, std::pair<double, bool>> out;
    for (const auto& [id, s] : meas) out[id] = {pe_excitation(s, u), true};
    return out;
  };

  // t = 0 snapshot: priors and initial filter states against initial truth.
  {
    StepRecord rec;
    rec.time = 0.0;
    const auto meas_a0 = observe(world, AgentId::a, cfg.visibility);
    rec.depth = depth_samples(world, nullptr, AgentId::a, priors_a,
                              pe_map(meas_a0, cfg.robot_a.input_at(0.0)));
    if (cfg.robot_b) {
      const auto meas_b0 = observe(world, AgentId::b, cfg.visibility);
      const auto b_samples = depth_samples(world, nullptr, AgentId::b, priors_b,
                                           pe_map(meas_b0, cfg.robot_b->input_at(0.0)));
      rec.depth.insert(rec.depth.end(), b_samples.begin(), b_samples.end());
    }
    rec.pose = pose_samples(world);
    report.records.push_back(std::move(rec));
  }

  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    const UnicycleInput u_a = cfg.robot_a.input_at(t);
    UnicycleInput u_a_meas = u_a;
    if (cfg.sigma_u > 0.0) {
      u_a_meas.v_d += rng_input_a.normal(0.0, cfg.sigma_u);
      u_a_meas.w_theta += rng_input_a.normal(0.0, cfg.sigma_u);
    }
    const auto meas_a = observe(world, AgentId::a, cfg.sigma_s, rng_meas_a, cfg.visibility);
    agent_a.step(meas_a, u_a_meas, dt, *transport_a);

    UnicycleInput u_b;
    std::vector<std::pair<int, NormalizedFeature>> meas_b;
    UnicycleInput u_b_meas;
    if (cfg.robot_b) {
      u_b = cfg.robot_b->input_at(t);
      u_b_meas = u_b;
      if (cfg.sigma_u > 0.0) {
        u_b_meas.v_d += rng_input_b.normal(0.0, cfg.sigma_u);
        u_b_meas.w_theta += rng_input_b.normal(0.0, cfg.sigma_u);
      }
      meas_b = observe(world, AgentId::b, cfg.sigma_s, rng_meas_b, cfg.visibility);
      agent_b->step(meas_b, u_b_meas, dt, *transport_b);
    }

    world = world_step(world, u_a, u_b, dt);

    StepRecord rec;
    rec.time = world.time;
    rec.depth = depth_samples(world, &agent_a, AgentId::a, priors_a, pe_map(meas_a, u_a_meas));
    if (cfg.robot_b) {
      const auto b_samples =
          depth_samples(world, &*agent_b, AgentId::b, priors_b, pe_map(meas_b, u_b_meas));
      rec.depth.insert(rec.depth.end(), b_samples.begin(), b_samples.end());
    }
    rec.pose = pose_samples(world);
    report.records.push_back(std::move(rec));
  }

  report.counters_a = agent_a.counters();
  if (agent_b) report.counters_b = agent_b->counters();
  if (cfg.transport.kind == TransportSpec::Kind::inproc) report.link_stats = link.stats();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return report;
}

inline RunReport run(const Json& raw_config) { return run(parse_scenario(raw_config)); }

/// One run per value of the swept parameter, all sharing the base config seed.
inline std::vector<RunReport> sweep(const Json& base_config, const std::string& param_path,
                                    const std::vector<double>& values) {
  std::vector<RunReport> out;
  for (const double v : values) {
    Json modified = base_config;
    set_config_value(modified, param_path, v);
    out.push_back(run(modified));
  }
  return out;
}

// ---- metrics --------------------------------------------------------------

/// First time the predicate holds and keeps holding until the end of the run.
template <typename Pred>
std::optional<double> convergence_time(const std::vector<StepRecord>& records, Pred&& pred) {
  std::optional<double> entered;
  for (const auto& rec : records) {
    if (pred(rec)) {
      if (!entered) entered = rec.time;
    } else {
      entered.reset();
    }
  }
  return entered;
}

inline const DepthSample* find_depth(const StepRecord& rec, AgentId agent, int point_id) {
  for (const auto& d : rec.depth) {
    if (d.agent == agent && d.point_id == point_id) return &d;
  }
  return nullptr;
}

inline const PoseSample* find_pose(const StepRecord& rec, AgentId agent) {
  for (const auto& p : rec.pose) {
    if (p.agent == agent) return &p;
  }
  return nullptr;
}

inline std::optional<double> depth_convergence_time_abs(const std::vector<StepRecord>& records,
                                                        AgentId agent, int point_id,
                                                        double threshold_m) {
  return convergence_time(records, [&](const StepRecord& rec) {
    const DepthSample* d = find_depth(rec, agent, point_id);
    return d && std::abs(d->error) < threshold_m;
  });
}

inline std::optional<double> depth_convergence_time_rel(const std::vector<StepRecord>& records,
                                                        AgentId agent, int point_id,
                                                        double rel_threshold) {
  return convergence_time(records, [&](const StepRecord& rec) {
    const DepthSample* d = find_depth(rec, agent, point_id);
    return d && d->z_true > 0.0 && std::abs(d->error) < rel_threshold * d->z_true;
  });
}

struct PoseConvergence {
  std::optional<double> x;
  std::optional<double> y;
  std::optional<double> theta;
  std::optional<double> all;
};

inline PoseConvergence pose_convergence_times(const std::vector<StepRecord>& records,
                                              AgentId agent, double xy_threshold_m,
                                              double theta_threshold_rad) {
  PoseConvergence out;
  out.x = convergence_time(records, [&](const StepRecord& rec) {
    const PoseSample* p = find_pose(rec, agent);
    return p && std::abs(p->err_x) < xy_threshold_m;
  });
  out.y = convergence_time(records, [&](const StepRecord& rec) {
    const PoseSample* p = find_pose(rec, agent);
    return p && std::abs(p->err_y) < xy_threshold_m;
  });
  out.theta = convergence_time(records, [&](const StepRecord& rec) {
    const PoseSample* p = find_pose(rec, agent);
    return p && std::abs(p->err_theta) < theta_threshold_rad;
  });
  out.all = convergence_time(records, [&](const StepRecord& rec) {
    const PoseSample* p = find_pose(rec, agent);
    return p && std::abs(p->err_x) < xy_threshold_m && std::abs(p->err_y) < xy_threshold_m &&
           std::abs(p->err_theta) < theta_threshold_rad;
  });
  return out;
}

/// Minimum over all full windows of the discrete excitation integral
/// sum(pe * dt); reports how close the run came to losing excitation.
inline double min_windowed_pe_integral(const std::vector<StepRecord>& records, AgentId agent,
                                       int point_id, double window_s, double dt) {
  const std::size_t window = std::max<std::size_t>(1, std::lround(window_s / dt));
  std::vector<double> pe;
  for (const auto& rec : records) {
    const DepthSample* d = find_depth(rec, agent, point_id);
    if (d) pe.push_back(d->pe);
  }
  if (pe.empty()) return 0.0;
  const std::size_t w = std::min(window, pe.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w; ++i) sum += pe[i];
  double best = sum;
  for (std::size_t i = w; i < pe.size(); ++i) {
    sum += pe[i] - pe[i - w];
    best = std::min(best, sum);
  }
  return best * dt;
}

namespace harness_detail {

inline Json json_or_null(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline Json counters_json(const AgentCounters& c) {
  return {{"messages_sent", c.messages_sent},
          {"messages_received", c.messages_received},
          {"malformed_dropped", c.malformed_dropped},
          {"seq_rejected", c.seq_rejected},
          {"stale_skipped", c.stale_skipped},
          {"pairings_too_few", c.pairings_too_few},
          {"updates_applied", c.updates_applied},
          {"gate_rejected", c.gate_rejected}};
}

}  // namespace harness_detail

inline Json summarize(const RunReport& report) {
  const ScenarioConfig& cfg = report.config;
  Json summary;
  summary["scenario"] = cfg.name;
  summary["steps"] = cfg.steps();

  Json depth = Json::object();
  const auto add_agent_depth = [&](AgentId agent) {
    Json per_agent = Json::object();
    for (const auto& spec : cfg.points) {
      const DepthSample* last = find_depth(report.records.back(), agent, spec.id);
      Json entry;
      entry["final_error_m"] = last ? last->error : 0.0;
      entry["convergence_time_abs_s"] = harness_detail::json_or_null(depth_convergence_time_abs(
          report.records, agent, spec.id, cfg.report.depth_threshold_m));
      entry["convergence_time_rel_s"] = harness_detail::json_or_null(depth_convergence_time_rel(
          report.records, agent, spec.id, cfg.report.depth_rel_threshold));
      entry["min_windowed_pe_integral"] = min_windowed_pe_integral(
          report.records, agent, spec.id, cfg.report.pe_window_s, cfg.dt());
      per_agent[std::to_string(spec.id)] = entry;
    }
    depth[agent_name(agent)] = per_agent;
  };
  add_agent_depth(AgentId::a);
  if (report.has_agent_b) add_agent_depth(AgentId::b);
  summary["depth"] = depth;

  Json pose = Json::object();
  for (const AgentId agent : {AgentId::a, AgentId::b}) {
    if (!find_pose(report.records.front(), agent)) continue;
    const PoseSample* last = find_pose(report.records.back(), agent);
    const PoseConvergence conv = pose_convergence_times(
        report.records, agent, cfg.report.pose_xy_threshold_m, cfg.report.pose_theta_threshold_rad);
    Json entry;
    entry["final_error"] = {{"x_m", last->err_x},
                            {"y_m", last->err_y},
                            {"theta_rad", last->err_theta}};
    entry["convergence_time_s"] = {{"x", harness_detail::json_or_null(conv.x)},
                                   {"y", harness_detail::json_or_null(conv.y)},
                                   {"theta", harness_detail::json_or_null(conv.theta)},
                                   {"all", harness_detail::json_or_null(conv.all)}};
    pose[agent_name(agent)] = entry;
  }
  summary["pose"] = pose;

  Json counters;
  counters["a"] = harness_detail::counters_json(report.counters_a);
  if (report.has_agent_b) counters["b"] = harness_detail::counters_json(report.counters_b);
  counters["transport"] = {{"sent_a_to_b", report.link_stats.sent_a_to_b},
                           {"sent_b_to_a", report.link_stats.sent_b_to_a},
                           {"dropped_a_to_b", report.link_stats.dropped_a_to_b},
                           {"dropped_b_to_a", report.link_stats.dropped_b_to_a}};
  summary["counters"] = counters;
  summary["config"] = report.resolved_config;
  return summary;
}

// ---- emission --------------------------------------------------------------

/// Shortest round-trip decimal form; keeps CSV output byte-stable.
inline std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

inline void report_emit(const RunReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string());

  const auto open = [&](const char* name) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw IoError("cannot open " + (out_dir / name).string() + " for writing");
    return f;
  };

  {
    auto f = open("depth_errors.csv");
    f << "time,agent,point_id,z_true,z_est,error\n";
    for (const auto& rec : report.records) {
      for (const auto& d : rec.depth) {
        f << format_double(rec.time) << ',' << agent_name(d.agent) << ',' << d.point_id << ','
          << format_double(d.z_true) << ',' << format_double(d.z_est) << ','
          << format_double(d.error) << '\n';
      }
    }
  }

  if (!report.records.empty() && !report.records.front().pose.empty()) {
    auto f = open("relpose.csv");
    f << "time,agent,est_x,est_y,est_theta,true_x,true_y,true_theta,err_x,err_y,err_theta\n";
    for (const auto& rec : report.records) {
      for (const auto& p : rec.pose) {
        f << format_double(rec.time) << ',' << agent_name(p.agent) << ','
          << format_double(p.est.x) << ',' << format_double(p.est.y) << ','
          << format_double(p.est.theta) << ',' << format_double(p.truth.x) << ','
          << format_double(p.truth.y) << ',' << format_double(p.truth.theta) << ','
          << format_double(p.err_x) << ',' << format_double(p.err_y) << ','
          << format_double(p.err_theta) << '\n';
      }
    }
  }

  {
    auto f = open("summary.json");
    f << summarize(report).dump(2) << '\n';
  }
}

}  // namespace duopose
