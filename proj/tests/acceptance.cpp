// Acceptance suite: each test case checks one scenario-level criterion and
// prints one PASS/FAIL line. Run directly (./acceptance) or via ctest.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "duopose/duopose.hpp"
#include "support/golden.hpp"
#include "support/oracles.hpp"
#include "support/two_robot_oracle.hpp"

using namespace duopose;

namespace {

class Criterion {
 public:
  explicit Criterion(std::string label) : label_(std::move(label)) {}

  Criterion(const Criterion&) = delete;
  Criterion& operator=(const Criterion&) = delete;

  ~Criterion() {
    std::printf("[acceptance] %s: %s\n", label_.c_str(), ok_ ? "PASS" : "FAIL");
    std::fflush(stdout);
  }

  void expect(bool cond, const std::string& what) {
    INFO(label_ << ": " << what);
    CHECK(cond);
    if (!cond) ok_ = false;
  }

 private:
  std::string label_;
  bool ok_ = true;
};

const RunReport& depth_four_points_report() {
  static const RunReport report = run(parse_scenario(preset_config("depth-four-points")));
  return report;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("never");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

PointPairObservation exact_observation(const oracles::TwoRobotConfig& cfg, int index) {
  PointPairObservation obs;
  obs.point_id = index;
  obs.ego = oracles::exact_estimate(cfg.a, cfg.points[index]);
  obs.peer = oracles::exact_estimate(cfg.b, cfg.points[index]);
  return obs;
}

// Scaled pose error: 1.0 means sitting exactly on the acceptance band edge.
double scaled_pose_error(const PoseSample& p, double xy_threshold, double theta_threshold) {
  return std::max({std::abs(p.err_x) / xy_threshold, std::abs(p.err_y) / xy_threshold,
                   std::abs(p.err_theta) / theta_threshold});
}

std::vector<double> windowed_max_pose_error(const std::vector<StepRecord>& records,
                                            double xy_threshold, double theta_threshold,
                                            std::size_t window_steps) {
  std::vector<double> out;
  double current = 0.0;
  std::size_t count = 0;
  for (const auto& rec : records) {
    const PoseSample* p = find_pose(rec, AgentId::a);
    if (!p) continue;
    current = std::max(current, scaled_pose_error(*p, xy_threshold, theta_threshold));
    if (++count == window_steps) {
      out.push_back(current);
      current = 0.0;
      count = 0;
    }
  }
  if (count > 0) out.push_back(current);
  return out;
}

}  // namespace

TEST_CASE("C1 depth convergence and the degenerate on-axis point") {
  Criterion c("C1 depth convergence & degenerate case");
  const RunReport& report = depth_four_points_report();

  c.expect(report.wall_seconds < 5.0,
           "runtime " + format_double(report.wall_seconds) + " s below 5 s");

  for (const int id : {2, 3, 4}) {
    const auto t = depth_convergence_time_abs(report.records, AgentId::a, id, 0.05);
    c.expect(t.has_value() && *t <= 60.0,
             "point " + std::to_string(id) + " below 0.05 m at " + fmt_opt(t) + " s and stays");
  }

  double min_p1_error = 1e9;
  for (const auto& rec : report.records) {
    min_p1_error = std::min(min_p1_error, std::abs(find_depth(rec, AgentId::a, 1)->error));
  }
  c.expect(min_p1_error > 0.5, "on-axis point error stays above 0.5 m (min " +
                                   format_double(min_p1_error) + ")");

  double max_p1_pe = 0.0;
  for (const auto& rec : report.records) {
    max_p1_pe = std::max(max_p1_pe, find_depth(rec, AgentId::a, 1)->pe);
  }
  c.expect(max_p1_pe == 0.0, "on-axis point has zero excitation throughout");
}

TEST_CASE("C2 farther points converge no later") {
  Criterion c("C2 convergence-order property");
  const RunReport& report = depth_four_points_report();
  const double dt = report.config.dt();

  const auto t2 = depth_convergence_time_rel(report.records, AgentId::a, 2, 0.05);
  const auto t3 = depth_convergence_time_rel(report.records, AgentId::a, 3, 0.05);
  const auto t4 = depth_convergence_time_rel(report.records, AgentId::a, 4, 0.05);
  c.expect(t2.has_value() && t3.has_value() && t4.has_value(),
           "5% convergence times exist: p2=" + fmt_opt(t2) + " p3=" + fmt_opt(t3) +
               " p4=" + fmt_opt(t4));
  if (t2 && t3 && t4) {
    c.expect(*t4 <= *t2 + dt + 1e-9, "t(p4) <= t(p2) within one step");
    c.expect(*t4 <= *t3 + dt + 1e-9, "t(p4) <= t(p3) within one step");
  }
}

TEST_CASE("C3 gain sweeps move the convergence time monotonically") {
  Criterion c("C3 gain sweeps");
  Json base = preset_config("depth-four-points");
  Json p3_only = Json::array();
  p3_only.push_back(base["points"][2]);
  base["points"] = p3_only;

  const auto time_for = [&](const RunReport& r) {
    return depth_convergence_time_rel(r.records, AgentId::a, 3, 0.05);
  };

  const auto lambda_reports = sweep(base, "observer.lambda", {30, 60, 120, 240});
  std::vector<double> lambda_times;
  for (const auto& r : lambda_reports) {
    const auto t = time_for(r);
    c.expect(t.has_value(), "alpha*lambda sweep run converges");
    lambda_times.push_back(t.value_or(1e9));
  }
  for (std::size_t i = 1; i < lambda_times.size(); ++i) {
    c.expect(lambda_times[i] <= lambda_times[i - 1] + 1e-9,
             "time-to-5% non-increasing in alpha*lambda: " + format_double(lambda_times[i - 1]) +
                 " -> " + format_double(lambda_times[i]));
  }

  const auto h_reports = sweep(base, "observer.h", {1.0, 2.5, 5.0});
  std::vector<double> h_times;
  for (const auto& r : h_reports) {
    const auto t = time_for(r);
    c.expect(t.has_value(), "H sweep run converges");
    h_times.push_back(t.value_or(1e9));
  }
  for (std::size_t i = 1; i < h_times.size(); ++i) {
    c.expect(h_times[i] >= h_times[i - 1] - 1e-9,
             "time-to-5% non-decreasing in H scale: " + format_double(h_times[i - 1]) + " -> " +
                 format_double(h_times[i]));
  }
}

TEST_CASE("C4 relative pose converges in the noiseless preset") {
  Criterion c("C4 relative-pose convergence");
  const RunReport report = run(parse_scenario(preset_config("relpose-gazebo")));
  const double theta_threshold = 2.0 * kPi / 180.0;

  c.expect(report.wall_seconds < 10.0,
           "runtime " + format_double(report.wall_seconds) + " s below 10 s");

  const PoseConvergence conv =
      pose_convergence_times(report.records, AgentId::a, 0.1, theta_threshold);
  c.expect(conv.x.has_value() && *conv.x <= 120.0, "|x error| < 0.1 m at " + fmt_opt(conv.x));
  c.expect(conv.y.has_value() && *conv.y <= 120.0, "|y error| < 0.1 m at " + fmt_opt(conv.y));
  c.expect(conv.theta.has_value() && *conv.theta <= 120.0,
           "|theta error| < 2 deg at " + fmt_opt(conv.theta));

  // After the transient peak the windowed error must fall monotonically until
  // it enters the acceptance band, and never leave the band afterwards.
  const auto windows = windowed_max_pose_error(report.records, 0.1, theta_threshold, 40);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i] > windows[peak]) peak = i;
  }
  std::size_t in_band = windows.size();
  for (std::size_t i = peak; i < windows.size(); ++i) {
    if (windows[i] < 1.0) {
      in_band = i;
      break;
    }
  }
  c.expect(in_band < windows.size(), "windowed error enters the band after the peak");
  for (std::size_t i = peak + 1; i <= in_band && i < windows.size(); ++i) {
    c.expect(windows[i] <= windows[i - 1] * 1.05 + 1e-9,
             "monotone decrease after transient (window " + std::to_string(i) + ": " +
                 format_double(windows[i - 1]) + " -> " + format_double(windows[i]) + ")");
  }
}

TEST_CASE("C5 innovation identities hold at ground truth") {
  Criterion c("C5 geometric oracle");
  Rng rng(61);
  double worst_position = 0.0;
  double worst_velocity = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto cfg = oracles::random_config(rng);
    const SE2Pose xi = oracles::true_relative_pose(cfg.a, cfg.b);
    for (int j = 0; j < 2; ++j) {
      const PointPairObservation obs = exact_observation(cfg, j);
      worst_position =
          std::max(worst_position, innovation_position(xi, obs).residual.norm());
      worst_velocity = std::max(
          worst_velocity,
          innovation_velocity(xi, obs, {cfg.a.v, cfg.a.w}, {cfg.b.v, cfg.b.w}).residual.norm());
    }
  }
  c.expect(worst_position <= 1e-9,
           "position residual at truth <= 1e-9 (worst " + format_double(worst_position) + ")");
  c.expect(worst_velocity <= 1e-9,
           "velocity residual with oracle rates <= 1e-9 (worst " + format_double(worst_velocity) +
               ")");
}

TEST_CASE("C6 jacobians match finite differences") {
  Criterion c("C6 jacobian checks");
  Rng rng(62);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto cfg = oracles::random_config(rng);
    const PointPairObservation obs = exact_observation(cfg, 0);
    const UnicycleInput u_a{cfg.a.v, cfg.a.w};
    const UnicycleInput u_b{cfg.b.v, cfg.b.w};
    const SE2Pose xi{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-kPi, kPi)};

    const Mat3 f = relpose_jacobian(xi, u_a, u_b);
    const auto f_fd = oracles::central_difference<3>(
        [&](const Eigen::Vector3d& v) {
          return relpose_dynamics({v.x(), v.y(), v.z()}, u_a, u_b);
        },
        {xi.x, xi.y, xi.theta});
    const Mat23 hp = innovation_position(xi, obs).jacobian;
    const auto hp_fd = oracles::central_difference<2>(
        [&](const Eigen::Vector3d& v) {
          return innovation_position({v.x(), v.y(), v.z()}, obs).residual;
        },
        {xi.x, xi.y, xi.theta});
    const Mat23 hv = innovation_velocity(xi, obs, u_a, u_b).jacobian;
    const auto hv_fd = oracles::central_difference<2>(
        [&](const Eigen::Vector3d& v) {
          return innovation_velocity({v.x(), v.y(), v.z()}, obs, u_a, u_b).residual;
        },
        {xi.x, xi.y, xi.theta});

    const auto rel = [&](double a, double b) {
      return std::abs(a - b) / std::max(1.0, std::abs(b));
    };
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) worst = std::max(worst, rel(f(r, col), f_fd(r, col)));
    }
    for (int r = 0; r < 2; ++r) {
      for (int col = 0; col < 3; ++col) {
        worst = std::max(worst, rel(hp(r, col), hp_fd(r, col)));
        worst = std::max(worst, rel(hv(r, col), hv_fd(r, col)));
      }
    }
  }
  c.expect(worst <= 1e-5, "all jacobians within 1e-5 of finite differences (worst " +
                              format_double(worst) + ")");
}

TEST_CASE("C7 filter-health properties") {
  Criterion c("C7 filter health");

  Rng rng(63);
  NoiseConfig noise;
  SE2Pose xi{0, 0, 0};
  Covariance3 p = Vec3(2.25, 2.25, 0.07).asDiagonal();
  double min_eig = 0.0;
  double max_asym = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const PredictResult pr =
        ekf_predict(xi, p, {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)},
                    {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)}, 0.05, noise.q_process);
    xi = pr.state;
    p = pr.covariance;
    Mat23 h;
    h << rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2),
        rng.uniform(-2, 2), rng.uniform(-2, 2);
    const UpdateResult ur =
        ekf_update(xi, p, {rng.uniform(-3, 3), rng.uniform(-3, 3)}, h, noise);
    xi = ur.state;
    p = ur.covariance;
    min_eig = std::min(min_eig, min_eigenvalue(p));
    max_asym = std::max(max_asym, (p - p.transpose()).norm());
  }
  c.expect(min_eig >= -1e-9,
           "covariance psd over 10000 cycles (min eigenvalue " + format_double(min_eig) + ")");
  c.expect(max_asym < 1e-12, "covariance symmetric over 10000 cycles");

  DepthObserverGains gains;
  DepthObserverState st = make_observer({0, 0}, 5.0, gains);
  bool in_bounds = true;
  for (int k = 0; k < 5000; ++k) {
    const NormalizedFeature s{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3)};
    const UnicycleInput u{rng.uniform(-100, 100), rng.uniform(-100, 100)};
    st = observer_step(st, s, u, 0.05).new_state;
    in_bounds = in_bounds && st.chi_hat >= st.options.chi_min && st.chi_hat <= st.options.chi_max;
  }
  c.expect(in_bounds, "chi_hat stays within [chi_min, chi_max] under adversarial inputs");
}

TEST_CASE("C8 network robustness and wire format") {
  Criterion c("C8 network robustness");
  const RunReport report = run(parse_scenario(preset_config("relpose-gazebo-lossy")));
  const double theta_threshold = 4.0 * kPi / 180.0;

  const PoseConvergence conv =
      pose_convergence_times(report.records, AgentId::a, 0.2, theta_threshold);
  c.expect(conv.x.has_value() && *conv.x <= 180.0,
           "|x error| < 0.2 m under loss at " + fmt_opt(conv.x));
  c.expect(conv.y.has_value() && *conv.y <= 180.0,
           "|y error| < 0.2 m under loss at " + fmt_opt(conv.y));
  c.expect(conv.theta.has_value() && *conv.theta <= 180.0,
           "|theta error| < 4 deg under loss at " + fmt_opt(conv.theta));
  c.expect(report.link_stats.dropped_a_to_b + report.link_stats.dropped_b_to_a > 0,
           "the lossy link actually dropped datagrams");

  Rng rng(64);
  bool round_trips = true;
  for (int i = 0; i < 10000 && round_trips; ++i) {
    EstimateMessage msg;
    msg.agent_id = rng.bernoulli(0.5) ? AgentId::a : AgentId::b;
    msg.seq = rng.next_u64();
    msg.timestamp = rng.uniform(0, 1e6);
    msg.u = {rng.uniform(-10, 10), rng.uniform(-10, 10)};
    std::uint32_t id = 0;
    const int n = static_cast<int>(rng.uniform(0, 6));
    for (int j = 0; j < n; ++j) {
      id += 1 + static_cast<std::uint32_t>(rng.uniform(0, 50));
      msg.points.push_back({id,
                            {rng.uniform(-5, 5), rng.uniform(-5, 5)},
                            {rng.uniform(-5, 5), rng.uniform(-5, 5)},
                            rng.uniform(0.01, 10),
                            rng.uniform(-5, 5)});
    }
    const auto bytes = serialize(msg);
    round_trips = deserialize(bytes) == msg && serialize(deserialize(bytes)) == bytes;
  }
  c.expect(round_trips, "10000 randomized messages round trip bit-exactly");

  c.expect(golden_bytes() == serialize(golden_message()) &&
               deserialize(golden_bytes()) == golden_message(),
           "golden byte vector encodes and decodes the recorded message");
}

TEST_CASE("C9 seeded runs emit byte-identical reports") {
  Criterion c("C9 determinism");
  for (const auto& preset : presets()) {
    const Json cfg = preset_config(preset.name);
    const auto dir1 =
        std::filesystem::temp_directory_path() / ("duopose-acc9-1-" + std::string(preset.name));
    const auto dir2 =
        std::filesystem::temp_directory_path() / ("duopose-acc9-2-" + std::string(preset.name));
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    report_emit(run(cfg), dir1);
    report_emit(run(cfg), dir2);
    for (const char* name : {"depth_errors.csv", "relpose.csv", "summary.json"}) {
      if (!std::filesystem::exists(dir1 / name)) continue;
      c.expect(slurp(dir1 / name) == slurp(dir2 / name),
               std::string(preset.name) + "/" + name + " byte-identical across reruns");
    }
  }
}

TEST_CASE("C10 experiment parameter preset runs and converges") {
  Criterion c("C10 experiment preset sanity");
  const RunReport report = run(parse_scenario(preset_config("experiment-params")));

  for (const AgentId agent : {AgentId::a, AgentId::b}) {
    for (const int id : {1, 2}) {
      const auto t = depth_convergence_time_abs(report.records, agent, id, 0.1);
      c.expect(t.has_value(),
               std::string("depth of point ") + std::to_string(id) + " on robot " +
                   agent_name(agent) + " below 0.1 m at " + fmt_opt(t) + " s");
    }
  }

  // Pose error decreases throughout the run, sampled every 10 s.
  const int steps_per_checkpoint = static_cast<int>(std::lround(10.0 * report.config.rate_hz));
  std::vector<double> translation;
  std::vector<double> heading;
  for (std::size_t i = 0; i < report.records.size(); i += steps_per_checkpoint) {
    const PoseSample* p = find_pose(report.records[i], AgentId::a);
    translation.push_back(std::hypot(p->err_x, p->err_y));
    heading.push_back(std::abs(p->err_theta));
  }
  for (std::size_t i = 1; i < translation.size(); ++i) {
    c.expect(translation[i] < translation[i - 1],
             "translation error decreasing at checkpoint " + std::to_string(i) + " (" +
                 format_double(translation[i - 1]) + " -> " + format_double(translation[i]) + ")");
    c.expect(heading[i] < heading[i - 1],
             "heading error decreasing at checkpoint " + std::to_string(i) + " (" +
                 format_double(heading[i - 1]) + " -> " + format_double(heading[i]) + ")");
  }
}
