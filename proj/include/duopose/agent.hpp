#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "duopose/depth_observer.hpp"
#include "duopose/errors.hpp"
#include "duopose/message.hpp"
#include "duopose/relpose_ekf.hpp"
#include "duopose/simulator.hpp"
#include "duopose/transport.hpp"

namespace duopose {

struct AgentCounters {
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_received = 0;
  std::uint64_t malformed_dropped = 0;
  std::uint64_t seq_rejected = 0;
  std::uint64_t stale_skipped = 0;
  std::uint64_t pairings_too_few = 0;
  std::uint64_t updates_applied = 0;
  std::uint64_t gate_rejected = 0;
};

struct EkfSettings {
  bool enabled = false;
  InnovationModel model = InnovationModel::position_level;
  NoiseConfig noise;
  SE2Pose initial_state;
  Covariance3 initial_covariance = Covariance3::Identity();
};

struct AgentConfig {
  AgentId id = AgentId::a;
  DepthObserverGains gains;
  ObserverOptions observer_options;
  std::map<int, double> prior_depths;  // configured initial depth per point id
  double staleness_limit = 0.2;
  EkfSettings ekf;
};

/// One robot's estimation loop: depth observers per tracked point, the
/// estimate-message exchange, and (optionally) the relative-pose EKF.
class Agent {
 public:
  explicit Agent(AgentConfig config) : config_(std::move(config)) {
    config_.gains.validate();
    if (config_.ekf.enabled) {
      pose_ = config_.ekf.initial_state;
      covariance_ = config_.ekf.initial_covariance;
    }
  }

  /// Runs one tick: step observers on fresh measurements, publish the local
  /// estimate snapshot, ingest peer messages, then predict/update the EKF.
  void step(std::vector<std::pair<int, NormalizedFeature>> measurements,
            const UnicycleInput& u, double dt, Transport& transport) {
    if (!(dt > 0.0)) throw Error("agent step: dt must be positive");
    const double t_meas = time_;

    std::sort(measurements.begin(), measurements.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    EstimateMessage msg;
    msg.agent_id = config_.id;
    msg.seq = ++seq_;
    msg.timestamp = t_meas;
    msg.u = u;
    for (const auto& [id, s_meas] : measurements) {
      auto it = observers_.find(id);
      if (it == observers_.end()) {
        const auto prior = config_.prior_depths.find(id);
        if (prior == config_.prior_depths.end()) continue;  // undeclared id
        it = observers_
                 .emplace(id, make_observer(s_meas, prior->second, config_.gains,
                                            config_.observer_options))
                 .first;
      }
      // The published snapshot is the estimate at t_meas, before integration.
      const ObserverStepOutput out = observer_step(it->second, s_meas, u, dt);
      PointEstimateEntry entry;
      entry.point_id = static_cast<std::uint32_t>(id);
      entry.s = s_meas;
      entry.s_rate = out.s_hat_rate;
      entry.chi = it->second.chi_hat;
      entry.chi_rate = out.chi_hat_rate;
      msg.points.push_back(entry);
      it->second = out.new_state;
    }

    latest_local_ = msg;
    transport.send(serialize(msg));
    ++counters_.messages_sent;

    bool fresh_peer = false;
    for (const auto& bytes : transport.poll()) {
      EstimateMessage peer;
      try {
        peer = deserialize(bytes);
      } catch (const MalformedMessage&) {
        ++counters_.malformed_dropped;
        continue;
      }
      ++counters_.messages_received;
      if (peer.agent_id == config_.id) continue;
      if (peer_cache_ && peer.seq <= peer_cache_->seq) {
        ++counters_.seq_rejected;
        continue;
      }
      peer_cache_ = std::move(peer);
      fresh_peer = true;
    }

    if (config_.ekf.enabled) {
      const UnicycleInput u_peer = peer_cache_ ? peer_cache_->u : UnicycleInput{};
      const PredictResult predicted =
          ekf_predict(pose_, covariance_, u, u_peer, dt, config_.ekf.noise.q_process);
      pose_ = predicted.state;
      covariance_ = predicted.covariance;
      if (fresh_peer) run_updates(u);
    }

    time_ = t_meas + dt;
  }

  const std::map<int, DepthObserverState>& observers() const { return observers_; }
  const AgentCounters& counters() const { return counters_; }
  const SE2Pose& pose_estimate() const { return pose_; }
  const Covariance3& covariance() const { return covariance_; }
  const std::optional<EstimateMessage>& peer_cache() const { return peer_cache_; }
  const EstimateMessage& latest_local() const { return latest_local_; }
  double time() const { return time_; }
  AgentId id() const { return config_.id; }
  bool estimates_pose() const { return config_.ekf.enabled; }

 private:
  void run_updates(const UnicycleInput& u_ego) {
    if (std::abs(latest_local_.timestamp - peer_cache_->timestamp) > config_.staleness_limit) {
      ++counters_.stale_skipped;
      return;
    }

    // Match shared point ids; both lists are sorted.
    std::vector<PointPairObservation> pairs;
    auto ego_it = latest_local_.points.begin();
    auto peer_it = peer_cache_->points.begin();
    while (ego_it != latest_local_.points.end() && peer_it != peer_cache_->points.end()) {
      if (ego_it->point_id < peer_it->point_id) {
        ++ego_it;
      } else if (peer_it->point_id < ego_it->point_id) {
        ++peer_it;
      } else {
        PointPairObservation obs;
        obs.point_id = static_cast<int>(ego_it->point_id);
        obs.ego = {ego_it->s, ego_it->s_rate, ego_it->chi, ego_it->chi_rate};
        obs.peer = {peer_it->s, peer_it->s_rate, peer_it->chi, peer_it->chi_rate};
        obs.timestamp = latest_local_.timestamp;
        pairs.push_back(obs);
        ++ego_it;
        ++peer_it;
      }
    }
    if (pairs.size() < 2) {
      ++counters_.pairings_too_few;
      return;
    }

    for (const auto& obs : pairs) {
      const Innovation innovation =
          config_.ekf.model == InnovationModel::position_level
              ? innovation_position(pose_, obs)
              : innovation_velocity(pose_, obs, u_ego, peer_cache_->u);
      const UpdateResult result = ekf_update(pose_, covariance_, innovation.residual,
                                             innovation.jacobian, config_.ekf.noise);
      if (result.accepted) {
        pose_ = result.state;
        covariance_ = result.covariance;
        ++counters_.updates_applied;
      } else {
        ++counters_.gate_rejected;
      }
    }
  }

  AgentConfig config_;
  std::map<int, DepthObserverState> observers_;
  EstimateMessage latest_local_;
  std::optional<EstimateMessage> peer_cache_;
  SE2Pose pose_;
  Covariance3 covariance_ = Covariance3::Zero();
  AgentCounters counters_;
  std::uint64_t seq_ = 0;
  double time_ = 0.0;
};

}  // namespace duopose
