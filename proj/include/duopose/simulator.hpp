#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "duopose/errors.hpp"
#include "duopose/geometry.hpp"
#include "duopose/rng.hpp"

namespace duopose {

enum class AgentId : std::uint8_t { a = 0, b = 1 };

inline AgentId other_agent(AgentId id) { return id == AgentId::a ? AgentId::b : AgentId::a; }

inline const char* agent_name(AgentId id) { return id == AgentId::a ? "a" : "b"; }

/// Static landmark: ground-plane position plus its vertical offset expressed
/// along the camera's down axis (the cameras sit at ground height).
struct WorldPoint {
  int id = 0;
  Vec2 ground = Vec2::Zero();
  double down = 0.0;
};

struct WorldState {
  SE2Pose pose_a;
  SE2Pose pose_b;
  std::vector<WorldPoint> points;
  double time = 0.0;
};

struct NoiseSpec {
  double sigma_s = 0.0;  // additive noise on normalized coordinates
  double sigma_u = 0.0;  // additive noise on measured input channels
  std::uint64_t seed = 0;
};

struct VisibilityPolicy {
  double fov_half_angle = kPi / 4.0;
  double min_depth = 0.1;
};

/// Builds the world from landmarks given in robot A's camera frame at t = 0,
/// which is how the scenarios are written down.
inline WorldState make_world(const SE2Pose& pose_a, const SE2Pose& pose_b,
                             const std::vector<std::pair<int, CameraPoint>>& points_camera_a) {
  WorldState world;
  world.pose_a = pose_a;
  world.pose_b = pose_b;
  for (const auto& [id, cam] : points_camera_a) {
    const PlanarPoint m = camera_to_planar(cam);
    const Vec2 ground = pose_a.translation() + pose_a.rotation().apply(m.vec());
    world.points.push_back({id, ground, cam.y_bar});
  }
  world.time = 0.0;
  return world;
}

inline const SE2Pose& agent_pose(const WorldState& world, AgentId agent) {
  return agent == AgentId::a ? world.pose_a : world.pose_b;
}

/// Advances both robots along exact arcs; the scene is static.
inline WorldState world_step(const WorldState& world, const UnicycleInput& u_a,
                             const UnicycleInput& u_b, double dt) {
  WorldState next = world;
  next.pose_a = unicycle_step(world.pose_a, u_a, dt);
  next.pose_b = unicycle_step(world.pose_b, u_b, dt);
  next.time = world.time + dt;
  return next;
}

/// The landmark expressed in the agent's camera frame (x right, y down, z forward).
inline CameraPoint point_in_camera(const WorldState& world, AgentId agent,
                                   const WorldPoint& point) {
  const SE2Pose& pose = agent_pose(world, agent);
  const Vec2 m = pose.rotation().apply_inverse(point.ground - pose.translation());
  return planar_to_camera({m.x(), m.y()}, point.down);
}

inline bool is_visible(const CameraPoint& p, const VisibilityPolicy& policy) {
  if (!(p.z_bar >= policy.min_depth)) return false;
  const double limit = std::tan(policy.fov_half_angle);
  return std::abs(p.x_bar / p.z_bar) <= limit && std::abs(p.y_bar / p.z_bar) <= limit;
}

/// Noiseless feature measurements for every currently visible point.
inline std::vector<std::pair<int, NormalizedFeature>> observe(const WorldState& world,
                                                              AgentId agent,
                                                              const VisibilityPolicy& policy) {
  std::vector<std::pair<int, NormalizedFeature>> out;
  for (const auto& point : world.points) {
    const CameraPoint cam = point_in_camera(world, agent, point);
    if (is_visible(cam, policy)) {
      out.emplace_back(point.id, project(cam));
    }
  }
  return out;
}

/// Noisy variant; `rng` is the per-agent measurement stream owned by the caller
/// so a fixed NoiseSpec seed reproduces the exact sequence.
inline std::vector<std::pair<int, NormalizedFeature>> observe(const WorldState& world,
                                                              AgentId agent, double sigma_s,
                                                              Rng& rng,
                                                              const VisibilityPolicy& policy) {
  auto out = observe(world, agent, policy);
  if (sigma_s > 0.0) {
    for (auto& [id, s] : out) {
      s.x += rng.normal(0.0, sigma_s);
      s.y += rng.normal(0.0, sigma_s);
    }
  }
  return out;
}

struct GroundTruth {
  double z_bar;  // true depth of the point along the agent's optical axis
  SE2Pose xi;    // true pose of the other robot in the agent's frame
};

inline GroundTruth ground_truth(const WorldState& world, int point_id, AgentId agent) {
  const auto it = std::find_if(world.points.begin(), world.points.end(),
                               [&](const WorldPoint& p) { return p.id == point_id; });
  if (it == world.points.end()) {
    throw UnknownPoint("ground_truth: unknown point id " + std::to_string(point_id));
  }
  GroundTruth out;
  out.z_bar = point_in_camera(world, agent, *it).z_bar;
  out.xi = relative_pose(agent_pose(world, agent), agent_pose(world, other_agent(agent)));
  return out;
}

}  // namespace duopose
