// Copyright 2026 The sagbiped Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

#include "sagbiped/model.hpp"
#include "sagbiped/transform.hpp"

namespace sagbiped {

/// A point fixed on a link, in that link's frame (u along the link axis,
/// v across it).
struct BodyPoint {
  int link = 0;
  Vec2 local = Vec2::Zero();
};

/// Ankle position and sole angle relative to the ground (positive = toes
/// down, 0 = sole parallel to the ground).
struct FootPose {
  Vec2 position = Vec2::Zero();
  double sole_angle = 0.0;
};

struct LegAngles {
  double hip = 0.0;
  double knee = 0.0;
  double ankle = 0.0;
};

/// World frame of the base (torso at the hip point for floating models).
Transform2 base_frame(const BipedModel& model, const BasePose& base);

/// Proximal frame of every link, in model link order.
std::vector<Transform2> forward_kinematics(const BipedModel& model,
                                           const BipedState& state);

Vec2 point_position(const std::vector<Transform2>& frames, const BodyPoint& p);

/// Hip frame as seen by `leg_ik`: the torso frame translated to the hip joint.
Transform2 hip_frame(const BipedModel& model, const BasePose& base);

/// Analytic two-link leg inverse kinematics (knee-forward branch). The ankle
/// angle is chosen so the sole meets `target.sole_angle` exactly. Throws
/// UnreachableError when the ankle target is outside the annulus
/// [|l1 - l2|, l1 + l2] by more than `kReachTolerance`.
LegAngles leg_ik(const FootPose& target, const Transform2& hip_frame,
                 double l1, double l2);

inline constexpr double kReachTolerance = 1e-9;

/// Ankle pose and sole angle produced by the given leg angles.
FootPose leg_fk(const LegAngles& angles, const Transform2& hip_frame,
                double l1, double l2);

/// 3 x n map from generalized velocity to (point vx, point vz, link angular
/// rate about +y).
Jacobian contact_jacobian(const BipedModel& model, const BipedState& state,
                          const BodyPoint& point);

/// Kinematic quantities shared by the dynamics routines, computed once per
/// configuration.
class KinematicsCache {
 public:
  explicit KinematicsCache(const BipedModel& model);

  void update(const GenVector& position);

  const std::vector<Transform2>& frames() const { return frames_; }
  const Vec2& com(int link) const { return com_[link]; }
  Vec2 point(const BodyPoint& p) const { return frames_[p.link].apply(p.local); }

  /// Jacobian of a world point rigidly attached to `link`.
  Jacobian point_jacobian(int link, const Vec2& world_point) const;

  /// Velocity-product acceleration (J-dot * v) of a world point on `link`.
  Vec2 bias_acceleration(int link, const Vec2& world_point,
                         const GenVector& velocity) const;

  /// Angular rate of `link` about +y.
  double angular_rate(int link, const GenVector& velocity) const;

  const BipedModel& model() const { return *model_; }

 private:
  const BipedModel* model_;
  int n_ = 0;
  int nb_ = 0;
  std::vector<Transform2> frames_;
  std::vector<Vec2> com_;
  std::vector<std::uint32_t> ancestry_;
  std::vector<int> coord_link_;  // link whose proximal frame a rotation coord moves
  std::vector<Vec2> center_;     // rotation centre per generalized coordinate
  std::vector<double> sign_;     // +1 when positive rate is clockwise in (x, z)
};

}  // namespace sagbiped
