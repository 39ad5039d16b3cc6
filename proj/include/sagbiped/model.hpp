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

#include <array>
#include <string>
#include <vector>

#include "sagbiped/transform.hpp"
#include "sagbiped/types.hpp"

namespace sagbiped {

enum class GeometryKind { kSphere, kCylinder, kCuboid };

/// Link shape. Cylinders are treated as thin rods along their length; cuboid
/// `lx` runs forward, `lz` runs along the link axis, `ly` is lateral.
struct Geometry {
  GeometryKind kind = GeometryKind::kCylinder;
  double radius = 0.0;
  double length = 0.0;
  double lx = 0.0;
  double lz = 0.0;
  double ly = 0.0;

  static Geometry Sphere(double r) { return {GeometryKind::kSphere, r, 0, 0, 0, 0}; }
  static Geometry Cylinder(double length, double r) {
    return {GeometryKind::kCylinder, r, length, 0, 0, 0};
  }
  static Geometry Cuboid(double lx, double lz, double ly) {
    return {GeometryKind::kCuboid, 0, 0, lx, lz, ly};
  }

  // Extent along the link axis from the proximal joint.
  double axial_extent() const;
};

struct LinkParams {
  std::string name;
  Geometry geometry;
  double mass = 0.0;
  double com_offset = 0.0;  // along the link axis from the proximal joint
  double inertia_yy = 0.0;  // about the CoM, sagittal-normal axis
};

/// One body of the planar tree. Its proximal frame is
///   parent_frame * Translation(attach_along, 0) * Rotation(theta_offset + q)
/// where the parent frame is the base frame for the root body. `dh` describes
/// the body as a D-H row (a = distance to the distal joint).
struct Link {
  LinkParams params;
  int parent = -1;        // -1: attached to the base frame
  double attach_along = 0.0;
  DHRow dh;
  int joint = -1;         // index into BipedModel::joints, -1 = rigid
};

struct JointDef {
  std::string name;
  double lower = -kPi;
  double upper = kPi;
};

enum class BaseKind { kFloating, kFixed };

enum class Side { kLeft = 0, kRight = 1 };

/// Planar multibody description. The default build is the 7-link biped
/// (torso, head, and two 3-link legs); tests also build smaller trees.
struct BipedModel {
  std::vector<Link> links;
  std::vector<JointDef> joints;
  double gravity = 9.81;
  BaseKind base = BaseKind::kFloating;
  // Pose of the base frame for fixed-base models.
  Transform2 fixed_base = Transform2::Identity();

  // Biped bookkeeping; -1 when the model is not a biped.
  std::array<int, 2> thigh{-1, -1};
  std::array<int, 2> shank{-1, -1};
  std::array<int, 2> foot{-1, -1};
  int torso = -1;

  int num_joints() const { return static_cast<int>(joints.size()); }
  int num_base() const { return base == BaseKind::kFloating ? 3 : 0; }
  int dof() const { return num_base() + num_joints(); }
  bool is_biped() const { return foot[0] >= 0 && foot[1] >= 0; }
  int link_index(const std::string& name) const;

  double thigh_length() const { return links.at(thigh[0]).dh.a; }
  double shank_length() const { return links.at(shank[0]).dh.a; }
  double foot_height() const { return links.at(foot[0]).params.geometry.lz; }
  double foot_length() const { return links.at(foot[0]).params.geometry.lx; }
};

struct BasePose {
  double x = 0.0;
  double z = 0.0;
  double pitch = 0.0;  // positive leans the torso forward
};

/// Generalized coordinates. Joint angles (and pitch) are positive about the
/// sagittal-normal +y axis: knee flexion is positive, hip flexion negative,
/// ankle plantar-flexion positive.
struct BipedState {
  BasePose base;
  BasePose base_rate;
  GenVector q;
  GenVector qdot;

  static BipedState Zero(const BipedModel& model);

  GenVector position(const BipedModel& model) const;
  GenVector velocity(const BipedModel& model) const;
  void set_position(const BipedModel& model, const GenVector& pos);
  void set_velocity(const BipedModel& model, const GenVector& vel);
  bool finite() const;
};

/// Physical parameters of the default biped (0.2 m torso).
struct ModelConfig {
  double head_radius = 0.04;
  double head_mass = 0.0;
  double torso_length = 0.2;
  double torso_radius = 0.008;
  double torso_mass = 3.8;
  double thigh_length = 0.2;
  double thigh_radius = 0.008;
  double thigh_mass = 0.735;
  double shank_length = 0.2;
  double shank_radius = 0.008;
  double shank_mass = 0.735;
  double foot_lx = 0.04;
  double foot_lz = 0.02;
  double foot_ly = 0.02;
  double foot_mass = 0.1;
  // Torso of 0.02 m, the literal listed body length, instead of torso_length.
  bool short_torso = false;
  double gravity = 9.81;
  double hip_limit = 2.0;
  double knee_min = 0.0;
  double knee_max = 2.6;
  double ankle_limit = 1.0;
};

BipedModel build_model(const ModelConfig& config = {});

/// Single rod pinned at its proximal end to a fixed base; q = 0 hangs down.
BipedModel build_pendulum(double mass, double length, double gravity);

double link_inertia(const Geometry& geometry, double mass);

double total_mass(const BipedModel& model);

Vec2 model_com(const BipedModel& model, const BipedState& state);

/// Straight-legged standing state with both soles on z = 0 under the hip.
BipedState standing_state(const BipedModel& model, double base_x = 0.0);

int joint_index(Side side, int k);  // k: 0 hip, 1 knee, 2 ankle

}  // namespace sagbiped
