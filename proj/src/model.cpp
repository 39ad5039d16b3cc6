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

#include "sagbiped/model.hpp"

#include <cmath>
#include <string>

#include "sagbiped/error.hpp"
#include "sagbiped/kinematics.hpp"

namespace sagbiped {

double Geometry::axial_extent() const {
  switch (kind) {
    case GeometryKind::kSphere:
      return 2.0 * radius;
    case GeometryKind::kCylinder:
      return length;
    case GeometryKind::kCuboid:
      return lz;
  }
  return 0.0;
}

double link_inertia(const Geometry& g, double mass) {
  switch (g.kind) {
    case GeometryKind::kSphere:
      return 0.4 * mass * g.radius * g.radius;
    case GeometryKind::kCylinder:
      return mass * g.length * g.length / 12.0;
    case GeometryKind::kCuboid:
      return mass * (g.lx * g.lx + g.lz * g.lz) / 12.0;
  }
  return 0.0;
}

int BipedModel::link_index(const std::string& name) const {
  for (size_t i = 0; i < links.size(); ++i)
    if (links[i].params.name == name) return static_cast<int>(i);
  throw Error("unknown link '" + name + "'");
}

int joint_index(Side side, int k) { return 3 * static_cast<int>(side) + k; }

BipedState BipedState::Zero(const BipedModel& model) {
  BipedState s;
  s.q = GenVector::Zero(model.num_joints());
  s.qdot = GenVector::Zero(model.num_joints());
  return s;
}

GenVector BipedState::position(const BipedModel& model) const {
  GenVector p(model.dof());
  const int nb = model.num_base();
  if (nb == 3) p.head<3>() << base.x, base.z, base.pitch;
  p.tail(model.num_joints()) = q;
  return p;
}

GenVector BipedState::velocity(const BipedModel& model) const {
  GenVector v(model.dof());
  const int nb = model.num_base();
  if (nb == 3) v.head<3>() << base_rate.x, base_rate.z, base_rate.pitch;
  v.tail(model.num_joints()) = qdot;
  return v;
}

void BipedState::set_position(const BipedModel& model, const GenVector& p) {
  if (model.num_base() == 3) base = {p[0], p[1], p[2]};
  q = p.tail(model.num_joints());
}

void BipedState::set_velocity(const BipedModel& model, const GenVector& v) {
  if (model.num_base() == 3) base_rate = {v[0], v[1], v[2]};
  qdot = v.tail(model.num_joints());
}

bool BipedState::finite() const {
  return std::isfinite(base.x) && std::isfinite(base.z) &&
         std::isfinite(base.pitch) && std::isfinite(base_rate.x) &&
         std::isfinite(base_rate.z) && std::isfinite(base_rate.pitch) &&
         q.allFinite() && qdot.allFinite();
}

namespace {

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError(field, "must be a positive finite length");
}

void require_mass(double v, const char* field) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw ValidationError(field, "must be a non-negative finite mass");
}

LinkParams make_link(std::string name, Geometry g, double mass) {
  LinkParams p;
  p.name = std::move(name);
  p.geometry = g;
  p.mass = mass;
  p.com_offset = 0.5 * g.axial_extent();
  p.inertia_yy = link_inertia(g, mass);
  return p;
}

}  // namespace

BipedModel build_model(const ModelConfig& c) {
  require_positive(c.head_radius, "model.head_radius");
  require_mass(c.head_mass, "model.head_mass");
  require_positive(c.torso_length, "model.torso_length");
  require_positive(c.torso_radius, "model.torso_radius");
  require_mass(c.torso_mass, "model.torso_mass");
  require_positive(c.thigh_length, "model.thigh_length");
  require_positive(c.thigh_radius, "model.thigh_radius");
  require_mass(c.thigh_mass, "model.thigh_mass");
  require_positive(c.shank_length, "model.shank_length");
  require_positive(c.shank_radius, "model.shank_radius");
  require_mass(c.shank_mass, "model.shank_mass");
  require_positive(c.foot_lx, "model.foot_lx");
  require_positive(c.foot_lz, "model.foot_lz");
  require_positive(c.foot_ly, "model.foot_ly");
  require_mass(c.foot_mass, "model.foot_mass");
  if (!(c.gravity >= 0.0) || !std::isfinite(c.gravity))
    throw ValidationError("model.gravity", "must be non-negative");
  if (!(c.hip_limit > 0.0)) throw ValidationError("model.hip_limit", "must be positive");
  if (!(c.ankle_limit > 0.0))
    throw ValidationError("model.ankle_limit", "must be positive");
  if (!(c.knee_min < c.knee_max))
    throw ValidationError("model.knee_max", "must exceed knee_min");

  const double torso_len = c.short_torso ? 0.02 : c.torso_length;

  BipedModel m;
  m.gravity = c.gravity;
  m.base = BaseKind::kFloating;

  Link torso;
  torso.params = make_link("torso", Geometry::Cylinder(torso_len, c.torso_radius),
                           c.torso_mass);
  torso.dh = {torso_len, 0.0, 0.0, 0.0};
  m.links.push_back(torso);
  m.torso = 0;

  Link head;
  head.params = make_link("head", Geometry::Sphere(c.head_radius), c.head_mass);
  head.parent = 0;
  head.attach_along = torso_len;
  head.dh = {2.0 * c.head_radius, 0.0, 0.0, 0.0};
  m.links.push_back(head);

  const char* side_name[2] = {"L", "R"};
  for (int s = 0; s < 2; ++s) {
    const std::string suffix = std::string("_") + side_name[s];
    const int base_joint = static_cast<int>(m.joints.size());
    m.joints.push_back({"hip" + suffix, -c.hip_limit, c.hip_limit});
    m.joints.push_back({"knee" + suffix, c.knee_min, c.knee_max});
    m.joints.push_back({"ankle" + suffix, -c.ankle_limit, c.ankle_limit});

    Link thigh;
    thigh.params = make_link("thigh" + suffix,
                             Geometry::Cylinder(c.thigh_length, c.thigh_radius),
                             c.thigh_mass);
    thigh.parent = m.torso;
    thigh.attach_along = 0.0;
    thigh.dh = {c.thigh_length, 0.0, 0.0, kPi};
    thigh.joint = base_joint;
    m.thigh[s] = static_cast<int>(m.links.size());
    m.links.push_back(thigh);

    Link shank;
    shank.params = make_link("shank" + suffix,
                             Geometry::Cylinder(c.shank_length, c.shank_radius),
                             c.shank_mass);
    shank.parent = m.thigh[s];
    shank.attach_along = c.thigh_length;
    shank.dh = {c.shank_length, 0.0, 0.0, 0.0};
    shank.joint = base_joint + 1;
    m.shank[s] = static_cast<int>(m.links.size());
    m.links.push_back(shank);

    Link foot;
    foot.params = make_link(
        "foot" + suffix, Geometry::Cuboid(c.foot_lx, c.foot_lz, c.foot_ly),
        c.foot_mass);
    foot.parent = m.shank[s];
    foot.attach_along = c.shank_length;
    foot.dh = {c.foot_lz, 0.0, 0.0, 0.0};
    foot.joint = base_joint + 2;
    m.foot[s] = static_cast<int>(m.links.size());
    m.links.push_back(foot);
  }
  return m;
}

BipedModel build_pendulum(double mass, double length, double gravity) {
  BipedModel m;
  m.gravity = gravity;
  m.base = BaseKind::kFixed;
  // Same orientation convention as the floating torso frame.
  m.fixed_base = Transform2{kPi / 2.0, Vec2::Zero(), -1};
  Link rod;
  rod.params = make_link("rod", Geometry::Cylinder(length, 0.01), mass);
  rod.dh = {length, 0.0, 0.0, kPi};
  rod.joint = 0;
  m.links.push_back(rod);
  m.joints.push_back({"pivot", -4.0 * kPi, 4.0 * kPi});
  return m;
}

double total_mass(const BipedModel& model) {
  double m = 0.0;
  for (const auto& l : model.links) m += l.params.mass;
  return m;
}

Vec2 model_com(const BipedModel& model, const BipedState& state) {
  const double mt = total_mass(model);
  if (!(mt > 0.0)) throw UndefinedComError("model has zero total mass");
  const auto frames = forward_kinematics(model, state);
  Vec2 acc = Vec2::Zero();
  for (size_t i = 0; i < model.links.size(); ++i) {
    const auto& p = model.links[i].params;
    acc += p.mass * frames[i].apply(Vec2(p.com_offset, 0.0));
  }
  return acc / mt;
}

BipedState standing_state(const BipedModel& model, double base_x) {
  BipedState s = BipedState::Zero(model);
  s.base.x = base_x;
  s.base.z = model.thigh_length() + model.shank_length() + model.foot_height();
  return s;
}

}  // namespace sagbiped
