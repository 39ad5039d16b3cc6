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

#include "sagbiped/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "sagbiped/error.hpp"

namespace sagbiped {

Transform2 base_frame(const BipedModel& model, const BasePose& base) {
  if (model.base == BaseKind::kFixed) return model.fixed_base;
  // Torso axis points up at zero pitch; joint angles turn clockwise in (x, z).
  return Transform2{kPi / 2.0 - base.pitch, Vec2(base.x, base.z), -1};
}

Transform2 hip_frame(const BipedModel& model, const BasePose& base) {
  return base_frame(model, base);
}

std::vector<Transform2> forward_kinematics(const BipedModel& model,
                                           const BipedState& state) {
  KinematicsCache cache(model);
  cache.update(state.position(model));
  return cache.frames();
}

Vec2 point_position(const std::vector<Transform2>& frames, const BodyPoint& p) {
  return frames.at(p.link).apply(p.local);
}

LegAngles leg_ik(const FootPose& target, const Transform2& hip, double l1,
                 double l2) {
  const Vec2 local = hip.inverse().apply(target.position);
  const double d = local.norm();
  const double reach = l1 + l2;
  if (d > reach + kReachTolerance) throw UnreachableError(d, reach);
  if (d < std::abs(l1 - l2) - kReachTolerance) throw UnreachableError(d, reach);

  double c = (d * d - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  c = std::clamp(c, -1.0, 1.0);
  const double knee = std::acos(c);  // >= 0: knee-forward branch
  const double thigh = std::atan2(local.y(), local.x()) -
                       std::atan2(l2 * std::sin(knee), l1 + l2 * std::cos(knee));

  LegAngles out;
  out.hip = wrap_angle(thigh - kPi);
  out.knee = knee;
  const double foot_rot = -kPi / 2.0 - target.sole_angle;
  out.ankle = wrap_angle((foot_rot - hip.rotation) / hip.handedness - thigh - knee);
  return out;
}

FootPose leg_fk(const LegAngles& a, const Transform2& hip, double l1,
                double l2) {
  const Transform2 ankle = hip * dh_transform({l1, 0, 0, kPi}, a.hip) *
                           dh_transform({l2, 0, 0, 0}, a.knee) *
                           Transform2::Rotation(a.ankle);
  FootPose out;
  out.position = ankle.translation;
  out.sole_angle = wrap_angle(-kPi / 2.0 - ankle.rotation);
  return out;
}

Jacobian contact_jacobian(const BipedModel& model, const BipedState& state,
                          const BodyPoint& point) {
  KinematicsCache cache(model);
  cache.update(state.position(model));
  return cache.point_jacobian(point.link, cache.point(point));
}

KinematicsCache::KinematicsCache(const BipedModel& model)
    : model_(&model),
      n_(model.dof()),
      nb_(model.num_base()),
      frames_(model.links.size()),
      com_(model.links.size()),
      ancestry_(model.links.size()),
      coord_link_(model.dof(), -1),
      center_(model.dof(), Vec2::Zero()),
      sign_(model.dof(), 0.0) {}

void KinematicsCache::update(const GenVector& pos) {
  const BipedModel& m = *model_;
  BasePose base;
  if (nb_ == 3) base = {pos[0], pos[1], pos[2]};
  const Transform2 root = base_frame(m, base);
  const std::uint32_t base_mask = nb_ == 3 ? 0b111u : 0u;
  if (nb_ == 3) {
    center_[2] = root.translation;
    sign_[2] = 1.0;
    coord_link_[2] = -1;
  }
  for (size_t i = 0; i < m.links.size(); ++i) {
    const Link& link = m.links[i];
    const Transform2& parent = link.parent < 0 ? root : frames_[link.parent];
    const Transform2 anchor = parent * Transform2::Translation(link.attach_along, 0.0);
    const double q = link.joint >= 0 ? pos[nb_ + link.joint] : 0.0;
    frames_[i] = anchor * dh_transform({0.0, 0.0, 0.0, link.dh.theta_offset}, q);
    ancestry_[i] = link.parent < 0 ? base_mask : ancestry_[link.parent];
    if (link.joint >= 0) {
      const int c = nb_ + link.joint;
      ancestry_[i] |= 1u << c;
      center_[c] = anchor.translation;
      sign_[c] = -static_cast<double>(anchor.handedness);
      coord_link_[c] = link.parent;
    }
    com_[i] = frames_[i].apply(Vec2(link.params.com_offset, 0.0));
  }
}

Jacobian KinematicsCache::point_jacobian(int link, const Vec2& p) const {
  Jacobian J = Jacobian::Zero(3, n_);
  const std::uint32_t mask = ancestry_[link];
  for (int c = 0; c < n_; ++c) {
    if (!(mask & (1u << c))) continue;
    if (nb_ == 3 && c < 2) {
      J(c, c) = 1.0;
      continue;
    }
    const Vec2 r = p - center_[c];
    J(0, c) = sign_[c] * r.y();
    J(1, c) = -sign_[c] * r.x();
    J(2, c) = sign_[c];
  }
  return J;
}

Vec2 KinematicsCache::bias_acceleration(int link, const Vec2& p,
                                        const GenVector& v) const {
  const Vec2 vp = point_jacobian(link, p).topRows<2>() * v;
  const std::uint32_t mask = ancestry_[link];
  Vec2 a = Vec2::Zero();
  for (int c = (nb_ == 3 ? 2 : 0); c < n_; ++c) {
    if (!(mask & (1u << c))) continue;
    Vec2 vc = Vec2::Zero();
    if (coord_link_[c] >= 0) {
      vc = point_jacobian(coord_link_[c], center_[c]).topRows<2>() * v;
    } else if (nb_ == 3) {
      vc = Vec2(v[0], v[1]);
    }
    const Vec2 u = vp - vc;
    a += v[c] * sign_[c] * Vec2(u.y(), -u.x());
  }
  return a;
}

double KinematicsCache::angular_rate(int link, const GenVector& v) const {
  const std::uint32_t mask = ancestry_[link];
  double w = 0.0;
  for (int c = (nb_ == 3 ? 2 : 0); c < n_; ++c)
    if (mask & (1u << c)) w += sign_[c] * v[c];
  return w;
}

}  // namespace sagbiped
