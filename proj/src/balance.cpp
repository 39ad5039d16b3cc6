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

#include "sagbiped/balance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sagbiped/error.hpp"
#include "sagbiped/kinematics.hpp"

namespace sagbiped {

double LipmParams::time_constant() const { return std::sqrt(z_c / gravity); }

LipmParams default_lipm(const BipedModel& model) {
  LipmParams p;
  p.gravity = model.gravity;
  p.z_c = model_com(model, standing_state(model)).y();
  return p;
}

double lipm_accel(double x, const LipmParams& p) { return p.gravity / p.z_c * x; }

LipmState lipm_closed_form(double x0, double v0, double t, const LipmParams& p) {
  const double tc = p.time_constant();
  const double c = std::cosh(t / tc);
  const double s = std::sinh(t / tc);
  return {x0 * c + v0 * tc * s, x0 / tc * s + v0 * c};
}

double orbital_energy(double x, double v, const LipmParams& p) {
  return 0.5 * v * v - p.gravity / (2.0 * p.z_c) * x * x;
}

double capture_point(double x, double v, const LipmParams& p) {
  return x + v * p.time_constant();
}

double cop_from_contact(std::span<const ExternalForce> forces) {
  double fz = 0.0;
  double moment = 0.0;
  for (const auto& f : forces) {
    fz += f.force.y();
    moment += f.force.y() * f.world_point.x();
  }
  if (!(fz > 0.0)) throw NoContactError("no normal contact force");
  return moment / fz;
}

namespace {

std::array<Vec2, 2> sole_corners(const std::vector<Transform2>& frames,
                                 const BipedModel& model, Side side) {
  const int foot = model.foot[static_cast<int>(side)];
  const auto& g = model.links[foot].params.geometry;
  const Transform2& f = frames[foot];
  return {f.apply(Vec2(g.lz, -0.5 * g.lx)), f.apply(Vec2(g.lz, 0.5 * g.lx))};
}

}  // namespace

std::array<bool, 2> feet_in_contact(const BipedState& state, const BipedModel& model,
                                    double tolerance) {
  const auto frames = forward_kinematics(model, state);
  std::array<bool, 2> out{};
  for (int s = 0; s < 2; ++s) {
    const auto c = sole_corners(frames, model, static_cast<Side>(s));
    out[s] = std::min(c[0].y(), c[1].y()) <= tolerance;
  }
  return out;
}

SupportInterval foot_interval(const BipedState& state, const BipedModel& model,
                              Side side) {
  const auto c = sole_corners(forward_kinematics(model, state), model, side);
  return {std::min(c[0].x(), c[1].x()), std::max(c[0].x(), c[1].x())};
}

SupportInterval support_polygon(const BipedState& state, const BipedModel& model,
                                double tolerance) {
  const auto contact = feet_in_contact(state, model, tolerance);
  SupportInterval out{std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
  bool any = false;
  for (int s = 0; s < 2; ++s) {
    if (!contact[s]) continue;
    const SupportInterval f = foot_interval(state, model, static_cast<Side>(s));
    out.min = std::min(out.min, f.min);
    out.max = std::max(out.max, f.max);
    any = true;
  }
  if (!any) throw NoContactError("no foot in contact with the ground");
  return out;
}

ComKinematics com_kinematics(const BipedModel& model, const BipedState& state) {
  KinematicsCache cache(model);
  cache.update(state.position(model));
  const GenVector v = state.velocity(model);
  ComKinematics out;
  double mass = 0.0;
  for (size_t i = 0; i < model.links.size(); ++i) {
    const double m = model.links[i].params.mass;
    const Vec2& c = cache.com(static_cast<int>(i));
    out.position += m * c;
    out.velocity += m * (cache.point_jacobian(static_cast<int>(i), c).topRows<2>() * v);
    mass += m;
  }
  if (!(mass > 0.0)) throw UndefinedComError("model has zero total mass");
  out.position /= mass;
  out.velocity /= mass;
  return out;
}

double stability_margin(double capture_x, const SupportInterval& s) {
  return std::min(capture_x - s.min, s.max - capture_x);
}

}  // namespace sagbiped
