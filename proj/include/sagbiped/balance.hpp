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
#include <span>

#include "sagbiped/dynamics.hpp"
#include "sagbiped/model.hpp"

namespace sagbiped {

/// Point-mass pendulum at constant height z_c.
struct LipmParams {
  double z_c = 0.4;
  double gravity = 9.81;

  double time_constant() const;
};

/// z_c = standing CoM height of the model with straight legs.
LipmParams default_lipm(const BipedModel& model);

double lipm_accel(double x, const LipmParams& params);

struct LipmState {
  double x = 0.0;
  double v = 0.0;
};

/// x(t) = x0 cosh(t/Tc) + v0 Tc sinh(t/Tc) and its derivative.
LipmState lipm_closed_form(double x0, double v0, double t, const LipmParams& params);

double orbital_energy(double x, double v, const LipmParams& params);

double capture_point(double x, double v, const LipmParams& params);

/// Normal-force-weighted mean x of the contact application points.
/// Throws NoContactError when the total normal force is zero.
double cop_from_contact(std::span<const ExternalForce> forces);

struct SupportInterval {
  double min = 0.0;
  double max = 0.0;

  double center() const { return 0.5 * (min + max); }
  bool contains(double x) const { return x >= min && x <= max; }
};

/// A foot counts as in contact when its lowest sole corner is within this
/// height of the ground.
inline constexpr double kContactTolerance = 2e-3;

/// Which feet touch the ground (left, right).
std::array<bool, 2> feet_in_contact(const BipedState& state, const BipedModel& model,
                                    double tolerance = kContactTolerance);

/// Heel-to-toe extent of one foot's sole.
SupportInterval foot_interval(const BipedState& state, const BipedModel& model,
                              Side side);

/// Sagittal interval spanned by the in-contact feet. Throws NoContactError
/// when airborne.
SupportInterval support_polygon(const BipedState& state, const BipedModel& model,
                                double tolerance = kContactTolerance);

/// Signed distance of the capture point inside the support interval.
double stability_margin(double capture_x, const SupportInterval& support);

/// Whole-body CoM position and velocity.
struct ComKinematics {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
};

ComKinematics com_kinematics(const BipedModel& model, const BipedState& state);

/// Balance snapshot; all x values are world coordinates.
struct BalanceState {
  double com_x = 0.0;
  double com_z = 0.0;
  double com_v = 0.0;
  double cop_x = 0.0;
  double capture_x = 0.0;
  SupportInterval support;
  double margin = 0.0;
};

}  // namespace sagbiped
