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

#include <limits>
#include <span>
#include <vector>

#include "sagbiped/kinematics.hpp"
#include "sagbiped/model.hpp"

namespace sagbiped {

/// Generalized forces: base entries (x, z, pitch) first, then joint torques.
using TorqueVector = GenVector;

/// Embeds joint torques into a generalized force vector with zero base rows.
TorqueVector actuated(const BipedModel& model, const GenVector& joint_torques);

struct DynamicsTerms {
  GenMatrix M;
  GenMatrix C;
  GenVector G;
};

/// Point force acting on a link. `world_point` is filled in by producers that
/// know the application point (ground contact) and is informational only.
struct ExternalForce {
  int body = 0;
  Vec2 local_point = Vec2::Zero();
  Vec2 force = Vec2::Zero();
  double t_start = -std::numeric_limits<double>::infinity();
  double t_end = std::numeric_limits<double>::infinity();
  Vec2 world_point = Vec2::Zero();

  bool active_at(double t) const { return t >= t_start && t <= t_end; }
};

/// Penalty ground contact on the plane z = 0 plus one-sided joint-limit
/// springs.
struct ContactModel {
  double stiffness = 5e4;
  double damping = 500.0;
  double friction_mu = 0.8;
  std::vector<BodyPoint> points;
  std::vector<int> point_side;  // 0 left, 1 right, per point
  bool enforce_limits = true;
  double limit_stiffness = 100.0;
  double limit_damping = 0.1;

  /// Toe and heel of each sole for a biped model.
  static ContactModel ForBiped(const BipedModel& model);
  /// No ground, no joint limits.
  static ContactModel None();
};

GenMatrix mass_matrix(const BipedModel& model, const BipedState& state);

/// Coriolis matrix from Christoffel symbols of finite-differenced M, so that
/// Mdot - 2C is skew-symmetric.
GenMatrix coriolis_matrix(const BipedModel& model, const BipedState& state);

GenVector gravity_vector(const BipedModel& model, const BipedState& state);

/// C(q, v) v + G(q), evaluated from analytic velocity-product accelerations.
GenVector bias_forces(const BipedModel& model, const BipedState& state);

DynamicsTerms dynamics_terms(const BipedModel& model, const BipedState& state);

/// tau = M qddot + C v + G - sum J^T F over the forces active at `t`.
TorqueVector inverse_dynamics(const BipedModel& model, const BipedState& state,
                              const GenVector& qddot,
                              std::span<const ExternalForce> ext = {},
                              double t = 0.0);

/// qddot = M^-1 (tau + sum J^T F - C v - G). Throws NumericalError when M is
/// not positive definite.
GenVector forward_dynamics(const BipedModel& model, const BipedState& state,
                           const TorqueVector& tau,
                           std::span<const ExternalForce> ext = {},
                           double t = 0.0);

/// Spring-damper normal force and damped, friction-cone-clamped tangential
/// force for every contact point below the ground.
std::vector<ExternalForce> ground_contact(const BipedModel& model,
                                          const BipedState& state,
                                          const ContactModel& contact);

/// Torques from the one-sided joint-limit springs.
GenVector joint_limit_torques(const BipedModel& model, const BipedState& state,
                              const ContactModel& contact);

/// Classical RK4 step of the forward dynamics with contact forces and limit
/// torques re-evaluated in every stage. `tau` and `ext` are held over the step.
BipedState integrate_step(const BipedModel& model, const BipedState& state,
                          const TorqueVector& tau, const ContactModel& contact,
                          double dt, std::span<const ExternalForce> ext = {},
                          double t = 0.0);

double kinetic_energy(const BipedModel& model, const BipedState& state);
double potential_energy(const BipedModel& model, const BipedState& state);

}  // namespace sagbiped
