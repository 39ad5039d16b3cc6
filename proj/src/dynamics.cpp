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

#include "sagbiped/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "sagbiped/error.hpp"

namespace sagbiped {

namespace {

constexpr double kChristoffelStep = 1e-7;

void assemble_mass(const KinematicsCache& cache, GenMatrix& M) {
  const BipedModel& m = cache.model();
  const int n = m.dof();
  M.setZero(n, n);
  for (size_t i = 0; i < m.links.size(); ++i) {
    const auto& p = m.links[i].params;
    if (p.mass == 0.0 && p.inertia_yy == 0.0) continue;
    const Jacobian J = cache.point_jacobian(static_cast<int>(i), cache.com(i));
    M.noalias() += p.mass * J.topRows<2>().transpose() * J.topRows<2>();
    M.noalias() += p.inertia_yy * J.row(2).transpose() * J.row(2);
  }
}

GenVector assemble_gravity(const KinematicsCache& cache) {
  const BipedModel& m = cache.model();
  GenVector G = GenVector::Zero(m.dof());
  for (size_t i = 0; i < m.links.size(); ++i) {
    const double mass = m.links[i].params.mass;
    if (mass == 0.0) continue;
    const Jacobian J = cache.point_jacobian(static_cast<int>(i), cache.com(i));
    G += mass * m.gravity * J.row(1).transpose();
  }
  return G;
}

// C v + G; the angular velocity-product term vanishes in the plane.
GenVector assemble_bias(const KinematicsCache& cache, const GenVector& v) {
  const BipedModel& m = cache.model();
  GenVector b = GenVector::Zero(m.dof());
  for (size_t i = 0; i < m.links.size(); ++i) {
    const double mass = m.links[i].params.mass;
    if (mass == 0.0) continue;
    const int li = static_cast<int>(i);
    const Jacobian J = cache.point_jacobian(li, cache.com(i));
    const Vec2 a = cache.bias_acceleration(li, cache.com(i), v);
    b += mass * J.topRows<2>().transpose() * (a + Vec2(0.0, m.gravity));
  }
  return b;
}

void add_external(const KinematicsCache& cache, std::span<const ExternalForce> ext,
                  double t, GenVector& f) {
  for (const auto& e : ext) {
    if (!e.active_at(t)) continue;
    const Vec2 p = cache.frames()[e.body].apply(e.local_point);
    const Jacobian J = cache.point_jacobian(e.body, p);
    f += J.topRows<2>().transpose() * e.force;
  }
}

std::vector<ExternalForce> contact_forces(const KinematicsCache& cache,
                                          const GenVector& v,
                                          const ContactModel& contact) {
  std::vector<ExternalForce> out;
  for (const auto& bp : contact.points) {
    const Vec2 p = cache.point(bp);
    if (!(p.y() < 0.0)) continue;
    const Vec2 pv = cache.point_jacobian(bp.link, p).topRows<2>() * v;
    const double fn =
        std::max(0.0, contact.stiffness * (-p.y()) - contact.damping * pv.y());
    const double limit = contact.friction_mu * fn;
    const double ft = std::clamp(-contact.damping * pv.x(), -limit, limit);
    ExternalForce f;
    f.body = bp.link;
    f.local_point = bp.local;
    f.force = Vec2(ft, fn);
    f.world_point = p;
    out.push_back(f);
  }
  return out;
}

GenVector limit_torques(const BipedModel& m, const GenVector& pos,
                        const GenVector& vel, const ContactModel& c) {
  GenVector tau = GenVector::Zero(m.dof());
  if (!c.enforce_limits) return tau;
  const int nb = m.num_base();
  for (int j = 0; j < m.num_joints(); ++j) {
    const double q = pos[nb + j];
    const double qd = vel[nb + j];
    const auto& joint = m.joints[j];
    if (q > joint.upper)
      tau[nb + j] = -c.limit_stiffness * (q - joint.upper) - c.limit_damping * qd;
    else if (q < joint.lower)
      tau[nb + j] = c.limit_stiffness * (joint.lower - q) - c.limit_damping * qd;
  }
  return tau;
}

GenVector solve_accel(const GenMatrix& M, const GenVector& rhs, double t) {
  Eigen::LLT<GenMatrix> llt(M);
  if (llt.info() != Eigen::Success)
    throw NumericalError("mass matrix is not positive definite", t);
  return llt.solve(rhs);
}

}  // namespace

TorqueVector actuated(const BipedModel& model, const GenVector& joint_torques) {
  TorqueVector tau = TorqueVector::Zero(model.dof());
  tau.tail(model.num_joints()) = joint_torques;
  return tau;
}

ContactModel ContactModel::ForBiped(const BipedModel& model) {
  ContactModel c;
  for (int s = 0; s < 2; ++s) {
    const int foot = model.foot[s];
    const auto& g = model.links.at(foot).params.geometry;
    // Foot frames have flipped handedness: local -v points forward.
    c.points.push_back({foot, Vec2(g.lz, -0.5 * g.lx)});  // toe
    c.points.push_back({foot, Vec2(g.lz, 0.5 * g.lx)});   // heel
    c.point_side.push_back(s);
    c.point_side.push_back(s);
  }
  return c;
}

ContactModel ContactModel::None() {
  ContactModel c;
  c.enforce_limits = false;
  return c;
}

GenMatrix mass_matrix(const BipedModel& model, const BipedState& state) {
  KinematicsCache cache(model);
  cache.update(state.position(model));
  GenMatrix M;
  assemble_mass(cache, M);
  return M;
}

GenMatrix coriolis_matrix(const BipedModel& model, const BipedState& state) {
  const int n = model.dof();
  const GenVector pos = state.position(model);
  const GenVector v = state.velocity(model);
  KinematicsCache cache(model);
  std::vector<GenMatrix> dM(n);
  for (int i = 0; i < n; ++i) {
    GenVector p = pos;
    GenMatrix plus, minus;
    p[i] = pos[i] + kChristoffelStep;
    cache.update(p);
    assemble_mass(cache, plus);
    p[i] = pos[i] - kChristoffelStep;
    cache.update(p);
    assemble_mass(cache, minus);
    dM[i] = (plus - minus) / (2.0 * kChristoffelStep);
  }
  GenMatrix C = GenMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double c = 0.0;
      for (int i = 0; i < n; ++i)
        c += 0.5 * (dM[i](k, j) + dM[j](k, i) - dM[k](i, j)) * v[i];
      C(k, j) = c;
    }
  return C;
}

GenVector gravity_vector(const BipedModel& model, const BipedState& state) {
  KinematicsCache cache(model);
  cache.update(state.position(model));
  return assemble_gravity(cache);
}

GenVector bias_forces(const BipedModel& model, const BipedState& state) {
  KinematicsCache cache(model);
  cache.update(state.position(model));
  return assemble_bias(cache, state.velocity(model));
}

DynamicsTerms dynamics_terms(const BipedModel& model, const BipedState& state) {
  DynamicsTerms d;
  d.M = mass_matrix(model, state);
  d.C = coriolis_matrix(model, state);
  d.G = gravity_vector(model, state);
  return d;
}

TorqueVector inverse_dynamics(const BipedModel& model, const BipedState& state,
                              const GenVector& qddot,
                              std::span<const ExternalForce> ext, double t) {
  KinematicsCache cache(model);
  cache.update(state.position(model));
  GenMatrix M;
  assemble_mass(cache, M);
  GenVector tau = M * qddot + assemble_bias(cache, state.velocity(model));
  GenVector f = GenVector::Zero(model.dof());
  add_external(cache, ext, t, f);
  return tau - f;
}

GenVector forward_dynamics(const BipedModel& model, const BipedState& state,
                           const TorqueVector& tau,
                           std::span<const ExternalForce> ext, double t) {
  KinematicsCache cache(model);
  cache.update(state.position(model));
  GenMatrix M;
  assemble_mass(cache, M);
  GenVector rhs = tau - assemble_bias(cache, state.velocity(model));
  add_external(cache, ext, t, rhs);
  return solve_accel(M, rhs, t);
}

std::vector<ExternalForce> ground_contact(const BipedModel& model,
                                          const BipedState& state,
                                          const ContactModel& contact) {
  KinematicsCache cache(model);
  cache.update(state.position(model));
  return contact_forces(cache, state.velocity(model), contact);
}

GenVector joint_limit_torques(const BipedModel& model, const BipedState& state,
                              const ContactModel& contact) {
  return limit_torques(model, state.position(model), state.velocity(model),
                       contact);
}

BipedState integrate_step(const BipedModel& model, const BipedState& state,
                          const TorqueVector& tau, const ContactModel& contact,
                          double dt, std::span<const ExternalForce> ext,
                          double t) {
  if (!(dt > 0.0)) throw Error("integrate_step: dt must be positive");
  KinematicsCache cache(model);
  GenMatrix M;

  auto accel = [&](const GenVector& p, const GenVector& v, double ts) {
    cache.update(p);
    assemble_mass(cache, M);
    GenVector rhs = tau - assemble_bias(cache, v) + limit_torques(model, p, v, contact);
    add_external(cache, ext, ts, rhs);
    const auto contacts = contact_forces(cache, v, contact);
    add_external(cache, contacts, ts, rhs);
    return solve_accel(M, rhs, ts);
  };

  const GenVector p0 = state.position(model);
  const GenVector v0 = state.velocity(model);
  // Pushes are sampled at the start of the step.
  const double ts = t;

  const GenVector k1p = v0;
  const GenVector k1v = accel(p0, v0, ts);
  const GenVector k2p = v0 + 0.5 * dt * k1v;
  const GenVector k2v = accel(p0 + 0.5 * dt * k1p, k2p, ts);
  const GenVector k3p = v0 + 0.5 * dt * k2v;
  const GenVector k3v = accel(p0 + 0.5 * dt * k2p, k3p, ts);
  const GenVector k4p = v0 + dt * k3v;
  const GenVector k4v = accel(p0 + dt * k3p, k4p, ts);

  const GenVector p1 = p0 + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  const GenVector v1 = v0 + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

  BipedState out = state;
  out.set_position(model, p1);
  out.set_velocity(model, v1);
  if (!out.finite()) throw NumericalError("integration diverged", t + dt);
  return out;
}

double kinetic_energy(const BipedModel& model, const BipedState& state) {
  const GenVector v = state.velocity(model);
  return 0.5 * v.dot(mass_matrix(model, state) * v);
}

double potential_energy(const BipedModel& model, const BipedState& state) {
  KinematicsCache cache(model);
  cache.update(state.position(model));
  double V = 0.0;
  for (size_t i = 0; i < model.links.size(); ++i)
    V += model.links[i].params.mass * model.gravity * cache.com(i).y();
  return V;
}

}  // namespace sagbiped
