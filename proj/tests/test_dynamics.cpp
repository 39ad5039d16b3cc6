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


#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "sagbiped/dynamics.hpp"
#include "sagbiped/error.hpp"

namespace sagbiped {
namespace {

constexpr double kM = 0.735, kL = 0.2, kG = 9.81;

BipedState pendulum_at(const BipedModel& p, double q, double qd = 0.0) {
  BipedState s = BipedState::Zero(p);
  s.q[0] = q;
  s.qdot[0] = qd;
  return s;
}

TEST(MassMatrix, PendulumRod) {
  const BipedModel p = build_pendulum(kM, kL, kG);
  const GenMatrix M = mass_matrix(p, pendulum_at(p, 0.7));
  ASSERT_EQ(M.rows(), 1);
  EXPECT_NEAR(M(0, 0), kM * kL * kL / 3.0, 1e-15);
  EXPECT_NEAR(M(0, 0), 9.8e-3, 1e-12);
}

TEST(MassMatrix, SymmetricPositiveDefiniteAtRandomStates) {
  const BipedModel m = build_model();
  std::mt19937_64 rng(21);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd c = oracle::random_coords(rng);
    const GenMatrix M = mass_matrix(m, oracle::to_state(m, c, c * 0));
    EXPECT_LE((M - M.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(M)};
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(MassMatrix, MatchesKineticEnergyOracle) {
  const BipedModel m = build_model();
  const oracle::Body body;
  std::mt19937_64 rng(22);
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd c = oracle::random_coords(rng);
    const Eigen::VectorXd v = oracle::random_rates(rng);
    const BipedState s = oracle::to_state(m, c, v);
    const GenMatrix M = mass_matrix(m, s);
    const auto Mo = oracle::mass_matrix(body, c);
    EXPECT_LE((Eigen::MatrixXd(M) - Mo).cwiseAbs().maxCoeff(), 1e-9);
    // T = sum over pieces of 0.5 m |v_com|^2 + 0.5 I w^2.
    double T = 0.0;
    for (const auto& piece : oracle::pose(body, c).pieces) {
      const Vec2 vc = oracle::point_jacobian(piece, piece.com) * v;
      double w = 0.0;
      for (const auto& rot : piece.rotations) w += v[rot.first];
      T += 0.5 * piece.mass * vc.squaredNorm() + 0.5 * piece.inertia * w * w;
    }
    EXPECT_NEAR(kinetic_energy(m, s), T, 1e-9 * std::max(1.0, T));
  }
}

TEST(Coriolis, VanishesAtRest) {
  const BipedModel m = build_model();
  std::mt19937_64 rng(23);
  const Eigen::VectorXd c = oracle::random_coords(rng);
  const BipedState s = oracle::to_state(m, c, c * 0);
  EXPECT_LE((coriolis_matrix(m, s) * s.velocity(m)).norm(), 1e-15);
  EXPECT_LE((bias_forces(m, s) - gravity_vector(m, s)).norm(), 1e-12);
}

TEST(Coriolis, PendulumIsZero) {
  const BipedModel p = build_pendulum(kM, kL, kG);
  EXPECT_NEAR(coriolis_matrix(p, pendulum_at(p, 0.4, 3.0))(0, 0), 0.0, 1e-9);
}

TEST(Coriolis, MdotMinusTwoCIsSkew) {
  const BipedModel m = build_model();
  std::mt19937_64 rng(24);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd c = oracle::random_coords(rng);
    const Eigen::VectorXd v = oracle::random_rates(rng);
    const BipedState s = oracle::to_state(m, c, v);
    const double h = 1e-6;
    const GenMatrix Mp = mass_matrix(m, oracle::to_state(m, c + h * v, v));
    const GenMatrix Mm = mass_matrix(m, oracle::to_state(m, c - h * v, v));
    const Eigen::MatrixXd Mdot = (Mp - Mm) / (2 * h);
    const Eigen::MatrixXd N = Mdot - 2.0 * Eigen::MatrixXd(coriolis_matrix(m, s));
    EXPECT_LE((N + N.transpose()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Coriolis, MatrixAgreesWithAnalyticBias) {
  const BipedModel m = build_model();
  std::mt19937_64 rng(25);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd c = oracle::random_coords(rng);
    const Eigen::VectorXd v = oracle::random_rates(rng);
    const BipedState s = oracle::to_state(m, c, v);
    const GenVector cv = bias_forces(m, s) - gravity_vector(m, s);
    EXPECT_LE((coriolis_matrix(m, s) * s.velocity(m) - cv).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Gravity, PendulumHangingAndHorizontal) {
  const BipedModel p = build_pendulum(kM, kL, kG);
  EXPECT_NEAR(gravity_vector(p, pendulum_at(p, 0.0))[0], 0.0, 1e-15);
  EXPECT_NEAR(gravity_vector(p, pendulum_at(p, kPi / 2))[0], kM * kG * kL / 2, 1e-12);
  EXPECT_NEAR(gravity_vector(p, pendulum_at(p, kPi / 2))[0], 0.7210, 5e-5);
}

TEST(Gravity, MatchesFiniteDifferencesOfPotential) {
  const BipedModel m = build_model();
  const oracle::Body body;
  std::mt19937_64 rng(26);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd c = oracle::random_coords(rng);
    const GenVector G = gravity_vector(m, oracle::to_state(m, c, c * 0));
    EXPECT_LE((Eigen::VectorXd(G) - oracle::gravity(body, c)).cwiseAbs().maxCoeff(), 1e-12);
    for (int k = 0; k < 9; ++k) {
      Eigen::VectorXd cp = c, cm = c;
      cp[k] += 1e-6;
      cm[k] -= 1e-6;
      const double fd = (potential_energy(m, oracle::to_state(m, cp, c * 0)) -
                         potential_energy(m, oracle::to_state(m, cm, c * 0))) / 2e-6;
      EXPECT_NEAR(G[k], fd, 1e-6);
      const double fdo = (oracle::potential(body, cp) - oracle::potential(body, cm)) / 2e-6;
      EXPECT_NEAR(G[k], fdo, 1e-6);
    }
  }
}

TEST(InverseDynamics, StaticIsGravity) {
  const BipedModel m = build_model();
  const BipedState s = standing_state(m);
  const TorqueVector tau = inverse_dynamics(m, s, GenVector::Zero(9));
  EXPECT_LE((tau - gravity_vector(m, s)).norm(), 1e-12);
  // Vertical base entry carries the full weight.
  EXPECT_NEAR(tau[1], 6.94 * 9.81, 1e-10);
}

TEST(InverseDynamics, HorizontalTorsoForceShiftsBaseRows) {
  const BipedModel m = build_model();
  BipedState s = standing_state(m);
  s.base.pitch = 0.2;
  const ExternalForce push{m.torso, Vec2(0.1, 0.0), Vec2(7.0, 0.0)};
  const TorqueVector a = inverse_dynamics(m, s, GenVector::Zero(9));
  const TorqueVector b = inverse_dynamics(m, s, GenVector::Zero(9), std::span(&push, 1));
  EXPECT_NEAR(b[0] - a[0], -7.0, 1e-12);
  EXPECT_NEAR(b[1] - a[1], 0.0, 1e-12);
  for (int k = 3; k < 9; ++k) EXPECT_EQ(b[k], a[k]);
}

TEST(InverseDynamics, InactiveForceIgnored) {
  const BipedModel m = build_model();
  const BipedState s = standing_state(m);
  ExternalForce push{m.torso, Vec2::Zero(), Vec2(7.0, 0.0)};
  push.t_start = 1.0;
  push.t_end = 2.0;
  const TorqueVector a = inverse_dynamics(m, s, GenVector::Zero(9));
  EXPECT_EQ(inverse_dynamics(m, s, GenVector::Zero(9), std::span(&push, 1), 0.5), a);
  EXPECT_NE(inverse_dynamics(m, s, GenVector::Zero(9), std::span(&push, 1), 1.5), a);
}

TEST(ForwardDynamics, RoundTripsWithInverse) {
  const BipedModel m = build_model();
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd c = oracle::random_coords(rng);
    const BipedState s = oracle::to_state(m, c, oracle::random_rates(rng));
    const ExternalForce push{m.shank[1], Vec2(0.05, 0.0), Vec2(u(rng), u(rng))};
    GenVector tau = GenVector::Zero(9);
    for (int k = 3; k < 9; ++k) tau[k] = u(rng);
    const GenVector qdd = forward_dynamics(m, s, tau, std::span(&push, 1));
    const GenVector back = inverse_dynamics(m, s, qdd, std::span(&push, 1));
    EXPECT_LE((back - tau).norm(), 1e-8 * std::max(1.0, tau.norm()));

    GenVector target(9);
    for (int k = 0; k < 9; ++k) target[k] = u(rng);
    const GenVector t2 = inverse_dynamics(m, s, target);
    EXPECT_LE((forward_dynamics(m, s, t2) - target).norm(), 1e-8 * target.norm());
  }
}

TEST(ForwardDynamics, ZeroGravityAtRest) {
  ModelConfig c;
  c.gravity = 0.0;
  const BipedModel m = build_model(c);
  const BipedState s = standing_state(m);
  EXPECT_EQ(forward_dynamics(m, s, GenVector::Zero(9)).norm(), 0.0);
}

TEST(ForwardDynamics, SmallAnglePendulum) {
  const BipedModel p = build_pendulum(kM, kL, kG);
  const double q = 1e-4;
  const double qdd = forward_dynamics(p, pendulum_at(p, q), GenVector::Zero(1))[0];
  EXPECT_NEAR(qdd / q, -3.0 * kG / (2.0 * kL), 1e-6);
}

TEST(ForwardDynamics, IndefiniteMassMatrixThrows) {
  ModelConfig c;
  c.thigh_mass = 0.0;
  c.shank_mass = 0.0;
  c.foot_mass = 0.0;
  const BipedModel m = build_model(c);
  EXPECT_THROW(forward_dynamics(m, standing_state(m), GenVector::Zero(9)), NumericalError);
}

BipedState sunk(const BipedModel& m, double depth) {
  BipedState s = standing_state(m);
  s.base.z -= depth;
  return s;
}

TEST(GroundContact, AboveGroundEmpty) {
  const BipedModel m = build_model();
  BipedState s = standing_state(m);
  s.base.z += 0.01;
  EXPECT_TRUE(ground_contact(m, s, ContactModel::ForBiped(m)).empty());
}

TEST(GroundContact, PenetrationGivesSpringForce) {
  const BipedModel m = build_model();
  const auto f = ground_contact(m, sunk(m, 0.001), ContactModel::ForBiped(m));
  ASSERT_EQ(f.size(), 4u);
  for (const auto& e : f) {
    EXPECT_NEAR(e.force.y(), 50.0, 1e-9);
    EXPECT_NEAR(e.force.x(), 0.0, 1e-12);
    EXPECT_NEAR(e.world_point.y(), -0.001, 1e-12);
  }
}

TEST(GroundContact, NoAdhesionWhenLifting) {
  const BipedModel m = build_model();
  BipedState s = sunk(m, 0.001);
  s.base_rate.z = 1.0;  // damping 500 * 1 > 50
  for (const auto& e : ground_contact(m, s, ContactModel::ForBiped(m))) {
    EXPECT_EQ(e.force.y(), 0.0);
    EXPECT_EQ(e.force.x(), 0.0);
  }
}

TEST(GroundContact, SlidingClampedToFrictionCone) {
  const BipedModel m = build_model();
  BipedState s = sunk(m, 0.001);
  s.base_rate.x = 0.5;  // damping alone would give -250 N
  for (const auto& e : ground_contact(m, s, ContactModel::ForBiped(m)))
    EXPECT_NEAR(e.force.x(), -0.8 * 50.0, 1e-9);
  s.base_rate.x = 0.02;  // -10 N, inside the cone
  for (const auto& e : ground_contact(m, s, ContactModel::ForBiped(m)))
    EXPECT_NEAR(e.force.x(), -10.0, 1e-9);
}

TEST(GroundContact, ConeHoldsAtRandomStates) {
  const BipedModel m = build_model();
  const ContactModel contact = ContactModel::ForBiped(m);
  std::mt19937_64 rng(28);
  int seen = 0;
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXd c = oracle::random_coords(rng);
    c[1] = 0.3;
    const auto forces = ground_contact(m, oracle::to_state(m, c, oracle::random_rates(rng)), contact);
    for (const auto& e : forces) {
      ++seen;
      EXPECT_GE(e.force.y(), 0.0);
      EXPECT_LE(std::abs(e.force.x()), contact.friction_mu * e.force.y());
    }
  }
  EXPECT_GT(seen, 100);
}

TEST(JointLimits, OneSidedSpring) {
  const BipedModel m = build_model();
  BipedState s = standing_state(m);
  const ContactModel contact = ContactModel::ForBiped(m);
  s.q[1] = -0.01;
  s.qdot[1] = 0.5;
  const GenVector tau = joint_limit_torques(m, s, contact);
  EXPECT_NEAR(tau[4], 100.0 * 0.01 - 0.1 * 0.5, 1e-12);
  s.q[1] = 0.01;
  EXPECT_EQ(joint_limit_torques(m, s, contact).norm(), 0.0);
  EXPECT_EQ(joint_limit_torques(m, s, ContactModel::None()).norm(), 0.0);
}

TEST(IntegrateStep, FixedPointWithoutForces) {
  ModelConfig c;
  c.gravity = 0.0;
  const BipedModel m = build_model(c);
  BipedState s = standing_state(m);
  s.base.pitch = 0.1;
  s.q[0] = -0.3;
  const BipedState n = integrate_step(m, s, GenVector::Zero(9), ContactModel::None(), 1e-3);
  EXPECT_EQ(n.position(m), s.position(m));
  EXPECT_EQ(n.velocity(m), s.velocity(m));
}

TEST(IntegrateStep, BitIdenticalRepeats) {
  const BipedModel m = build_model();
  std::mt19937_64 rng(29);
  const Eigen::VectorXd c = oracle::random_coords(rng);
  BipedState a = oracle::to_state(m, c, oracle::random_rates(rng));
  a.base.z = 0.41;
  BipedState b = a;
  const ContactModel contact = ContactModel::ForBiped(m);
  for (int i = 0; i < 200; ++i) {
    a = integrate_step(m, a, GenVector::Zero(9), contact, 1e-4);
    b = integrate_step(m, b, GenVector::Zero(9), contact, 1e-4);
  }
  EXPECT_EQ(a.position(m), b.position(m));
  EXPECT_EQ(a.velocity(m), b.velocity(m));
}

TEST(IntegrateStep, DivergenceThrows) {
  const BipedModel m = build_model();
  GenVector tau = GenVector::Zero(9);
  tau[5] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(integrate_step(m, standing_state(m), tau, ContactModel::None(), 1e-3),
               NumericalError);
  EXPECT_THROW(integrate_step(m, standing_state(m), tau * 0, ContactModel::None(), 0.0), Error);
}

double total_energy(const BipedModel& m, const BipedState& s) {
  return kinetic_energy(m, s) + potential_energy(m, s);
}

TEST(IntegrateStep, PendulumConservesEnergy) {
  const BipedModel p = build_pendulum(kM, kL, kG);
  BipedState s = pendulum_at(p, 1.0);
  // Reference level below the pivot so E0 is well away from zero.
  const double offset = kM * kG * kL;
  const double e0 = total_energy(p, s) + offset;
  double worst = 0.0;
  for (int i = 0; i < 20000; ++i) {
    s = integrate_step(p, s, GenVector::Zero(1), ContactModel::None(), 1e-4);
    worst = std::max(worst, std::abs(total_energy(p, s) + offset - e0) / e0);
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(IntegrateStep, FreeBipedConservesEnergy) {
  const BipedModel m = build_model();
  std::mt19937_64 rng(30);
  Eigen::VectorXd c = oracle::random_coords(rng);
  c[1] = 1.0;
  BipedState s = oracle::to_state(m, c, oracle::random_rates(rng, 1.0));
  const double e0 = total_energy(m, s);
  double worst = 0.0;
  for (int i = 0; i < 20000; ++i) {
    s = integrate_step(m, s, GenVector::Zero(9), ContactModel::None(), 1e-4);
    if (i % 100 == 99) worst = std::max(worst, std::abs(total_energy(m, s) - e0) / std::abs(e0));
  }
  EXPECT_LT(worst, 1e-6);
}

// Angle and rate sampled every `every` steps.
std::vector<Vec2> pendulum_path(double dt, double T, int every) {
  const BipedModel p = build_pendulum(kM, kL, kG);
  BipedState s = pendulum_at(p, 0.3);
  std::vector<Vec2> out;
  const int n = static_cast<int>(std::lround(T / dt));
  for (int i = 1; i <= n; ++i) {
    s = integrate_step(p, s, GenVector::Zero(1), ContactModel::None(), dt);
    if (i % every == 0) out.emplace_back(s.q[0], s.qdot[0]);
  }
  return out;
}

double max_error(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double e = 0.0;
  for (size_t i = 0; i < a.size(); ++i) e = std::max(e, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return e;
}

TEST(IntegrateStep, FourthOrderConvergence) {
  // Small swing keeps dt inside the asymptotic range.
  const double dt = 0.005, T = 1.28;
  const auto ref = pendulum_path(dt / 32, T, 32);
  const double e1 = max_error(pendulum_path(dt, T, 1), ref);
  const double e2 = max_error(pendulum_path(dt / 2, T, 2), ref);
  const double ratio = e1 / e2;
  EXPECT_GT(ratio, 13.0) << "e1=" << e1 << " e2=" << e2;
  EXPECT_LT(ratio, 19.0) << "e1=" << e1 << " e2=" << e2;
}

}  // namespace
}  // namespace sagbiped
