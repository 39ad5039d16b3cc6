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

// Independent reference geometry and mass properties of the default biped,
// written from first principles for the tests.

#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sagbiped/model.hpp"

namespace sagbiped::oracle {

// Rotation about +y carries the downward unit vector to (-sin a, -cos a).
inline Vec2 down(double a) { return {-std::sin(a), -std::cos(a)}; }
inline Vec2 up(double a) { return {std::sin(a), std::cos(a)}; }
inline Vec2 forward(double a) { return {std::cos(a), -std::sin(a)}; }
// d/da of R(a) v equals swap(v) for any vector v.
inline Vec2 swap(const Vec2& v) { return {v.y(), -v.x()}; }

// Plain-number description of the default body, independent of BipedModel.
struct Body {
  double torso_len = 0.2, head_r = 0.04, thigh = 0.2, shank = 0.2;
  double foot_lx = 0.04, foot_lz = 0.02;
  double m_torso = 3.8, m_head = 0.0, m_thigh = 0.735, m_shank = 0.735, m_foot = 0.1;
  double g = 9.81;

  double i_rod(double m, double l) const { return m * l * l / 12.0; }
  double i_sphere(double m, double r) const { return 0.4 * m * r * r; }
  double i_box(double m) const { return m * (foot_lx * foot_lx + foot_lz * foot_lz) / 12.0; }
};

// One rigid body of the chain: CoM, mass, inertia and the generalized
// coordinates (index, rotation centre) that rotate it.
struct Piece {
  Vec2 com;
  double mass;
  double inertia;
  std::vector<std::pair<int, Vec2>> rotations;
};

struct Pose {
  Vec2 hip;
  std::array<Vec2, 2> knee, ankle, toe, heel;
  std::array<double, 2> thigh_angle, shank_angle, foot_angle;
  std::vector<Piece> pieces;  // torso, head, thigh_L, shank_L, foot_L, thigh_R, ...
};

// Coordinates: [x, z, pitch, hip_L, knee_L, ankle_L, hip_R, knee_R, ankle_R].
inline Pose pose(const Body& b, const Eigen::VectorXd& c) {
  Pose p;
  const double pitch = c[2];
  p.hip = Vec2(c[0], c[1]);
  p.pieces.push_back({p.hip + 0.5 * b.torso_len * up(pitch), b.m_torso,
                      b.i_rod(b.m_torso, b.torso_len), {{2, p.hip}}});
  p.pieces.push_back({p.hip + (b.torso_len + b.head_r) * up(pitch), b.m_head,
                      b.i_sphere(b.m_head, b.head_r), {{2, p.hip}}});
  for (int s = 0; s < 2; ++s) {
    const int j = 3 + 3 * s;
    const double at = pitch + c[j];
    const double as = at + c[j + 1];
    const double af = as + c[j + 2];
    p.thigh_angle[s] = at;
    p.shank_angle[s] = as;
    p.foot_angle[s] = af;
    p.knee[s] = p.hip + b.thigh * down(at);
    p.ankle[s] = p.knee[s] + b.shank * down(as);
    const Vec2 sole = p.ankle[s] + b.foot_lz * down(af);
    p.toe[s] = sole + 0.5 * b.foot_lx * forward(af);
    p.heel[s] = sole - 0.5 * b.foot_lx * forward(af);
    p.pieces.push_back({p.hip + 0.5 * b.thigh * down(at), b.m_thigh,
                        b.i_rod(b.m_thigh, b.thigh), {{2, p.hip}, {j, p.hip}}});
    p.pieces.push_back({p.knee[s] + 0.5 * b.shank * down(as), b.m_shank,
                        b.i_rod(b.m_shank, b.shank),
                        {{2, p.hip}, {j, p.hip}, {j + 1, p.knee[s]}}});
    p.pieces.push_back({p.ankle[s] + 0.5 * b.foot_lz * down(af), b.m_foot, b.i_box(b.m_foot),
                        {{2, p.hip}, {j, p.hip}, {j + 1, p.knee[s]}, {j + 2, p.ankle[s]}}});
  }
  return p;
}

// Linear Jacobian of a point rigidly attached to a piece.
inline Eigen::Matrix<double, 2, 9> point_jacobian(const Piece& piece, const Vec2& point) {
  Eigen::Matrix<double, 2, 9> J = Eigen::Matrix<double, 2, 9>::Zero();
  J(0, 0) = 1.0;
  J(1, 1) = 1.0;
  for (const auto& [k, centre] : piece.rotations) J.col(k) = swap(point - centre);
  return J;
}

inline Eigen::Matrix<double, 9, 9> mass_matrix(const Body& b, const Eigen::VectorXd& c) {
  Eigen::Matrix<double, 9, 9> M = Eigen::Matrix<double, 9, 9>::Zero();
  for (const Piece& piece : pose(b, c).pieces) {
    const auto J = point_jacobian(piece, piece.com);
    Eigen::Matrix<double, 1, 9> w = Eigen::Matrix<double, 1, 9>::Zero();
    for (const auto& rot : piece.rotations) w(rot.first) = 1.0;
    M += piece.mass * J.transpose() * J + piece.inertia * w.transpose() * w;
  }
  return M;
}

inline double potential(const Body& b, const Eigen::VectorXd& c) {
  double v = 0.0;
  for (const Piece& piece : pose(b, c).pieces) v += piece.mass * b.g * piece.com.y();
  return v;
}

inline Eigen::Matrix<double, 9, 1> gravity(const Body& b, const Eigen::VectorXd& c) {
  Eigen::Matrix<double, 9, 1> G = Eigen::Matrix<double, 9, 1>::Zero();
  for (const Piece& piece : pose(b, c).pieces)
    G += piece.mass * b.g * point_jacobian(piece, piece.com).row(1).transpose();
  return G;
}

// Random configuration of the default biped inside its joint limits.
inline Eigen::VectorXd random_coords(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd c(9);
  c << 0.3 * u(rng), 0.35 + 0.05 * u(rng), 0.5 * u(rng), 1.5 * u(rng),
      1.2 + 1.1 * u(rng), 0.8 * u(rng), 1.5 * u(rng), 1.2 + 1.1 * u(rng), 0.8 * u(rng);
  return c;
}

inline Eigen::VectorXd random_rates(std::mt19937_64& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd v(9);
  for (int i = 0; i < 9; ++i) v[i] = u(rng);
  return v;
}

inline BipedState to_state(const BipedModel& model, const Eigen::VectorXd& c,
                           const Eigen::VectorXd& v) {
  BipedState s = BipedState::Zero(model);
  s.set_position(model, c);
  s.set_velocity(model, v);
  return s;
}

}  // namespace sagbiped::oracle
