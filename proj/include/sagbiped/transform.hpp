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

#include <cmath>

#include "sagbiped/types.hpp"

namespace sagbiped {

/// Denavit-Hartenberg link row. In the sagittal plane only `a`, `alpha` and
/// `theta_offset` shape the pose; `d` is the out-of-plane offset and is kept
/// for completeness of the table.
struct DHRow {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
};

/// Rigid planar transform in the (x, z) plane, optionally with flipped
/// handedness. Maps a local point p to R(rotation) * diag(1, handedness) * p
/// + translation. Rotation is counter-clockwise in (x, z) coordinates.
struct Transform2 {
  double rotation = 0.0;
  Vec2 translation = Vec2::Zero();
  int handedness = 1;

  static Transform2 Identity() { return {}; }
  static Transform2 Rotation(double angle) { return {angle, Vec2::Zero(), 1}; }
  static Transform2 Translation(double x, double z) {
    return {0.0, Vec2(x, z), 1};
  }
  static Transform2 Flip() { return {0.0, Vec2::Zero(), -1}; }

  Eigen::Matrix2d R() const {
    const double c = std::cos(rotation), s = std::sin(rotation);
    Eigen::Matrix2d m;
    m << c, -s, s, c;
    return m;
  }

  Vec2 apply(const Vec2& p) const {
    return R() * Vec2(p.x(), handedness * p.y()) + translation;
  }

  // Direction of the local +x axis in the parent frame.
  Vec2 axis() const { return Vec2(std::cos(rotation), std::sin(rotation)); }

  Transform2 operator*(const Transform2& rhs) const {
    Transform2 out;
    out.rotation = rotation + handedness * rhs.rotation;
    out.translation =
        R() * Vec2(rhs.translation.x(), handedness * rhs.translation.y()) +
        translation;
    out.handedness = handedness * rhs.handedness;
    return out;
  }

  Transform2 inverse() const {
    // p = R F x + t  =>  x = F R^T (p - t), and F R(-a) = R(h a) F.
    Transform2 out;
    out.handedness = handedness;
    out.rotation = -handedness * rotation;
    const Vec2 back = R().transpose() * (-translation);
    out.translation = Vec2(back.x(), handedness * back.y());
    return out;
  }
};

/// Planar D-H step: rotate by q + theta_offset, translate `a` along the new
/// x-axis, then flip handedness when alpha is pi.
inline Transform2 dh_transform(const DHRow& row, double q) {
  Transform2 t = Transform2::Rotation(q + row.theta_offset) *
                 Transform2::Translation(row.a, 0.0);
  if (std::cos(row.alpha) < 0.0) t = t * Transform2::Flip();
  return t;
}

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace sagbiped
