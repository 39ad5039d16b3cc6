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

#include <Eigen/Core>

namespace sagbiped {

// Upper bound on generalized coordinates; keeps the dense dynamics on the stack.
inline constexpr int kMaxDof = 12;

using Vec2 = Eigen::Vector2d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using GenVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDof, 1>;
using GenMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDof, kMaxDof>;
// Rows: point velocity x, point velocity z, angular rate about +y.
using Jacobian = Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, kMaxDof>;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace sagbiped
