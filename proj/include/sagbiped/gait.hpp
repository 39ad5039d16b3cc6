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

#include <functional>
#include <string>
#include <vector>

#include "sagbiped/kinematics.hpp"
#include "sagbiped/model.hpp"

namespace sagbiped {

/// Walking pattern parameters. `step_length` is the fore-aft distance between
/// the feet at touchdown, so each swing covers two step lengths and the hip
/// advances one step length per half cycle.
struct GaitParams {
  double period = 1.0;
  double duty_factor = 0.6;
  double step_length = 0.06;
  double step_height = 0.02;
  double hip_height = 0.38;  // hip joint above the ground
  // Derived from the model by `params_for_model`.
  double ankle_height = 0.02;
  double lipm_height = 0.378;
  double gravity = 9.81;
  // Mean forward offset of the whole-body CoM from the hip in the walking
  // posture; the pendulum profile is laid out for the CoM, the hip trails it.
  double com_lead = 0.0;
};

/// Fills the model-dependent fields (ankle height, LIPM height, gravity,
/// CoM lead) of `params`.
GaitParams params_for_model(GaitParams params, const BipedModel& model);

/// Throws ValidationError if the parameters are malformed or any sampled
/// foot target is outside the leg workspace.
void validate_gait(const GaitParams& params, const BipedModel& model);

enum class LegPhase { kStance, kSwing };

struct PhaseState {
  double cycle_time = 0.0;
  LegPhase left = LegPhase::kStance;
  LegPhase right = LegPhase::kStance;
  double swing_progress = 0.0;  // meaningful only when one leg swings
  // Leg whose stance began most recently and the time since then.
  Side support = Side::kLeft;
  double half_time = 0.0;
  long half_cycle = 0;

  bool double_support() const {
    return left == LegPhase::kStance && right == LegPhase::kStance;
  }
  Side swing_side() const {
    return left == LegPhase::kSwing ? Side::kLeft : Side::kRight;
  }
};

PhaseState gait_phase(double t, const GaitParams& params);

/// Ankle x of the support foot for the nominal foothold sequence.
double nominal_support_x(const PhaseState& phase, const GaitParams& params);

/// Ankle x of the support foot in half cycle `k` for the nominal sequence.
double nominal_foothold(long half_cycle, const GaitParams& params);

/// Swing ankle target moving from `liftoff_x` to `touchdown_x`.
FootPose swing_foot_between(const PhaseState& phase, const GaitParams& params,
                            double liftoff_x, double touchdown_x);

/// Swing ankle target: quintic fore-aft blend from stance_x - L to
/// stance_x + L, vertical bump peaking at step_height mid-swing, sole flat.
FootPose swing_foot_target(const PhaseState& phase, const GaitParams& params,
                           double stance_ankle_x);

/// Hip pose (x, z, pitch). Double support uses a constant-acceleration blend;
/// single support follows the linear inverted pendulum over the support ankle.
BasePose body_target(const PhaseState& phase, const GaitParams& params,
                     double stance_ankle_x);

struct JointReference {
  Vec6 q = Vec6::Zero();
  Vec6 qdot = Vec6::Zero();
};

/// Support ankle x per half cycle. Empty means the nominal sequence.
using FootholdFn = std::function<double(long)>;

/// Per-leg IK of the foot and body targets; rates by central differences.
/// The body always follows the nominal profile; `footholds` only moves feet.
JointReference joint_reference(double t, const GaitParams& params,
                               const BipedModel& model,
                               const FootholdFn& footholds = {});

/// Joint angles only (no rate estimate).
Vec6 joint_pose(double t, const GaitParams& params, const BipedModel& model,
                const FootholdFn& footholds = {});

inline constexpr double kReferenceRateStep = 1e-4;

/// Recorded joint trajectory.
struct GaitSeries {
  std::vector<double> t;
  std::vector<Vec6> q;

  size_t size() const { return t.size(); }
};

inline constexpr const char* kGaitCsvHeader = "t,hip_l,knee_l,ankle_l,hip_r,knee_r,ankle_r";

GaitSeries load_gait_csv(const std::string& path);
GaitSeries parse_gait_csv(const std::string& text, const std::string& source);
void write_gait_csv(const std::string& path, const GaitSeries& series);
std::string format_gait_csv(const GaitSeries& series);

/// Linear interpolation per joint; throws RangeError outside the samples.
Vec6 resample(const GaitSeries& series, double t);

}  // namespace sagbiped
