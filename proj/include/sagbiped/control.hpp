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

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sagbiped/balance.hpp"
#include "sagbiped/dynamics.hpp"
#include "sagbiped/fuzzy.hpp"
#include "sagbiped/gait.hpp"
#include "sagbiped/strategy.hpp"

namespace sagbiped {

struct PdGains {
  Vec6 kp = Vec6::Zero();
  Vec6 kd = Vec6::Zero();

  static PdGains Uniform(double kp, double kd);
  /// Hip/knee kp 150, kd 4; ankle kp 150, kd 0.2. The foot is very light,
  /// so larger ankle damping is unstable at the servo rate.
  static PdGains Default();
  void validate() const;
};

inline constexpr double kDefaultTorqueLimit = 20.0;

/// Joint-space PD with symmetric saturation.
Vec6 pd_torque(const Vec6& q_ref, const Vec6& qdot_ref, const BipedState& state,
               const PdGains& gains, double torque_limit = kDefaultTorqueLimit);

struct PushEvent {
  double t_start = 0.0;
  double duration = 0.1;
  double magnitude = 0.0;
  double direction = 0.0;  // 0 pushes toward +x, pi/2 toward +z
  int body = -1;           // -1: torso
  std::optional<Vec2> local_point;  // default: CoM of `body`

  double t_end() const { return t_start + duration; }
  bool active_at(double t) const { return t >= t_start && t < t_end(); }
  void validate(const BipedModel& model) const;
};

/// Forces of the events whose window contains `t`.
std::vector<ExternalForce> apply_push(std::span<const PushEvent> schedule, double t,
                                      const BipedModel& model);

enum class SimStatus { kWalking, kRecovering, kRecovered, kFallen };

std::string_view to_string(SimStatus status);

inline constexpr double kFallPitch = 1.05;
inline constexpr double kFallComFraction = 0.5;

/// kFallen when |pitch| > 1.05 rad or the CoM drops below half its standing
/// height, otherwise kWalking.
SimStatus fall_detector(const BipedState& state, const BipedModel& model);
SimStatus fall_detector(const BipedState& state, const BipedModel& model,
                        double standing_com_height);

/// Outcome bookkeeping: a push starts recovery, a full gait cycle of positive
/// margin after the push ends completes it, a fall ends everything.
class RecoveryMonitor {
 public:
  explicit RecoveryMonitor(double window) : window_(window) {}

  SimStatus update(double t, bool push_active, double margin, bool fallen);

  SimStatus status() const { return status_; }
  std::optional<double> fall_time() const { return fall_time_; }
  /// Start of the positive-margin window that completed the last recovery.
  std::optional<double> settled_at() const { return settled_at_; }
  std::optional<double> push_end() const { return push_end_; }

 private:
  double window_;
  SimStatus status_ = SimStatus::kWalking;
  bool push_was_active_ = false;
  std::optional<double> positive_since_;
  std::optional<double> fall_time_;
  std::optional<double> settled_at_;
  std::optional<double> push_end_;
};

struct ControllerConfig {
  PdGains gains = PdGains::Default();
  double torque_limit = kDefaultTorqueLimit;
  double hip_threshold = -0.05;
  double hip_gain = 4.0;  // rad per metre of negative margin
  double hip_cap = 0.4;
  // Stance hip references are corrected by this fraction of the measured
  // torso pitch error.
  double pitch_feedback = 1.0;
  double max_step_adjust = 0.06;  // bound on touchdown retargeting
  double retarget_until = 0.7;    // swing progress after which the touchdown is frozen
  bool corrections_enabled = true;

  void validate() const;
};

struct ControlOutput {
  PhaseState phase;
  bool has_phase = false;  // false in replay mode
  Vec6 q_ref = Vec6::Zero();     // including corrections
  Vec6 qdot_ref = Vec6::Zero();
  Vec6 tau = Vec6::Zero();
  RecoveryCommand command;
  Strategy strategy = Strategy::kAnkle;
  BalanceState balance;
  Vec2 push_force = Vec2::Zero();
  std::vector<ExternalForce> pushes;
  SimStatus status = SimStatus::kWalking;
  bool corrections_active = false;  // deltas applied this tick
};

/// Per-tick closed loop. State kept between ticks: the recovery monitor, the
/// latched push inputs and any retargeted footholds.
class Controller {
 public:
  Controller(const BipedModel& model, const GaitParams& gait,
             std::shared_ptr<const FuzzySystem> fuzzy, ControllerConfig config,
             std::vector<PushEvent> pushes);

  /// Track a recorded joint series instead of the generator. Times past the
  /// last sample hold the final pose.
  void set_replay(std::shared_ptr<const GaitSeries> series);
  bool replaying() const { return replay_ != nullptr; }

  /// Reference without corrections at time t.
  JointReference reference(double t) const;

  ControlOutput step(const BipedState& state, double t);

  const RecoveryMonitor& monitor() const { return monitor_; }
  const ControllerConfig& config() const { return config_; }
  const ContactModel& contact() const { return contact_; }
  const GaitParams& gait() const { return gait_; }
  const std::vector<PushEvent>& pushes() const { return pushes_; }
  double foothold(long half_cycle) const;

 private:
  SupportInterval planned_support(const BipedState& state, const PhaseState* phase);
  // True when the reference stays inside the leg workspace up to the end of
  // the given half cycle.
  bool reference_feasible(double t_from, long last_half_cycle) const;

  const BipedModel* model_;
  GaitParams gait_;
  std::shared_ptr<const FuzzySystem> fuzzy_;
  ControllerConfig config_;
  std::vector<PushEvent> pushes_;
  std::shared_ptr<const GaitSeries> replay_;
  ContactModel contact_;
  LipmParams lipm_;
  double standing_com_height_;
  RecoveryMonitor monitor_;
  std::map<long, double> footholds_;
  std::optional<SupportInterval> last_support_;
  double latched_force_ = 0.0;
  double latched_direction_ = 0.0;
};

}  // namespace sagbiped
