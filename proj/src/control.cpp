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

#include "sagbiped/control.hpp"

#include <algorithm>
#include <cmath>

#include "sagbiped/error.hpp"

namespace sagbiped {

PdGains PdGains::Uniform(double kp, double kd) {
  return {Vec6::Constant(kp), Vec6::Constant(kd)};
}

PdGains PdGains::Default() {
  PdGains g = Uniform(150.0, 4.0);
  g.kd[2] = g.kd[5] = 0.2;
  return g;
}

void PdGains::validate() const {
  for (int j = 0; j < 6; ++j) {
    if (!(kp[j] >= 0.0) || !std::isfinite(kp[j]))
      throw ValidationError("controller.kp", "gains must be finite and non-negative");
    if (!(kd[j] >= 0.0) || !std::isfinite(kd[j]))
      throw ValidationError("controller.kd", "gains must be finite and non-negative");
  }
}

Vec6 pd_torque(const Vec6& q_ref, const Vec6& qdot_ref, const BipedState& state,
               const PdGains& gains, double torque_limit) {
  Vec6 tau;
  for (int j = 0; j < 6; ++j) {
    const double t = gains.kp[j] * (q_ref[j] - state.q[j]) +
                     gains.kd[j] * (qdot_ref[j] - state.qdot[j]);
    tau[j] = std::clamp(t, -torque_limit, torque_limit);
  }
  return tau;
}

void PushEvent::validate(const BipedModel& model) const {
  if (!std::isfinite(t_start) || t_start < 0.0)
    throw ValidationError("pushes.t_start", "must be finite and non-negative");
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw ValidationError("pushes.duration", "must be positive");
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude))
    throw ValidationError("pushes.magnitude", "must be finite and non-negative");
  if (!std::isfinite(direction))
    throw ValidationError("pushes.direction", "must be finite");
  if (body < -1 || body >= static_cast<int>(model.links.size()))
    throw ValidationError("pushes.body", "unknown link");
  if (local_point && !local_point->allFinite())
    throw ValidationError("pushes.local_point", "must be finite");
}

std::vector<ExternalForce> apply_push(std::span<const PushEvent> schedule, double t,
                                      const BipedModel& model) {
  std::vector<ExternalForce> out;
  for (const auto& e : schedule) {
    if (!e.active_at(t)) continue;
    ExternalForce f;
    f.body = e.body < 0 ? model.torso : e.body;
    f.local_point = e.local_point.value_or(
        Vec2(model.links[f.body].params.com_offset, 0.0));
    f.force = Vec2(e.magnitude * std::cos(e.direction), e.magnitude * std::sin(e.direction));
    f.t_start = e.t_start;
    f.t_end = e.t_end();
    out.push_back(f);
  }
  return out;
}

std::string_view to_string(SimStatus s) {
  switch (s) {
    case SimStatus::kWalking:
      return "walking";
    case SimStatus::kRecovering:
      return "recovering";
    case SimStatus::kRecovered:
      return "recovered";
    case SimStatus::kFallen:
      return "fallen";
  }
  return "walking";
}

SimStatus fall_detector(const BipedState& state, const BipedModel& model,
                        double standing_com_height) {
  if (!state.finite()) return SimStatus::kFallen;
  if (std::abs(state.base.pitch) > kFallPitch) return SimStatus::kFallen;
  if (model_com(model, state).y() < kFallComFraction * standing_com_height)
    return SimStatus::kFallen;
  return SimStatus::kWalking;
}

SimStatus fall_detector(const BipedState& state, const BipedModel& model) {
  return fall_detector(state, model, model_com(model, standing_state(model)).y());
}

SimStatus RecoveryMonitor::update(double t, bool push_active, double margin,
                                  bool fallen) {
  if (status_ == SimStatus::kFallen) return status_;
  if (fallen) {
    status_ = SimStatus::kFallen;
    fall_time_ = t;
    return status_;
  }
  if (push_active) {
    status_ = SimStatus::kRecovering;
    push_was_active_ = true;
    positive_since_.reset();
    settled_at_.reset();
    return status_;
  }
  if (push_was_active_) {
    push_end_ = t;
    push_was_active_ = false;
  }
  if (status_ != SimStatus::kRecovering) return status_;
  if (margin > 0.0) {
    if (!positive_since_) positive_since_ = t;
    if (t - *positive_since_ >= window_) {
      status_ = SimStatus::kRecovered;
      settled_at_ = positive_since_;
    }
  } else {
    positive_since_.reset();
  }
  return status_;
}

void ControllerConfig::validate() const {
  gains.validate();
  if (!(torque_limit > 0.0) || !std::isfinite(torque_limit))
    throw ValidationError("controller.torque_limit", "must be positive");
  if (!(hip_threshold < 0.0))
    throw ValidationError("controller.hip_threshold", "must be negative");
  if (!(hip_gain >= 0.0) || !std::isfinite(hip_gain))
    throw ValidationError("controller.hip_gain", "must be non-negative");
  if (!(hip_cap >= 0.0) || !std::isfinite(hip_cap))
    throw ValidationError("controller.hip_cap", "must be non-negative");
  if (!(pitch_feedback >= 0.0) || !std::isfinite(pitch_feedback))
    throw ValidationError("controller.pitch_feedback", "must be non-negative");
  if (!(max_step_adjust >= 0.0) || !std::isfinite(max_step_adjust))
    throw ValidationError("controller.max_step_adjust", "must be non-negative");
  if (!(retarget_until >= 0.0 && retarget_until <= 1.0))
    throw ValidationError("controller.retarget_until", "must lie in [0, 1]");
}

Controller::Controller(const BipedModel& model, const GaitParams& gait,
                       std::shared_ptr<const FuzzySystem> fuzzy, ControllerConfig config,
                       std::vector<PushEvent> pushes)
    : model_(&model),
      gait_(gait),
      fuzzy_(std::move(fuzzy)),
      config_(config),
      pushes_(std::move(pushes)),
      contact_(ContactModel::ForBiped(model)),
      lipm_(default_lipm(model)),
      standing_com_height_(model_com(model, standing_state(model)).y()),
      monitor_(gait.period) {
  config_.validate();
  for (const auto& p : pushes_) p.validate(model);
}

void Controller::set_replay(std::shared_ptr<const GaitSeries> series) {
  if (series && series->size() < 2) throw ValidationError("gait.csv", "need two samples");
  replay_ = std::move(series);
}

double Controller::foothold(long half_cycle) const {
  const auto it = footholds_.find(half_cycle);
  return it != footholds_.end() ? it->second : nominal_foothold(half_cycle, gait_);
}

JointReference Controller::reference(double t) const {
  if (replay_) {
    const double t0 = replay_->t.front();
    const double t1 = replay_->t.back();
    auto at = [&](double s) { return resample(*replay_, std::clamp(s, t0, t1)); };
    JointReference r;
    r.q = at(t);
    const double lo = std::clamp(t - kReferenceRateStep, t0, t1);
    const double hi = std::clamp(t + kReferenceRateStep, t0, t1);
    if (hi > lo) r.qdot = (at(hi) - at(lo)) / (hi - lo);
    return r;
  }
  if (footholds_.empty()) return joint_reference(t, gait_, *model_);
  return joint_reference(t, gait_, *model_, [this](long k) { return foothold(k); });
}

SupportInterval Controller::planned_support(const BipedState& state,
                                            const PhaseState* phase) {
  const auto contact = feet_in_contact(state, *model_);
  SupportInterval out{std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
  bool any = false;
  auto add = [&](const SupportInterval& s) {
    out.min = std::min(out.min, s.min);
    out.max = std::max(out.max, s.max);
    any = true;
  };
  for (int s = 0; s < 2; ++s)
    if (contact[s]) add(foot_interval(state, *model_, static_cast<Side>(s)));
  // In single support the planned touchdown of the swing foot belongs to the
  // support the pendulum is heading for. It is placed relative to the actual
  // stance foot so that foot creep does not bias the margin.
  if (phase != nullptr && !phase->double_support()) {
    const long k = phase->half_cycle;
    const double stance = foot_interval(state, *model_, phase->support).center();
    const double td = stance + foothold(k + 1) - foothold(k);
    const double half = 0.5 * model_->foot_length();
    add({td - half, td + half});
  }
  if (!any) {
    if (last_support_) return *last_support_;
    const double x = com_kinematics(*model_, state).position.x();
    return {x, x};
  }
  last_support_ = out;
  return out;
}

bool Controller::reference_feasible(double t_from, long last_half_cycle) const {
  const double t_to = 0.5 * gait_.period * static_cast<double>(last_half_cycle + 1);
  constexpr double kStep = 5e-3;
  try {
    for (double t = t_from; t <= t_to; t += kStep) reference(t);
    reference(t_to);
  } catch (const UnreachableError&) {
    return false;
  }
  return true;
}

ControlOutput Controller::step(const BipedState& state, double t) {
  ControlOutput out;
  if (!replay_) {
    out.phase = gait_phase(t, gait_);
    out.has_phase = true;
  }

  BalanceState& b = out.balance;
  const ComKinematics com = com_kinematics(*model_, state);
  b.com_x = com.position.x();
  b.com_z = com.position.y();
  b.com_v = com.velocity.x();
  const auto contacts = ground_contact(*model_, state, contact_);
  try {
    b.cop_x = cop_from_contact(contacts);
  } catch (const NoContactError&) {
    b.cop_x = b.com_x;
  }
  b.capture_x = capture_point(b.com_x, b.com_v, lipm_);
  b.support = planned_support(state, out.has_phase ? &out.phase : nullptr);
  b.margin = stability_margin(b.capture_x, b.support);
  out.strategy = strategy_select(b.margin, config_.hip_threshold);

  out.pushes = apply_push(pushes_, t, *model_);
  double strongest = -1.0;
  for (const auto& e : pushes_) {
    if (!e.active_at(t) || e.magnitude <= strongest) continue;
    strongest = e.magnitude;
    latched_force_ = e.magnitude;
    latched_direction_ = e.direction;
  }
  for (const auto& f : out.pushes) out.push_force += f.force;

  const bool fallen =
      fall_detector(state, *model_, standing_com_height_) == SimStatus::kFallen;
  out.status = monitor_.update(t, !out.pushes.empty(), b.margin, fallen);
  const bool recovering = out.status == SimStatus::kRecovering;

  if (recovering && fuzzy_) {
    JointState joints;
    if (out.has_phase) {
      joints.swing_left = out.phase.left == LegPhase::kSwing;
      joints.swing_right = out.phase.right == LegPhase::kSwing;
    }
    out.command = hierarchical_infer(*fuzzy_, latched_force_, latched_direction_,
                                     b.margin, joints, config_.hip_threshold);
  }
  out.command.strategy = out.strategy;
  // Corrections act only while the capture point is outside the support.
  out.corrections_active = config_.corrections_enabled && recovering && b.margin < 0.0;

  if (out.corrections_active && out.strategy == Strategy::kStep && out.has_phase &&
      !out.phase.double_support() && out.phase.swing_progress < config_.retarget_until) {
    // Touchdown at the capture point, measured from the actual stance foot.
    const long k = out.phase.half_cycle + 1;
    const double stance = foot_interval(state, *model_, out.phase.support).center();
    const double stride = nominal_foothold(k, gait_) - nominal_foothold(k - 1, gait_);
    const double previous = foothold(k);
    footholds_[k] = foothold(k - 1) + std::clamp(b.capture_x - stance,
                                                 stride - config_.max_step_adjust,
                                                 stride + config_.max_step_adjust);
    if (!reference_feasible(t, k + 1)) footholds_[k] = previous;
  }

  JointReference ref;
  try {
    ref = reference(t);
  } catch (const UnreachableError&) {
    footholds_.clear();
    ref = reference(t);
  }
  out.q_ref = ref.q;
  out.qdot_ref = ref.qdot;
  double pitch_ref = 0.0;
  if (out.corrections_active) {
    out.q_ref += out.command.delta_q;
    out.qdot_ref += out.command.delta_qdot;
    if (out.strategy == Strategy::kHip) {
      const double side = b.capture_x >= b.support.center() ? 1.0 : -1.0;
      const double lean = side * std::min(config_.hip_cap, config_.hip_gain * -b.margin);
      pitch_ref = lean;
    }
  }
  // Stance hip: extending the hip pitches the torso back relative to a
  // planted leg.
  // Without a gait phase (replay) a leg off the ground counts as swinging.
  const auto touching = feet_in_contact(state, *model_);
  for (int s = 0; s < 2; ++s) {
    const Side side = static_cast<Side>(s);
    const bool swing = out.has_phase ? !out.phase.double_support() &&
                                           out.phase.swing_side() == side
                                     : !touching[s];
    if (swing) continue;
    const int hip = joint_index(side, 0);
    out.q_ref[hip] += config_.pitch_feedback * (state.base.pitch - pitch_ref);
    out.qdot_ref[hip] += config_.pitch_feedback * state.base_rate.pitch;
  }
  out.tau = pd_torque(out.q_ref, out.qdot_ref, state, config_.gains, config_.torque_limit);
  return out;
}

}  // namespace sagbiped
