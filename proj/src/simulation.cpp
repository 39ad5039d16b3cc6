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

#include "sagbiped/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "sagbiped/error.hpp"
#include "sagbiped/kinematics.hpp"

namespace sagbiped {

void SimulationConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ValidationError("simulation.dt", "must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw ValidationError("simulation.duration", "must be positive");
  if (substeps < 1) throw ValidationError("simulation.substeps", "must be at least 1");
  if (static_cast<double>(ticks()) > 1e8)
    throw ValidationError("simulation.duration", "too many control periods");
}

long SimulationConfig::ticks() const {
  return static_cast<long>(std::llround(duration / dt));
}

const std::string& sim_log_header() {
  static const std::string header = [] {
    const char* joints[] = {"hip_l", "knee_l", "ankle_l", "hip_r", "knee_r", "ankle_r"};
    std::string h = "t";
    for (const char* j : joints) h += std::string(",q_") + j;
    for (const char* j : joints) h += std::string(",qd_") + j;
    h += ",base_x,base_z,base_pitch,com_x,com_z,cop_x,capture_x,margin";
    h += ",phase_left,phase_right,strategy,severity,ifs_mu,ifs_nu,ifs_pi";
    for (const char* j : joints) h += std::string(",dq_") + j;
    h += ",push_fx,push_fz,status";
    return h;
  }();
  return header;
}

namespace {

class RowWriter {
 public:
  explicit RowWriter(std::string& out) : out_(out) {}

  void num(double v) {
    sep();
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    out_.append(buf, r.ptr);
  }
  void text(std::string_view s) {
    sep();
    out_.append(s);
  }
  void end() {
    out_ += '\n';
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_ += ',';
    first_ = false;
  }
  std::string& out_;
  bool first_ = true;
};

std::string_view phase_label(const ControlOutput& c, Side side) {
  if (!c.has_phase) return "n/a";
  const LegPhase p = side == Side::kLeft ? c.phase.left : c.phase.right;
  return p == LegPhase::kStance ? "stance" : "swing";
}

int strategy_rank(Strategy s) { return static_cast<int>(s); }

}  // namespace

BipedState initial_state(const BipedModel& model, const Controller& controller) {
  const JointReference ref = controller.reference(0.0);
  BipedState s = BipedState::Zero(model);
  s.q = ref.q;
  s.qdot = ref.qdot;
  if (!controller.replaying() && controller.gait().step_length > 0.0) {
    const GaitParams& g = controller.gait();
    const PhaseState p0 = gait_phase(0.0, g);
    const double h = kReferenceRateStep;
    const PhaseState p1 = gait_phase(h, g);
    const BasePose b0 = body_target(p0, g, nominal_support_x(p0, g));
    const BasePose b1 = body_target(p1, g, nominal_support_x(p1, g));
    s.base.x = b0.x;
    s.base_rate.x = (b1.x - b0.x) / h;
  }
  // Drop the body so the lowest sole corner carries its share of the weight.
  s.base.z = 0.0;
  const auto frames = forward_kinematics(model, s);
  double lowest = std::numeric_limits<double>::infinity();
  int touching = 0;
  std::vector<double> heights;
  for (const auto& p : controller.contact().points) heights.push_back(point_position(frames, p).y());
  for (double z : heights) lowest = std::min(lowest, z);
  for (double z : heights)
    if (z - lowest < 1e-6) ++touching;
  const double load =
      total_mass(model) * model.gravity / (std::max(touching, 1) * controller.contact().stiffness);
  s.base.z = -lowest - load;
  if (controller.replaying()) {
    // Base velocity that keeps the lower ankle still.
    const auto frames_z = forward_kinematics(model, s);
    int stance = 0;
    for (int side = 1; side < 2; ++side)
      if (frames_z[model.foot[side]].translation.y() < frames_z[model.foot[stance]].translation.y())
        stance = side;
    const Jacobian J = contact_jacobian(model, s, BodyPoint{model.foot[stance], Vec2::Zero()});
    const GenVector v = J * s.velocity(model);
    s.base_rate.x = -v[0];
    s.base_rate.z = -v[1];
  }
  return s;
}

SimResult simulate(const BipedModel& model, Controller& controller,
                   const SimulationConfig& config, std::ostream* log) {
  config.validate();
  SimResult res;
  BipedState state = initial_state(model, controller);
  const long n = config.ticks();
  const double h = config.dt / config.substeps;
  const auto& schedule = controller.pushes();
  res.pushes.resize(schedule.size());
  std::vector<double> excursion(schedule.size(), 0.0);
  std::vector<int> worst(schedule.size(), 0);
  std::vector<char> seen(schedule.size(), 0);
  double err2 = 0.0;
  long err_n = 0;
  res.min_margin = std::numeric_limits<double>::infinity();
  // Index of the push whose recovery is in progress.
  int current = -1;
  SimStatus prev_status = SimStatus::kWalking;
  auto resolve = [&](int i, SimStatus status) {
    PushOutcome& o = res.pushes[i];
    o.outcome = std::string(to_string(status));
    const auto& mon = controller.monitor();
    if (status == SimStatus::kRecovered && mon.settled_at() && mon.push_end())
      o.settling_time = std::max(0.0, *mon.settled_at() - *mon.push_end());
  };

  std::string buf;
  if (log) *log << sim_log_header() << '\n';
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * config.dt;
    int starting = -1;
    for (size_t i = 0; i < schedule.size(); ++i)
      if (schedule[i].active_at(t) && !seen[i]) starting = static_cast<int>(i);
    // A new push closes the books on the previous one.
    if (starting >= 0 && current >= 0 && current != starting) resolve(current, prev_status);
    const ControlOutput c = controller.step(state, t);
    res.status = c.status;
    res.rows = k + 1;
    res.end_time = t;
    prev_status = c.status;

    for (size_t i = 0; i < schedule.size(); ++i) {
      if (schedule[i].active_at(t)) {
        current = static_cast<int>(i);
        seen[i] = 1;
      }
    }
    if (current >= 0 && c.status == SimStatus::kRecovering) {
      excursion[current] = std::max(excursion[current], -c.balance.margin);
      worst[current] = std::max(worst[current], strategy_rank(c.strategy));
    }
    res.min_margin = std::min(res.min_margin, c.balance.margin);
    res.max_abs_pitch = std::max(res.max_abs_pitch, std::abs(state.base.pitch));
    if (c.status != SimStatus::kFallen) {
      const JointReference nominal = controller.reference(t);
      for (int j = 0; j < 6; ++j) {
        const double e = nominal.q[j] - state.q[j];
        err2 += e * e;
      }
      err_n += 6;
    }

    if (log) {
      buf.clear();
      RowWriter w(buf);
      w.num(t);
      for (int j = 0; j < 6; ++j) w.num(state.q[j]);
      for (int j = 0; j < 6; ++j) w.num(state.qdot[j]);
      w.num(state.base.x);
      w.num(state.base.z);
      w.num(state.base.pitch);
      w.num(c.balance.com_x);
      w.num(c.balance.com_z);
      w.num(c.balance.cop_x);
      w.num(c.balance.capture_x);
      w.num(c.balance.margin);
      w.text(phase_label(c, Side::kLeft));
      w.text(phase_label(c, Side::kRight));
      w.text(to_string(c.strategy));
      w.num(c.command.severity);
      w.num(c.command.activation.mu);
      w.num(c.command.activation.nu);
      w.num(c.command.activation.pi);
      for (int j = 0; j < 6; ++j) w.num(c.corrections_active ? c.command.delta_q[j] : 0.0);
      w.num(c.push_force.x());
      w.num(c.push_force.y());
      w.text(to_string(c.status));
      w.end();
      *log << buf;
    }

    if (c.status == SimStatus::kFallen) {
      res.fall_time = controller.monitor().fall_time();
      break;
    }
    if (k == n) break;

    for (int s = 0; s < config.substeps; ++s) {
      const double ts = t + s * h;
      const Vec6 tau = pd_torque(c.q_ref, c.qdot_ref, state, controller.config().gains,
                                 controller.config().torque_limit);
      res.max_abs_torque = std::max(res.max_abs_torque, tau.cwiseAbs().maxCoeff());
      const auto pushes = apply_push(schedule, t, model);
      state = integrate_step(model, state, actuated(model, tau), controller.contact(), h,
                             pushes, ts);
    }
  }
  res.tracking_rms = err_n > 0 ? std::sqrt(err2 / err_n) : 0.0;

  for (size_t i = 0; i < schedule.size(); ++i) {
    PushOutcome& o = res.pushes[i];
    o.max_margin_excursion = std::max(0.0, excursion[i]);
    o.strategy = static_cast<Strategy>(worst[i]);
    if (!seen[i])
      o.outcome = "n/a";
    else if (static_cast<int>(i) == current)
      resolve(current, res.status);
  }
  return res;
}

}  // namespace sagbiped
