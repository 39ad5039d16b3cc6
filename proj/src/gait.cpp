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

#include "sagbiped/gait.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/QR>

#include "sagbiped/error.hpp"

namespace sagbiped {

namespace {

double smoothstep5(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }

// Zero slope at both ends, 1 at s = 0.5.
double bump(double s) { return 16.0 * s * s * (1.0 - s) * (1.0 - s); }

struct BodyProfile {
  double tds;  // double-support duration
  double tc;   // pendulum time constant
  double a;    // offset from support ankle at the start of single support
  double va;   // velocity at the start of single support
  double ve;   // velocity at the end of single support
};

// Periodic hip profile: starts each half cycle at -L/2 from the new support
// ankle, ends at +L/2, follows x'' = x / Tc^2 in single support and moves with
// constant acceleration in double support.
BodyProfile body_profile(const GaitParams& p) {
  BodyProfile b;
  b.tds = (p.duty_factor - 0.5) * p.period;
  b.tc = std::sqrt(p.lipm_height / p.gravity);
  const double tss = 0.5 * p.period - b.tds;
  const double c = std::cosh(tss / b.tc);
  const double s = std::sinh(tss / b.tc);
  const double half = 0.5 * p.step_length;
  // Unknowns (a, va, ve):
  //   a c + va Tc s = L/2
  //   a s / Tc + va c - ve = 0
  //   a - Tds (va + ve) / 2 = -L/2
  Eigen::Matrix3d A;
  A << c, b.tc * s, 0.0,
       s / b.tc, c, -1.0,
       1.0, -0.5 * b.tds, -0.5 * b.tds;
  const Eigen::Vector3d rhs(half, 0.0, -half);
  const Eigen::Vector3d x = A.colPivHouseholderQr().solve(rhs);
  b.a = x[0];
  b.va = x[1];
  b.ve = x[2];
  return b;
}

// Offset of the hip from the support ankle `h` seconds into the half cycle.
double body_offset(const BodyProfile& b, const GaitParams& p, double h) {
  if (h < b.tds) {
    const double acc = (b.va - b.ve) / b.tds;
    return -0.5 * p.step_length + b.ve * h + 0.5 * acc * h * h;
  }
  const double tau = (h - b.tds) / b.tc;
  return b.a * std::cosh(tau) + b.va * b.tc * std::sinh(tau);
}

LegAngles solve_leg(const FootPose& target, const Transform2& hip,
                    const BipedModel& model) {
  return leg_ik(target, hip, model.thigh_length(), model.shank_length());
}

}  // namespace

GaitParams params_for_model(GaitParams params, const BipedModel& model) {
  params.ankle_height = model.foot_height();
  params.gravity = model.gravity;
  const Vec2 com = model_com(model, standing_state(model));
  params.lipm_height = com.y();
  params.com_lead = 0.0;
  // The lead depends on the posture, which depends on the lead; a few
  // fixed-point passes settle it well below a millimetre.
  constexpr int kSamples = 40;
  for (int pass = 0; pass < 4; ++pass) {
    double sum = 0.0;
    for (int i = 0; i < kSamples; ++i) {
      const double t = params.period * i / kSamples;
      const PhaseState ph = gait_phase(t, params);
      BipedState s = BipedState::Zero(model);
      s.base = body_target(ph, params, nominal_support_x(ph, params));
      s.q = joint_pose(t, params, model);
      sum += model_com(model, s).x() - s.base.x;
    }
    params.com_lead = sum / kSamples;
  }
  return params;
}

PhaseState gait_phase(double t, const GaitParams& p) {
  const double T = p.period;
  const double stance = p.duty_factor * T;
  const double swing = T - stance;
  PhaseState ph;
  ph.cycle_time = std::fmod(t, T);
  if (ph.cycle_time < 0.0) ph.cycle_time += T;
  double tr = ph.cycle_time - 0.5 * T;
  if (tr < 0.0) tr += T;
  ph.left = ph.cycle_time < stance ? LegPhase::kStance : LegPhase::kSwing;
  ph.right = tr < stance ? LegPhase::kStance : LegPhase::kSwing;
  if (ph.left == LegPhase::kSwing)
    ph.swing_progress = (ph.cycle_time - stance) / swing;
  else if (ph.right == LegPhase::kSwing)
    ph.swing_progress = (tr - stance) / swing;
  ph.half_cycle = static_cast<long>(std::floor(t / (0.5 * T)));
  ph.half_time = t - static_cast<double>(ph.half_cycle) * 0.5 * T;
  ph.support = (ph.half_cycle % 2 == 0) ? Side::kLeft : Side::kRight;
  return ph;
}

double nominal_support_x(const PhaseState& phase, const GaitParams& p) {
  return nominal_foothold(phase.half_cycle, p);
}

FootPose swing_foot_between(const PhaseState& phase, const GaitParams& p,
                            double liftoff_x, double touchdown_x) {
  if (phase.double_support())
    throw PhaseError("swing foot target requested during double support");
  const double s = std::clamp(phase.swing_progress, 0.0, 1.0);
  FootPose f;
  f.position.x() = liftoff_x + (touchdown_x - liftoff_x) * smoothstep5(s);
  f.position.y() = p.ankle_height + p.step_height * bump(s);
  f.sole_angle = 0.0;
  return f;
}

FootPose swing_foot_target(const PhaseState& phase, const GaitParams& p,
                           double stance_ankle_x) {
  return swing_foot_between(phase, p, stance_ankle_x - p.step_length,
                            stance_ankle_x + p.step_length);
}

BasePose body_target(const PhaseState& phase, const GaitParams& p,
                     double stance_ankle_x) {
  BasePose b;
  b.x = stance_ankle_x - p.com_lead;
  if (p.step_length != 0.0) b.x += body_offset(body_profile(p), p, phase.half_time);
  b.z = p.hip_height;
  b.pitch = 0.0;
  return b;
}

double nominal_foothold(long half_cycle, const GaitParams& p) {
  return (static_cast<double>(half_cycle) + 0.5) * p.step_length;
}

Vec6 joint_pose(double t, const GaitParams& p, const BipedModel& model,
                const FootholdFn& footholds) {
  const PhaseState ph = gait_phase(t, p);
  const long k = ph.half_cycle;
  const BasePose body = body_target(ph, p, nominal_support_x(ph, p));
  const Transform2 hip = hip_frame(model, body);
  const double support_x = footholds ? footholds(k) : nominal_foothold(k, p);
  const double prev_x = footholds ? footholds(k - 1) : nominal_foothold(k - 1, p);
  Vec6 q;
  for (int s = 0; s < 2; ++s) {
    const Side side = static_cast<Side>(s);
    const LegPhase lp = side == Side::kLeft ? ph.left : ph.right;
    FootPose target;
    if (lp == LegPhase::kSwing) {
      const double next_x = footholds ? footholds(k + 1) : nominal_foothold(k + 1, p);
      target = swing_foot_between(ph, p, prev_x, next_x);
    } else {
      // Support foot, or the trailing foot during double support.
      target.position = Vec2(side == ph.support ? support_x : prev_x, p.ankle_height);
    }
    const LegAngles a = solve_leg(target, hip, model);
    q[joint_index(side, 0)] = a.hip;
    q[joint_index(side, 1)] = a.knee;
    q[joint_index(side, 2)] = a.ankle;
  }
  return q;
}

JointReference joint_reference(double t, const GaitParams& p, const BipedModel& model,
                               const FootholdFn& footholds) {
  JointReference r;
  r.q = joint_pose(t, p, model, footholds);
  const double h = kReferenceRateStep;
  const double lo = std::max(0.0, t - h);
  r.qdot = (joint_pose(t + h, p, model, footholds) - joint_pose(lo, p, model, footholds)) /
           (t + h - lo);
  return r;
}

void validate_gait(const GaitParams& p, const BipedModel& model) {
  if (!(p.period > 0.0) || !std::isfinite(p.period))
    throw ValidationError("gait.period", "must be positive");
  if (!(p.duty_factor > 0.5 && p.duty_factor < 1.0))
    throw ValidationError("gait.duty_factor", "must lie in (0.5, 1)");
  if (!(p.step_length >= 0.0) || !std::isfinite(p.step_length))
    throw ValidationError("gait.step_length", "must be non-negative");
  if (!(p.step_height >= 0.0) || !std::isfinite(p.step_height))
    throw ValidationError("gait.step_height", "must be non-negative");
  if (!(p.hip_height > 0.0) || !std::isfinite(p.hip_height))
    throw ValidationError("gait.hip_height", "must be positive");
  if (p.step_length > 0.0) {
    const BodyProfile b = body_profile(p);
    if (!(b.va > 0.0 && b.ve > 0.0))
      throw ValidationError("gait.step_length",
                            "no forward-moving pendulum profile for this timing");
  }
  constexpr int kSamples = 400;
  for (int i = 0; i < kSamples; ++i) {
    const double t = p.period * i / kSamples;
    try {
      joint_pose(t, p, model);
    } catch (const UnreachableError& e) {
      throw ValidationError("gait.hip_height",
                            std::string("foot target unreachable: ") + e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// Recorded gait CSV

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, const std::string& source, int line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || field.empty())
    throw ParseError(source, line, "not a number: '" + std::string(field) + "'");
  if (!std::isfinite(v)) throw ParseError(source, line, "non-finite value");
  return v;
}

}  // namespace

GaitSeries parse_gait_csv(const std::string& text, const std::string& source) {
  GaitSeries out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      throw ParseError(source, lineno, "CR line ending; expected LF");
    if (!header_seen) {
      if (line != kGaitCsvHeader)
        throw ParseError(source, lineno,
                         std::string("bad header; expected '") + kGaitCsvHeader + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw ParseError(source, lineno, "empty line");
    }
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 7)
      throw ParseError(source, lineno,
                       "expected 7 columns, got " + std::to_string(fields.size()));
    const double t = parse_double(fields[0], source, lineno);
    Vec6 q;
    for (int j = 0; j < 6; ++j) q[j] = parse_double(fields[j + 1], source, lineno);
    if (!out.t.empty() && !(t > out.t.back()))
      throw ParseError(source, lineno, "timestamps must be strictly increasing");
    out.t.push_back(t);
    out.q.push_back(q);
  }
  if (!header_seen) throw ParseError(source, 1, "missing header");
  if (out.size() < 2) throw ParseError(source, lineno, "need at least 2 samples");
  return out;
}

GaitSeries load_gait_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open gait file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_gait_csv(ss.str(), path);
}

std::string format_gait_csv(const GaitSeries& s) {
  std::string out = std::string(kGaitCsvHeader) + "\n";
  for (size_t i = 0; i < s.size(); ++i) {
    out += format_double(s.t[i]);
    for (int j = 0; j < 6; ++j) out += "," + format_double(s.q[i][j]);
    out += "\n";
  }
  return out;
}

void write_gait_csv(const std::string& path, const GaitSeries& s) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write gait file '" + path + "'");
  f << format_gait_csv(s);
}

Vec6 resample(const GaitSeries& s, double t) {
  if (s.size() < 2 || !(t >= s.t.front() && t <= s.t.back()))
    throw RangeError("resample: t=" + std::to_string(t) + " outside recorded range");
  auto it = std::upper_bound(s.t.begin(), s.t.end(), t);
  if (it == s.t.end()) return s.q.back();
  const size_t hi = static_cast<size_t>(it - s.t.begin());
  const size_t lo = hi - 1;
  if (s.t[lo] == t) return s.q[lo];
  const double w = (t - s.t[lo]) / (s.t[hi] - s.t[lo]);
  return s.q[lo] + w * (s.q[hi] - s.q[lo]);
}

}  // namespace sagbiped
