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

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sagbiped/control.hpp"

namespace sagbiped {

struct SimulationConfig {
  double dt = 1e-3;      // control and logging period
  double duration = 10.0;
  int substeps = 10;     // physics steps per control period
  std::uint64_t seed = 0;

  void validate() const;
  long ticks() const;  // number of control periods
};

/// Column names of the simulation log, comma separated.
const std::string& sim_log_header();

struct PushOutcome {
  std::string outcome;  // recovered, fallen, recovering or n/a
  Strategy strategy = Strategy::kAnkle;  // most drastic strategy during recovery
  std::optional<double> settling_time;   // from push end to the settled window
  double max_margin_excursion = 0.0;     // deepest negative margin, as a magnitude
};

struct SimResult {
  SimStatus status = SimStatus::kWalking;
  std::optional<double> fall_time;
  long rows = 0;
  double end_time = 0.0;
  double tracking_rms = 0.0;  // reference without corrections vs joints
  double max_abs_pitch = 0.0;
  double max_abs_torque = 0.0;
  double min_margin = 0.0;
  std::vector<PushOutcome> pushes;

  bool fallen() const { return status == SimStatus::kFallen; }
};

/// Places the robot on the reference pose at t = 0 with the soles pressed
/// into the ground by their static load.
BipedState initial_state(const BipedModel& model, const Controller& controller);

/// Runs the closed loop; writes one log row per control period (t = 0 to
/// duration inclusive) unless the robot falls first.
SimResult simulate(const BipedModel& model, Controller& controller,
                   const SimulationConfig& config, std::ostream* log = nullptr);

}  // namespace sagbiped
