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

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sagbiped/control.hpp"
#include "sagbiped/fuzzy.hpp"
#include "sagbiped/gait.hpp"
#include "sagbiped/model.hpp"
#include "sagbiped/simulation.hpp"

namespace sagbiped::cli {

/// Exit codes of every command.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitFall = 2,
  kExitUnreachable = 3,
};

struct ExperimentConfig {
  ModelConfig model;
  GaitParams gait;
  std::optional<std::string> gait_csv;  // replaces the generator when set
  ControllerConfig controller;
  Handedness handedness = Handedness::kRight;
  std::optional<Vec6> belongingness;     // overrides the handedness default
  std::optional<std::string> rules;      // rule file; built-in rules if unset
  double hesitation = FuzzySystem::kDefaultHesitation;
  SimulationConfig simulation;
  std::vector<PushEvent> pushes;
  std::string log = "sagbiped_log.csv";
};

/// Parses JSON config text. Unknown keys, wrong types and invalid values
/// throw ValidationError naming the dotted field. Relative file paths are
/// resolved against `base_dir`.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = "");

/// Reads and parses a config file; relative paths inside it are taken from
/// the file's directory.
ExperimentConfig load_config(const std::string& path);

/// Everything a run needs, built once from a config and shared read-only
/// between runs.
struct Experiment {
  ExperimentConfig config;
  BipedModel model;
  GaitParams gait;  // completed by params_for_model
  std::shared_ptr<const FuzzySystem> fuzzy;
  std::shared_ptr<const GaitSeries> replay;
};

/// Builds the model, gait, rule base and replay series. Throws
/// ValidationError, ParseError or std::runtime_error for unreadable files.
Experiment build_experiment(const ExperimentConfig& config);

/// One closed-loop run. `pushes` and `corrections` override the config.
SimResult run_experiment(const Experiment& experiment, std::ostream* log,
                         const std::optional<std::vector<PushEvent>>& pushes = {},
                         std::optional<bool> corrections = {});

struct SweepRequest {
  double force_min = 0.0;
  double force_max = 0.0;
  int steps = 1;
  double direction = 0.0;
  bool ablate = false;  // PD only, no fuzzy corrections
};

struct SweepRow {
  double magnitude = 0.0;
  std::string outcome;
  Strategy strategy = Strategy::kAnkle;
  double max_margin_excursion = 0.0;
  std::optional<double> settling_time;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<double> critical;  // largest recovered magnitude
  bool monotone = true;            // no fallen -> recovered switch
};

/// Evenly spaced magnitudes; a single value when min == max or steps == 1.
/// Throws ValidationError on a bad range.
std::vector<double> sweep_magnitudes(const SweepRequest& request);

/// The push template is the first configured push (magnitude and direction
/// replaced), or a 0.1 s torso push at t = 2 s.
PushEvent sweep_push(const ExperimentConfig& config, double magnitude, double direction);

/// Independent runs in parallel, rows in magnitude order.
SweepResult run_sweep(const Experiment& experiment, const SweepRequest& request);
/// Same runs one after another; the reference for `run_sweep`.
SweepResult run_sweep_serial(const Experiment& experiment, const SweepRequest& request);

const std::string& sweep_csv_header();
std::string format_sweep_csv(const SweepResult& result);

/// Shortest round-trip decimal form.
std::string format_number(double value);

/// Full command line entry point; returns an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sagbiped::cli
