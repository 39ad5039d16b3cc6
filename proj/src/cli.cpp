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

#include "sagbiped/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sagbiped/error.hpp"
#include "sagbiped/kinematics.hpp"

namespace sagbiped::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Typed access to one JSON object; remembers which keys were consumed so the
// rest can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ValidationError(path_, "must be an object");
  }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ValidationError(join(path_, key), "must be a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ValidationError(join(path_, key), "must be finite");
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ValidationError(join(path_, key), "must be an integer");
      out = v->get<int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ValidationError(join(path_, key), "must be true or false");
      out = v->get<bool>();
    }
  }

  std::optional<std::string> text(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ValidationError(join(path_, key), "must be a string");
    return v->get<std::string>();
  }

  // A number for all six joints or an array of six.
  void joints(const std::string& key, Vec6& out) {
    const json* v = find(key);
    if (!v) return;
    if (v->is_number()) {
      out.setConstant(v->get<double>());
      return;
    }
    if (!v->is_array() || v->size() != 6)
      throw ValidationError(join(path_, key), "must be a number or an array of 6 numbers");
    for (int j = 0; j < 6; ++j) {
      if (!(*v)[j].is_number())
        throw ValidationError(join(path_, key), "must be a number or an array of 6 numbers");
      out[j] = (*v)[j].get<double>();
    }
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!used_.count(it.key())) throw ValidationError(join(path_, it.key()), "unknown key");
  }

  const std::string& path() const { return path_; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

void read_model(Section s, ModelConfig& m) {
  s.number("head_radius", m.head_radius);
  s.number("head_mass", m.head_mass);
  s.number("torso_length", m.torso_length);
  s.number("torso_radius", m.torso_radius);
  s.number("torso_mass", m.torso_mass);
  s.number("thigh_length", m.thigh_length);
  s.number("thigh_radius", m.thigh_radius);
  s.number("thigh_mass", m.thigh_mass);
  s.number("shank_length", m.shank_length);
  s.number("shank_radius", m.shank_radius);
  s.number("shank_mass", m.shank_mass);
  s.number("foot_lx", m.foot_lx);
  s.number("foot_lz", m.foot_lz);
  s.number("foot_ly", m.foot_ly);
  s.number("foot_mass", m.foot_mass);
  s.boolean("short_torso", m.short_torso);
  s.number("gravity", m.gravity);
  s.number("hip_limit", m.hip_limit);
  s.number("knee_min", m.knee_min);
  s.number("knee_max", m.knee_max);
  s.number("ankle_limit", m.ankle_limit);
  s.finish();
}

void read_gait(Section s, ExperimentConfig& c, const std::string& base_dir) {
  s.number("period", c.gait.period);
  s.number("duty_factor", c.gait.duty_factor);
  s.number("step_length", c.gait.step_length);
  s.number("step_height", c.gait.step_height);
  s.number("hip_height", c.gait.hip_height);
  if (auto csv = s.text("csv")) c.gait_csv = resolve(base_dir, *csv);
  s.finish();
}

void read_controller(Section s, ExperimentConfig& c, const std::string& base_dir) {
  ControllerConfig& k = c.controller;
  s.joints("kp", k.gains.kp);
  s.joints("kd", k.gains.kd);
  s.number("torque_limit", k.torque_limit);
  s.number("hip_threshold", k.hip_threshold);
  s.number("hip_gain", k.hip_gain);
  s.number("hip_cap", k.hip_cap);
  s.number("pitch_feedback", k.pitch_feedback);
  s.number("max_step_adjust", k.max_step_adjust);
  s.number("retarget_until", k.retarget_until);
  s.boolean("corrections", k.corrections_enabled);
  if (auto h = s.text("handedness")) {
    if (*h == "right")
      c.handedness = Handedness::kRight;
    else if (*h == "left")
      c.handedness = Handedness::kLeft;
    else
      throw ValidationError(join(s.path(), "handedness"), "must be \"right\" or \"left\"");
  }
  if (s.find("belongingness") != nullptr) {
    Vec6 b = Vec6::Zero();
    s.joints("belongingness", b);
    c.belongingness = b;
  }
  if (auto r = s.text("rules")) c.rules = resolve(base_dir, *r);
  s.number("hesitation", c.hesitation);
  s.finish();
}

void read_simulation(Section s, SimulationConfig& sim) {
  s.number("dt", sim.dt);
  s.number("duration", sim.duration);
  s.integer("substeps", sim.substeps);
  if (const json* v = s.find("seed")) {
    if (!v->is_number_unsigned())
      throw ValidationError(join(s.path(), "seed"), "must be a non-negative integer");
    sim.seed = v->get<std::uint64_t>();
  }
  s.finish();
}

PushEvent read_push(Section s) {
  PushEvent p;
  s.number("t_start", p.t_start);
  s.number("duration", p.duration);
  s.number("magnitude", p.magnitude);
  s.number("direction", p.direction);
  if (const json* v = s.find("body")) {
    // Names other than "torso" are resolved once the model is built.
    if (v->is_number_integer())
      p.body = v->get<int>();
    else if (!v->is_string())
      throw ValidationError(join(s.path(), "body"), "must be a link index or name");
  }
  if (const json* v = s.find("local_point")) {
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
      throw ValidationError(join(s.path(), "local_point"), "must be [x, z]");
    p.local_point = Vec2((*v)[0].get<double>(), (*v)[1].get<double>());
  }
  s.finish();
  return p;
}

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

std::string read_file(const std::string& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + what + " '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Push body names are kept aside until the model exists.
struct PendingNames {
  std::vector<std::pair<std::size_t, std::string>> bodies;
};

ExperimentConfig parse_config_impl(const std::string& text, const std::string& base_dir,
                                   const std::string& source, PendingNames* names) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_of(text, e.byte > 0 ? e.byte - 1 : 0), "invalid JSON");
  }
  ExperimentConfig c;
  Section top(root, "");
  if (const json* v = top.find("model")) read_model(Section(*v, "model"), c.model);
  if (const json* v = top.find("gait")) read_gait(Section(*v, "gait"), c, base_dir);
  if (const json* v = top.find("controller"))
    read_controller(Section(*v, "controller"), c, base_dir);
  if (const json* v = top.find("simulation"))
    read_simulation(Section(*v, "simulation"), c.simulation);
  if (const json* v = top.find("pushes")) {
    if (!v->is_array()) throw ValidationError("pushes", "must be an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string path = "pushes[" + std::to_string(i) + "]";
      c.pushes.push_back(read_push(Section((*v)[i], path)));
      const json& body = (*v)[i].contains("body") ? (*v)[i]["body"] : json();
      if (body.is_string() && body.get<std::string>() != "torso" && names)
        names->bodies.emplace_back(i, body.get<std::string>());
    }
  }
  if (const json* v = top.find("output")) {
    Section out(*v, "output");
    if (auto log = out.text("log")) c.log = *log;
    out.finish();
  }
  top.finish();
  return c;
}

void validate_pushes(const std::vector<PushEvent>& pushes, const BipedModel& model) {
  for (std::size_t i = 0; i < pushes.size(); ++i) {
    try {
      pushes[i].validate(model);
    } catch (const ValidationError& e) {
      std::string field = e.field();
      if (field.rfind("pushes.", 0) == 0) field = field.substr(7);
      const std::string what = e.what();
      throw ValidationError("pushes[" + std::to_string(i) + "]." + field,
                            what.substr(what.find(": ") + 2));
    }
  }
}

SweepResult summarize(std::vector<SweepRow> rows) {
  SweepResult r;
  bool fell = false;
  for (const SweepRow& row : rows) {
    if (row.outcome == "recovered") {
      if (fell) r.monotone = false;
      r.critical = r.critical ? std::max(*r.critical, row.magnitude) : row.magnitude;
    } else if (row.outcome == "fallen") {
      fell = true;
    }
  }
  r.rows = std::move(rows);
  return r;
}

SweepRow sweep_row(const Experiment& e, const SweepRequest& request, double magnitude) {
  const std::vector<PushEvent> pushes{sweep_push(e.config, magnitude, request.direction)};
  const SimResult res = run_experiment(e, nullptr, pushes, !request.ablate);
  SweepRow row;
  row.magnitude = magnitude;
  const PushOutcome& o = res.pushes.at(0);
  row.outcome = o.outcome;
  row.strategy = o.strategy;
  row.max_margin_excursion = o.max_margin_excursion;
  row.settling_time = o.settling_time;
  return row;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  PendingNames names;
  ExperimentConfig c = parse_config_impl(text, base_dir, "config", &names);
  if (!names.bodies.empty()) {
    const BipedModel model = build_model(c.model);
    for (const auto& [i, name] : names.bodies) {
      const int link = model.link_index(name);
      if (link < 0)
        throw ValidationError("pushes[" + std::to_string(i) + "].body",
                              "unknown link '" + name + "'");
      c.pushes[i].body = link;
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  const std::string text = read_file(path, "config");
  const std::string dir = std::filesystem::path(path).parent_path().string();
  try {
    return parse_config(text, dir);
  } catch (const ParseError& e) {
    throw ParseError(path, e.line(), "invalid JSON");
  }
}

Experiment build_experiment(const ExperimentConfig& config) {
  Experiment e;
  e.config = config;
  e.model = build_model(config.model);
  e.gait = params_for_model(config.gait, e.model);
  validate_gait(e.gait, e.model);
  config.controller.validate();
  config.simulation.validate();
  validate_pushes(config.pushes, e.model);
  const Vec6 b = config.belongingness.value_or(default_belongingness(config.handedness));
  if (config.rules) {
    e.fuzzy = std::make_shared<const FuzzySystem>(
        load_fuzzy_system(*config.rules, b, config.hesitation));
  } else {
    e.fuzzy = std::make_shared<const FuzzySystem>(
        parse_fuzzy_system(default_rule_text(), "default_rules.fis", b, config.hesitation));
  }
  if (config.gait_csv)
    e.replay = std::make_shared<const GaitSeries>(load_gait_csv(*config.gait_csv));
  return e;
}

SimResult run_experiment(const Experiment& experiment, std::ostream* log,
                         const std::optional<std::vector<PushEvent>>& pushes,
                         std::optional<bool> corrections) {
  ControllerConfig cc = experiment.config.controller;
  if (corrections) cc.corrections_enabled = *corrections;
  Controller controller(experiment.model, experiment.gait, experiment.fuzzy, cc,
                        pushes ? *pushes : experiment.config.pushes);
  if (experiment.replay) controller.set_replay(experiment.replay);
  return simulate(experiment.model, controller, experiment.config.simulation, log);
}

std::vector<double> sweep_magnitudes(const SweepRequest& r) {
  if (!std::isfinite(r.force_min) || r.force_min < 0.0)
    throw ValidationError("sweep.force_min", "must be finite and non-negative");
  if (!std::isfinite(r.force_max) || r.force_max < r.force_min)
    throw ValidationError("sweep.force_max", "must be finite and not below force_min");
  if (r.steps < 1) throw ValidationError("sweep.steps", "must be at least 1");
  if (!std::isfinite(r.direction)) throw ValidationError("sweep.direction", "must be finite");
  if (r.force_max == r.force_min || r.steps == 1) return {r.force_min};
  std::vector<double> m(r.steps);
  const double span = r.force_max - r.force_min;
  for (int i = 0; i < r.steps; ++i) m[i] = r.force_min + span * i / (r.steps - 1);
  m.back() = r.force_max;
  return m;
}

PushEvent sweep_push(const ExperimentConfig& config, double magnitude, double direction) {
  PushEvent p;
  if (!config.pushes.empty()) {
    p = config.pushes.front();
  } else {
    p.t_start = 2.0;
    p.duration = 0.1;
  }
  p.magnitude = magnitude;
  p.direction = direction;
  return p;
}

SweepResult run_sweep(const Experiment& experiment, const SweepRequest& request) {
  const std::vector<double> mags = sweep_magnitudes(request);
  const long n = static_cast<long>(mags.size());
  std::vector<SweepRow> rows(mags.size());
  std::vector<std::exception_ptr> errors(mags.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      rows[i] = sweep_row(experiment, request, mags[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  // Report the failure of the smallest magnitude, whatever finished first.
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return summarize(std::move(rows));
}

SweepResult run_sweep_serial(const Experiment& experiment, const SweepRequest& request) {
  std::vector<SweepRow> rows;
  for (double m : sweep_magnitudes(request)) rows.push_back(sweep_row(experiment, request, m));
  return summarize(std::move(rows));
}

const std::string& sweep_csv_header() {
  static const std::string h =
      "magnitude,outcome,strategy,max_margin_excursion,settling_time";
  return h;
}

std::string format_number(double value) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, r.ptr);
}

std::string format_sweep_csv(const SweepResult& result) {
  std::string out = sweep_csv_header() + "\n";
  for (const SweepRow& r : result.rows) {
    out += format_number(r.magnitude) + "," + r.outcome + "," +
           std::string(to_string(r.strategy)) + "," + format_number(r.max_margin_excursion) +
           "," + (r.settling_time ? format_number(*r.settling_time) : "") + "\n";
  }
  return out;
}

namespace {

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json run_summary_json(const std::string& command, const ExperimentConfig& c,
                      const SimResult& r, const std::vector<PushEvent>& pushes) {
  json j;
  j["command"] = command;
  j["status"] = std::string(to_string(r.status));
  j["fall_time"] = optional_number(r.fall_time);
  j["end_time"] = r.end_time;
  j["rows"] = r.rows;
  j["tracking_rms"] = r.tracking_rms;
  j["max_abs_pitch"] = r.max_abs_pitch;
  j["max_abs_torque"] = r.max_abs_torque;
  j["min_margin"] = r.min_margin;
  j["seed"] = c.simulation.seed;
  j["pushes"] = json::array();
  for (std::size_t i = 0; i < r.pushes.size(); ++i) {
    const PushOutcome& o = r.pushes[i];
    j["pushes"].push_back({{"t_start", pushes[i].t_start},
                           {"magnitude", pushes[i].magnitude},
                           {"direction", pushes[i].direction},
                           {"outcome", o.outcome},
                           {"strategy", std::string(to_string(o.strategy))},
                           {"settling_time", optional_number(o.settling_time)},
                           {"max_margin_excursion", o.max_margin_excursion}});
  }
  return j;
}

void print_run_summary(std::ostream& out, const std::string& command,
                       const ExperimentConfig& c, const SimResult& r,
                       const std::vector<PushEvent>& pushes) {
  out << command << " status=" << to_string(r.status);
  if (r.fall_time) out << " fall_time=" << format_number(*r.fall_time);
  out << " end_time=" << format_number(r.end_time) << " rows=" << r.rows
      << " tracking_rms=" << format_number(r.tracking_rms)
      << " max_abs_pitch=" << format_number(r.max_abs_pitch)
      << " seed=" << c.simulation.seed << "\n";
  for (std::size_t i = 0; i < r.pushes.size(); ++i) {
    const PushOutcome& o = r.pushes[i];
    out << "push " << i << " t_start=" << format_number(pushes[i].t_start)
        << " magnitude=" << format_number(pushes[i].magnitude)
        << " direction=" << format_number(pushes[i].direction) << " outcome=" << o.outcome
        << " strategy=" << (o.outcome == "n/a" ? "n/a" : std::string(to_string(o.strategy)))
        << " settling_time=" << (o.settling_time ? format_number(*o.settling_time) : "n/a")
        << " max_margin_excursion=" << format_number(o.max_margin_excursion) << "\n";
  }
}

struct RunOptions {
  std::string config;
  std::string out;
  std::string gait;
  bool summary_json = false;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
  if (!f) throw Error("cannot write '" + path + "'");
}

int cmd_run(const std::string& command, const RunOptions& o, std::ostream& out,
            std::ostream& err) {
  ExperimentConfig config = load_config(o.config);
  if (!o.gait.empty()) config.gait_csv = o.gait;
  if (command == "replay" && !config.gait_csv)
    throw ValidationError("gait.csv", "replay needs a gait CSV (--gait or gait.csv)");
  if (command == "push" && config.pushes.empty())
    throw ValidationError("pushes", "push needs at least one push event");
  if (command != "push" && !config.pushes.empty()) {
    err << "note: " << command << " ignores the " << config.pushes.size()
        << " configured push(es)\n";
    config.pushes.clear();
  }
  const Experiment e = build_experiment(config);
  for (std::size_t i = 0; i < config.pushes.size(); ++i) {
    if (config.pushes[i].t_start >= config.simulation.duration)
      err << "warning: pushes[" << i << "] starts at t=" << format_number(config.pushes[i].t_start)
          << " s, after the run ends at " << format_number(config.simulation.duration)
          << " s; outcome n/a\n";
  }
  const std::string log_path = o.out.empty() ? config.log : o.out;
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw Error("cannot write log '" + log_path + "'");
  const SimResult r = run_experiment(e, &log);
  log.close();
  if (!log) throw Error("cannot write log '" + log_path + "'");
  if (o.summary_json)
    out << run_summary_json(command, config, r, config.pushes).dump() << "\n";
  else
    print_run_summary(out, command, config, r, config.pushes);
  return r.fallen() ? kExitFall : kExitOk;
}

int cmd_sweep(const RunOptions& o, const SweepRequest& request, std::ostream& out,
              std::ostream& err) {
  const Experiment e = build_experiment(load_config(o.config));
  const SweepResult r = run_sweep(e, request);
  write_text(o.out, format_sweep_csv(r));
  if (!r.monotone)
    err << "warning: outcomes switch from fallen to recovered as the magnitude grows\n";
  if (o.summary_json) {
    json j;
    j["command"] = "sweep";
    j["direction"] = request.direction;
    j["ablate"] = request.ablate;
    j["runs"] = r.rows.size();
    j["critical_magnitude"] = optional_number(r.critical);
    j["monotone"] = r.monotone;
    j["seed"] = e.config.simulation.seed;
    out << j.dump() << "\n";
  } else {
    out << "sweep direction=" << format_number(request.direction)
        << " ablate=" << (request.ablate ? "true" : "false") << " runs=" << r.rows.size()
        << " critical_magnitude=" << (r.critical ? format_number(*r.critical) : "none")
        << " monotone=" << (r.monotone ? "true" : "false")
        << " seed=" << e.config.simulation.seed << "\n";
  }
  return kExitOk;
}

int cmd_ik(double x, double z, double sole, std::ostream& out) {
  const BipedModel model = build_model();
  const double l1 = model.thigh_length(), l2 = model.shank_length();
  // Upright torso with the hip joint at the origin.
  Transform2 hip = hip_frame(model, BasePose{});
  hip.translation.setZero();
  const LegAngles a = leg_ik(FootPose{Vec2(x, z), sole}, hip, l1, l2);
  const FootPose fk = leg_fk(a, hip, l1, l2);
  out << "hip=" << format_number(a.hip) << " knee=" << format_number(a.knee)
      << " ankle=" << format_number(a.ankle) << " fk_x=" << format_number(fk.position.x())
      << " fk_z=" << format_number(fk.position.y()) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Planar biped walking and push-recovery simulator", "sagbiped"};
  app.require_subcommand(1);

  RunOptions run;
  SweepRequest sweep;
  double ik_x = 0.0, ik_z = 0.0, ik_sole = 0.0;

  auto add_run = [&](const std::string& name, const std::string& help) {
    CLI::App* c = app.add_subcommand(name, help);
    c->add_option("--config", run.config, "Experiment config (JSON)")->required();
    c->add_option("--out", run.out, "SimLog CSV path (default: output.log of the config)");
    c->add_flag("--summary-json", run.summary_json, "Print the summary as JSON");
    return c;
  };
  CLI::App* walk = add_run("walk", "Nominal walking");
  CLI::App* push = add_run("push", "Walking with the configured pushes");
  CLI::App* replay = add_run("replay", "Track a recorded gait CSV");
  replay->add_option("--gait", run.gait, "Gait CSV (overrides gait.csv)");

  CLI::App* sw = app.add_subcommand("sweep", "Push magnitude sweep");
  sw->add_option("--config", run.config, "Experiment config (JSON)")->required();
  sw->add_option("--force-min", sweep.force_min, "Smallest magnitude, N")->required();
  sw->add_option("--force-max", sweep.force_max, "Largest magnitude, N")->required();
  sw->add_option("--steps", sweep.steps, "Number of magnitudes")->required();
  sw->add_option("--direction", sweep.direction, "Push direction, rad (0 = forward)");
  sw->add_option("--out", run.out, "Sweep CSV path")->required();
  sw->add_flag("--ablate", sweep.ablate, "Disable the fuzzy corrections (PD only)");
  sw->add_flag("--summary-json", run.summary_json, "Print the summary as JSON");

  CLI::App* ik = app.add_subcommand("ik", "Leg inverse kinematics, target relative to the hip");
  ik->add_option("--x", ik_x, "Ankle x, m")->required();
  ik->add_option("--z", ik_z, "Ankle z, m")->required();
  ik->add_option("--sole", ik_sole, "Sole angle, rad");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (walk->parsed()) return cmd_run("walk", run, out, err);
    if (push->parsed()) return cmd_run("push", run, out, err);
    if (replay->parsed()) return cmd_run("replay", run, out, err);
    if (sw->parsed()) return cmd_sweep(run, sweep, out, err);
    if (ik->parsed()) return cmd_ik(ik_x, ik_z, ik_sole, out);
  } catch (const UnreachableError& e) {
    err << "unreachable: d=" << format_number(e.distance())
        << " reach=" << format_number(e.reach()) << "\n";
    return kExitUnreachable;
  } catch (const NumericalError& e) {
    // A diverged simulation is a fall.
    err << "error: " << e.what() << "\n";
    return kExitFall;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace sagbiped::cli
