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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sagbiped/cli.hpp"
#include "sagbiped/error.hpp"

namespace sagbiped::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kRoot = SAGBIPED_SOURCE_DIR;

const char* const kLogHeader =
    "t,q_hip_l,q_knee_l,q_ankle_l,q_hip_r,q_knee_r,q_ankle_r,"
    "qd_hip_l,qd_knee_l,qd_ankle_l,qd_hip_r,qd_knee_r,qd_ankle_r,"
    "base_x,base_z,base_pitch,com_x,com_z,cop_x,capture_x,margin,"
    "phase_left,phase_right,strategy,severity,ifs_mu,ifs_nu,ifs_pi,"
    "dq_hip_l,dq_knee_l,dq_ankle_l,dq_hip_r,dq_knee_r,dq_ankle_r,"
    "push_fx,push_fz,status";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("sagbiped_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

// ---- configuration ------------------------------------------------------

TEST(Config, EmptyObjectGivesDefaults) {
  const ExperimentConfig c = parse_config("{}");
  EXPECT_EQ(c.simulation.dt, 0.001);
  EXPECT_EQ(c.simulation.duration, 10.0);
  EXPECT_TRUE(c.pushes.empty());
  EXPECT_TRUE(c.controller.corrections_enabled);
  EXPECT_EQ(c.handedness, Handedness::kRight);
}

TEST(Config, ShippedFilesLoad) {
  const ExperimentConfig d = load_config(kRoot + "/configs/default.json");
  EXPECT_EQ(d.simulation.duration, 10.0);
  const ExperimentConfig p = load_config(kRoot + "/configs/push.json");
  ASSERT_EQ(p.pushes.size(), 1u);
  EXPECT_EQ(p.pushes[0].magnitude, 1.0);
  EXPECT_EQ(p.pushes[0].t_start, 2.0);
  EXPECT_EQ(p.pushes[0].duration, 0.1);
}

void expect_field(const std::string& text, const std::string& field) {
  try {
    build_experiment(parse_config(text));
    ADD_FAILURE() << "accepted: " << text;
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), field) << e.what();
  }
}

TEST(Config, ErrorsNameTheField) {
  expect_field(R"({"simulation": {"dt": 0}})", "simulation.dt");
  expect_field(R"({"simulation": {"duration": -1}})", "simulation.duration");
  expect_field(R"({"simulation": {"dt": "fast"}})", "simulation.dt");
  expect_field(R"({"gait": {"duty_factor": 0.4}})", "gait.duty_factor");
  expect_field(R"({"model": {"thigh_mass": -1}})", "model.thigh_mass");
  expect_field(R"({"model": {"tail": 1}})", "model.tail");
  expect_field(R"({"colour": "red"})", "colour");
  expect_field(R"({"controller": {"handedness": "both"}})", "controller.handedness");
  expect_field(R"({"pushes": [{"t_start": 1, "duration": 0.1, "magnitude": -2}]})",
               "pushes[0].magnitude");
}

TEST(Config, InvalidJsonIsAParseError) {
  EXPECT_THROW(parse_config("{\n\"model\": {,}\n}"), ParseError);
}

// ---- exit codes and usage -------------------------------------------------

TEST(Usage, HelpAndBadArguments) {
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  EXPECT_EQ(cli({}).code, kExitConfig);
  EXPECT_EQ(cli({"fly"}).code, kExitConfig);
  EXPECT_EQ(cli({"walk"}).code, kExitConfig);  // --config is required
  EXPECT_EQ(cli({"ik", "--x", "0"}).code, kExitConfig);
}

TEST_F(CliTest, InvalidConfigExitsOneAndNamesField) {
  const std::string cfg = write("bad.json", R"({"simulation": {"dt": 0}})");
  const Outcome o = cli({"walk", "--config", cfg, "--out", path("log.csv")});
  EXPECT_EQ(o.code, kExitConfig);
  EXPECT_NE(o.err.find("simulation.dt"), std::string::npos) << o.err;
}

TEST_F(CliTest, MissingConfigFileExitsOne) {
  const Outcome o = cli({"walk", "--config", path("absent.json"), "--out", path("log.csv")});
  EXPECT_EQ(o.code, kExitConfig);
  EXPECT_FALSE(o.err.empty());
}

TEST_F(CliTest, PushWithoutPushesExitsOne) {
  const std::string cfg = write("c.json", R"({"simulation": {"duration": 0.1}})");
  EXPECT_EQ(cli({"push", "--config", cfg, "--out", path("log.csv")}).code, kExitConfig);
}

// ---- ik -----------------------------------------------------------------

double value_after(const std::string& text, const std::string& key) {
  const auto at = text.find(key + "=");
  if (at == std::string::npos) return std::nan("");
  return std::stod(text.substr(at + key.size() + 1));
}

TEST(Ik, StraightLegAndRightAngle) {
  const Outcome straight = cli({"ik", "--x", "0", "--z", "-0.4"});
  ASSERT_EQ(straight.code, kExitOk) << straight.err;
  EXPECT_NEAR(value_after(straight.out, "knee"), 0.0, 1e-9);
  EXPECT_NEAR(value_after(straight.out, "hip"), 0.0, 1e-9);

  const Outcome bent = cli({"ik", "--x", "0.2", "--z", "-0.2", "--sole", "0"});
  ASSERT_EQ(bent.code, kExitOk) << bent.err;
  EXPECT_NEAR(std::abs(value_after(bent.out, "knee")), std::numbers::pi / 2, 1e-9);
  EXPECT_NEAR(value_after(bent.out, "fk_x"), 0.2, 1e-9);
  EXPECT_NEAR(value_after(bent.out, "fk_z"), -0.2, 1e-9);
}

TEST(Ik, OutOfReachExitsThreeWithDistance) {
  const Outcome o = cli({"ik", "--x", "0", "--z", "-0.6"});
  EXPECT_EQ(o.code, kExitUnreachable);
  EXPECT_NEAR(value_after(o.err, "d"), 0.6, 1e-12);
  EXPECT_NEAR(value_after(o.err, "reach"), 0.4, 1e-12);
}

// ---- walk log ---------------------------------------------------------------

TEST_F(CliTest, WalkLogSchemaAndRowCount) {
  const std::string cfg = write("walk.json", R"({"simulation": {"duration": 2}})");
  const Outcome o = cli({"walk", "--config", cfg, "--out", path("walk.csv")});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto rows = lines_of(slurp(path("walk.csv")));
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0], kLogHeader);
  EXPECT_EQ(rows.size(), 1u + 2001u);  // header + duration / dt + 1
  const std::size_t columns = split(rows[0]).size();
  EXPECT_EQ(columns, 37u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(split(rows[i]).size(), columns) << "row " << i;
  }
  EXPECT_EQ(split(rows[1])[0], "0");
  EXPECT_NEAR(std::stod(split(rows.back())[0]), 2.0, 1e-12);
  EXPECT_EQ(split(rows.back()).back(), "walking");
  EXPECT_NE(o.out.find("status=walking"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("seed=0"), std::string::npos) << o.out;
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  const std::string cfg = write("walk.json", R"({"simulation": {"duration": 1.5}})");
  const Outcome a = cli({"walk", "--config", cfg, "--out", path("a.csv")});
  const Outcome b = cli({"walk", "--config", cfg, "--out", path("b.csv")});
  ASSERT_EQ(a.code, kExitOk);
  ASSERT_EQ(b.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(CliTest, SummaryJsonCarriesTheRunFigures) {
  const std::string cfg = write("walk.json", R"({"simulation": {"duration": 1, "seed": 7}})");
  const Outcome o = cli({"walk", "--config", cfg, "--out", path("w.csv"), "--summary-json"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const json j = json::parse(o.out);
  EXPECT_EQ(j["command"], "walk");
  EXPECT_EQ(j["status"], "walking");
  EXPECT_EQ(j["rows"], 1001);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_TRUE(j["fall_time"].is_null());
  EXPECT_LE(j["max_abs_torque"].get<double>(), 20.0);
}

TEST_F(CliTest, LogPathFromConfigIsUsedWithoutOut) {
  const std::string log = path("from_config.csv");
  const std::string cfg = write(
      "walk.json", json{{"simulation", {{"duration", 0.05}}}, {"output", {{"log", log}}}}.dump());
  ASSERT_EQ(cli({"walk", "--config", cfg}).code, kExitOk);
  EXPECT_EQ(lines_of(slurp(log)).size(), 1u + 51u);
}

// ---- push -------------------------------------------------------------------

TEST_F(CliTest, SmallPushRecovers) {
  const Outcome o = cli({"push", "--config", kRoot + "/configs/push.json", "--out",
                         path("push.csv"), "--summary-json"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const json j = json::parse(o.out);
  ASSERT_EQ(j["pushes"].size(), 1u);
  EXPECT_EQ(j["pushes"][0]["outcome"], "recovered");
  EXPECT_EQ(j["pushes"][0]["strategy"], "ankle");
  EXPECT_FALSE(j["pushes"][0]["settling_time"].is_null());
}

TEST_F(CliTest, LargePushFallsWithExitTwo) {
  const std::string cfg = write("fall.json", R"({
    "simulation": {"duration": 4},
    "pushes": [{"t_start": 1.0, "duration": 0.5, "magnitude": 200, "direction": 0}]
  })");
  const Outcome o = cli({"push", "--config", cfg, "--out", path("fall.csv")});
  EXPECT_EQ(o.code, kExitFall) << o.err;
  EXPECT_NE(o.out.find("status=fallen"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("outcome=fallen"), std::string::npos) << o.out;
  const auto rows = lines_of(slurp(path("fall.csv")));
  ASSERT_GT(rows.size(), 1u);
  EXPECT_EQ(split(rows.back()).back(), "fallen");
  const double t_fall = value_after(o.out, "fall_time");
  EXPECT_GT(t_fall, 1.0);
  EXPECT_LT(t_fall, 4.0);
  EXPECT_NEAR(std::stod(split(rows.back())[0]), t_fall, 1e-9);
}

TEST_F(CliTest, PushAfterTheEndWarnsAndReportsNa) {
  const std::string cfg = write("late.json", R"({
    "simulation": {"duration": 0.5},
    "pushes": [{"t_start": 3.0, "duration": 0.1, "magnitude": 5}]
  })");
  const Outcome o = cli({"push", "--config", cfg, "--out", path("late.csv")});
  EXPECT_EQ(o.code, kExitOk) << o.err;
  EXPECT_NE(o.err.find("warning"), std::string::npos) << o.err;
  EXPECT_NE(o.out.find("outcome=n/a"), std::string::npos) << o.out;
}

TEST_F(CliTest, WalkIgnoresConfiguredPushes) {
  const Outcome o = cli({"walk", "--config", kRoot + "/configs/push.json", "--out",
                         path("w.csv"), "--summary-json"});
  ASSERT_EQ(o.code, kExitOk);
  EXPECT_TRUE(json::parse(o.out)["pushes"].empty());
  EXPECT_NE(o.err.find("ignores"), std::string::npos);
}

// ---- sweep ------------------------------------------------------------------

TEST(Sweep, Magnitudes) {
  EXPECT_EQ(sweep_magnitudes({0, 20, 21, 0, false}).size(), 21u);
  EXPECT_EQ(sweep_magnitudes({0, 20, 21, 0, false})[7], 7.0);
  EXPECT_EQ(sweep_magnitudes({0, 20, 21, 0, false}).back(), 20.0);
  EXPECT_EQ(sweep_magnitudes({5, 5, 10, 0, false}), std::vector<double>{5.0});
  EXPECT_THROW(sweep_magnitudes({5, 1, 3, 0, false}), ValidationError);
  EXPECT_THROW(sweep_magnitudes({-1, 1, 3, 0, false}), ValidationError);
  EXPECT_THROW(sweep_magnitudes({0, 1, 0, 0, false}), ValidationError);
}

Experiment short_experiment(double duration) {
  ExperimentConfig c = load_config(kRoot + "/configs/default.json");
  c.simulation.duration = duration;
  c.pushes = {};
  return build_experiment(c);
}

TEST(Sweep, ParallelMatchesSerial) {
  const Experiment e = short_experiment(3.0);
  for (bool ablate : {false, true}) {
    const SweepRequest r{0.0, 40.0, 5, 0.0, ablate};
    const SweepResult par = run_sweep(e, r);
    const SweepResult ser = run_sweep_serial(e, r);
    EXPECT_EQ(format_sweep_csv(par), format_sweep_csv(ser));
    EXPECT_EQ(par.critical, ser.critical);
    EXPECT_EQ(par.monotone, ser.monotone);
  }
}

TEST_F(CliTest, ZeroRangeGivesOneRecoveredRow) {
  const std::string cfg = write("s.json", R"({"simulation": {"duration": 4}})");
  const Outcome o = cli({"sweep", "--config", cfg, "--force-min", "0", "--force-max", "0",
                         "--steps", "5", "--out", path("sweep.csv")});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto rows = lines_of(slurp(path("sweep.csv")));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "magnitude,outcome,strategy,max_margin_excursion,settling_time");
  const auto cells = split(rows[1]);
  ASSERT_EQ(cells.size(), 5u);
  EXPECT_EQ(cells[0], "0");
  EXPECT_EQ(cells[1], "recovered");
  EXPECT_NE(o.out.find("critical_magnitude=0"), std::string::npos) << o.out;
}

TEST_F(CliTest, SweepRejectsBadRange) {
  const std::string cfg = write("s.json", "{}");
  const Outcome o = cli({"sweep", "--config", cfg, "--force-min", "10", "--force-max", "1",
                         "--steps", "3", "--out", path("sweep.csv")});
  EXPECT_EQ(o.code, kExitConfig);
  EXPECT_NE(o.err.find("sweep.force_max"), std::string::npos) << o.err;
}

// ---- replay -----------------------------------------------------------------

// Turns the joint columns of a log into a gait CSV.
std::string gait_from_log(const std::string& log) {
  std::string out = "t,hip_l,knee_l,ankle_l,hip_r,knee_r,ankle_r\n";
  const auto rows = lines_of(log);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto c = split(rows[i]);
    for (int k = 0; k < 7; ++k) out += c[k] + (k < 6 ? "," : "\n");
  }
  return out;
}

TEST_F(CliTest, ReplayOfOwnWalkTracksClosely) {
  const std::string cfg = write("walk.json", R"({"simulation": {"duration": 3}})");
  ASSERT_EQ(cli({"walk", "--config", cfg, "--out", path("walk.csv")}).code, kExitOk);
  const std::string gait = write("gait.csv", gait_from_log(slurp(path("walk.csv"))));
  const Outcome o = cli({"replay", "--config", cfg, "--gait", gait, "--out",
                         path("replay.csv"), "--summary-json"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const json j = json::parse(o.out);
  EXPECT_EQ(j["status"], "walking");
  EXPECT_LT(j["tracking_rms"].get<double>(), 0.05);
}

TEST_F(CliTest, ReplayOfConstantPoseHolds) {
  const std::string cfg = write("c.json", R"({"simulation": {"duration": 2}})");
  for (const char* row : {"0,0,0,0,0,0", "-0.2,0.4,-0.2,-0.2,0.4,-0.2"}) {
    const std::string gait = write("hold.csv", std::string("t,hip_l,knee_l,ankle_l,hip_r,knee_r,ankle_r\n") +
                                                   "0," + row + "\n1," + row + "\n");
    const Outcome o = cli({"replay", "--config", cfg, "--gait", gait, "--out",
                           path("replay.csv"), "--summary-json"});
    ASSERT_EQ(o.code, kExitOk) << row << "\n" << o.err;
    const json j = json::parse(o.out);
    EXPECT_EQ(j["status"], "walking") << row;
    EXPECT_LT(j["tracking_rms"].get<double>(), 0.01) << row;
    EXPECT_LT(j["max_abs_pitch"].get<double>(), 0.05) << row;
  }
}

TEST_F(CliTest, MalformedGaitCsvNamesTheLine) {
  const std::string gait = write("bad.csv",
                                 "t,hip_l,knee_l,ankle_l,hip_r,knee_r,ankle_r\n"
                                 "0,0,0,0,0,0,0\n"
                                 "0.5,0,0,zero,0,0,0\n");
  const std::string cfg = write("c.json", R"({"simulation": {"duration": 0.1}})");
  const Outcome o =
      cli({"replay", "--config", cfg, "--gait", gait, "--out", path("replay.csv")});
  EXPECT_EQ(o.code, kExitConfig);
  EXPECT_NE(o.err.find("3"), std::string::npos) << o.err;
  EXPECT_NE(o.err.find("bad.csv"), std::string::npos) << o.err;
}

TEST_F(CliTest, ReplayWithoutGaitExitsOne) {
  const std::string cfg = write("c.json", R"({"simulation": {"duration": 0.1}})");
  const Outcome o = cli({"replay", "--config", cfg, "--out", path("replay.csv")});
  EXPECT_EQ(o.code, kExitConfig);
  EXPECT_NE(o.err.find("gait.csv"), std::string::npos) << o.err;
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(-1.5e-7), "-1.5e-07");
  for (double v : {1.0 / 3.0, std::numbers::pi, 1e-300, -123456.789})
    EXPECT_EQ(std::stod(format_number(v)), v);
}

}  // namespace
}  // namespace sagbiped::cli
