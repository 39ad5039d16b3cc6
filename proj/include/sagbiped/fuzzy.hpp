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

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sagbiped/strategy.hpp"
#include "sagbiped/types.hpp"

namespace sagbiped {

/// Piecewise-linear membership. Triangles are stored as trapezoids with an
/// empty plateau (a, b, b, c).
struct MembershipFn {
  enum class Shape { kTriangular, kTrapezoidal };

  Shape shape = Shape::kTriangular;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  static MembershipFn Triangular(double a, double b, double c);
  static MembershipFn Trapezoidal(double a, double b, double c, double d);

  double support_min() const { return a; }
  double support_max() const { return d; }
};

double membership(const MembershipFn& mf, double x);

/// Intuitionistic degree: membership, non-membership, hesitation.
struct IfsDegree {
  double mu = 0.0;
  double nu = 1.0;
  double pi = 0.0;
};

IfsDegree ifs_from_membership(double mu, double hesitation0);
IfsDegree ifs_degree(const MembershipFn& mf, double x, double hesitation0);

/// Several entries may share a label; the term is then their pointwise max.
struct Term {
  std::string label;
  MembershipFn mf;
};

struct FuzzyVariable {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  std::string units;
  std::vector<Term> terms;

  bool has_term(const std::string& label) const;
  double degree(const std::string& label, double x) const;
  /// Throws ValidationError when the universe or a term is malformed.
  void validate() const;
};

struct Antecedent {
  std::string variable;
  std::string term;
};

struct Rule {
  std::vector<Antecedent> antecedents;  // combined by min
  std::string output;
  std::string term;
  double weight = 1.0;
};

inline constexpr int kGridSize = 201;

/// Output fuzzy set sampled on the uniform grid over [min, max].
struct Aggregate {
  double min = 0.0;
  double max = 1.0;
  std::array<double, kGridSize> mu{};

  double x(int i) const { return min + (max - min) * i / (kGridSize - 1); }
  double peak() const;
};

/// Validated Mamdani rule base. Term grids of the outputs are precomputed.
class RuleBase {
 public:
  /// Throws ValidationError on unknown variables/terms or bad weights.
  RuleBase(std::vector<FuzzyVariable> inputs, std::vector<FuzzyVariable> outputs,
           std::vector<Rule> rules);

  const std::vector<FuzzyVariable>& inputs() const { return inputs_; }
  const std::vector<FuzzyVariable>& outputs() const { return outputs_; }
  const std::vector<Rule>& rules() const { return rules_; }
  int input_index(const std::string& name) const;   // -1 if absent
  int output_index(const std::string& name) const;  // -1 if absent

  /// `values` are ordered as `inputs()`. One aggregate per output.
  std::vector<Aggregate> infer(std::span<const double> values) const;

 private:
  struct Compiled {
    std::vector<std::pair<int, std::string>> antecedents;
    int output;
    int term;  // index into the output's term grids
    double weight;
  };

  std::vector<FuzzyVariable> inputs_;
  std::vector<FuzzyVariable> outputs_;
  std::vector<Rule> rules_;
  std::vector<Compiled> compiled_;
  // term_grids_[output][term label index]
  std::vector<std::vector<std::array<double, kGridSize>>> term_grids_;
};

/// Name-keyed inference; a missing input throws InferenceError naming it.
std::vector<Aggregate> infer(const RuleBase& rules,
                             const std::map<std::string, double>& inputs);

struct Crisp {
  double value = 0.0;
  bool zero_activation = false;
};

/// Discrete centroid sum(x mu) / sum(mu); zero area gives the midpoint.
Crisp defuzzify_centroid(const Aggregate& aggregate);

enum class Handedness { kRight, kLeft };

/// Knee 1.0, hip 0.8, ankle 0.5 on the more active leg, 0.75 of that on the
/// other. Right-handed subjects lead with the left leg here, matching the
/// joint order (left first) of the default config.
Vec6 default_belongingness(Handedness handedness);

struct RecoveryCommand {
  Vec6 delta_q = Vec6::Zero();
  Vec6 delta_qdot = Vec6::Zero();
  Strategy strategy = Strategy::kAnkle;
  double severity = 0.0;
  IfsDegree activation;  // of the strongest layer-1 rule
  bool saturated = false;
};

/// Two-layer system: (push force, direction, margin) -> severity, then
/// (severity, belongingness) -> per-joint angle and rate magnitudes.
class FuzzySystem {
 public:
  static constexpr double kDefaultHesitation = 0.1;
  static constexpr double kDefaultDeadBand = 0.05;

  /// Layer 1 needs inputs push_force, push_direction, margin and output
  /// severity; layer 2 inputs severity, belongingness and outputs dq, dqdot.
  FuzzySystem(RuleBase layer1, RuleBase layer2, const Vec6& belongingness,
              double hesitation0 = kDefaultHesitation,
              double dead_band = kDefaultDeadBand);

  const RuleBase& layer1() const { return layer1_; }
  const RuleBase& layer2() const { return layer2_; }
  const Vec6& belongingness() const { return belongingness_; }
  double hesitation0() const { return hesitation0_; }
  double dead_band() const { return dead_band_; }

 private:
  RuleBase layer1_;
  RuleBase layer2_;
  Vec6 belongingness_;
  double hesitation0_;
  double dead_band_;
};

/// Rule file text, see README for the grammar. Throws ParseError.
FuzzySystem parse_fuzzy_system(const std::string& text, const std::string& source,
                               const Vec6& belongingness,
                               double hesitation0 = FuzzySystem::kDefaultHesitation);
FuzzySystem load_fuzzy_system(const std::string& path, const Vec6& belongingness,
                              double hesitation0 = FuzzySystem::kDefaultHesitation);

/// Built-in copy of data/default_rules.fis.
const std::string& default_rule_text();
FuzzySystem default_fuzzy_system(Handedness handedness = Handedness::kRight);

/// Layer-1 severity for the given inputs (clamped to their universes).
double push_severity(const FuzzySystem& system, double push_force,
                     double push_direction, double margin);

/// Which legs are swinging when the correction is computed.
struct JointState {
  bool swing_left = false;
  bool swing_right = false;
};

/// Joint sign pattern for a push along `push_direction`.
Vec6 correction_signs(double push_direction, const JointState& joints);

RecoveryCommand hierarchical_infer(const FuzzySystem& system, double push_force,
                                   double push_direction, double margin,
                                   const JointState& joints, double hip_threshold);

}  // namespace sagbiped
