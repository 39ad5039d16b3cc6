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

#include "sagbiped/fuzzy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sagbiped/error.hpp"

namespace sagbiped {

MembershipFn MembershipFn::Triangular(double a, double b, double c) {
  return {Shape::kTriangular, a, b, b, c};
}

MembershipFn MembershipFn::Trapezoidal(double a, double b, double c, double d) {
  return {Shape::kTrapezoidal, a, b, c, d};
}

double membership(const MembershipFn& mf, double x) {
  if (x < mf.a || x > mf.d) return 0.0;
  if (x >= mf.b && x <= mf.c) return 1.0;
  if (x < mf.b) return (x - mf.a) / (mf.b - mf.a);
  return (mf.d - x) / (mf.d - mf.c);
}

IfsDegree ifs_from_membership(double mu, double hesitation0) {
  return {mu, (1.0 - mu) * (1.0 - hesitation0), (1.0 - mu) * hesitation0};
}

IfsDegree ifs_degree(const MembershipFn& mf, double x, double hesitation0) {
  return ifs_from_membership(membership(mf, x), hesitation0);
}

bool FuzzyVariable::has_term(const std::string& label) const {
  return std::any_of(terms.begin(), terms.end(),
                     [&](const Term& t) { return t.label == label; });
}

double FuzzyVariable::degree(const std::string& label, double x) const {
  double out = 0.0;
  for (const auto& t : terms)
    if (t.label == label) out = std::max(out, membership(t.mf, x));
  return out;
}

void FuzzyVariable::validate() const {
  if (name.empty()) throw ValidationError("variable", "empty name");
  if (!(std::isfinite(min) && std::isfinite(max) && min < max))
    throw ValidationError(name, "degenerate universe");
  if (terms.empty()) throw ValidationError(name, "no terms");
  for (const auto& t : terms) {
    const auto& m = t.mf;
    if (!(m.a <= m.b && m.b <= m.c && m.c <= m.d && m.a < m.d))
      throw ValidationError(name + "." + t.label, "membership parameters out of order");
    if (m.a < min || m.d > max)
      throw ValidationError(name + "." + t.label, "term support leaves the universe");
  }
}

double Aggregate::peak() const { return *std::max_element(mu.begin(), mu.end()); }

namespace {

std::vector<std::string> labels_of(const FuzzyVariable& v) {
  std::vector<std::string> out;
  for (const auto& t : v.terms)
    if (std::find(out.begin(), out.end(), t.label) == out.end()) out.push_back(t.label);
  return out;
}

}  // namespace

RuleBase::RuleBase(std::vector<FuzzyVariable> inputs, std::vector<FuzzyVariable> outputs,
                   std::vector<Rule> rules)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), rules_(std::move(rules)) {
  if (inputs_.empty()) throw ValidationError("rules", "no input variables");
  if (outputs_.empty()) throw ValidationError("rules", "no output variables");
  for (const auto& v : inputs_) v.validate();
  for (const auto& v : outputs_) v.validate();

  std::vector<std::vector<std::string>> out_labels;
  for (const auto& v : outputs_) {
    out_labels.push_back(labels_of(v));
    auto& grids = term_grids_.emplace_back();
    for (const auto& label : out_labels.back()) {
      auto& g = grids.emplace_back();
      for (int i = 0; i < kGridSize; ++i)
        g[i] = v.degree(label, v.min + (v.max - v.min) * i / (kGridSize - 1));
    }
  }

  for (size_t r = 0; r < rules_.size(); ++r) {
    const Rule& rule = rules_[r];
    const std::string where = "rule " + std::to_string(r + 1);
    if (rule.antecedents.empty()) throw ValidationError(where, "no antecedents");
    if (!(rule.weight >= 0.0 && rule.weight <= 1.0))
      throw ValidationError(where, "weight outside [0, 1]");
    Compiled c;
    for (const auto& a : rule.antecedents) {
      const int idx = input_index(a.variable);
      if (idx < 0) throw ValidationError(where, "unknown input '" + a.variable + "'");
      if (!inputs_[idx].has_term(a.term))
        throw ValidationError(where, "unknown term '" + a.term + "' of " + a.variable);
      c.antecedents.emplace_back(idx, a.term);
    }
    c.output = output_index(rule.output);
    if (c.output < 0) throw ValidationError(where, "unknown output '" + rule.output + "'");
    const auto& labels = out_labels[c.output];
    const auto it = std::find(labels.begin(), labels.end(), rule.term);
    if (it == labels.end())
      throw ValidationError(where, "unknown term '" + rule.term + "' of " + rule.output);
    c.term = static_cast<int>(it - labels.begin());
    c.weight = rule.weight;
    compiled_.push_back(std::move(c));
  }
}

int RuleBase::input_index(const std::string& name) const {
  for (size_t i = 0; i < inputs_.size(); ++i)
    if (inputs_[i].name == name) return static_cast<int>(i);
  return -1;
}

int RuleBase::output_index(const std::string& name) const {
  for (size_t i = 0; i < outputs_.size(); ++i)
    if (outputs_[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<Aggregate> RuleBase::infer(std::span<const double> values) const {
  if (values.size() != inputs_.size())
    throw InferenceError("expected " + std::to_string(inputs_.size()) + " inputs");
  std::vector<Aggregate> out(outputs_.size());
  for (size_t o = 0; o < outputs_.size(); ++o) {
    out[o].min = outputs_[o].min;
    out[o].max = outputs_[o].max;
  }
  for (const auto& c : compiled_) {
    double strength = 1.0;
    for (const auto& [idx, term] : c.antecedents)
      strength = std::min(strength, inputs_[idx].degree(term, values[idx]));
    strength *= c.weight;
    if (strength <= 0.0) continue;
    const auto& grid = term_grids_[c.output][c.term];
    auto& mu = out[c.output].mu;
    for (int i = 0; i < kGridSize; ++i) mu[i] = std::max(mu[i], std::min(strength, grid[i]));
  }
  return out;
}

std::vector<Aggregate> infer(const RuleBase& rules,
                             const std::map<std::string, double>& inputs) {
  std::vector<double> values;
  for (const auto& v : rules.inputs()) {
    const auto it = inputs.find(v.name);
    if (it == inputs.end()) throw InferenceError("missing input variable '" + v.name + "'");
    values.push_back(it->second);
  }
  return rules.infer(values);
}

Crisp defuzzify_centroid(const Aggregate& agg) {
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < kGridSize; ++i) {
    num += agg.x(i) * agg.mu[i];
    den += agg.mu[i];
  }
  if (!(den > 0.0)) return {0.5 * (agg.min + agg.max), true};
  return {std::clamp(num / den, agg.min, agg.max), false};
}

Vec6 default_belongingness(Handedness handedness) {
  Vec6 active;
  active << 0.8, 1.0, 0.5, 0.8, 1.0, 0.5;
  const double other = 0.75;
  if (handedness == Handedness::kRight)
    active.tail<3>() *= other;
  else
    active.head<3>() *= other;
  return active;
}

namespace {

void require_names(const RuleBase& rb, const std::vector<std::string>& in,
                   const std::vector<std::string>& out, const std::string& layer) {
  for (const auto& n : in)
    if (rb.input_index(n) < 0) throw ValidationError(layer, "missing input '" + n + "'");
  for (const auto& n : out)
    if (rb.output_index(n) < 0) throw ValidationError(layer, "missing output '" + n + "'");
  if (rb.inputs().size() != in.size())
    throw ValidationError(layer, "unexpected extra input variables");
}

}  // namespace

FuzzySystem::FuzzySystem(RuleBase layer1, RuleBase layer2, const Vec6& belongingness,
                         double hesitation0, double dead_band)
    : layer1_(std::move(layer1)),
      layer2_(std::move(layer2)),
      belongingness_(belongingness),
      hesitation0_(hesitation0),
      dead_band_(dead_band) {
  require_names(layer1_, {"push_force", "push_direction", "margin"}, {"severity"}, "layer1");
  require_names(layer2_, {"severity", "belongingness"}, {"dq", "dqdot"}, "layer2");
  for (int j = 0; j < 6; ++j)
    if (!(belongingness_[j] >= 0.0 && belongingness_[j] <= 1.0))
      throw ValidationError("controller.belongingness", "values must lie in [0, 1]");
  if (!(hesitation0_ >= 0.0 && hesitation0_ < 1.0))
    throw ValidationError("controller.hesitation", "must lie in [0, 1)");
  if (!(dead_band_ >= 0.0 && dead_band_ < 1.0))
    throw ValidationError("controller.dead_band", "must lie in [0, 1)");
}

namespace {

struct LayerBuilder {
  std::vector<FuzzyVariable> inputs;
  std::vector<FuzzyVariable> outputs;
  std::vector<Rule> rules;
  FuzzyVariable* last = nullptr;
  std::vector<int> rule_lines;
  std::map<std::string, int> variable_lines;
  bool any() const { return !inputs.empty() || !outputs.empty() || !rules.empty(); }
};

double parse_number(const std::string& token, const std::string& source, int line) {
  double v = 0.0;
  const auto r = std::from_chars(token.data(), token.data() + token.size(), v);
  if (r.ec != std::errc() || r.ptr != token.data() + token.size() || !std::isfinite(v))
    throw ParseError(source, line, "bad number '" + token + "'");
  return v;
}

Rule parse_rule(const std::vector<std::string>& tok, const std::string& source, int line) {
  // rule IF v IS t [AND v IS t]... THEN out IS t [WEIGHT w]
  auto fail = [&](const std::string& what) { throw ParseError(source, line, what); };
  if (tok.size() < 2 || tok[1] != "IF") fail("expected IF after rule");
  Rule rule;
  size_t i = 2;
  while (true) {
    if (i + 2 >= tok.size() || tok[i + 1] != "IS") fail("malformed antecedent");
    rule.antecedents.push_back({tok[i], tok[i + 2]});
    i += 3;
    if (i < tok.size() && tok[i] == "AND") {
      ++i;
      continue;
    }
    break;
  }
  if (i >= tok.size() || tok[i] != "THEN") fail("expected THEN");
  if (i + 3 >= tok.size() || tok[i + 2] != "IS") fail("malformed consequent");
  rule.output = tok[i + 1];
  rule.term = tok[i + 3];
  i += 4;
  if (i < tok.size()) {
    if (tok[i] != "WEIGHT" || i + 2 != tok.size()) fail("trailing tokens after consequent");
    rule.weight = parse_number(tok[i + 1], source, line);
  }
  return rule;
}

// Validation errors name "rule N", a variable or "variable.term"; report the
// line that declared it.
int offending_line(const LayerBuilder& b, const std::string& field, int fallback) {
  if (field.rfind("rule ", 0) == 0) {
    const size_t n = std::stoul(field.substr(5));
    if (n >= 1 && n <= b.rule_lines.size()) return b.rule_lines[n - 1];
  }
  const auto it = b.variable_lines.find(field.substr(0, field.find('.')));
  return it != b.variable_lines.end() ? it->second : fallback;
}

RuleBase finish_layer(LayerBuilder& b, const std::string& source, int line) {
  const LayerBuilder lines{{}, {}, {}, nullptr, b.rule_lines, b.variable_lines};
  try {
    return RuleBase(std::move(b.inputs), std::move(b.outputs), std::move(b.rules));
  } catch (const ValidationError& e) {
    throw ParseError(source, offending_line(lines, e.field(), line), e.what());
  }
}

}  // namespace

FuzzySystem parse_fuzzy_system(const std::string& text, const std::string& source,
                               const Vec6& belongingness, double hesitation0) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  int layer = 0;
  std::array<LayerBuilder, 2> layers;
  std::array<int, 2> layer_line{};
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    if (kw == "layer") {
      if (tok.size() != 2 || (tok[1] != "1" && tok[1] != "2"))
        throw ParseError(source, line, "expected 'layer 1' or 'layer 2'");
      layer = tok[1] == "1" ? 1 : 2;
      if (layers[layer - 1].any()) throw ParseError(source, line, "layer declared twice");
      layer_line[layer - 1] = line;
      continue;
    }
    if (layer == 0) throw ParseError(source, line, "statement before any layer");
    LayerBuilder& b = layers[layer - 1];
    if (kw == "input" || kw == "output") {
      if (tok.size() != 5) throw ParseError(source, line, kw + " NAME MIN MAX UNITS");
      FuzzyVariable v;
      v.name = tok[1];
      v.min = parse_number(tok[2], source, line);
      v.max = parse_number(tok[3], source, line);
      v.units = tok[4];
      b.variable_lines[v.name] = line;
      auto& list = kw == "input" ? b.inputs : b.outputs;
      list.push_back(std::move(v));
      b.last = &list.back();
    } else if (kw == "term") {
      if (b.last == nullptr) throw ParseError(source, line, "term before any variable");
      Term t;
      if (tok.size() == 6 && tok[2] == "triangle") {
        t.mf = MembershipFn::Triangular(parse_number(tok[3], source, line),
                                        parse_number(tok[4], source, line),
                                        parse_number(tok[5], source, line));
      } else if (tok.size() == 7 && tok[2] == "trapezoid") {
        t.mf = MembershipFn::Trapezoidal(
            parse_number(tok[3], source, line), parse_number(tok[4], source, line),
            parse_number(tok[5], source, line), parse_number(tok[6], source, line));
      } else {
        throw ParseError(source, line, "term LABEL triangle A B C | trapezoid A B C D");
      }
      t.label = tok[1];
      b.last->terms.push_back(std::move(t));
    } else if (kw == "rule") {
      b.rules.push_back(parse_rule(tok, source, line));
      b.rule_lines.push_back(line);
    } else {
      throw ParseError(source, line, "unknown keyword '" + kw + "'");
    }
  }
  for (int l = 0; l < 2; ++l)
    if (!layers[l].any()) throw ParseError(source, line, "layer " + std::to_string(l + 1) + " missing");
  RuleBase l1 = finish_layer(layers[0], source, layer_line[0]);
  RuleBase l2 = finish_layer(layers[1], source, layer_line[1]);
  try {
    return FuzzySystem(std::move(l1), std::move(l2), belongingness, hesitation0);
  } catch (const ValidationError& e) {
    throw ParseError(source, line, e.what());
  }
}

FuzzySystem load_fuzzy_system(const std::string& path, const Vec6& belongingness,
                              double hesitation0) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError(path, 0, "cannot open rule file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_fuzzy_system(ss.str(), path, belongingness, hesitation0);
}

FuzzySystem default_fuzzy_system(Handedness handedness) {
  return parse_fuzzy_system(default_rule_text(), "default_rules.fis",
                            default_belongingness(handedness));
}

namespace {

double clamp_input(const FuzzyVariable& v, double x, bool& saturated) {
  if (x < v.min || x > v.max) {
    saturated = true;
    return std::clamp(x, v.min, v.max);
  }
  return x;
}

}  // namespace

double push_severity(const FuzzySystem& system, double push_force, double push_direction,
                     double margin) {
  const RuleBase& l1 = system.layer1();
  std::vector<double> values(3);
  bool sat = false;
  values[l1.input_index("push_force")] =
      clamp_input(l1.inputs()[l1.input_index("push_force")], push_force, sat);
  values[l1.input_index("push_direction")] =
      clamp_input(l1.inputs()[l1.input_index("push_direction")], push_direction, sat);
  values[l1.input_index("margin")] =
      clamp_input(l1.inputs()[l1.input_index("margin")], margin, sat);
  return defuzzify_centroid(l1.infer(values)[l1.output_index("severity")]).value;
}

Vec6 correction_signs(double push_direction, const JointState& joints) {
  const double d = std::cos(push_direction) >= 0.0 ? 1.0 : -1.0;
  // Stance leg pushes against the perturbation, swing hip reaches.
  constexpr double kPattern[6] = {1, 1, 1, -1, 0, 0};
  Vec6 s;
  for (int side = 0; side < 2; ++side) {
    const bool swing = side == 0 ? joints.swing_left : joints.swing_right;
    const double* p = swing ? kPattern + 3 : kPattern;
    s[3 * side + 0] = p[0] * d;
    s[3 * side + 1] = p[1];
    s[3 * side + 2] = p[2] * d;
  }
  return s;
}

RecoveryCommand hierarchical_infer(const FuzzySystem& system, double push_force,
                                   double push_direction, double margin,
                                   const JointState& joints, double hip_threshold) {
  RecoveryCommand cmd;
  cmd.strategy = strategy_select(margin, hip_threshold);

  const RuleBase& l1 = system.layer1();
  const int i_force = l1.input_index("push_force");
  const int i_dir = l1.input_index("push_direction");
  const int i_margin = l1.input_index("margin");
  std::vector<double> v1(3);
  v1[i_force] = clamp_input(l1.inputs()[i_force], push_force, cmd.saturated);
  v1[i_dir] = clamp_input(l1.inputs()[i_dir], push_direction, cmd.saturated);
  v1[i_margin] = clamp_input(l1.inputs()[i_margin], margin, cmd.saturated);
  const Aggregate sev = l1.infer(v1)[l1.output_index("severity")];
  cmd.severity = defuzzify_centroid(sev).value;
  cmd.activation = ifs_from_membership(sev.peak(), system.hesitation0());

  if (!(push_force > 0.0) || cmd.severity < system.dead_band()) return cmd;

  const RuleBase& l2 = system.layer2();
  const int i_sev = l2.input_index("severity");
  const int i_bel = l2.input_index("belongingness");
  const int o_dq = l2.output_index("dq");
  const int o_dqdot = l2.output_index("dqdot");
  const Vec6 sign = correction_signs(push_direction, joints);
  std::vector<double> v2(2);
  v2[i_sev] = clamp_input(l2.inputs()[i_sev], cmd.severity, cmd.saturated);
  for (int j = 0; j < 6; ++j) {
    const double b = system.belongingness()[j];
    v2[i_bel] = b;
    const auto out = l2.infer(v2);
    cmd.delta_q[j] = sign[j] * b * defuzzify_centroid(out[o_dq]).value;
    cmd.delta_qdot[j] = sign[j] * b * defuzzify_centroid(out[o_dqdot]).value;
  }
  return cmd;
}

}  // namespace sagbiped
