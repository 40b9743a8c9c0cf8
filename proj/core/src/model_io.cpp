// Copyright 2026 The qomdp Authors
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

#include "qomdp/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace qomdp {

namespace {

using nlohmann::json;

struct Issues {
  std::vector<ModelIssue> list;
  void add(const std::string& path, const std::string& message) {
    list.push_back(ModelIssue{path, message});
  }
  bool clean() const { return list.empty(); }
};

std::string at(const std::string& path, const std::string& field) {
  return path + "." + field;
}
std::string at(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

const json* require_field(const json& obj, const std::string& name,
                          const std::string& path, Issues& issues) {
  if (!obj.contains(name)) {
    issues.add(path, "missing required field '" + name + "'");
    return nullptr;
  }
  return &obj.at(name);
}

std::optional<double> read_number(const json& j, const std::string& path,
                                  Issues& issues) {
  if (!j.is_number()) {
    issues.add(path, "expected a number");
    return std::nullopt;
  }
  return j.get<double>();
}

std::optional<std::vector<std::string>> read_symbols(const json& j,
                                                     const std::string& path,
                                                     Issues& issues) {
  if (!j.is_array() || j.empty()) {
    issues.add(path, "expected a nonempty array of symbols");
    return std::nullopt;
  }
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) {
      issues.add(at(path, i), "expected a string symbol");
      return std::nullopt;
    }
    std::string s = j[i].get<std::string>();
    if (!seen.insert(s).second) {
      issues.add(at(path, i), "duplicate symbol '" + s + "'");
      return std::nullopt;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<Complex> read_complex(const json& j, const std::string& path,
                                    Issues& issues) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
      !j[1].is_number()) {
    issues.add(path, "expected a complex number as a [re, im] pair");
    return std::nullopt;
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

std::optional<ComplexMatrix> read_complex_matrix(const json& j,
                                                 const std::string& path,
                                                 Issues& issues) {
  if (!j.is_array() || j.empty()) {
    issues.add(path, "expected a nonempty array of matrix rows");
    return std::nullopt;
  }
  const std::size_t rows = j.size();
  ComplexMatrix out(rows, rows);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != rows) {
      issues.add(at(path, i),
                 "expected a square matrix row of length " + std::to_string(rows));
      return std::nullopt;
    }
    for (std::size_t k = 0; k < rows; ++k) {
      auto entry = read_complex(j[i][k], at(at(path, i), k), issues);
      if (!entry) return std::nullopt;
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = *entry;
    }
  }
  if (!out.allFinite()) {
    issues.add(path, "matrix entries must be finite");
    return std::nullopt;
  }
  return out;
}

std::optional<Eigen::MatrixXd> read_real_matrix(const json& j,
                                                const std::string& path,
                                                std::size_t rows,
                                                std::size_t cols,
                                                Issues& issues) {
  if (!j.is_array() || j.size() != rows) {
    issues.add(path, "expected a matrix with " + std::to_string(rows) + " rows");
    return std::nullopt;
  }
  Eigen::MatrixXd out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      issues.add(at(path, i),
                 "expected a row of length " + std::to_string(cols));
      return std::nullopt;
    }
    for (std::size_t k = 0; k < cols; ++k) {
      auto entry = read_number(j[i][k], at(at(path, i), k), issues);
      if (!entry) return std::nullopt;
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = *entry;
    }
  }
  if (!out.allFinite()) {
    issues.add(path, "matrix entries must be finite");
    return std::nullopt;
  }
  return out;
}

std::optional<Eigen::VectorXd> read_real_vector(const json& j,
                                                const std::string& path,
                                                std::size_t size,
                                                Issues& issues) {
  if (!j.is_array() || j.size() != size) {
    issues.add(path, "expected a vector of length " + std::to_string(size));
    return std::nullopt;
  }
  Eigen::VectorXd out(size);
  for (std::size_t i = 0; i < size; ++i) {
    auto entry = read_number(j[i], at(path, i), issues);
    if (!entry) return std::nullopt;
    out(static_cast<Eigen::Index>(i)) = *entry;
  }
  if (!out.allFinite()) {
    issues.add(path, "vector entries must be finite");
    return std::nullopt;
  }
  return out;
}

// Shared-dimension bookkeeping across all matrices of one file.
struct DimTracker {
  std::optional<Eigen::Index> dim;
  bool check(const ComplexMatrix& m, const std::string& path, Issues& issues) {
    if (!dim) {
      dim = m.rows();
      return true;
    }
    if (m.rows() != *dim) {
      issues.add(path, "dimension " + std::to_string(m.rows()) +
                           " does not match the model dimension " +
                           std::to_string(*dim));
      return false;
    }
    return true;
  }
};

std::optional<std::vector<ComplexMatrix>> read_kraus_list(
    const json& j, const std::string& path, DimTracker& dims, Issues& issues) {
  if (!j.is_array() || j.empty()) {
    issues.add(path, "expected a nonempty array of Kraus operators");
    return std::nullopt;
  }
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto m = read_complex_matrix(j[i], at(path, i), issues);
    if (!m) return std::nullopt;
    if (!dims.check(*m, at(path, i), issues)) return std::nullopt;
    out.push_back(std::move(*m));
  }
  return out;
}

void check_stochastic_json(const Eigen::MatrixXd& m, const std::string& path,
                           double tol, Issues& issues) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (m.col(j).minCoeff() < -tol) {
      issues.add(path, "negative entry in column " + std::to_string(j));
    }
    const double sum = m.col(j).sum();
    if (std::abs(sum - 1.0) > tol) {
      issues.add(path, "column " + std::to_string(j) + " sums to " +
                           std::to_string(sum) + ", expected 1");
    }
  }
}

void check_prob_vector_json(const Eigen::VectorXd& v, const std::string& path,
                            double tol, Issues& issues) {
  if (v.minCoeff() < -tol) issues.add(path, "negative entry");
  if (std::abs(v.sum() - 1.0) > tol) {
    issues.add(path,
               "entries sum to " + std::to_string(v.sum()) + ", expected 1");
  }
}

void check_hermitian_json(const ComplexMatrix& m, const std::string& path,
                          Issues& issues) {
  if (!is_hermitian(m)) {
    issues.add(path, "matrix is not Hermitian (defect " +
                         std::to_string(hermitian_defect(m)) + ")");
  }
}

void check_density_json(const ComplexMatrix& m, const std::string& path,
                        double tol, Issues& issues) {
  check_hermitian_json(m, path, issues);
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > tol) {
    issues.add(path, "trace " + std::to_string(tr) + " is not 1");
  }
  if (is_hermitian(m)) {
    const double lmin = lambda_min(m);
    if (lmin < -tol) {
      issues.add(path, "minimum eigenvalue " + std::to_string(lmin) +
                           " is negative");
    }
  }
}

void check_projection_json(const ComplexMatrix& m, const std::string& path,
                           double tol, Issues& issues) {
  check_hermitian_json(m, path, issues);
  const double idem = max_abs_entry(m * m - m);
  if (idem > tol) {
    issues.add(path, "projection idempotence defect " + std::to_string(idem) +
                         " exceeds tolerance");
  }
}

double completeness_residual_json(const std::vector<std::vector<ComplexMatrix>*>& lists,
                                  Eigen::Index dim) {
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const auto* list : lists) {
    for (const auto& k : *list) sum += k.adjoint() * k;
  }
  return max_abs_entry(sum - ComplexMatrix::Identity(dim, dim));
}

// Reads { action/output symbol -> payload } requiring exactly the declared
// symbols to be present (extra keys are reported).
const json* object_entry(const json& obj, const std::string& symbol,
                         const std::string& path, Issues& issues) {
  if (!obj.is_object()) {
    issues.add(path, "expected an object keyed by symbol");
    return nullptr;
  }
  if (!obj.contains(symbol)) {
    issues.add(path, "missing entry for symbol '" + symbol + "'");
    return nullptr;
  }
  return &obj.at(symbol);
}

struct ChannelsField {
  std::vector<std::vector<ComplexMatrix>> per_action;
};

std::optional<ChannelsField> read_channels(const json& obj,
                                           const std::string& field,
                                           const std::vector<std::string>& actions,
                                           const std::string& path,
                                           DimTracker& dims, double tol,
                                           Issues& issues) {
  const json* channels = require_field(obj, field, path, issues);
  if (!channels) return std::nullopt;
  ChannelsField out;
  for (const auto& a : actions) {
    const json* entry = object_entry(*channels, a, at(path, field), issues);
    if (!entry) return std::nullopt;
    auto kraus = read_kraus_list(*entry, at(at(path, field), a), dims, issues);
    if (!kraus) return std::nullopt;
    const double residual =
        completeness_residual_json({&*kraus}, kraus->front().rows());
    if (residual > tol) {
      issues.add(at(at(path, field), a),
                 "channel is not trace preserving, residual " +
                     std::to_string(residual));
    }
    out.per_action.push_back(std::move(*kraus));
  }
  return out;
}

struct InstrumentField {
  std::vector<std::vector<ComplexMatrix>> per_output;
};

std::optional<InstrumentField> read_instrument(const json& entry,
                                               const std::vector<std::string>& outputs,
                                               const std::string& path,
                                               DimTracker& dims, double tol,
                                               Issues& issues) {
  InstrumentField out;
  for (const auto& b : outputs) {
    const json* branch = object_entry(entry, b, path, issues);
    if (!branch) return std::nullopt;
    auto kraus = read_kraus_list(*branch, at(path, b), dims, issues);
    if (!kraus) return std::nullopt;
    out.per_output.push_back(std::move(*kraus));
  }
  std::vector<std::vector<ComplexMatrix>*> all;
  for (auto& list : out.per_output) all.push_back(&list);
  const double residual =
      completeness_residual_json(all, out.per_output.front().front().rows());
  if (residual > tol) {
    issues.add(path, "instrument branches are not trace preserving together, residual " +
                         std::to_string(residual));
  }
  return out;
}

void check_declared_dim(const json& obj, const DimTracker& dims,
                        const std::string& path, Issues& issues) {
  if (!obj.contains("dim") || !dims.dim) return;
  if (!obj.at("dim").is_number_integer() ||
      obj.at("dim").get<Eigen::Index>() != *dims.dim) {
    issues.add(at(path, "dim"), "declared dim does not match the matrices");
  }
}

// ---------------------------------------------------------------------------
// Per-kind parsers. Each returns a model only when no issue was recorded.
// ---------------------------------------------------------------------------

struct ClassicalParts {
  std::vector<std::string> states, inputs, outputs;
  std::vector<Eigen::MatrixXd> transitions;
  Eigen::MatrixXd emissions;
  Eigen::VectorXd initial;
  std::optional<std::string> goal;
};

std::optional<ClassicalParts> parse_classical_parts(const json& obj,
                                                    double tol,
                                                    Issues& issues) {
  const std::string root = "$";
  const json* states_j = require_field(obj, "states", root, issues);
  const json* inputs_j = require_field(obj, "input_alphabet", root, issues);
  const json* outputs_j = require_field(obj, "output_alphabet", root, issues);
  if (!states_j || !inputs_j || !outputs_j) return std::nullopt;
  auto states = read_symbols(*states_j, at(root, "states"), issues);
  auto inputs = read_symbols(*inputs_j, at(root, "input_alphabet"), issues);
  auto outputs = read_symbols(*outputs_j, at(root, "output_alphabet"), issues);
  if (!states || !inputs || !outputs) return std::nullopt;

  ClassicalParts parts;
  parts.states = std::move(*states);
  parts.inputs = std::move(*inputs);
  parts.outputs = std::move(*outputs);
  const std::size_t n = parts.states.size();

  const json* transitions = require_field(obj, "transitions", root, issues);
  if (!transitions) return std::nullopt;
  for (const auto& a : parts.inputs) {
    const json* entry =
        object_entry(*transitions, a, at(root, "transitions"), issues);
    if (!entry) return std::nullopt;
    auto m = read_real_matrix(*entry, at(at(root, "transitions"), a), n, n,
                              issues);
    if (!m) return std::nullopt;
    check_stochastic_json(*m, at(at(root, "transitions"), a), tol, issues);
    parts.transitions.push_back(std::move(*m));
  }

  const json* emissions = require_field(obj, "emissions", root, issues);
  if (!emissions) return std::nullopt;
  auto q = read_real_matrix(*emissions, at(root, "emissions"),
                            parts.outputs.size(), n, issues);
  if (!q) return std::nullopt;
  check_stochastic_json(*q, at(root, "emissions"), tol, issues);
  parts.emissions = std::move(*q);

  const json* initial = require_field(obj, "initial_distribution", root, issues);
  if (!initial) return std::nullopt;
  auto p0 = read_real_vector(*initial, at(root, "initial_distribution"), n,
                             issues);
  if (!p0) return std::nullopt;
  check_prob_vector_json(*p0, at(root, "initial_distribution"), tol, issues);
  parts.initial = std::move(*p0);

  if (obj.contains("goal")) {
    if (!obj.at("goal").is_string()) {
      issues.add(at(root, "goal"), "expected a state name");
      return std::nullopt;
    }
    const std::string goal = obj.at("goal").get<std::string>();
    const auto it = std::find(parts.states.begin(), parts.states.end(), goal);
    if (it == parts.states.end()) {
      issues.add(at(root, "goal"), "unknown state '" + goal + "'");
      return std::nullopt;
    }
    const auto g = static_cast<Eigen::Index>(it - parts.states.begin());
    for (std::size_t a = 0; a < parts.transitions.size(); ++a) {
      if (std::abs(parts.transitions[a](g, g) - 1.0) > tol) {
        issues.add(at(at(root, "transitions"), parts.inputs[a]),
                   "goal state '" + goal + "' is not absorbing");
      }
    }
    parts.goal = goal;
  }
  return parts;
}

std::optional<Model> parse_classical_moore(const json& obj, double tol,
                                           bool construct, Issues& issues) {
  auto parts = parse_classical_parts(obj, tol, issues);
  if (!parts || !issues.clean() || !construct) return std::nullopt;
  return Model(ClassicalMoore(std::move(parts->states),
                              std::move(parts->inputs),
                              std::move(parts->outputs),
                              std::move(parts->transitions),
                              std::move(parts->emissions),
                              std::move(parts->initial),
                              std::move(parts->goal)));
}

std::optional<Model> parse_classical_pomdp(const json& obj, double tol,
                                           bool construct, Issues& issues) {
  auto parts = parse_classical_parts(obj, tol, issues);
  if (!parts) return std::nullopt;
  const std::string root = "$";
  const json* rewards_j = require_field(obj, "rewards", root, issues);
  const json* discount_j = require_field(obj, "discount", root, issues);
  if (!rewards_j || !discount_j) return std::nullopt;
  auto rewards = read_real_vector(*rewards_j, at(root, "rewards"),
                                  parts->states.size(), issues);
  auto discount = read_number(*discount_j, at(root, "discount"), issues);
  if (!rewards || !discount) return std::nullopt;
  if (!(*discount >= 0.0 && *discount < 1.0)) {
    issues.add(at(root, "discount"), "discount must lie in [0, 1)");
  }
  if (!issues.clean() || !construct) return std::nullopt;
  ClassicalMoore machine(std::move(parts->states), std::move(parts->inputs),
                         std::move(parts->outputs),
                         std::move(parts->transitions),
                         std::move(parts->emissions),
                         std::move(parts->initial), std::move(parts->goal));
  return Model(ClassicalPomdp(std::move(machine), std::move(*rewards),
                              *discount));
}

struct QuantumParts {
  std::vector<std::string> inputs, outputs;
  DimTracker dims;
  ChannelsField channels;
  InstrumentField instrument;
  ComplexMatrix initial_state;
};

std::optional<QuantumParts> parse_quantum_shared(const json& obj, double tol,
                                                 Issues& issues) {
  const std::string root = "$";
  const json* inputs_j = require_field(obj, "input_alphabet", root, issues);
  const json* outputs_j = require_field(obj, "output_alphabet", root, issues);
  if (!inputs_j || !outputs_j) return std::nullopt;
  auto inputs = read_symbols(*inputs_j, at(root, "input_alphabet"), issues);
  auto outputs = read_symbols(*outputs_j, at(root, "output_alphabet"), issues);
  if (!inputs || !outputs) return std::nullopt;

  QuantumParts parts;
  parts.inputs = std::move(*inputs);
  parts.outputs = std::move(*outputs);

  auto channels = read_channels(obj, "channels", parts.inputs, root,
                                parts.dims, tol, issues);
  if (!channels) return std::nullopt;
  parts.channels = std::move(*channels);

  const json* instrument_j = require_field(obj, "instrument", root, issues);
  if (!instrument_j) return std::nullopt;
  auto instrument = read_instrument(*instrument_j, parts.outputs,
                                    at(root, "instrument"), parts.dims, tol,
                                    issues);
  if (!instrument) return std::nullopt;
  parts.instrument = std::move(*instrument);

  const json* initial_j = require_field(obj, "initial_state", root, issues);
  if (!initial_j) return std::nullopt;
  auto initial = read_complex_matrix(*initial_j, at(root, "initial_state"),
                                     issues);
  if (!initial) return std::nullopt;
  parts.dims.check(*initial, at(root, "initial_state"), issues);
  check_density_json(*initial, at(root, "initial_state"), tol, issues);
  parts.initial_state = std::move(*initial);

  check_declared_dim(obj, parts.dims, root, issues);
  return parts;
}

Instrument build_instrument(const std::vector<std::string>& outputs,
                            std::vector<std::vector<ComplexMatrix>> branches) {
  std::vector<KrausMap> maps;
  for (auto& ops : branches) maps.push_back(make_kraus_map(std::move(ops)));
  return Instrument(outputs, std::move(maps));
}

ConditionalChannel build_channels(const std::vector<std::string>& inputs,
                                  std::vector<std::vector<ComplexMatrix>> per_action) {
  std::vector<Channel> channels;
  for (auto& ops : per_action) {
    channels.emplace_back(make_kraus_map(std::move(ops)));
  }
  return ConditionalChannel(inputs, std::move(channels));
}

std::optional<Model> parse_quantum_moore(const json& obj, double tol,
                                         bool construct, Issues& issues) {
  auto parts = parse_quantum_shared(obj, tol, issues);
  if (!parts) return std::nullopt;
  const std::string root = "$";
  const json* pi_j = require_field(obj, "accepting_projection", root, issues);
  if (!pi_j) return std::nullopt;
  auto pi = read_complex_matrix(*pi_j, at(root, "accepting_projection"), issues);
  if (!pi) return std::nullopt;
  parts->dims.check(*pi, at(root, "accepting_projection"), issues);
  check_projection_json(*pi, at(root, "accepting_projection"), tol, issues);
  if (!issues.clean() || !construct) return std::nullopt;
  return Model(QuantumMooreMachine(
      build_channels(parts->inputs, std::move(parts->channels.per_action)),
      build_instrument(parts->outputs, std::move(parts->instrument.per_output)),
      DensityMatrix(std::move(parts->initial_state)), std::move(*pi)));
}

std::optional<Model> parse_quantum_mealy(const json& obj, double tol,
                                         bool construct, Issues& issues) {
  const std::string root = "$";
  const json* inputs_j = require_field(obj, "input_alphabet", root, issues);
  const json* outputs_j = require_field(obj, "output_alphabet", root, issues);
  if (!inputs_j || !outputs_j) return std::nullopt;
  auto inputs = read_symbols(*inputs_j, at(root, "input_alphabet"), issues);
  auto outputs = read_symbols(*outputs_j, at(root, "output_alphabet"), issues);
  if (!inputs || !outputs) return std::nullopt;

  DimTracker dims;
  const json* instruments_j = require_field(obj, "instruments", root, issues);
  if (!instruments_j) return std::nullopt;
  std::vector<InstrumentField> per_action;
  for (const auto& a : *inputs) {
    const json* entry =
        object_entry(*instruments_j, a, at(root, "instruments"), issues);
    if (!entry) return std::nullopt;
    auto inst = read_instrument(*entry, *outputs,
                                at(at(root, "instruments"), a), dims, tol,
                                issues);
    if (!inst) return std::nullopt;
    per_action.push_back(std::move(*inst));
  }

  const json* initial_j = require_field(obj, "initial_state", root, issues);
  const json* pi_j = require_field(obj, "accepting_projection", root, issues);
  if (!initial_j || !pi_j) return std::nullopt;
  auto initial = read_complex_matrix(*initial_j, at(root, "initial_state"), issues);
  auto pi = read_complex_matrix(*pi_j, at(root, "accepting_projection"), issues);
  if (!initial || !pi) return std::nullopt;
  dims.check(*initial, at(root, "initial_state"), issues);
  dims.check(*pi, at(root, "accepting_projection"), issues);
  check_density_json(*initial, at(root, "initial_state"), tol, issues);
  check_projection_json(*pi, at(root, "accepting_projection"), tol, issues);
  check_declared_dim(obj, dims, root, issues);

  if (!issues.clean() || !construct) return std::nullopt;
  std::vector<Instrument> instruments;
  for (auto& field : per_action) {
    instruments.push_back(
        build_instrument(*outputs, std::move(field.per_output)));
  }
  return Model(QuantumMealyMachine(std::move(*inputs), std::move(instruments),
                                   DensityMatrix(std::move(*initial)),
                                   std::move(*pi)));
}

std::optional<Model> parse_qomdp(const json& obj, double tol, bool construct,
                                 Issues& issues) {
  auto parts = parse_quantum_shared(obj, tol, issues);
  if (!parts) return std::nullopt;
  const std::string root = "$";

  const bool has_state = obj.contains("reward");
  const bool has_action = obj.contains("action_rewards");
  if (has_state == has_action) {
    issues.add(root, "exactly one of 'reward' and 'action_rewards' is required");
    return std::nullopt;
  }
  Qomdp::Rewards rewards;
  if (has_state) {
    auto r = read_complex_matrix(obj.at("reward"), at(root, "reward"), issues);
    if (!r) return std::nullopt;
    parts->dims.check(*r, at(root, "reward"), issues);
    check_hermitian_json(*r, at(root, "reward"), issues);
    rewards = std::move(*r);
  } else {
    std::vector<ComplexMatrix> per_action;
    for (const auto& a : parts->inputs) {
      const json* entry = object_entry(obj.at("action_rewards"), a,
                                       at(root, "action_rewards"), issues);
      if (!entry) return std::nullopt;
      auto r = read_complex_matrix(*entry, at(at(root, "action_rewards"), a),
                                   issues);
      if (!r) return std::nullopt;
      parts->dims.check(*r, at(at(root, "action_rewards"), a), issues);
      check_hermitian_json(*r, at(at(root, "action_rewards"), a), issues);
      per_action.push_back(std::move(*r));
    }
    rewards = std::move(per_action);
  }

  const json* discount_j = require_field(obj, "discount", root, issues);
  if (!discount_j) return std::nullopt;
  auto discount = read_number(*discount_j, at(root, "discount"), issues);
  if (!discount) return std::nullopt;
  if (!(*discount >= 0.0 && *discount < 1.0)) {
    issues.add(at(root, "discount"), "discount must lie in [0, 1)");
  }

  if (!issues.clean() || !construct) return std::nullopt;
  return Model(Qomdp(
      build_channels(parts->inputs, std::move(parts->channels.per_action)),
      build_instrument(parts->outputs, std::move(parts->instrument.per_output)),
      std::move(rewards), *discount,
      DensityMatrix(std::move(parts->initial_state))));
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

json complex_matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json real_matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json real_vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json kraus_list_to_json(const KrausMap& m) {
  json out = json::array();
  for (const auto& k : m.kraus) out.push_back(complex_matrix_to_json(k));
  return out;
}

void write_classical_fields(const ClassicalMoore& m, json& out) {
  out["states"] = m.states();
  out["input_alphabet"] = m.input_alphabet();
  out["output_alphabet"] = m.output_alphabet();
  json transitions = json::object();
  for (std::size_t a = 0; a < m.input_alphabet().size(); ++a) {
    transitions[m.input_alphabet()[a]] = real_matrix_to_json(m.transition(a));
  }
  out["transitions"] = std::move(transitions);
  out["emissions"] = real_matrix_to_json(m.emissions());
  out["initial_distribution"] = real_vector_to_json(m.initial());
  if (m.goal_state().has_value()) out["goal"] = *m.goal_state();
}

void write_quantum_shared(const ConditionalChannel& transition,
                          const Instrument& output,
                          const DensityMatrix& initial, json& out) {
  out["dim"] = transition.dim();
  out["input_alphabet"] = transition.actions();
  out["output_alphabet"] = output.outcomes();
  json channels = json::object();
  for (std::size_t a = 0; a < transition.n_actions(); ++a) {
    channels[transition.actions()[a]] =
        kraus_list_to_json(transition.channel(a).kraus_map());
  }
  out["channels"] = std::move(channels);
  json instrument = json::object();
  for (std::size_t b = 0; b < output.n_outcomes(); ++b) {
    instrument[output.outcomes()[b]] = kraus_list_to_json(output.branch(b));
  }
  out["instrument"] = std::move(instrument);
  out["initial_state"] = complex_matrix_to_json(initial.mat());
}

struct ModelWriter {
  json operator()(const ClassicalMoore& m) const {
    json out;
    out["kind"] = "classical_moore";
    write_classical_fields(m, out);
    return out;
  }
  json operator()(const ClassicalPomdp& m) const {
    json out;
    out["kind"] = "classical_pomdp";
    write_classical_fields(m.moore(), out);
    out["rewards"] = real_vector_to_json(m.rewards());
    out["discount"] = m.discount();
    return out;
  }
  json operator()(const QuantumMooreMachine& m) const {
    json out;
    out["kind"] = "quantum_moore";
    write_quantum_shared(m.transition(), m.output(), m.initial_state(), out);
    out["accepting_projection"] = complex_matrix_to_json(m.projection());
    return out;
  }
  json operator()(const QuantumMealyMachine& m) const {
    json out;
    out["kind"] = "quantum_mealy";
    out["dim"] = m.dim();
    out["input_alphabet"] = m.input_alphabet();
    out["output_alphabet"] = m.output_alphabet();
    json instruments = json::object();
    for (std::size_t a = 0; a < m.input_alphabet().size(); ++a) {
      json branches = json::object();
      const Instrument& inst = m.instrument(a);
      for (std::size_t b = 0; b < inst.n_outcomes(); ++b) {
        branches[inst.outcomes()[b]] = kraus_list_to_json(inst.branch(b));
      }
      instruments[m.input_alphabet()[a]] = std::move(branches);
    }
    out["instruments"] = std::move(instruments);
    out["initial_state"] = complex_matrix_to_json(m.initial_state().mat());
    out["accepting_projection"] = complex_matrix_to_json(m.projection());
    return out;
  }
  json operator()(const Qomdp& m) const {
    json out;
    out["kind"] = "qomdp";
    write_quantum_shared(m.transition(), m.output(), m.initial_state(), out);
    if (m.has_state_reward()) {
      out["reward"] = complex_matrix_to_json(m.state_reward());
    } else {
      json rewards = json::object();
      for (std::size_t a = 0; a < m.input_alphabet().size(); ++a) {
        rewards[m.input_alphabet()[a]] =
            complex_matrix_to_json(m.action_reward(a));
      }
      out["action_rewards"] = std::move(rewards);
    }
    out["discount"] = m.discount();
    return out;
  }
};

}  // namespace

LoadResult parse_model_json(const std::string& text,
                            const LoadOptions& options) {
  LoadResult result;
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::parse_error& e) {
    result.parse_error = true;
    result.issues.push_back(ModelIssue{"$", e.what()});
    return result;
  }
  Issues issues;
  if (!parsed.is_object()) {
    issues.add("$", "expected a JSON object");
    result.issues = std::move(issues.list);
    return result;
  }
  const json* kind = require_field(parsed, "kind", "$", issues);
  if (kind == nullptr || !kind->is_string()) {
    if (kind != nullptr) issues.add("$.kind", "expected a string");
    result.issues = std::move(issues.list);
    return result;
  }

  const std::string kind_name = kind->get<std::string>();
  const double tol = options.structural_tol;
  const bool construct = !options.validate_only;
  std::optional<Model> model;
  try {
    if (kind_name == "classical_moore") {
      model = parse_classical_moore(parsed, tol, construct, issues);
    } else if (kind_name == "classical_pomdp") {
      model = parse_classical_pomdp(parsed, tol, construct, issues);
    } else if (kind_name == "quantum_moore") {
      model = parse_quantum_moore(parsed, tol, construct, issues);
    } else if (kind_name == "quantum_mealy") {
      model = parse_quantum_mealy(parsed, tol, construct, issues);
    } else if (kind_name == "qomdp") {
      model = parse_qomdp(parsed, tol, construct, issues);
    } else {
      issues.add("$.kind", "unknown model kind '" + kind_name + "'");
    }
  } catch (const ValidationError& e) {
    // The io checks are meant to catch everything first; this is a safety
    // net so a constructor rejection still surfaces as a report.
    issues.add("$", e.what());
  }
  result.issues = std::move(issues.list);
  if (result.issues.empty()) result.model = std::move(model);
  return result;
}

LoadResult load_model_file(const std::string& path,
                           const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    LoadResult result;
    result.parse_error = true;
    result.issues.push_back(ModelIssue{"$", "cannot open file '" + path + "'"});
    return result;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model_json(buffer.str(), options);
}

std::string kind_of(const Model& model) {
  struct Kind {
    std::string operator()(const ClassicalMoore&) const { return "classical_moore"; }
    std::string operator()(const ClassicalPomdp&) const { return "classical_pomdp"; }
    std::string operator()(const QuantumMooreMachine&) const { return "quantum_moore"; }
    std::string operator()(const QuantumMealyMachine&) const { return "quantum_mealy"; }
    std::string operator()(const Qomdp&) const { return "qomdp"; }
  };
  return std::visit(Kind{}, model);
}

std::string model_to_json(const Model& model) {
  return std::visit(ModelWriter{}, model).dump(2) + "\n";
}

void save_model_file(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write file '" + path + "'");
  }
  out << model_to_json(model);
}

std::string solution_to_json(const ValueIterationResult& result,
                             double discount, double epsilon) {
  json out;
  out["kind"] = "alpha_set_solution";
  out["dim"] = result.values.dim();
  json operators = json::array();
  for (std::size_t i = 0; i < result.values.size(); ++i) {
    operators.push_back(complex_matrix_to_json(result.values.op(i)));
  }
  out["operators"] = std::move(operators);
  out["action_tags"] = result.values.tags();
  out["iterations"] = result.iterations;
  out["bound"] = result.bound;
  out["discount"] = discount;
  out["epsilon"] = epsilon;
  return out.dump(2) + "\n";
}

std::string search_result_to_json(const SearchResult& result,
                                  const std::string& problem, double tau) {
  json out;
  out["problem"] = problem;
  out["tau"] = tau;
  switch (result.status) {
    case SearchStatus::witness_found:
      out["status"] = "witness";
      break;
    case SearchStatus::exhausted:
      out["status"] = "exhausted";
      break;
    case SearchStatus::node_cap_reached:
      out["status"] = "node_cap";
      out["frontierSize"] = result.frontier_size;
      break;
  }
  if (result.witness.has_value()) {
    out["alpha"] = result.witness->alpha;
    if (result.witness->beta.has_value()) out["beta"] = *result.witness->beta;
    out["achieved"] = result.witness->achieved;
  }
  out["maxLenSearched"] = result.max_len_searched;
  out["nodesExpanded"] = result.nodes_expanded;
  if (result.restricted_to_realizable) out["restrictedToRealizable"] = true;
  return out.dump(2) + "\n";
}

}  // namespace qomdp
