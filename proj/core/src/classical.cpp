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

#include "qomdp/classical.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace qomdp {

namespace {

void check_stochastic_columns(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw ValidationError(std::string(what) + ": entries must be finite");
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (m.col(j).minCoeff() < -k_structural_tol) {
      throw ValidationError(std::string(what) + ": negative entry in column " +
                            std::to_string(j));
    }
    const double sum = m.col(j).sum();
    if (std::abs(sum - 1.0) > k_structural_tol) {
      throw ValidationError(std::string(what) + ": column " +
                            std::to_string(j) + " sums to " +
                            std::to_string(sum) + ", expected 1");
    }
  }
}

void check_probability_vector(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite() || v.size() == 0) {
    throw ValidationError(std::string(what) + ": must be a nonempty finite vector");
  }
  if (v.minCoeff() < -k_structural_tol) {
    throw ValidationError(std::string(what) + ": negative entry");
  }
  if (std::abs(v.sum() - 1.0) > k_structural_tol) {
    throw ValidationError(std::string(what) + ": entries sum to " +
                          std::to_string(v.sum()) + ", expected 1");
  }
}

void check_unique_nonempty(const std::vector<std::string>& symbols,
                           const char* what) {
  if (symbols.empty()) {
    throw ValidationError(std::string(what) + ": must be nonempty");
  }
  std::unordered_set<std::string> seen;
  for (const auto& s : symbols) {
    if (!seen.insert(s).second) {
      throw ValidationError(std::string(what) + ": duplicate symbol '" + s + "'");
    }
  }
}

std::size_t index_of(const std::vector<std::string>& symbols,
                     const std::string& s, const char* what) {
  const auto it = std::find(symbols.begin(), symbols.end(), s);
  if (it == symbols.end()) {
    throw std::invalid_argument(std::string(what) + ": unknown symbol '" + s + "'");
  }
  return static_cast<std::size_t>(it - symbols.begin());
}

std::string fresh_symbol(const std::vector<std::string>& taken,
                         const std::string& base) {
  std::string candidate = base;
  int suffix = 1;
  while (std::find(taken.begin(), taken.end(), candidate) != taken.end()) {
    candidate = base + "_" + std::to_string(suffix++);
  }
  return candidate;
}

// Kraus set {sqrt(P(i|j)) |i><j|}; zero entries contribute nothing and are
// skipped. Column-stochasticity maps exactly to trace preservation.
KrausMap kraus_from_stochastic(const Eigen::MatrixXd& p) {
  const Eigen::Index n = p.rows();
  std::vector<ComplexMatrix> ops;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      if (p(i, j) <= 0.0) continue;
      ComplexMatrix k = ComplexMatrix::Zero(n, n);
      k(i, j) = std::sqrt(p(i, j));
      ops.push_back(std::move(k));
    }
  }
  if (ops.empty()) ops.push_back(ComplexMatrix::Zero(n, n));
  return make_kraus_map(std::move(ops));
}

Instrument instrument_from_emissions(const std::vector<std::string>& outputs,
                                     const Eigen::MatrixXd& q) {
  const Eigen::Index n = q.cols();
  std::vector<KrausMap> branches;
  for (Eigen::Index b = 0; b < q.rows(); ++b) {
    std::vector<ComplexMatrix> ops;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (q(b, i) <= 0.0) continue;
      ComplexMatrix k = ComplexMatrix::Zero(n, n);
      k(i, i) = std::sqrt(q(b, i));
      ops.push_back(std::move(k));
    }
    if (ops.empty()) ops.push_back(ComplexMatrix::Zero(n, n));
    branches.push_back(make_kraus_map(std::move(ops)));
  }
  return Instrument(outputs, std::move(branches));
}

}  // namespace

ClassicalMoore::ClassicalMoore(std::vector<std::string> states,
                               std::vector<std::string> input_alphabet,
                               std::vector<std::string> output_alphabet,
                               std::vector<Eigen::MatrixXd> transitions,
                               Eigen::MatrixXd emissions,
                               Eigen::VectorXd initial,
                               std::optional<std::string> goal)
    : states_(std::move(states)),
      inputs_(std::move(input_alphabet)),
      outputs_(std::move(output_alphabet)),
      transitions_(std::move(transitions)),
      emissions_(std::move(emissions)),
      initial_(std::move(initial)) {
  check_unique_nonempty(states_, "ClassicalMoore states");
  check_unique_nonempty(inputs_, "ClassicalMoore input alphabet");
  check_unique_nonempty(outputs_, "ClassicalMoore output alphabet");
  const auto n = static_cast<Eigen::Index>(states_.size());
  if (transitions_.size() != inputs_.size()) {
    throw ValidationError("ClassicalMoore: one transition matrix per action required");
  }
  for (std::size_t a = 0; a < transitions_.size(); ++a) {
    const auto& p = transitions_[a];
    if (p.rows() != n || p.cols() != n) {
      throw ValidationError("ClassicalMoore: transition matrix for '" +
                            inputs_[a] + "' must be " + std::to_string(n) +
                            "x" + std::to_string(n));
    }
    check_stochastic_columns(p, ("transition matrix '" + inputs_[a] + "'").c_str());
  }
  if (emissions_.rows() != static_cast<Eigen::Index>(outputs_.size()) ||
      emissions_.cols() != n) {
    throw ValidationError("ClassicalMoore: emission matrix must be |outputs| x |states|");
  }
  check_stochastic_columns(emissions_, "emission matrix");
  if (initial_.size() != n) {
    throw ValidationError("ClassicalMoore: initial distribution size mismatch");
  }
  check_probability_vector(initial_, "initial distribution");
  if (goal.has_value()) {
    goal_ = index_of(states_, *goal, "ClassicalMoore goal");
    const auto g = static_cast<Eigen::Index>(*goal_);
    for (std::size_t a = 0; a < transitions_.size(); ++a) {
      if (std::abs(transitions_[a](g, g) - 1.0) > k_structural_tol) {
        throw ValidationError("ClassicalMoore: goal state '" + states_[*goal_] +
                              "' is not absorbing under action '" + inputs_[a] + "'");
      }
    }
  }
}

const Eigen::MatrixXd& ClassicalMoore::transition(const std::string& action) const {
  return transitions_[action_index(action)];
}

std::optional<std::string> ClassicalMoore::goal_state() const {
  if (!goal_) return std::nullopt;
  return states_[*goal_];
}

std::size_t ClassicalMoore::action_index(const std::string& action) const {
  return index_of(inputs_, action, "ClassicalMoore action");
}
std::size_t ClassicalMoore::output_index(const std::string& output) const {
  return index_of(outputs_, output, "ClassicalMoore output");
}
std::size_t ClassicalMoore::state_index(const std::string& state) const {
  return index_of(states_, state, "ClassicalMoore state");
}

ClassicalPomdp::ClassicalPomdp(ClassicalMoore machine, Eigen::VectorXd rewards,
                               double discount)
    : machine_(std::move(machine)),
      rewards_(std::move(rewards)),
      discount_(discount) {
  if (rewards_.size() != static_cast<Eigen::Index>(machine_.n_states()) ||
      !rewards_.allFinite()) {
    throw ValidationError("ClassicalPomdp: rewards must be finite, one per state");
  }
  if (!(discount_ >= 0.0 && discount_ < 1.0)) {
    throw ValidationError("ClassicalPomdp: discount must lie in [0, 1)");
  }
}

ClassicalPomdp make_mdp(std::vector<std::string> states,
                        std::vector<std::string> input_alphabet,
                        std::vector<Eigen::MatrixXd> transitions,
                        Eigen::VectorXd rewards, Eigen::VectorXd initial,
                        double discount) {
  const auto n = static_cast<Eigen::Index>(states.size());
  ClassicalMoore machine(states, std::move(input_alphabet), states,
                         std::move(transitions),
                         Eigen::MatrixXd::Identity(n, n), std::move(initial));
  return ClassicalPomdp(std::move(machine), std::move(rewards), discount);
}

ClassicalPomdp make_hmm(std::vector<std::string> states,
                        std::vector<std::string> output_alphabet,
                        Eigen::MatrixXd transition, Eigen::MatrixXd emissions,
                        Eigen::VectorXd initial) {
  const auto n = static_cast<Eigen::Index>(states.size());
  std::vector<Eigen::MatrixXd> transitions{std::move(transition)};
  ClassicalMoore machine(std::move(states), {"a"}, std::move(output_alphabet),
                         std::move(transitions), std::move(emissions),
                         std::move(initial));
  return ClassicalPomdp(std::move(machine), Eigen::VectorXd::Zero(n), 0.0);
}

BeliefState::BeliefState(Eigen::VectorXd probs) : probs_(std::move(probs)) {
  check_probability_vector(probs_, "BeliefState");
}

BeliefUpdate belief_update(const ClassicalMoore& m, const BeliefState& belief,
                           const std::string& action,
                           const std::string& observation) {
  if (belief.size() != static_cast<Eigen::Index>(m.n_states())) {
    throw std::invalid_argument("belief_update: belief size mismatch");
  }
  const auto a = m.action_index(action);
  const auto y = static_cast<Eigen::Index>(m.output_index(observation));
  const Eigen::VectorXd predicted = m.transition(a) * belief.probs();
  const Eigen::VectorXd joint =
      m.emissions().row(y).transpose().cwiseProduct(predicted);
  BeliefUpdate result;
  const double p = joint.sum();
  if (p > k_branch_floor) {
    result.probability = p;
    result.posterior = BeliefState(joint / p);
  }
  return result;
}

QuantumMooreMachine embed_as_quantum(const ClassicalMoore& m,
                                     std::optional<ComplexMatrix> projection) {
  const auto n = static_cast<Eigen::Index>(m.n_states());
  std::vector<Channel> channels;
  for (std::size_t a = 0; a < m.input_alphabet().size(); ++a) {
    channels.emplace_back(kraus_from_stochastic(m.transition(a)));
  }
  ComplexMatrix pi;
  if (m.goal_index().has_value()) {
    pi = ket_bra(static_cast<Eigen::Index>(*m.goal_index()),
                 static_cast<Eigen::Index>(*m.goal_index()), n);
  } else if (projection.has_value()) {
    pi = std::move(*projection);
  } else {
    pi = ComplexMatrix::Zero(n, n);
  }
  return QuantumMooreMachine(
      ConditionalChannel(m.input_alphabet(), std::move(channels)),
      instrument_from_emissions(m.output_alphabet(), m.emissions()),
      DensityMatrix(m.initial().cast<Complex>().asDiagonal()),
      std::move(pi));
}

Qomdp embed_as_qomdp(const ClassicalPomdp& m) {
  const ClassicalMoore& c = m.moore();
  std::vector<Channel> channels;
  for (std::size_t a = 0; a < c.input_alphabet().size(); ++a) {
    channels.emplace_back(kraus_from_stochastic(c.transition(a)));
  }
  return Qomdp(ConditionalChannel(c.input_alphabet(), std::move(channels)),
               instrument_from_emissions(c.output_alphabet(), c.emissions()),
               ComplexMatrix(m.rewards().cast<Complex>().asDiagonal()),
               m.discount(),
               DensityMatrix(c.initial().cast<Complex>().asDiagonal()));
}

NonoccurrenceReduction reachability_to_nonoccurrence(const ClassicalMoore& m,
                                                     double tau) {
  if (!m.goal_index().has_value()) {
    throw std::invalid_argument("reachability_to_nonoccurrence: machine has no goal state");
  }
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("reachability_to_nonoccurrence: tau must lie in (0, 1)");
  }
  const auto n = static_cast<Eigen::Index>(m.n_states());
  const auto g = static_cast<Eigen::Index>(*m.goal_index());

  const std::string sink_state = fresh_symbol(m.states(), "s_hat");
  const std::string sink_output = fresh_symbol(m.output_alphabet(), "b_hat");

  std::vector<std::string> states = m.states();
  states.push_back(sink_state);
  std::vector<std::string> outputs = m.output_alphabet();
  outputs.push_back(sink_output);

  // From any non-goal state the dynamics are unchanged (including moves into
  // the goal); the goal and the sink both move to the sink with certainty.
  std::vector<Eigen::MatrixXd> transitions;
  for (std::size_t a = 0; a < m.input_alphabet().size(); ++a) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == g) continue;
      p.col(j).head(n) = m.transition(a).col(j);
    }
    p(n, g) = 1.0;
    p(n, n) = 1.0;
    transitions.push_back(std::move(p));
  }

  // Original states (the goal included) keep their emissions; only the sink
  // emits the fresh output symbol.
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(outputs.size(), n + 1);
  q.topLeftCorner(m.output_alphabet().size(), n) = m.emissions();
  q(static_cast<Eigen::Index>(outputs.size()) - 1, n) = 1.0;

  Eigen::VectorXd initial = Eigen::VectorXd::Zero(n + 1);
  initial.head(n) = m.initial();

  ClassicalMoore reduced(std::move(states), m.input_alphabet(),
                         std::move(outputs), std::move(transitions),
                         std::move(q), std::move(initial), sink_state);
  return NonoccurrenceReduction{std::move(reduced), 1.0 - tau, sink_state,
                                sink_output};
}

}  // namespace qomdp
