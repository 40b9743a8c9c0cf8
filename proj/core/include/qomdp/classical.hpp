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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qomdp/solver.hpp"
#include "qomdp/transducers.hpp"

namespace qomdp {

/// Classical Moore machine / partially observed chain: column-stochastic
/// transition matrices P_a (column j is the distribution of the successor of
/// state j), a column-stochastic emission matrix Q (|Delta| x |S|), an
/// initial distribution, and an optional absorbing goal state.
class ClassicalMoore {
 public:
  ClassicalMoore(std::vector<std::string> states,
                 std::vector<std::string> input_alphabet,
                 std::vector<std::string> output_alphabet,
                 std::vector<Eigen::MatrixXd> transitions,
                 Eigen::MatrixXd emissions, Eigen::VectorXd initial,
                 std::optional<std::string> goal = std::nullopt);

  std::size_t n_states() const { return states_.size(); }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& input_alphabet() const { return inputs_; }
  const std::vector<std::string>& output_alphabet() const { return outputs_; }
  const Eigen::MatrixXd& transition(std::size_t a) const {
    return transitions_.at(a);
  }
  const Eigen::MatrixXd& transition(const std::string& action) const;
  const Eigen::MatrixXd& emissions() const { return emissions_; }
  const Eigen::VectorXd& initial() const { return initial_; }
  const std::optional<std::size_t>& goal_index() const { return goal_; }
  std::optional<std::string> goal_state() const;

  std::size_t action_index(const std::string& action) const;
  std::size_t output_index(const std::string& output) const;
  std::size_t state_index(const std::string& state) const;

 private:
  std::vector<std::string> states_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::vector<Eigen::MatrixXd> transitions_;
  Eigen::MatrixXd emissions_;
  Eigen::VectorXd initial_;
  std::optional<std::size_t> goal_;
};

/// Classical POMDP: a ClassicalMoore plus a per-state reward vector and a
/// discount in [0, 1). MDPs (Delta = S, Q = I) and HMMs (unary input, zero
/// reward) are degenerate cases built by the helper constructors below.
class ClassicalPomdp {
 public:
  ClassicalPomdp(ClassicalMoore machine, Eigen::VectorXd rewards,
                 double discount);

  const ClassicalMoore& moore() const { return machine_; }
  const Eigen::VectorXd& rewards() const { return rewards_; }
  double discount() const { return discount_; }

 private:
  ClassicalMoore machine_;
  Eigen::VectorXd rewards_;
  double discount_;
};

// MDP helper: the state is fully observed (Delta = S, Q = I).
ClassicalPomdp make_mdp(std::vector<std::string> states,
                        std::vector<std::string> input_alphabet,
                        std::vector<Eigen::MatrixXd> transitions,
                        Eigen::VectorXd rewards, Eigen::VectorXd initial,
                        double discount);

// HMM helper: unary input alphabet, trivial reward.
ClassicalPomdp make_hmm(std::vector<std::string> states,
                        std::vector<std::string> output_alphabet,
                        Eigen::MatrixXd transition, Eigen::MatrixXd emissions,
                        Eigen::VectorXd initial);

/// Probability vector over the hidden states.
class BeliefState {
 public:
  explicit BeliefState(Eigen::VectorXd probs);
  const Eigen::VectorXd& probs() const { return probs_; }
  Eigen::Index size() const { return probs_.size(); }

 private:
  Eigen::VectorXd probs_;
};

struct BeliefUpdate {
  // Probability of observing y after taking a from the prior belief.
  double probability = 0.0;
  // Normalized posterior; absent when the probability is at or below the
  // 1e-14 floor.
  std::optional<BeliefState> posterior;
};

// One filtering step: b'(i) proportional to Q(y|i) sum_j P_a(i|j) b(j).
BeliefUpdate belief_update(const ClassicalMoore& m, const BeliefState& belief,
                           const std::string& action,
                           const std::string& observation);

// Simulates the classical machine by a quantum Moore machine on C^|S|:
// Phi_a has Kraus {sqrt(P_a(i|j)) |i><j|}, Omega_b has Kraus
// {sqrt(Q(b|i)) |i><i|}, rho0 = diag(p0). The projection is |goal><goal|
// when a goal is present, else the caller-supplied one (zero if neither).
QuantumMooreMachine embed_as_quantum(
    const ClassicalMoore& m,
    std::optional<ComplexMatrix> projection = std::nullopt);

// Same embedding for a POMDP, as a QOMDP with state reward diag(R).
Qomdp embed_as_qomdp(const ClassicalPomdp& m);

struct NonoccurrenceReduction {
  ClassicalMoore machine;
  double threshold = 0.0;  // 1 - tau
  std::string sink_state;
  std::string sink_output;
};

// Reduces goal-state reachability at threshold tau to non-occurrence at
// threshold 1 - tau: adds an absorbing sink state entered one step after the
// goal, and a fresh output symbol emitted exactly from the sink, so that
// Pr[sink output appears by step n] = Pr[goal reached by step n-1].
NonoccurrenceReduction reachability_to_nonoccurrence(const ClassicalMoore& m,
                                                     double tau);

}  // namespace qomdp
