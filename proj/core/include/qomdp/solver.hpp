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

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "qomdp/channels.hpp"

namespace qomdp {

// Default cap on |Sigma| * |V|^|Delta| cross-sum candidates per backup.
inline constexpr std::uint64_t k_cross_sum_cap = 100'000;

/// Discounted decision process over density matrices. One step under action
/// a applies Phi_a, then the instrument emits an outcome; rewards are either
/// one Hermitian state observable R (reward Tr(R rho)) or one Hermitian
/// observable per action.
class Qomdp {
 public:
  using Rewards = std::variant<ComplexMatrix, std::vector<ComplexMatrix>>;

  Qomdp(ConditionalChannel transition, Instrument output, Rewards rewards,
        double discount, DensityMatrix initial_state);

  Eigen::Index dim() const { return transition_.dim(); }
  const std::vector<std::string>& input_alphabet() const {
    return transition_.actions();
  }
  const std::vector<std::string>& output_alphabet() const {
    return output_.outcomes();
  }
  const ConditionalChannel& transition() const { return transition_; }
  const Instrument& output() const { return output_; }
  double discount() const { return discount_; }
  const DensityMatrix& initial_state() const { return initial_state_; }

  bool has_state_reward() const;
  const ComplexMatrix& state_reward() const;
  const ComplexMatrix& action_reward(std::size_t a) const;

 private:
  ConditionalChannel transition_;
  Instrument output_;
  Rewards rewards_;
  double discount_;
  DensityMatrix initial_state_;
};

/// Finite set of Hermitian alpha-operators representing the piecewise-linear
/// convex value function V(rho) = max_c <R_c, rho>. Each operator carries the
/// action that is greedy with respect to it (empty for the seed set {0}).
class AlphaSet {
 public:
  AlphaSet(std::vector<ComplexMatrix> operators,
           std::vector<std::string> action_tags);

  std::size_t size() const { return operators_.size(); }
  Eigen::Index dim() const { return operators_.front().rows(); }
  const ComplexMatrix& op(std::size_t i) const { return operators_.at(i); }
  const std::string& tag(std::size_t i) const { return tags_.at(i); }
  const std::vector<ComplexMatrix>& operators() const { return operators_; }
  const std::vector<std::string>& tags() const { return tags_; }

 private:
  std::vector<ComplexMatrix> operators_;
  std::vector<std::string> tags_;
};

/// Policy that is greedy with respect to an alpha set; every operator must
/// carry an action tag.
class StationaryPolicy {
 public:
  explicit StationaryPolicy(AlphaSet values);
  const AlphaSet& values() const { return values_; }

 private:
  AlphaSet values_;
};

// Equivalent state-reward process on C^dim ox C^|Sigma|: the second register
// remembers the action that produced the current state, the reward operator
// is sum_a R_a ox |a><a|, and the initial tag is the first declared action.
// With action rewards, the step-0 reward term uses that initial tag; from
// step 1 on, the reward for executing a is collected on the post-transition
// state, matching the enlarged process term by term. Throws if the input
// already has a state reward.
Qomdp reduce_to_state_reward(const Qomdp& m);

struct ValueAtResult {
  double value = 0.0;
  std::size_t argmax = 0;  // lowest index on ties
};

// max_c <R_c, rho> with deterministic tie-break by lowest index.
ValueAtResult value_at(const AlphaSet& v, const DensityMatrix& rho);

// One Bellman backup: for each action, the cross-sum candidates
// R + gamma * sum_b dual_{a,b}(R_{c(b)}) over all assignments c of operators
// to outcomes, tagged with the action and pruned before return. Refuses when
// |Sigma| * |V|^|Delta| exceeds the cap.
AlphaSet bellman_backup(const Qomdp& m, const AlphaSet& v,
                        std::uint64_t cross_sum_cap = k_cross_sum_cap);

// Removes exact duplicates and operators PSD-dominated (within tol) by a
// surviving operator. Sufficient-condition pruning: it never changes the
// represented value function beyond tolerance level.
AlphaSet prune_dominated(const AlphaSet& v, double tol = k_structural_tol);

// Hausdorff-style bound D(V, W) built from lambda_max of operator
// differences; upper-bounds sup_rho |V(rho) - W(rho)|, never below 0.
double value_distance(const AlphaSet& v, const AlphaSet& w);

struct ValueIterationResult {
  AlphaSet values;
  int iterations = 0;
  // Certified sup-norm distance to the fixed point: gamma/(1-gamma) times
  // the final value_distance; at most the requested epsilon.
  double bound = 0.0;
};

// Iterates V <- prune(backup(V)) from V0 = {0} until
// value_distance(V_{n+1}, V_n) <= (1-gamma) epsilon / gamma. Models with
// action rewards are reduced to state rewards first, so the returned set
// lives on the enlarged space.
ValueIterationResult value_iteration(const Qomdp& m, double epsilon,
                                     std::uint64_t cross_sum_cap = k_cross_sum_cap);

// Action tag of the argmax operator at rho (lowest index on ties).
std::string greedy_action(const StationaryPolicy& policy,
                          const DensityMatrix& rho);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int horizon = 0;
};

// Truncated-horizon Monte-Carlo estimate of the discounted return of the
// greedy policy from the initial state. The horizon is chosen so the
// truncation bias is at most 1e-8 at reward scale; deterministic given the
// seed. Requires a state-reward model.
McEstimate mc_policy_value(const Qomdp& m, const StationaryPolicy& policy,
                           int n_trajectories, std::uint64_t seed);

}  // namespace qomdp
