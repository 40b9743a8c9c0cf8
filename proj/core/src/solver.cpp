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

#include "qomdp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qomdp {

namespace {

ComplexMatrix symmetrized(const ComplexMatrix& a) {
  return 0.5 * (a + a.adjoint());
}

void check_reward_operator(const ComplexMatrix& r, Eigen::Index dim,
                           const std::string& name) {
  if (!is_square_finite(r) || r.rows() != dim) {
    throw ValidationError("Qomdp: " + name + " must be a finite " +
                          std::to_string(dim) + "x" + std::to_string(dim) +
                          " matrix");
  }
  if (!is_hermitian(r)) {
    throw ValidationError("Qomdp: " + name + " must be Hermitian");
  }
}

}  // namespace

Qomdp::Qomdp(ConditionalChannel transition, Instrument output, Rewards rewards,
             double discount, DensityMatrix initial_state)
    : transition_(std::move(transition)),
      output_(std::move(output)),
      rewards_(std::move(rewards)),
      discount_(discount),
      initial_state_(std::move(initial_state)) {
  if (output_.dim() != transition_.dim() ||
      initial_state_.dim() != transition_.dim()) {
    throw ValidationError("Qomdp: components must share one dimension");
  }
  if (!(discount_ >= 0.0 && discount_ < 1.0)) {
    throw ValidationError("Qomdp: discount must lie in [0, 1)");
  }
  if (has_state_reward()) {
    check_reward_operator(std::get<ComplexMatrix>(rewards_), dim(),
                          "state reward");
  } else {
    const auto& per_action = std::get<std::vector<ComplexMatrix>>(rewards_);
    if (per_action.size() != transition_.n_actions()) {
      throw ValidationError("Qomdp: one reward operator per action required");
    }
    for (std::size_t a = 0; a < per_action.size(); ++a) {
      check_reward_operator(per_action[a], dim(),
                            "reward for action '" + input_alphabet()[a] + "'");
    }
  }
}

bool Qomdp::has_state_reward() const {
  return std::holds_alternative<ComplexMatrix>(rewards_);
}

const ComplexMatrix& Qomdp::state_reward() const {
  if (!has_state_reward()) {
    throw std::logic_error("Qomdp: model carries per-action rewards");
  }
  return std::get<ComplexMatrix>(rewards_);
}

const ComplexMatrix& Qomdp::action_reward(std::size_t a) const {
  if (has_state_reward()) {
    throw std::logic_error("Qomdp: model carries a state reward");
  }
  return std::get<std::vector<ComplexMatrix>>(rewards_).at(a);
}

AlphaSet::AlphaSet(std::vector<ComplexMatrix> operators,
                   std::vector<std::string> action_tags)
    : operators_(std::move(operators)), tags_(std::move(action_tags)) {
  if (operators_.empty()) {
    throw ValidationError("AlphaSet: needs at least one operator");
  }
  if (tags_.size() != operators_.size()) {
    throw ValidationError("AlphaSet: one action tag per operator required");
  }
  const Eigen::Index d = operators_.front().rows();
  for (ComplexMatrix& op : operators_) {
    if (!is_square_finite(op) || op.rows() != d) {
      throw ValidationError("AlphaSet: operators must be finite square matrices of one dimension");
    }
    if (!is_hermitian(op)) {
      throw ValidationError("AlphaSet: operators must be Hermitian");
    }
    op = symmetrized(op);
  }
}

StationaryPolicy::StationaryPolicy(AlphaSet values)
    : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_.tag(i).empty()) {
      throw ValidationError("StationaryPolicy: every operator needs an action tag");
    }
  }
}

Qomdp reduce_to_state_reward(const Qomdp& m) {
  if (m.has_state_reward()) {
    throw std::invalid_argument("reduce_to_state_reward: model already has a state reward");
  }
  const Eigen::Index d = m.dim();
  const auto n_actions = static_cast<Eigen::Index>(m.input_alphabet().size());
  const ComplexMatrix tag_id = ComplexMatrix::Identity(n_actions, n_actions);

  // Phi'_a = Phi_a on the state factor, replacement-to-|a><a| on the tag.
  std::vector<Channel> channels;
  for (Eigen::Index a = 0; a < n_actions; ++a) {
    std::vector<ComplexMatrix> ops;
    for (const ComplexMatrix& k :
         m.transition().channel(static_cast<std::size_t>(a)).kraus_map().kraus) {
      for (Eigen::Index c = 0; c < n_actions; ++c) {
        ops.push_back(tensor(k, ket_bra(a, c, n_actions)));
      }
    }
    channels.emplace_back(make_kraus_map(std::move(ops)));
  }

  std::vector<KrausMap> branches;
  for (std::size_t b = 0; b < m.output_alphabet().size(); ++b) {
    std::vector<ComplexMatrix> ops;
    for (const ComplexMatrix& l : m.output().branch(b).kraus) {
      ops.push_back(tensor(l, tag_id));
    }
    branches.push_back(make_kraus_map(std::move(ops)));
  }

  ComplexMatrix reward = ComplexMatrix::Zero(d * n_actions, d * n_actions);
  for (Eigen::Index a = 0; a < n_actions; ++a) {
    reward += tensor(m.action_reward(static_cast<std::size_t>(a)),
                     ket_bra(a, a, n_actions));
  }

  return Qomdp(ConditionalChannel(m.input_alphabet(), std::move(channels)),
               Instrument(m.output_alphabet(), std::move(branches)),
               std::move(reward), m.discount(),
               DensityMatrix(tensor(m.initial_state().mat(),
                                    ket_bra(0, 0, n_actions))));
}

ValueAtResult value_at(const AlphaSet& v, const DensityMatrix& rho) {
  if (rho.dim() != v.dim()) {
    throw std::invalid_argument("value_at: dimension mismatch");
  }
  ValueAtResult best{hs_inner(v.op(0), rho.mat()), 0};
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double value = hs_inner(v.op(i), rho.mat());
    if (value > best.value) best = {value, i};
  }
  return best;
}

AlphaSet bellman_backup(const Qomdp& m, const AlphaSet& v,
                        std::uint64_t cross_sum_cap) {
  if (!m.has_state_reward()) {
    throw std::invalid_argument("bellman_backup: reduce the model to a state reward first");
  }
  if (v.dim() != m.dim()) {
    throw std::invalid_argument("bellman_backup: alpha set dimension mismatch");
  }
  const std::size_t n_actions = m.input_alphabet().size();
  const std::size_t n_outputs = m.output_alphabet().size();
  const std::size_t n_ops = v.size();
  const double gamma = m.discount();
  const ComplexMatrix& reward = m.state_reward();

  if (gamma == 0.0) {
    std::vector<ComplexMatrix> ops(n_actions, reward);
    std::vector<std::string> tags = m.input_alphabet();
    return prune_dominated(AlphaSet(std::move(ops), std::move(tags)));
  }

  std::uint64_t candidates = n_actions;
  for (std::size_t b = 0; b < n_outputs; ++b) {
    if (candidates > cross_sum_cap / std::max<std::size_t>(n_ops, 1)) {
      throw CapExceededError(
          "bellman_backup: cross-sum size " + std::to_string(n_actions) + "*" +
          std::to_string(n_ops) + "^" + std::to_string(n_outputs) +
          " exceeds cap " + std::to_string(cross_sum_cap) +
          "; prune harder or use fewer outputs");
    }
    candidates *= n_ops;
  }
  if (candidates > cross_sum_cap) {
    throw CapExceededError("bellman_backup: cross-sum exceeds cap " +
                           std::to_string(cross_sum_cap));
  }

  // dual[a][b][c] = (Omega_b o Phi_a)^dag applied to the c-th alpha operator,
  // so that <dual[a][b][c], rho> = <R_c, Omega_b(Phi_a(rho))>.
  std::vector<std::vector<std::vector<ComplexMatrix>>> dual(n_actions);
  for (std::size_t a = 0; a < n_actions; ++a) {
    dual[a].resize(n_outputs);
    for (std::size_t b = 0; b < n_outputs; ++b) {
      for (std::size_t c = 0; c < n_ops; ++c) {
        dual[a][b].push_back(adjoint_apply_cp(
            m.transition().channel(a).kraus_map(),
            adjoint_apply_cp(m.output().branch(b), v.op(c))));
      }
    }
  }

  std::vector<ComplexMatrix> ops;
  std::vector<std::string> tags;
  std::vector<std::size_t> assign(n_outputs, 0);
  for (std::size_t a = 0; a < n_actions; ++a) {
    std::fill(assign.begin(), assign.end(), 0);
    while (true) {
      ComplexMatrix candidate = reward;
      for (std::size_t b = 0; b < n_outputs; ++b) {
        candidate += gamma * dual[a][b][assign[b]];
      }
      ops.push_back(symmetrized(candidate));
      tags.push_back(m.input_alphabet()[a]);
      std::size_t k = 0;
      while (k < n_outputs && ++assign[k] == n_ops) assign[k++] = 0;
      if (k == n_outputs) break;
    }
  }
  return prune_dominated(AlphaSet(std::move(ops), std::move(tags)));
}

AlphaSet prune_dominated(const AlphaSet& v, double tol) {
  const std::size_t n = v.size();
  std::vector<bool> removed(n, false);
  // Cache of pairwise PSD-dominance decisions: dom(j, i) iff op_j - op_i is
  // PSD within tol.
  const auto dominates = [&](std::size_t j, std::size_t i) {
    return lambda_min(v.op(j) - v.op(i)) >= -tol;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n && !removed[i]; ++j) {
      if (j == i || removed[j]) continue;
      if (!dominates(j, i)) continue;
      // Mutual dominance means near-equality; keep the lowest index.
      if (dominates(i, j) && i < j) continue;
      removed[i] = true;
    }
  }
  std::vector<ComplexMatrix> ops;
  std::vector<std::string> tags;
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) continue;
    ops.push_back(v.op(i));
    tags.push_back(v.tag(i));
  }
  if (ops.empty()) {
    ops.push_back(v.op(0));
    tags.push_back(v.tag(0));
  }
  return AlphaSet(std::move(ops), std::move(tags));
}

namespace {

double one_sided_distance(const AlphaSet& v, const AlphaSet& w) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < v.size(); ++c) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < w.size(); ++d) {
      best = std::min(best, lambda_max(v.op(c) - w.op(d)));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double value_distance(const AlphaSet& v, const AlphaSet& w) {
  if (v.dim() != w.dim()) {
    throw std::invalid_argument("value_distance: dimension mismatch");
  }
  return std::max(
      {one_sided_distance(v, w), one_sided_distance(w, v), 0.0});
}

ValueIterationResult value_iteration(const Qomdp& m, double epsilon,
                                     std::uint64_t cross_sum_cap) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("value_iteration: epsilon must be positive");
  }
  if (!m.has_state_reward()) {
    return value_iteration(reduce_to_state_reward(m), epsilon, cross_sum_cap);
  }
  const double gamma = m.discount();
  if (gamma == 0.0) {
    return ValueIterationResult{
        AlphaSet({symmetrized(m.state_reward())}, {m.input_alphabet().front()}),
        1, 0.0};
  }

  const double threshold = (1.0 - gamma) * epsilon / gamma;
  AlphaSet v(
      {ComplexMatrix::Zero(m.dim(), m.dim())}, {std::string()});
  double first_step = 0.0;
  // Halting is certified by the contraction; the margin over the geometric
  // iteration bound only guards against a numerical stall.
  long safety = std::numeric_limits<long>::max();
  for (int iter = 1;; ++iter) {
    AlphaSet next = bellman_backup(m, v, cross_sum_cap);
    const double step = value_distance(next, v);
    v = std::move(next);
    if (step <= threshold) {
      return ValueIterationResult{std::move(v), iter,
                                  gamma * step / (1.0 - gamma)};
    }
    if (iter == 1) {
      first_step = step;
      safety = static_cast<long>(
                   std::ceil(std::log(threshold / first_step) / std::log(gamma))) +
               64;
    }
    if (iter > safety) {
      throw std::runtime_error(
          "value_iteration: exceeded the geometric iteration bound; "
          "distance stalled at " + std::to_string(step));
    }
  }
}

std::string greedy_action(const StationaryPolicy& policy,
                          const DensityMatrix& rho) {
  return policy.values().tag(value_at(policy.values(), rho).argmax);
}

McEstimate mc_policy_value(const Qomdp& m, const StationaryPolicy& policy,
                           int n_trajectories, std::uint64_t seed) {
  if (!m.has_state_reward()) {
    throw std::invalid_argument("mc_policy_value: reduce the model to a state reward first");
  }
  if (n_trajectories < 1) {
    throw std::invalid_argument("mc_policy_value: need at least one trajectory");
  }
  if (policy.values().dim() != m.dim()) {
    throw std::invalid_argument("mc_policy_value: policy dimension mismatch");
  }
  const double gamma = m.discount();
  const ComplexMatrix& reward = m.state_reward();
  const double reward_scale = lambda_abs_max(reward);

  McEstimate estimate;
  if (reward_scale == 0.0) return estimate;
  int horizon = 1;
  if (gamma > 0.0) {
    horizon = std::max<int>(
        1, static_cast<int>(std::ceil(
               std::log(1e-8 * (1.0 - gamma) / reward_scale) / std::log(gamma))));
  }
  estimate.horizon = horizon;

  const std::size_t n_outputs = m.output_alphabet().size();
  // POVM elements of the instrument: p(b) = <povm_b, tau>.
  std::vector<ComplexMatrix> povm;
  for (std::size_t b = 0; b < n_outputs; ++b) {
    povm.push_back(adjoint_apply_cp(m.output().branch(b),
                                    ComplexMatrix::Identity(m.dim(), m.dim())));
  }

  const AlphaSet& values = policy.values();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> probs(n_outputs);

  double sum = 0.0, sum_sq = 0.0;
  for (int traj = 0; traj < n_trajectories; ++traj) {
    ComplexMatrix state = m.initial_state().mat();
    double total = 0.0;
    double discount_pow = 1.0;
    for (int t = 0; t < horizon; ++t) {
      total += discount_pow * hs_inner(reward, state);
      std::size_t best = 0;
      double best_value = hs_inner(values.op(0), state);
      for (std::size_t i = 1; i < values.size(); ++i) {
        const double value = hs_inner(values.op(i), state);
        if (value > best_value) {
          best_value = value;
          best = i;
        }
      }
      const std::size_t a = m.transition().action_index(values.tag(best));
      const ComplexMatrix after =
          apply_cp(m.transition().channel(a).kraus_map(), state);
      // Sub-floor branches are excluded from sampling; rounding in the
      // cumulative draw falls back to the last live branch.
      std::size_t picked = n_outputs;
      double draw = unit(rng);
      for (std::size_t b = 0; b < n_outputs; ++b) {
        probs[b] = hs_inner(povm[b], after);
        if (probs[b] <= k_branch_floor) continue;
        picked = b;
        if (draw < probs[b]) break;
        draw -= probs[b];
      }
      if (picked == n_outputs) break;
      state = apply_cp(m.output().branch(picked), after) / probs[picked];
      discount_pow *= gamma;
    }
    sum += total;
    sum_sq += total * total;
  }
  const double n = static_cast<double>(n_trajectories);
  estimate.mean = sum / n;
  if (n_trajectories > 1) {
    const double variance =
        std::max(0.0, (sum_sq - n * estimate.mean * estimate.mean) / (n - 1.0));
    estimate.std_error = std::sqrt(variance / n);
  }
  return estimate;
}

}  // namespace qomdp
