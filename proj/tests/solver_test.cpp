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

#include <cmath>

#include "doctest.h"
#include "qomdp/bloch.hpp"
#include "qomdp/classical.hpp"
#include "qomdp/random.hpp"
#include "support/oracles.hpp"

using namespace qomdp;

namespace {

// Single action, single output, unitary dynamics, unit reward: the value is
// the plain geometric series 1 / (1 - gamma).
Qomdp geometric_anchor(double discount) {
  std::vector<Channel> channels;
  channels.emplace_back(make_kraus_map({rotation_x(1.0)}));
  Instrument omega({"b"}, {make_kraus_map({ComplexMatrix::Identity(2, 2)})});
  return Qomdp(ConditionalChannel({"a"}, std::move(channels)), std::move(omega),
               ComplexMatrix::Identity(2, 2), discount,
               DensityMatrix(ket_bra(0, 0, 2)));
}

Qomdp zero_reward_qomdp(double discount, Rng& rng) {
  auto transition = random_conditional_channel(2, {"a0", "a1"}, 2, rng);
  auto output = random_instrument(2, {"b0", "b1"}, 1, rng);
  return Qomdp(std::move(transition), std::move(output),
               ComplexMatrix::Zero(2, 2), discount,
               random_density_matrix(2, rng));
}

// Expected discounted reward stream under a fixed action sequence, computed
// exactly on the output-averaged state. For per-action rewards the step-0
// term uses the first declared action and later terms collect the reward of
// the executed action on the post-transition state.
double exact_stream(const Qomdp& m, const std::vector<std::size_t>& actions) {
  ComplexMatrix rho = m.initial_state().mat();
  double total = 0.0;
  double discount_pow = 1.0;
  std::size_t entering = 0;
  for (std::size_t t = 0; t <= actions.size(); ++t) {
    const ComplexMatrix& reward =
        m.has_state_reward() ? m.state_reward() : m.action_reward(entering);
    total += discount_pow * hs_inner(reward, rho);
    if (t == actions.size()) break;
    const std::size_t a = actions[t];
    ComplexMatrix after = apply_cp(m.transition().channel(a).kraus_map(), rho);
    ComplexMatrix next = ComplexMatrix::Zero(m.dim(), m.dim());
    for (std::size_t b = 0; b < m.output().n_outcomes(); ++b) {
      next += apply_cp(m.output().branch(b), after);
    }
    rho = std::move(next);
    entering = a;
    discount_pow *= m.discount();
  }
  return total;
}

DensityMatrix vertex(Eigen::Index i, Eigen::Index dim) {
  return DensityMatrix(ket_bra(i, i, dim));
}

}  // namespace

TEST_CASE("reduce_to_state_reward keeps a unary-action process intact") {
  Rng rng(113);
  std::vector<Channel> channels{random_channel(2, 2, rng)};
  Instrument omega = random_instrument(2, {"b0", "b1"}, 1, rng);
  std::vector<ComplexMatrix> rewards{random_hermitian(2, rng)};
  Qomdp m(ConditionalChannel({"a"}, std::move(channels)), std::move(omega),
          rewards, 0.5, random_density_matrix(2, rng));
  const Qomdp reduced = reduce_to_state_reward(m);
  CHECK(reduced.dim() == 2);
  CHECK(reduced.has_state_reward());
  CHECK(max_abs_entry(reduced.state_reward() - rewards[0]) <= 1e-12);

  CHECK_THROWS_AS(reduce_to_state_reward(reduced), std::invalid_argument);
}

TEST_CASE("reduce_to_state_reward of zero rewards is worthless everywhere") {
  Rng rng(127);
  auto transition = random_conditional_channel(2, {"a0", "a1"}, 2, rng);
  auto output = random_instrument(2, {"b0", "b1"}, 1, rng);
  std::vector<ComplexMatrix> zeros(2, ComplexMatrix::Zero(2, 2));
  Qomdp m(std::move(transition), std::move(output), zeros, 0.9,
          random_density_matrix(2, rng));
  const Qomdp reduced = reduce_to_state_reward(m);
  CHECK(reduced.state_reward().isZero());
  const auto solved = value_iteration(reduced, 1e-6);
  Rng probe_rng(1);
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(value_at(solved.values, random_probe_state(4, probe_rng)).value) <=
          1e-9);
  }
}

TEST_CASE("reduce_to_state_reward preserves the discounted reward stream") {
  Rng rng(131);
  for (int trial = 0; trial < 10; ++trial) {
    const Qomdp m =
        random_qomdp(2, {"a0", "a1"}, {"b0", "b1"}, 0.5, rng, false);
    const Qomdp reduced = reduce_to_state_reward(m);
    CHECK(reduced.dim() == 4);
    CHECK(std::abs(reduced.initial_state().mat().trace().real() - 1.0) <= 1e-10);

    std::uniform_int_distribution<std::size_t> pick(0, 1);
    std::vector<std::size_t> actions;
    for (int t = 0; t < 25; ++t) actions.push_back(pick(rng));
    CHECK(exact_stream(m, actions) ==
          doctest::Approx(exact_stream(reduced, actions))
              .epsilon(0).scale(1).margin(1e-9));
  }
}

TEST_CASE("value_at maximizes the Hilbert-Schmidt inner product") {
  Rng rng(137);
  const DensityMatrix rho = random_density_matrix(2, rng);

  const AlphaSet zero({ComplexMatrix::Zero(2, 2)}, {""});
  CHECK(value_at(zero, rho).value == doctest::Approx(0.0));

  const AlphaSet pair({ComplexMatrix::Identity(2, 2),
                       2.0 * ComplexMatrix::Identity(2, 2)},
                      {"a0", "a1"});
  const auto best = value_at(pair, rho);
  CHECK(best.value == doctest::Approx(2.0));
  CHECK(best.argmax == 1);

  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ComplexMatrix> ops;
    std::vector<std::string> tags;
    for (int i = 0; i < 5; ++i) {
      ops.push_back(random_hermitian(3, rng));
      tags.push_back("a");
    }
    const AlphaSet v(ops, tags);
    const DensityMatrix probe = random_probe_state(3, rng);
    double expected = -1e300;
    for (const auto& op : ops) {
      expected = std::max(expected,
                          oracles::hs_inner_bruteforce(op, probe.mat()).real());
    }
    CHECK(value_at(v, probe).value ==
          doctest::Approx(expected).epsilon(0).scale(1).margin(1e-10));
  }
}

TEST_CASE("value_at ties break toward the lowest index") {
  const AlphaSet tied({pauli_z(), pauli_z()}, {"a0", "a1"});
  Rng rng(139);
  CHECK(value_at(tied, random_density_matrix(2, rng)).argmax == 0);
}

TEST_CASE("bellman_backup of the zero set is the reward") {
  Rng rng(149);
  const Qomdp m = random_qomdp(2, {"a0", "a1"}, {"b0", "b1"}, 0.9, rng);
  const AlphaSet seed({ComplexMatrix::Zero(2, 2)}, {""});
  const AlphaSet backed = bellman_backup(m, seed);
  REQUIRE(backed.size() == 1);
  CHECK(max_abs_entry(backed.op(0) - m.state_reward()) <= 1e-12);
}

TEST_CASE("bellman_backup with zero discount is myopic") {
  Rng rng(151);
  auto transition = random_conditional_channel(2, {"a0", "a1"}, 2, rng);
  auto output = random_instrument(2, {"b0", "b1"}, 1, rng);
  const ComplexMatrix reward = random_hermitian(2, rng);
  Qomdp m(std::move(transition), std::move(output), reward, 0.0,
          random_density_matrix(2, rng));
  const AlphaSet backed =
      bellman_backup(m, AlphaSet({random_hermitian(2, rng)}, {"a0"}));
  REQUIRE(backed.size() == 1);
  CHECK(max_abs_entry(backed.op(0) - reward) <= 1e-12);
}

TEST_CASE("bellman_backup matches the direct Bellman evaluation") {
  Rng rng(157);
  for (int trial = 0; trial < 3; ++trial) {
    const Qomdp m = random_qomdp(2, {"a0", "a1"}, {"b0", "b1"}, 0.9, rng);
    std::vector<ComplexMatrix> ops;
    std::vector<std::string> tags;
    for (int i = 0; i < 3; ++i) {
      ops.push_back(random_hermitian(2, rng));
      tags.push_back("a0");
    }
    const AlphaSet v(ops, tags);
    const AlphaSet backed = bellman_backup(m, v);
    for (int probe = 0; probe < 100; ++probe) {
      const DensityMatrix rho = random_probe_state(2, rng);
      double direct = -1e300;
      for (std::size_t a = 0; a < 2; ++a) {
        double future = 0.0;
        const ComplexMatrix after =
            apply_cp(m.transition().channel(a).kraus_map(), rho.mat());
        for (std::size_t b = 0; b < 2; ++b) {
          const ComplexMatrix branch = apply_cp(m.output().branch(b), after);
          const double p = branch.trace().real();
          if (p <= k_branch_floor) continue;
          future += p * value_at(v, DensityMatrix(branch / p)).value;
        }
        direct = std::max(direct, hs_inner(m.state_reward(), rho.mat()) +
                                      m.discount() * future);
      }
      CHECK(value_at(backed, rho).value ==
            doctest::Approx(direct).epsilon(0).scale(1).margin(1e-8));
    }
  }
}

TEST_CASE("bellman_backup refuses oversized cross sums") {
  Rng rng(163);
  const Qomdp m = random_qomdp(2, {"a0", "a1"}, {"b0", "b1"}, 0.9, rng);
  std::vector<ComplexMatrix> ops;
  std::vector<std::string> tags;
  for (int i = 0; i < 10; ++i) {
    ops.push_back(random_hermitian(2, rng));
    tags.push_back("a0");
  }
  CHECK_THROWS_AS(bellman_backup(m, AlphaSet(ops, tags), 100),
                  CapExceededError);
}

TEST_CASE("prune_dominated removes PSD-dominated and duplicate operators") {
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  const AlphaSet dominated({id, 2.0 * id}, {"a0", "a1"});
  const AlphaSet pruned = prune_dominated(dominated);
  REQUIRE(pruned.size() == 1);
  CHECK(pruned.op(0).isApprox(2.0 * id));
  CHECK(pruned.tag(0) == "a1");

  const AlphaSet indefinite({pauli_z(), -pauli_z()}, {"a0", "a1"});
  CHECK(prune_dominated(indefinite).size() == 2);

  const AlphaSet tied({pauli_z(), pauli_z(), pauli_z()}, {"x", "y", "z"});
  const AlphaSet deduped = prune_dominated(tied);
  REQUIRE(deduped.size() == 1);
  CHECK(deduped.tag(0) == "x");
}

TEST_CASE("prune_dominated never changes the represented value function") {
  Rng rng(167);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<ComplexMatrix> ops;
    std::vector<std::string> tags;
    for (int i = 0; i < 8; ++i) {
      ops.push_back(random_hermitian(2, rng));
      tags.push_back("a");
    }
    // Plant guaranteed dominations.
    ops.push_back(ops[0] - 0.5 * ComplexMatrix::Identity(2, 2));
    tags.push_back("a");
    ops.push_back(ops[1]);
    tags.push_back("a");
    const AlphaSet v(ops, tags);
    const AlphaSet pruned = prune_dominated(v);
    CHECK(pruned.size() <= v.size());
    for (int probe = 0; probe < 1000; ++probe) {
      const DensityMatrix rho = random_probe_state(2, rng);
      CHECK(std::abs(value_at(v, rho).value - value_at(pruned, rho).value) <=
            1e-9);
    }
  }
}

TEST_CASE("value_distance bounds the sup difference of the value functions") {
  Rng rng(173);
  const AlphaSet zero({ComplexMatrix::Zero(2, 2)}, {"a"});
  const AlphaSet one({ComplexMatrix::Identity(2, 2)}, {"a"});
  CHECK(value_distance(zero, zero) == doctest::Approx(0.0));
  CHECK(value_distance(zero, one) == doctest::Approx(1.0));
  CHECK(value_distance(one, zero) == doctest::Approx(1.0));

  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ComplexMatrix> a_ops, b_ops;
    std::vector<std::string> a_tags, b_tags;
    for (int i = 0; i < 4; ++i) {
      a_ops.push_back(random_hermitian(3, rng));
      a_tags.push_back("a");
      b_ops.push_back(random_hermitian(3, rng));
      b_tags.push_back("a");
    }
    const AlphaSet v(a_ops, a_tags);
    const AlphaSet w(b_ops, b_tags);
    const double d = value_distance(v, w);
    CHECK(d >= 0.0);
    for (int probe = 0; probe < 1000; ++probe) {
      const DensityMatrix rho = random_probe_state(3, rng);
      CHECK(std::abs(value_at(v, rho).value - value_at(w, rho).value) <=
            d + 1e-9);
    }
  }
}

TEST_CASE("value_iteration is immediate for zero rewards") {
  Rng rng(179);
  const auto result = value_iteration(zero_reward_qomdp(0.9, rng), 1e-3);
  CHECK(result.iterations == 1);
  CHECK(result.bound <= 1e-3);
  CHECK(value_at(result.values, random_density_matrix(2, rng)).value ==
        doctest::Approx(0.0));
}

TEST_CASE("value_iteration solves the geometric series anchor") {
  const Qomdp m = geometric_anchor(0.5);
  const auto result = value_iteration(m, 1e-4);
  CHECK(result.bound <= 1e-4);
  Rng rng(181);
  for (int probe = 0; probe < 5; ++probe) {
    CHECK(value_at(result.values, random_density_matrix(2, rng)).value ==
          doctest::Approx(2.0).epsilon(0).scale(1).margin(1e-4));
  }
}

TEST_CASE("value_iteration matches tabular value iteration on embedded MDPs") {
  Rng rng(191);
  for (int trial = 0; trial < 3; ++trial) {
    const ClassicalPomdp mdp = random_classical_mdp(2, 2, 0.9, rng);
    const Qomdp q = embed_as_qomdp(mdp);
    const double epsilon = 1e-4;
    const auto result = value_iteration(q, epsilon);
    std::vector<Eigen::MatrixXd> transitions{mdp.moore().transition(0),
                                             mdp.moore().transition(1)};
    const auto tabular = oracles::tabular_value_iteration(
        transitions, mdp.rewards(), mdp.discount());
    const StationaryPolicy policy(result.values);
    for (Eigen::Index s = 0; s < 2; ++s) {
      const DensityMatrix state = vertex(s, 2);
      CHECK(value_at(result.values, state).value ==
            doctest::Approx(tabular.values(s)).epsilon(0).scale(1).margin(2 * epsilon));
      if (tabular.action_gap(s) > 10 * epsilon) {
        CHECK(greedy_action(policy, state) ==
              mdp.moore().input_alphabet()[tabular.greedy[static_cast<std::size_t>(s)]]);
      }
    }
  }
}

TEST_CASE("value_iteration auto-reduces per-action rewards") {
  Rng rng(193);
  const Qomdp m = random_qomdp(2, {"a0", "a1"}, {"b0", "b1"}, 0.5, rng, false);
  const auto result = value_iteration(m, 1e-3);
  CHECK(result.values.dim() == 4);
  CHECK(result.bound <= 1e-3);
}

TEST_CASE("the iteration obeys contraction, convexity, boundedness and monotonicity") {
  Rng rng(197);
  const Eigen::Index dim = 2;
  for (int trial = 0; trial < 3; ++trial) {
    auto transition = random_conditional_channel(dim, {"a0", "a1"}, 2, rng);
    auto output = random_instrument(dim, {"b0", "b1"}, 1, rng);
    ComplexMatrix reward = random_hermitian(dim, rng);
    // Shift the reward PSD so the iterates grow from below.
    reward += (std::abs(lambda_min(reward)) + 0.1) *
              ComplexMatrix::Identity(dim, dim);
    const double gamma = 0.9;
    Qomdp m(std::move(transition), std::move(output), reward, gamma,
            random_density_matrix(dim, rng));

    const double value_cap = lambda_abs_max(reward) * dim / (1.0 - gamma);
    std::vector<DensityMatrix> probes;
    for (int i = 0; i < 50; ++i) probes.push_back(random_probe_state(dim, rng));

    AlphaSet v({ComplexMatrix::Zero(dim, dim)}, {std::string()});
    std::vector<double> previous_values(probes.size(), -1e300);
    double previous_step = -1.0;
    const double threshold = (1.0 - gamma) * 1e-3 / gamma;
    for (int iter = 0; iter < 200; ++iter) {
      const AlphaSet next = bellman_backup(m, v);
      const double step = value_distance(next, v);
      if (previous_step >= 0.0) {
        CHECK(step <= gamma * previous_step + 1e-9);
      }
      for (std::size_t p = 0; p < probes.size(); ++p) {
        const double value = value_at(next, probes[p]).value;
        CHECK(value >= previous_values[p] - 1e-9);
        CHECK(std::abs(value) <= value_cap + 1e-9);
        previous_values[p] = value;
      }
      // Convexity of the represented function.
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (int c = 0; c < 20; ++c) {
        const DensityMatrix rho1 = random_probe_state(dim, rng);
        const DensityMatrix rho2 = random_probe_state(dim, rng);
        const double lambda = unit(rng);
        const DensityMatrix mix(lambda * rho1.mat() +
                                (1.0 - lambda) * rho2.mat());
        CHECK(value_at(next, mix).value <=
              lambda * value_at(next, rho1).value +
                  (1.0 - lambda) * value_at(next, rho2).value + 1e-9);
      }
      previous_step = step;
      v = next;
      if (step <= threshold) break;
    }
    CHECK(previous_step <= threshold);
  }
}

TEST_CASE("greedy_action picks the tagged argmax") {
  Rng rng(199);
  const Qomdp single = geometric_anchor(0.5);
  const auto solved = value_iteration(single, 1e-3);
  const StationaryPolicy policy(solved.values);
  CHECK(greedy_action(policy, random_density_matrix(2, rng)) == "a");

  // A pointwise-dominant reward pins the greedy action everywhere.
  const ComplexMatrix strong = 3.0 * ComplexMatrix::Identity(2, 2);
  const ComplexMatrix weak = ComplexMatrix::Identity(2, 2);
  const StationaryPolicy dominant(AlphaSet({weak, strong}, {"a0", "a1"}));
  for (int probe = 0; probe < 10; ++probe) {
    CHECK(greedy_action(dominant, random_density_matrix(2, rng)) == "a1");
  }

  CHECK_THROWS_AS(StationaryPolicy(AlphaSet({weak}, {std::string()})),
                  ValidationError);
}

TEST_CASE("mc_policy_value is zero for zero rewards") {
  Rng rng(211);
  const Qomdp m = zero_reward_qomdp(0.9, rng);
  const StationaryPolicy policy(
      AlphaSet({ComplexMatrix::Identity(2, 2)}, {"a0"}));
  const auto estimate = mc_policy_value(m, policy, 100, 42);
  CHECK(estimate.mean == 0.0);
  CHECK(estimate.std_error == 0.0);
}

TEST_CASE("mc_policy_value reproduces the geometric series") {
  const Qomdp m = geometric_anchor(0.5);
  const auto solved = value_iteration(m, 1e-4);
  const auto estimate = mc_policy_value(m, StationaryPolicy(solved.values),
                                        200, 7);
  // The reward stream is deterministic, so the spread collapses.
  CHECK(estimate.std_error <= 1e-12);
  CHECK(estimate.mean == doctest::Approx(2.0).epsilon(0).scale(1).margin(1e-6));
}

TEST_CASE("mc_policy_value is deterministic given the seed") {
  Rng rng(223);
  const ClassicalPomdp mdp = random_classical_mdp(2, 2, 0.9, rng);
  const Qomdp q = embed_as_qomdp(mdp);
  const auto solved = value_iteration(q, 1e-3);
  const StationaryPolicy policy(solved.values);
  const auto first = mc_policy_value(q, policy, 500, 99);
  const auto second = mc_policy_value(q, policy, 500, 99);
  CHECK(first.mean == second.mean);
  CHECK(first.std_error == second.std_error);
}

TEST_CASE("mc_policy_value agrees with the solved value at the initial state") {
  Rng rng(227);
  for (int trial = 0; trial < 2; ++trial) {
    const ClassicalPomdp mdp = random_classical_mdp(2, 2, 0.9, rng);
    const Qomdp q = embed_as_qomdp(mdp);
    const double epsilon = 1e-3;
    const auto solved = value_iteration(q, epsilon);
    const StationaryPolicy policy(solved.values);
    const auto estimate = mc_policy_value(q, policy, 20000, 1234 + trial);
    const double reference = value_at(solved.values, q.initial_state()).value;
    CHECK(std::abs(estimate.mean - reference) <=
          3.0 * estimate.std_error + epsilon);
  }
}
