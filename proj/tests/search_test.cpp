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

#include "qomdp/search.hpp"

#include "doctest.h"
#include "qomdp/random.hpp"
#include "support/oracles.hpp"

using namespace qomdp;

namespace {

QuantumMooreMachine with_projection(const QuantumMooreMachine& m,
                                    ComplexMatrix pi) {
  return QuantumMooreMachine(m.transition(), m.output(), m.initial_state(),
                             std::move(pi));
}

// Three-state chain with an absorbing goal two "go" steps away.
ClassicalMoore two_step_goal_machine() {
  Eigen::MatrixXd go = Eigen::MatrixXd::Zero(3, 3);
  go(1, 0) = 1.0;
  go(2, 1) = 1.0;
  go(2, 2) = 1.0;
  Eigen::MatrixXd stay = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd emissions = Eigen::MatrixXd::Ones(1, 3);
  Eigen::VectorXd initial(3);
  initial << 1.0, 0.0, 0.0;
  return ClassicalMoore({"s0", "s1", "g"}, {"go", "stay"}, {"tick"}, {go, stay},
                        emissions, initial, "g");
}

}  // namespace

TEST_CASE("reachability with a full projection is witnessed by the empty string") {
  Rng rng(229);
  const auto m = with_projection(
      random_moore_machine(2, {"a0", "a1"}, {"b0", "b1"}, rng),
      ComplexMatrix::Identity(2, 2));
  SearchConfig config;
  config.tau = 1.0;
  config.max_len = 3;
  const auto result = search_reachability(m, config);
  REQUIRE(result.status == SearchStatus::witness_found);
  CHECK(result.witness->alpha.empty());
  CHECK(result.witness->achieved == doctest::Approx(1.0));
  CHECK(result.nodes_expanded == 1);
}

TEST_CASE("reachability with a zero projection exhausts every length") {
  Rng rng(233);
  const auto m = with_projection(
      random_moore_machine(2, {"a0", "a1"}, {"b0", "b1"}, rng),
      ComplexMatrix::Zero(2, 2));
  SearchConfig config;
  config.tau = 0.5;
  config.max_len = 4;
  const auto result = search_reachability(m, config);
  CHECK(result.status == SearchStatus::exhausted);
  CHECK(result.max_len_searched == 4);
  CHECK_FALSE(result.witness.has_value());
}

TEST_CASE("a known two-step plan is found as a shortest witness") {
  const ClassicalMoore m = two_step_goal_machine();
  SearchConfig config;
  config.tau = 1.0;
  config.max_len = 4;
  const auto result = search_reachability(m, config);
  REQUIRE(result.status == SearchStatus::witness_found);
  REQUIRE(result.witness->alpha.size() == 2);
  CHECK(result.witness->alpha == SymbolString{"go", "go"});
  CHECK(result.witness->achieved == doctest::Approx(1.0));

  // The plan probability is confirmed by an independent belief filter.
  BeliefState belief(m.initial());
  for (int step = 0; step < 2; ++step) {
    const auto update = belief_update(m, belief, "go", "tick");
    REQUIRE(update.posterior.has_value());
    belief = *update.posterior;
  }
  CHECK(belief.probs()(2) == doctest::Approx(1.0));
}

TEST_CASE("witnesses re-verify through the acceptance operations") {
  Rng rng(239);
  int found = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_moore_machine(2, {"a0", "a1"}, {"b0", "b1"}, rng);
    SearchConfig config;
    config.tau = 0.4;
    config.max_len = 3;
    const auto result = search_reachability(m, config);
    if (result.status != SearchStatus::witness_found) continue;
    ++found;
    const double reproduced = acceptance_marginal(m, result.witness->alpha);
    CHECK(std::abs(reproduced - result.witness->achieved) <= 1e-10);
    CHECK(reproduced >= config.tau - 1e-12);
  }
  CHECK(found > 0);
}

TEST_CASE("search order is deterministic and monotone in the depth bound") {
  Rng rng(241);
  const auto m = random_moore_machine(2, {"a0", "a1"}, {"b0", "b1"}, rng);
  SearchConfig shallow;
  shallow.tau = 0.3;
  shallow.max_len = 2;
  SearchConfig deep = shallow;
  deep.max_len = 5;
  const auto first = search_reachability(m, shallow);
  const auto second = search_reachability(m, deep);
  if (first.status == SearchStatus::witness_found) {
    REQUIRE(second.status == SearchStatus::witness_found);
    CHECK(first.witness->alpha == second.witness->alpha);
    CHECK(first.witness->achieved == second.witness->achieved);
  }
}

TEST_CASE("non-occurrence accepts the empty pair under a zero projection") {
  Rng rng(251);
  const auto m = with_projection(
      random_moore_machine(2, {"a0", "a1"}, {"b0", "b1"}, rng),
      ComplexMatrix::Zero(2, 2));
  SearchConfig config;
  config.tau = 0.0;
  config.max_len = 3;
  const auto result = search_nonoccurrence(m, config);
  REQUIRE(result.status == SearchStatus::witness_found);
  CHECK(result.witness->alpha.empty());
  REQUIRE(result.witness->beta.has_value());
  CHECK(result.witness->beta->empty());
  CHECK(result.restricted_to_realizable);
}

TEST_CASE("non-occurrence under the full projection exhausts realizable pairs") {
  Rng rng(257);
  const auto m = with_projection(
      random_moore_machine(2, {"a0", "a1"}, {"b0", "b1"}, rng),
      ComplexMatrix::Identity(2, 2));
  SearchConfig config;
  config.tau = 0.9;
  config.max_len = 3;
  const auto result = search_nonoccurrence(m, config);
  CHECK(result.status == SearchStatus::exhausted);
}

TEST_CASE("non-occurrence witnesses re-verify and respect the floor") {
  Rng rng(263);
  int found = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_moore_machine(2, {"a0", "a1"}, {"b0", "b1"}, rng);
    SearchConfig config;
    config.tau = 0.2;
    config.max_len = 3;
    const auto result = search_nonoccurrence(m, config);
    if (result.status != SearchStatus::witness_found) continue;
    ++found;
    const auto& witness = *result.witness;
    const double reproduced = acceptance(m, witness.alpha, *witness.beta);
    CHECK(std::abs(reproduced - witness.achieved) <= 1e-10);
    const double run_probability =
        moore_run(m, witness.alpha, *witness.beta).probability;
    CHECK(run_probability > config.branch_prob_floor);
  }
  CHECK(found > 0);
}

TEST_CASE("the node cap aborts with a partial report") {
  Rng rng(269);
  const auto m = with_projection(
      random_moore_machine(2, {"a0", "a1"}, {"b0", "b1"}, rng),
      ComplexMatrix::Zero(2, 2));
  SearchConfig config;
  config.tau = 0.5;
  config.max_len = 10;
  config.node_cap = 20;
  const auto result = search_reachability(m, config);
  CHECK(result.status == SearchStatus::node_cap_reached);
  CHECK(result.nodes_expanded == 20);
  CHECK(result.frontier_size > 0);
}

TEST_CASE("classical searches validate their inputs") {
  Rng rng(271);
  const ClassicalMoore no_goal = random_classical_moore(3, 2, 2, rng);
  SearchConfig config;
  CHECK_THROWS_AS(search_reachability(no_goal, config), std::invalid_argument);

  config.tau = 1.5;
  const auto m = random_moore_machine(2, {"a0"}, {"b0", "b1"}, rng);
  CHECK_THROWS_AS(search_reachability(m, config), std::invalid_argument);
  config.tau = 0.5;
  config.max_len = -1;
  CHECK_THROWS_AS(search_reachability(m, config), std::invalid_argument);
}
