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
#include <optional>

#include "qomdp/classical.hpp"
#include "qomdp/transducers.hpp"

namespace qomdp {

struct SearchConfig {
  int max_len = 8;
  double tau = 0.0;
  // Pairs whose run probability is at or below this floor are treated as
  // unrealizable: skipped, never returned as witnesses.
  double branch_prob_floor = 1e-12;
  std::uint64_t node_cap = 10'000'000;
};

struct Witness {
  SymbolString alpha;
  // Present for non-occurrence witnesses only.
  std::optional<SymbolString> beta;
  double achieved = 0.0;
};

enum class SearchStatus {
  witness_found,
  exhausted,
  node_cap_reached,
};

struct SearchResult {
  SearchStatus status = SearchStatus::exhausted;
  std::optional<Witness> witness;
  int max_len_searched = 0;
  std::uint64_t nodes_expanded = 0;
  // Nodes pending at the moment the cap was hit (0 otherwise).
  std::uint64_t frontier_size = 0;
  // Non-occurrence searches only range over realizable pairs.
  bool restricted_to_realizable = false;
};

// Breadth-first search for the shortest action string alpha (lexicographic
// within a length) with Acc_M(alpha) >= tau - 1e-12. Never claims
// nonexistence: an exhausted result only covers lengths up to max_len.
SearchResult search_reachability(const QuantumMooreMachine& m,
                                 const SearchConfig& config);

// Breadth-first search for the shortest realizable pair (alpha, beta) with
// Acc_M(alpha, beta) <= tau + 1e-12. Pairs with run probability at or below
// the configured floor are skipped and reported via
// restricted_to_realizable.
SearchResult search_nonoccurrence(const QuantumMooreMachine& m,
                                  const SearchConfig& config);

// Classical conveniences: search on the quantum embedding. Reachability
// requires a goal state.
SearchResult search_reachability(const ClassicalMoore& m,
                                 const SearchConfig& config);
SearchResult search_nonoccurrence(const ClassicalMoore& m,
                                  const SearchConfig& config);

}  // namespace qomdp
