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

#include <cmath>

namespace qomdp {

namespace {

// Slack applied to the threshold comparisons, matching the acceptance
// tolerance of the underlying run operations.
constexpr double k_threshold_slack = 1e-12;

void check_config(const SearchConfig& config) {
  if (config.max_len < 0) {
    throw std::invalid_argument("search: max_len must be >= 0");
  }
  if (!(config.tau >= 0.0 && config.tau <= 1.0)) {
    throw std::invalid_argument("search: tau must lie in [0, 1]");
  }
  if (config.node_cap == 0) {
    throw std::invalid_argument("search: node_cap must be positive");
  }
  if (!(config.branch_prob_floor >= 0.0)) {
    throw std::invalid_argument("search: branch_prob_floor must be >= 0");
  }
}

// rho after one action with the output discarded (full instrument mixture);
// trace preserving.
ComplexMatrix mixture_step(const QuantumMooreMachine& m,
                           const ComplexMatrix& rho, std::size_t action) {
  const ComplexMatrix after =
      apply_cp(m.transition().channel(action).kraus_map(), rho);
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t b = 0; b < m.output().n_outcomes(); ++b) {
    out += apply_cp(m.output().branch(b), after);
  }
  return out;
}

std::uint64_t saturating_pow(std::uint64_t base, int exp) {
  std::uint64_t out = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && out > UINT64_MAX / base) return UINT64_MAX;
    out *= base;
  }
  return out;
}

struct ReachScan {
  const QuantumMooreMachine& m;
  const SearchConfig& config;
  SearchResult result;
  std::uint64_t level_evaluated = 0;
  std::vector<std::size_t> alpha;
  bool done = false;

  void evaluate(const ComplexMatrix& rho) {
    if (result.nodes_expanded >= config.node_cap) {
      result.status = SearchStatus::node_cap_reached;
      done = true;
      return;
    }
    ++result.nodes_expanded;
    ++level_evaluated;
    const double acc = (m.projection() * rho).trace().real();
    if (acc >= config.tau - k_threshold_slack) {
      Witness w;
      for (std::size_t a : alpha) w.alpha.push_back(m.input_alphabet()[a]);
      w.achieved = acc;
      result.status = SearchStatus::witness_found;
      result.witness = std::move(w);
      done = true;
    }
  }

  void scan(const ComplexMatrix& rho, int depth, int target) {
    if (done) return;
    if (depth == target) {
      evaluate(rho);
      return;
    }
    for (std::size_t a = 0; a < m.input_alphabet().size() && !done; ++a) {
      alpha.push_back(a);
      scan(mixture_step(m, rho, a), depth + 1, target);
      alpha.pop_back();
    }
  }
};

struct NonoccurScan {
  const QuantumMooreMachine& m;
  const SearchConfig& config;
  SearchResult result;
  std::uint64_t level_evaluated = 0;
  std::vector<std::size_t> alpha;
  std::vector<std::size_t> beta;
  bool done = false;

  void evaluate(const ComplexMatrix& sigma, double p) {
    if (result.nodes_expanded >= config.node_cap) {
      result.status = SearchStatus::node_cap_reached;
      done = true;
      return;
    }
    ++result.nodes_expanded;
    ++level_evaluated;
    const double acc = (m.projection() * sigma).trace().real() / p;
    if (acc <= config.tau + k_threshold_slack) {
      Witness w;
      w.beta.emplace();
      for (std::size_t a : alpha) w.alpha.push_back(m.input_alphabet()[a]);
      for (std::size_t b : beta) w.beta->push_back(m.output_alphabet()[b]);
      w.achieved = acc;
      result.status = SearchStatus::witness_found;
      result.witness = std::move(w);
      done = true;
    }
  }

  void scan(const ComplexMatrix& sigma, double p, int depth, int target) {
    if (done) return;
    if (depth == target) {
      evaluate(sigma, p);
      return;
    }
    for (std::size_t a = 0; a < m.input_alphabet().size() && !done; ++a) {
      const ComplexMatrix after =
          apply_cp(m.transition().channel(a).kraus_map(), sigma);
      for (std::size_t b = 0; b < m.output().n_outcomes() && !done; ++b) {
        ComplexMatrix child = apply_cp(m.output().branch(b), after);
        const double child_p = child.trace().real();
        // Unrealizable subtree: the trace never grows along a branch.
        if (child_p <= config.branch_prob_floor) continue;
        alpha.push_back(a);
        beta.push_back(b);
        scan(child, child_p, depth + 1, target);
        alpha.pop_back();
        beta.pop_back();
      }
    }
  }
};

}  // namespace

SearchResult search_reachability(const QuantumMooreMachine& m,
                                 const SearchConfig& config) {
  check_config(config);
  ReachScan scan{m, config, {}, 0, {}, false};
  scan.result.max_len_searched = config.max_len;
  for (int len = 0; len <= config.max_len && !scan.done; ++len) {
    scan.level_evaluated = 0;
    scan.scan(m.initial_state().mat(), 0, len);
    if (scan.result.status == SearchStatus::node_cap_reached) {
      scan.result.frontier_size =
          saturating_pow(m.input_alphabet().size(), len) - scan.level_evaluated;
      scan.result.max_len_searched = len;
    }
  }
  return scan.result;
}

SearchResult search_nonoccurrence(const QuantumMooreMachine& m,
                                  const SearchConfig& config) {
  check_config(config);
  NonoccurScan scan{m, config, {}, 0, {}, {}, false};
  scan.result.max_len_searched = config.max_len;
  scan.result.restricted_to_realizable = true;
  const std::uint64_t branching =
      static_cast<std::uint64_t>(m.input_alphabet().size()) *
      m.output_alphabet().size();
  for (int len = 0; len <= config.max_len && !scan.done; ++len) {
    scan.level_evaluated = 0;
    scan.scan(m.initial_state().mat(), 1.0, 0, len);
    if (scan.result.status == SearchStatus::node_cap_reached) {
      scan.result.frontier_size =
          saturating_pow(branching, len) - scan.level_evaluated;
      scan.result.max_len_searched = len;
    }
  }
  return scan.result;
}

SearchResult search_reachability(const ClassicalMoore& m,
                                 const SearchConfig& config) {
  if (!m.goal_index().has_value()) {
    throw std::invalid_argument(
        "search_reachability: classical machine needs a goal state");
  }
  return search_reachability(embed_as_quantum(m), config);
}

SearchResult search_nonoccurrence(const ClassicalMoore& m,
                                  const SearchConfig& config) {
  return search_nonoccurrence(embed_as_quantum(m), config);
}

}  // namespace qomdp
