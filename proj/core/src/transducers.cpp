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

#include "qomdp/transducers.hpp"

#include <algorithm>
#include <functional>

namespace qomdp {

namespace {

void check_projection(const ComplexMatrix& pi, Eigen::Index dim) {
  if (!is_square_finite(pi) || pi.rows() != dim) {
    throw ValidationError("projection: must be a finite square matrix of the machine dimension");
  }
  if (!is_hermitian(pi)) {
    throw ValidationError("projection: must be Hermitian");
  }
  const double idem = max_abs_entry(pi * pi - pi);
  if (idem > k_structural_tol) {
    throw ValidationError("projection: idempotence defect " +
                          std::to_string(idem) + " exceeds tolerance");
  }
}

void check_run_strings(const SymbolString& alpha, const SymbolString& beta) {
  if (alpha.size() != beta.size()) {
    throw std::invalid_argument("run: input and output strings must have equal length");
  }
}

// Unnormalized branch state after reading (alpha, beta); its trace is the
// run probability.
ComplexMatrix moore_branch_state(const QuantumMooreMachine& m,
                                 const SymbolString& alpha,
                                 const SymbolString& beta) {
  ComplexMatrix sigma = m.initial_state().mat();
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    sigma = apply_cp(m.transition().channel(alpha[i]).kraus_map(), sigma);
    sigma = apply_cp(m.output().branch(beta[i]), sigma);
  }
  return sigma;
}

ComplexMatrix mealy_branch_state(const QuantumMealyMachine& m,
                                 const SymbolString& alpha,
                                 const SymbolString& beta) {
  ComplexMatrix sigma = m.initial_state().mat();
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    sigma = apply_cp(m.instrument(alpha[i]).branch(beta[i]), sigma);
  }
  return sigma;
}

RunResult run_from_branch_state(const ComplexMatrix& sigma) {
  RunResult result;
  result.probability = sigma.trace().real();
  if (result.probability > k_branch_floor) {
    result.state = DensityMatrix(sigma / result.probability);
  }
  return result;
}

double acceptance_from_branch_state(const ComplexMatrix& sigma,
                                    const ComplexMatrix& pi) {
  const double p = sigma.trace().real();
  if (p <= k_branch_floor) return 0.0;
  return (pi * sigma).trace().real() / p;
}

void check_branch_cap(std::size_t n_outputs, std::size_t length,
                      std::uint64_t cap) {
  std::uint64_t branches = 1;
  for (std::size_t i = 0; i < length; ++i) {
    if (branches > cap / std::max<std::size_t>(n_outputs, 1)) {
      throw CapExceededError("enumeration over " + std::to_string(n_outputs) +
                             "^" + std::to_string(length) +
                             " output branches exceeds cap " +
                             std::to_string(cap));
    }
    branches *= n_outputs;
  }
  if (branches > cap) {
    throw CapExceededError("enumeration exceeds branch cap " +
                           std::to_string(cap));
  }
}

// Sums Tr(Pi sigma_beta) over all output branches beta of the given action
// string; equals sum_beta p(beta; alpha) Acc(alpha, beta). Zero-trace
// subtrees are pruned (CP branches never increase the trace).
double marginal_tree_sum(
    const ComplexMatrix& sigma, const SymbolString& alpha, std::size_t depth,
    const ComplexMatrix& pi,
    const std::function<ComplexMatrix(const ComplexMatrix&, std::size_t,
                                      std::size_t)>& branch_step,
    std::size_t n_outputs) {
  if (depth == alpha.size()) {
    const double p = sigma.trace().real();
    if (p <= k_branch_floor) return 0.0;
    return (pi * sigma).trace().real();
  }
  double total = 0.0;
  for (std::size_t b = 0; b < n_outputs; ++b) {
    ComplexMatrix child = branch_step(sigma, depth, b);
    if (child.trace().real() <= k_branch_floor) continue;
    total += marginal_tree_sum(child, alpha, depth + 1, pi, branch_step,
                               n_outputs);
  }
  return total;
}

}  // namespace

QuantumMooreMachine::QuantumMooreMachine(ConditionalChannel transition,
                                         Instrument output,
                                         DensityMatrix initial_state,
                                         ComplexMatrix accepting_projection)
    : transition_(std::move(transition)),
      output_(std::move(output)),
      initial_state_(std::move(initial_state)),
      projection_(std::move(accepting_projection)) {
  if (output_.dim() != transition_.dim() ||
      initial_state_.dim() != transition_.dim()) {
    throw ValidationError("QuantumMooreMachine: components must share one dimension");
  }
  check_projection(projection_, transition_.dim());
}

QuantumMealyMachine::QuantumMealyMachine(std::vector<std::string> input_alphabet,
                                         std::vector<Instrument> instruments,
                                         DensityMatrix initial_state,
                                         ComplexMatrix accepting_projection)
    : input_alphabet_(std::move(input_alphabet)),
      instruments_(std::move(instruments)),
      initial_state_(std::move(initial_state)),
      projection_(std::move(accepting_projection)) {
  if (input_alphabet_.empty() ||
      input_alphabet_.size() != instruments_.size()) {
    throw ValidationError("QuantumMealyMachine: one instrument per action required");
  }
  for (std::size_t i = 0; i < input_alphabet_.size(); ++i) {
    for (std::size_t j = i + 1; j < input_alphabet_.size(); ++j) {
      if (input_alphabet_[i] == input_alphabet_[j]) {
        throw ValidationError("QuantumMealyMachine: duplicate action symbol '" +
                              input_alphabet_[i] + "'");
      }
    }
  }
  const Eigen::Index d = instruments_.front().dim();
  const auto& outputs = instruments_.front().outcomes();
  for (const Instrument& inst : instruments_) {
    if (inst.dim() != d) {
      throw ValidationError("QuantumMealyMachine: instruments must share one dimension");
    }
    if (inst.outcomes() != outputs) {
      throw ValidationError("QuantumMealyMachine: instruments must share the output alphabet");
    }
  }
  if (initial_state_.dim() != d) {
    throw ValidationError("QuantumMealyMachine: initial state dimension mismatch");
  }
  check_projection(projection_, d);
}

const Instrument& QuantumMealyMachine::instrument(const std::string& action) const {
  return instruments_[action_index(action)];
}

std::size_t QuantumMealyMachine::action_index(const std::string& action) const {
  const auto it =
      std::find(input_alphabet_.begin(), input_alphabet_.end(), action);
  if (it == input_alphabet_.end()) {
    throw std::invalid_argument("QuantumMealyMachine: unknown action symbol '" +
                                action + "'");
  }
  return static_cast<std::size_t>(it - input_alphabet_.begin());
}

RunResult moore_run(const QuantumMooreMachine& m, const SymbolString& alpha,
                    const SymbolString& beta) {
  check_run_strings(alpha, beta);
  return run_from_branch_state(moore_branch_state(m, alpha, beta));
}

RunResult mealy_run(const QuantumMealyMachine& m, const SymbolString& alpha,
                    const SymbolString& beta) {
  check_run_strings(alpha, beta);
  return run_from_branch_state(mealy_branch_state(m, alpha, beta));
}

double acceptance(const QuantumMooreMachine& m, const SymbolString& alpha,
                  const SymbolString& beta) {
  check_run_strings(alpha, beta);
  return acceptance_from_branch_state(moore_branch_state(m, alpha, beta),
                                      m.projection());
}

double acceptance(const QuantumMealyMachine& m, const SymbolString& alpha,
                  const SymbolString& beta) {
  check_run_strings(alpha, beta);
  return acceptance_from_branch_state(mealy_branch_state(m, alpha, beta),
                                      m.projection());
}

double acceptance_marginal(const QuantumMooreMachine& m,
                           const SymbolString& alpha,
                           std::uint64_t branch_cap) {
  const std::size_t n_outputs = m.output_alphabet().size();
  check_branch_cap(n_outputs, alpha.size(), branch_cap);
  std::vector<std::size_t> action_idx;
  for (const auto& a : alpha)
    action_idx.push_back(m.transition().action_index(a));
  auto step = [&](const ComplexMatrix& sigma, std::size_t depth,
                  std::size_t b) {
    return apply_cp(m.output().branch(b),
                    apply_cp(m.transition().channel(action_idx[depth]).kraus_map(),
                             sigma));
  };
  return marginal_tree_sum(m.initial_state().mat(), alpha, 0, m.projection(),
                           step, n_outputs);
}

double acceptance_marginal(const QuantumMealyMachine& m,
                           const SymbolString& alpha,
                           std::uint64_t branch_cap) {
  const std::size_t n_outputs = m.output_alphabet().size();
  check_branch_cap(n_outputs, alpha.size(), branch_cap);
  std::vector<std::size_t> action_idx;
  for (const auto& a : alpha) action_idx.push_back(m.action_index(a));
  auto step = [&](const ComplexMatrix& sigma, std::size_t depth,
                  std::size_t b) {
    return apply_cp(m.instrument(action_idx[depth]).branch(b), sigma);
  };
  return marginal_tree_sum(m.initial_state().mat(), alpha, 0, m.projection(),
                           step, n_outputs);
}

QuantumMealyMachine moore_to_mealy(const QuantumMooreMachine& m) {
  std::vector<Instrument> instruments;
  instruments.reserve(m.input_alphabet().size());
  for (std::size_t a = 0; a < m.input_alphabet().size(); ++a) {
    std::vector<KrausMap> branches;
    branches.reserve(m.output_alphabet().size());
    for (std::size_t b = 0; b < m.output_alphabet().size(); ++b) {
      branches.push_back(compose_cp(m.output().branch(b),
                                    m.transition().channel(a).kraus_map()));
    }
    instruments.emplace_back(m.output_alphabet(), std::move(branches));
  }
  return QuantumMealyMachine(m.input_alphabet(), std::move(instruments),
                             m.initial_state(), m.projection());
}

QuantumMooreMachine mealy_to_moore(const QuantumMealyMachine& m) {
  const Eigen::Index d = m.dim();
  const auto& outputs = m.output_alphabet();
  const Eigen::Index n_out = static_cast<Eigen::Index>(outputs.size());
  const ComplexMatrix small_id = ComplexMatrix::Identity(d, d);

  // Resets the output register to the designated symbol b0 (first of Delta).
  std::vector<ComplexMatrix> reset_ops;
  for (Eigen::Index c = 0; c < n_out; ++c) {
    reset_ops.push_back(tensor(ket_bra(0, c, n_out), small_id));
  }
  const KrausMap reset = make_kraus_map(std::move(reset_ops));

  // Writes branch b to the output register while applying Lambda_{a,b}; only
  // the composite with the reset is trace preserving.
  std::vector<Channel> channels;
  for (std::size_t a = 0; a < m.input_alphabet().size(); ++a) {
    std::vector<ComplexMatrix> write_ops;
    for (Eigen::Index b = 0; b < n_out; ++b) {
      for (const ComplexMatrix& k :
           m.instrument(a).branch(static_cast<std::size_t>(b)).kraus) {
        write_ops.push_back(tensor(ket_bra(b, 0, n_out), k));
      }
    }
    channels.emplace_back(
        compose_cp(make_kraus_map(std::move(write_ops)), reset));
  }

  std::vector<KrausMap> read_branches;
  for (Eigen::Index b = 0; b < n_out; ++b) {
    read_branches.push_back(
        make_kraus_map({tensor(ket_bra(b, b, n_out), small_id)}));
  }

  return QuantumMooreMachine(
      ConditionalChannel(m.input_alphabet(), std::move(channels)),
      Instrument(outputs, std::move(read_branches)),
      DensityMatrix(tensor(ket_bra(0, 0, n_out), m.initial_state().mat())),
      tensor(ComplexMatrix::Identity(n_out, n_out), m.projection()));
}

namespace {

// Index-addressed view of either machine kind over canonical alphabets.
struct MachineView {
  Eigen::Index dim;
  const ComplexMatrix* rho0;
  const ComplexMatrix* pi;
  std::function<ComplexMatrix(const ComplexMatrix&, std::size_t, std::size_t)>
      step;  // (sigma, action index, output index) -> branch state
};

MachineView make_view(const QuantumMooreMachine& m,
                      const std::vector<std::size_t>& action_map,
                      const std::vector<std::size_t>& output_map) {
  MachineView v;
  v.dim = m.dim();
  v.rho0 = &m.initial_state().mat();
  v.pi = &m.projection();
  v.step = [&m, &action_map, &output_map](const ComplexMatrix& sigma,
                                          std::size_t a, std::size_t b) {
    return apply_cp(m.output().branch(output_map[b]),
                    apply_cp(m.transition().channel(action_map[a]).kraus_map(),
                             sigma));
  };
  return v;
}

MachineView make_view(const QuantumMealyMachine& m,
                      const std::vector<std::size_t>& action_map,
                      const std::vector<std::size_t>& output_map) {
  MachineView v;
  v.dim = m.dim();
  v.rho0 = &m.initial_state().mat();
  v.pi = &m.projection();
  v.step = [&m, &action_map, &output_map](const ComplexMatrix& sigma,
                                          std::size_t a, std::size_t b) {
    return apply_cp(m.instrument(action_map[a]).branch(output_map[b]), sigma);
  };
  return v;
}

std::vector<std::size_t> symbol_map(const std::vector<std::string>& canonical,
                                    const std::vector<std::string>& declared,
                                    const char* what) {
  std::vector<std::string> a = canonical, b = declared;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) {
    throw std::invalid_argument(std::string("machines_equivalent: machines must share the ") +
                                what + " alphabet");
  }
  std::vector<std::size_t> map;
  for (const auto& s : canonical) {
    map.push_back(static_cast<std::size_t>(
        std::find(declared.begin(), declared.end(), s) - declared.begin()));
  }
  return map;
}

struct PairCheck {
  const double tol;
  const std::size_t n_actions, n_outputs;
  const std::vector<std::string>& actions;
  const std::vector<std::string>& outputs;
  std::uint64_t pairs_checked = 0;
  std::optional<EquivalenceCounterexample> counterexample;

  bool check_node(const ComplexMatrix& s1, const ComplexMatrix& s2,
                  const ComplexMatrix& pi1, const ComplexMatrix& pi2,
                  const std::vector<std::size_t>& alpha,
                  const std::vector<std::size_t>& beta) {
    ++pairs_checked;
    const double p1 = s1.trace().real();
    const double p2 = s2.trace().real();
    const double a1 = acceptance_from_branch_state(s1, pi1);
    const double a2 = acceptance_from_branch_state(s2, pi2);
    if (std::abs(p1 - p2) <= tol && std::abs(a1 - a2) <= tol) return true;
    EquivalenceCounterexample ce;
    for (std::size_t i : alpha) ce.alpha.push_back(actions[i]);
    for (std::size_t i : beta) ce.beta.push_back(outputs[i]);
    ce.p1 = p1;
    ce.p2 = p2;
    ce.acc1 = a1;
    ce.acc2 = a2;
    counterexample = ce;
    return false;
  }
};

// Checks all pairs of length exactly `target` below the given node.
bool check_level(PairCheck& pc, const MachineView& v1, const MachineView& v2,
                 const ComplexMatrix& s1, const ComplexMatrix& s2,
                 std::vector<std::size_t>& alpha, std::vector<std::size_t>& beta,
                 int target) {
  if (target == 0) {
    return pc.check_node(s1, s2, *v1.pi, *v2.pi, alpha, beta);
  }
  for (std::size_t a = 0; a < pc.n_actions; ++a) {
    for (std::size_t b = 0; b < pc.n_outputs; ++b) {
      ComplexMatrix c1 = v1.step(s1, a, b);
      ComplexMatrix c2 = v2.step(s2, a, b);
      if (c1.trace().real() <= k_branch_floor &&
          c2.trace().real() <= k_branch_floor) {
        continue;  // both branches dead; all extensions agree
      }
      alpha.push_back(a);
      beta.push_back(b);
      const bool ok = check_level(pc, v1, v2, c1, c2, alpha, beta, target - 1);
      alpha.pop_back();
      beta.pop_back();
      if (!ok) return false;
    }
  }
  return true;
}

template <typename M1, typename M2>
EquivalenceResult equivalent_impl(const M1& m1, const M2& m2, int max_len,
                                  double tol, std::uint64_t pair_cap) {
  const auto& actions = m1.input_alphabet();
  const auto& outputs = m1.output_alphabet();
  const auto id = [&](const std::vector<std::string>& v) {
    std::vector<std::size_t> m;
    for (std::size_t i = 0; i < v.size(); ++i) m.push_back(i);
    return m;
  };
  const auto m1_actions = id(actions);
  const auto m1_outputs = id(outputs);
  const auto m2_actions = symbol_map(actions, m2.input_alphabet(), "input");
  const auto m2_outputs = symbol_map(outputs, m2.output_alphabet(), "output");

  const std::uint64_t branching =
      static_cast<std::uint64_t>(actions.size()) * outputs.size();
  std::uint64_t total = 0, level = 1;
  for (int l = 0; l <= max_len; ++l) {
    total += level;
    if (total > pair_cap) {
      throw CapExceededError("machines_equivalent: pair enumeration exceeds cap " +
                             std::to_string(pair_cap));
    }
    if (l < max_len) level *= branching;
  }

  const MachineView v1 = make_view(m1, m1_actions, m1_outputs);
  const MachineView v2 = make_view(m2, m2_actions, m2_outputs);

  PairCheck pc{tol, actions.size(), outputs.size(), actions, outputs};
  std::vector<std::size_t> alpha, beta;
  EquivalenceResult result;
  for (int len = 0; len <= max_len; ++len) {
    if (!check_level(pc, v1, v2, *v1.rho0, *v2.rho0, alpha, beta, len)) {
      result.equivalent = false;
      result.counterexample = pc.counterexample;
      result.pairs_checked = pc.pairs_checked;
      return result;
    }
  }
  result.equivalent = true;
  result.pairs_checked = pc.pairs_checked;
  return result;
}

}  // namespace

EquivalenceResult machines_equivalent(const QuantumMooreMachine& m1,
                                      const QuantumMooreMachine& m2,
                                      int max_len, double tol,
                                      std::uint64_t pair_cap) {
  return equivalent_impl(m1, m2, max_len, tol, pair_cap);
}
EquivalenceResult machines_equivalent(const QuantumMooreMachine& m1,
                                      const QuantumMealyMachine& m2,
                                      int max_len, double tol,
                                      std::uint64_t pair_cap) {
  return equivalent_impl(m1, m2, max_len, tol, pair_cap);
}
EquivalenceResult machines_equivalent(const QuantumMealyMachine& m1,
                                      const QuantumMooreMachine& m2,
                                      int max_len, double tol,
                                      std::uint64_t pair_cap) {
  return equivalent_impl(m1, m2, max_len, tol, pair_cap);
}
EquivalenceResult machines_equivalent(const QuantumMealyMachine& m1,
                                      const QuantumMealyMachine& m2,
                                      int max_len, double tol,
                                      std::uint64_t pair_cap) {
  return equivalent_impl(m1, m2, max_len, tol, pair_cap);
}

}  // namespace qomdp
