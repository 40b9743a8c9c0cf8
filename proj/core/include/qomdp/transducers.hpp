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
#include <string>
#include <vector>

#include "qomdp/channels.hpp"

namespace qomdp {

// Default cap on enumerated output branches in marginal-acceptance and
// equivalence checks; beyond it the operations refuse rather than sample.
inline constexpr std::uint64_t k_enumeration_cap = 1'000'000;

using SymbolString = std::vector<std::string>;

/// Transducer whose step applies the action's channel, then a shared
/// instrument emits the output symbol: one step maps rho to
/// Omega_b(Phi_a(rho)) with probability Tr of that branch.
class QuantumMooreMachine {
 public:
  QuantumMooreMachine(ConditionalChannel transition, Instrument output,
                      DensityMatrix initial_state,
                      ComplexMatrix accepting_projection);

  Eigen::Index dim() const { return transition_.dim(); }
  const std::vector<std::string>& input_alphabet() const {
    return transition_.actions();
  }
  const std::vector<std::string>& output_alphabet() const {
    return output_.outcomes();
  }
  const ConditionalChannel& transition() const { return transition_; }
  const Instrument& output() const { return output_; }
  const DensityMatrix& initial_state() const { return initial_state_; }
  const ComplexMatrix& projection() const { return projection_; }

 private:
  ConditionalChannel transition_;
  Instrument output_;
  DensityMatrix initial_state_;
  ComplexMatrix projection_;
};

/// Transducer with one instrument per action: one step maps rho to
/// Lambda_{a,b}(rho). All instruments share the output alphabet.
class QuantumMealyMachine {
 public:
  QuantumMealyMachine(std::vector<std::string> input_alphabet,
                      std::vector<Instrument> instruments,
                      DensityMatrix initial_state,
                      ComplexMatrix accepting_projection);

  Eigen::Index dim() const { return instruments_.front().dim(); }
  const std::vector<std::string>& input_alphabet() const {
    return input_alphabet_;
  }
  const std::vector<std::string>& output_alphabet() const {
    return instruments_.front().outcomes();
  }
  const Instrument& instrument(std::size_t i) const {
    return instruments_.at(i);
  }
  const Instrument& instrument(const std::string& action) const;
  std::size_t action_index(const std::string& action) const;
  const DensityMatrix& initial_state() const { return initial_state_; }
  const ComplexMatrix& projection() const { return projection_; }

 private:
  std::vector<std::string> input_alphabet_;
  std::vector<Instrument> instruments_;
  DensityMatrix initial_state_;
  ComplexMatrix projection_;
};

struct RunResult {
  // p_M(beta; alpha) in [0, 1].
  double probability = 0.0;
  // Normalized final state; absent when probability is at or below the
  // 1e-14 floor.
  std::optional<DensityMatrix> state;
};

// Probability and final state of the run reading input alpha and emitting
// output beta. Throws on length mismatch or unknown symbols.
RunResult moore_run(const QuantumMooreMachine& m, const SymbolString& alpha,
                    const SymbolString& beta);
RunResult mealy_run(const QuantumMealyMachine& m, const SymbolString& alpha,
                    const SymbolString& beta);

// Acc_M(alpha, beta) = Tr(Pi rho_M(alpha, beta)); 0 when the run probability
// is at or below the floor.
double acceptance(const QuantumMooreMachine& m, const SymbolString& alpha,
                  const SymbolString& beta);
double acceptance(const QuantumMealyMachine& m, const SymbolString& alpha,
                  const SymbolString& beta);

// Acc_M(alpha) = sum_beta p(beta; alpha) Acc_M(alpha, beta), enumerating all
// outputs of length |alpha|. Refuses when |Delta|^|alpha| exceeds the cap.
double acceptance_marginal(const QuantumMooreMachine& m,
                           const SymbolString& alpha,
                           std::uint64_t branch_cap = k_enumeration_cap);
double acceptance_marginal(const QuantumMealyMachine& m,
                           const SymbolString& alpha,
                           std::uint64_t branch_cap = k_enumeration_cap);

// Mealy machine with Lambda_{a,b} = Omega_b after Phi_a; agrees with the
// input on every run probability and acceptance value.
QuantumMealyMachine moore_to_mealy(const QuantumMooreMachine& m);

// Moore machine on the enlarged space C^|Delta| ox C^dim whose first
// register carries the last emitted symbol. Agrees with the input on every
// run probability and acceptance value.
QuantumMooreMachine mealy_to_moore(const QuantumMealyMachine& m);

struct EquivalenceCounterexample {
  SymbolString alpha;
  SymbolString beta;
  double p1 = 0.0, p2 = 0.0;
  double acc1 = 0.0, acc2 = 0.0;
};

struct EquivalenceResult {
  bool equivalent = false;
  std::optional<EquivalenceCounterexample> counterexample;
  std::uint64_t pairs_checked = 0;
};

// Checks |p1 - p2| <= tol and |Acc1 - Acc2| <= tol over every (alpha, beta)
// pair with |alpha| = |beta| <= max_len; returns the first violation found
// (shortest first). The machines must share both alphabets as sets.
EquivalenceResult machines_equivalent(const QuantumMooreMachine& m1,
                                      const QuantumMooreMachine& m2,
                                      int max_len, double tol,
                                      std::uint64_t pair_cap = k_enumeration_cap);
EquivalenceResult machines_equivalent(const QuantumMooreMachine& m1,
                                      const QuantumMealyMachine& m2,
                                      int max_len, double tol,
                                      std::uint64_t pair_cap = k_enumeration_cap);
EquivalenceResult machines_equivalent(const QuantumMealyMachine& m1,
                                      const QuantumMooreMachine& m2,
                                      int max_len, double tol,
                                      std::uint64_t pair_cap = k_enumeration_cap);
EquivalenceResult machines_equivalent(const QuantumMealyMachine& m1,
                                      const QuantumMealyMachine& m2,
                                      int max_len, double tol,
                                      std::uint64_t pair_cap = k_enumeration_cap);

}  // namespace qomdp
