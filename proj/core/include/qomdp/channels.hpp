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

#include "qomdp/linalg.hpp"

namespace qomdp {

/// A completely positive map presented by a nonempty set of Kraus operators
/// of a common square dimension. Kraus form certifies complete positivity by
/// construction; trace preservation is a separate, checkable property.
struct KrausMap {
  Eigen::Index dim = 0;
  std::vector<ComplexMatrix> kraus;
};

// Builds a KrausMap from operators, checking they are nonempty, square,
// finite and of equal dimension. Throws ValidationError otherwise.
KrausMap make_kraus_map(std::vector<ComplexMatrix> operators);

struct ChannelCheck {
  bool ok = false;
  // Max-entry norm of sum_k K_k^dag K_k - I.
  double residual = 0.0;
};

// Trace-preservation check: ok iff sum_k K_k^dag K_k = I within tol.
ChannelCheck validate_channel(const KrausMap& m, double tol = k_structural_tol);

// Applies the CP map: sum_k K_k rho K_k^dag. Hermitian in, Hermitian out;
// PSD in, PSD out. Throws on dimension mismatch.
ComplexMatrix apply_cp(const KrausMap& m, const ComplexMatrix& rho);

// Heisenberg-picture dual: sum_k K_k^dag X K_k, so that
// Tr(X apply_cp(m, rho)) == Tr(adjoint_apply_cp(m, X) rho).
ComplexMatrix adjoint_apply_cp(const KrausMap& m, const ComplexMatrix& x);

// Composition f after g: Kraus set {F_i G_j} over all pairs.
KrausMap compose_cp(const KrausMap& f, const KrausMap& g);

/// A trace-preserving CP map (quantum channel).
class Channel {
 public:
  explicit Channel(KrausMap m, double tol = k_structural_tol);

  const KrausMap& kraus_map() const { return map_; }
  Eigen::Index dim() const { return map_.dim; }

 private:
  KrausMap map_;
};

/// A quantum instrument: CP branch maps indexed by an ordered output
/// alphabet, whose union of Kraus operators forms a channel. Applying it to
/// rho yields outcome b with probability Tr(Omega_b(rho)) and post-state
/// Omega_b(rho) normalized.
class Instrument {
 public:
  Instrument(std::vector<std::string> outcomes, std::vector<KrausMap> branches,
             double tol = k_structural_tol);

  const std::vector<std::string>& outcomes() const { return outcomes_; }
  const KrausMap& branch(std::size_t i) const { return branches_.at(i); }
  const KrausMap& branch(const std::string& outcome) const;
  std::size_t outcome_index(const std::string& outcome) const;
  std::size_t n_outcomes() const { return outcomes_.size(); }
  Eigen::Index dim() const { return dim_; }

 private:
  Eigen::Index dim_ = 0;
  std::vector<std::string> outcomes_;
  std::vector<KrausMap> branches_;
};

/// A conditional channel: one channel per symbol of an ordered input
/// alphabet. Applying action a applies the member channel Phi_a directly;
/// this matches the classical-quantum construction on the returned register.
class ConditionalChannel {
 public:
  ConditionalChannel(std::vector<std::string> actions,
                     std::vector<Channel> channels);

  const std::vector<std::string>& actions() const { return actions_; }
  const Channel& channel(std::size_t i) const { return channels_.at(i); }
  const Channel& channel(const std::string& action) const;
  std::size_t action_index(const std::string& action) const;
  std::size_t n_actions() const { return actions_.size(); }
  Eigen::Index dim() const { return dim_; }

 private:
  Eigen::Index dim_ = 0;
  std::vector<std::string> actions_;
  std::vector<Channel> channels_;
};

struct OutcomeBranch {
  std::string outcome;
  // Reported as 0 when the branch trace is at or below the 1e-14 floor.
  double probability = 0.0;
  // Normalized post-measurement state; absent for sub-floor branches.
  std::optional<DensityMatrix> post_state;
};

// Enumerates every instrument outcome on rho: probabilities
// p(b) = Tr(Omega_b(rho)) sum to 1 within 1e-9.
std::vector<OutcomeBranch> instrument_outcomes(const Instrument& omega,
                                               const DensityMatrix& rho);

}  // namespace qomdp
