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

#include <random>

#include "qomdp/classical.hpp"
#include "qomdp/solver.hpp"
#include "qomdp/transducers.hpp"

// Seeded generators for random states, operators and whole models. All
// outputs pass the corresponding validations by construction.

namespace qomdp {

using Rng = std::mt19937_64;

// Matrix of iid standard complex Gaussians.
ComplexMatrix random_ginibre(Eigen::Index dim, Rng& rng);

// Haar-ish unitary from the QR factorization of a Ginibre matrix.
ComplexMatrix random_unitary(Eigen::Index dim, Rng& rng);

ComplexMatrix random_hermitian(Eigen::Index dim, Rng& rng, double scale = 1.0);

// Normalized Gram matrix G G^dag / Tr: full-rank interior state.
DensityMatrix random_density_matrix(Eigen::Index dim, Rng& rng);

// Sampling mix for value-function checks: a uniformly chosen basis vertex
// state half the time, a random interior density matrix otherwise.
DensityMatrix random_probe_state(Eigen::Index dim, Rng& rng);

// Rank-r orthogonal projection onto a random subspace; rank drawn uniformly
// from {0, ..., dim} when not given.
ComplexMatrix random_projection(Eigen::Index dim, Rng& rng,
                                std::optional<Eigen::Index> rank = std::nullopt);

// Random CPTP map: Ginibre Kraus operators renormalized through the inverse
// square root of their completeness sum.
Channel random_channel(Eigen::Index dim, int n_kraus, Rng& rng);

Instrument random_instrument(Eigen::Index dim,
                             std::vector<std::string> outcomes,
                             int kraus_per_branch, Rng& rng);

ConditionalChannel random_conditional_channel(Eigen::Index dim,
                                              std::vector<std::string> actions,
                                              int n_kraus, Rng& rng);

QuantumMooreMachine random_moore_machine(Eigen::Index dim,
                                         std::vector<std::string> actions,
                                         std::vector<std::string> outcomes,
                                         Rng& rng);

QuantumMealyMachine random_mealy_machine(Eigen::Index dim,
                                         std::vector<std::string> actions,
                                         std::vector<std::string> outcomes,
                                         Rng& rng);

// Random column-stochastic matrix (iid exponentials, columns normalized).
Eigen::MatrixXd random_stochastic(Eigen::Index rows, Eigen::Index cols,
                                  Rng& rng);

// Random classical machine; with_goal forces an absorbing goal state.
ClassicalMoore random_classical_moore(int n_states, int n_actions,
                                      int n_outputs, Rng& rng,
                                      bool with_goal = false);

ClassicalPomdp random_classical_pomdp(int n_states, int n_actions,
                                      int n_outputs, double discount,
                                      Rng& rng);

// Random fully observed MDP (Delta = S, Q = I).
ClassicalPomdp random_classical_mdp(int n_states, int n_actions,
                                    double discount, Rng& rng);

Qomdp random_qomdp(Eigen::Index dim, std::vector<std::string> actions,
                   std::vector<std::string> outcomes, double discount,
                   Rng& rng, bool state_reward = true);

}  // namespace qomdp
