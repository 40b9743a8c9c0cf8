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

#include "qomdp/random.hpp"

#include <cmath>

namespace qomdp {

namespace {

std::vector<std::string> numbered(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Inverse square root of a positive definite Hermitian matrix.
ComplexMatrix inverse_sqrt(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a);
  Eigen::VectorXd vals = solver.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    vals(i) = 1.0 / std::sqrt(vals(i));
  }
  return solver.eigenvectors() * vals.cast<Complex>().asDiagonal() *
         solver.eigenvectors().adjoint();
}

// Renormalizes raw Kraus operators into a trace-preserving family.
std::vector<ComplexMatrix> normalize_kraus(std::vector<ComplexMatrix> raw) {
  const Eigen::Index dim = raw.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const auto& k : raw) sum += k.adjoint() * k;
  const ComplexMatrix t = inverse_sqrt(sum);
  for (auto& k : raw) k = k * t;
  return raw;
}

}  // namespace

ComplexMatrix random_ginibre(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      out(i, j) = Complex(gauss(rng), gauss(rng));
    }
  }
  return out;
}

ComplexMatrix random_unitary(Eigen::Index dim, Rng& rng) {
  const ComplexMatrix g = random_ginibre(dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  // Fix the phase convention so the factorization is unique.
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

ComplexMatrix random_hermitian(Eigen::Index dim, Rng& rng, double scale) {
  const ComplexMatrix g = random_ginibre(dim, rng);
  return scale * 0.5 * (g + g.adjoint());
}

DensityMatrix random_density_matrix(Eigen::Index dim, Rng& rng) {
  const ComplexMatrix g = random_ginibre(dim, rng);
  ComplexMatrix gram = g * g.adjoint();
  gram /= gram.trace().real();
  return DensityMatrix(0.5 * (gram + gram.adjoint()));
}

DensityMatrix random_probe_state(Eigen::Index dim, Rng& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  if (coin(rng) == 0) {
    std::uniform_int_distribution<Eigen::Index> vertex(0, dim - 1);
    const Eigen::Index i = vertex(rng);
    return DensityMatrix(ket_bra(i, i, dim));
  }
  return random_density_matrix(dim, rng);
}

ComplexMatrix random_projection(Eigen::Index dim, Rng& rng,
                                std::optional<Eigen::Index> rank) {
  Eigen::Index r;
  if (rank.has_value()) {
    r = *rank;
    if (r < 0 || r > dim) {
      throw std::invalid_argument("random_projection: rank out of range");
    }
  } else {
    std::uniform_int_distribution<Eigen::Index> dist(0, dim);
    r = dist(rng);
  }
  if (r == 0) return ComplexMatrix::Zero(dim, dim);
  const ComplexMatrix u = random_unitary(dim, rng);
  const ComplexMatrix cols = u.leftCols(r);
  ComplexMatrix pi = cols * cols.adjoint();
  return 0.5 * (pi + pi.adjoint());
}

Channel random_channel(Eigen::Index dim, int n_kraus, Rng& rng) {
  std::vector<ComplexMatrix> raw;
  for (int i = 0; i < n_kraus; ++i) raw.push_back(random_ginibre(dim, rng));
  return Channel(make_kraus_map(normalize_kraus(std::move(raw))));
}

Instrument random_instrument(Eigen::Index dim, std::vector<std::string> outcomes,
                             int kraus_per_branch, Rng& rng) {
  std::vector<ComplexMatrix> raw;
  const int total = static_cast<int>(outcomes.size()) * kraus_per_branch;
  for (int i = 0; i < total; ++i) raw.push_back(random_ginibre(dim, rng));
  raw = normalize_kraus(std::move(raw));
  std::vector<KrausMap> branches;
  auto it = raw.begin();
  for (std::size_t b = 0; b < outcomes.size(); ++b) {
    std::vector<ComplexMatrix> ops(it, it + kraus_per_branch);
    it += kraus_per_branch;
    branches.push_back(make_kraus_map(std::move(ops)));
  }
  return Instrument(std::move(outcomes), std::move(branches));
}

ConditionalChannel random_conditional_channel(Eigen::Index dim,
                                              std::vector<std::string> actions,
                                              int n_kraus, Rng& rng) {
  std::vector<Channel> channels;
  for (std::size_t a = 0; a < actions.size(); ++a) {
    channels.push_back(random_channel(dim, n_kraus, rng));
  }
  return ConditionalChannel(std::move(actions), std::move(channels));
}

QuantumMooreMachine random_moore_machine(Eigen::Index dim,
                                         std::vector<std::string> actions,
                                         std::vector<std::string> outcomes,
                                         Rng& rng) {
  auto transition = random_conditional_channel(dim, std::move(actions), 2, rng);
  auto output = random_instrument(dim, std::move(outcomes), 2, rng);
  auto rho0 = random_density_matrix(dim, rng);
  auto pi = random_projection(dim, rng);
  return QuantumMooreMachine(std::move(transition), std::move(output),
                             std::move(rho0), std::move(pi));
}

QuantumMealyMachine random_mealy_machine(Eigen::Index dim,
                                         std::vector<std::string> actions,
                                         std::vector<std::string> outcomes,
                                         Rng& rng) {
  std::vector<Instrument> instruments;
  for (std::size_t a = 0; a < actions.size(); ++a) {
    instruments.push_back(random_instrument(dim, outcomes, 2, rng));
  }
  auto rho0 = random_density_matrix(dim, rng);
  auto pi = random_projection(dim, rng);
  return QuantumMealyMachine(std::move(actions), std::move(instruments),
                             std::move(rho0), std::move(pi));
}

Eigen::MatrixXd random_stochastic(Eigen::Index rows, Eigen::Index cols,
                                  Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = expo(rng);
    out.col(j) /= out.col(j).sum();
  }
  return out;
}

ClassicalMoore random_classical_moore(int n_states, int n_actions,
                                      int n_outputs, Rng& rng, bool with_goal) {
  auto states = numbered("s", n_states);
  auto inputs = numbered("a", n_actions);
  auto outputs = numbered("b", n_outputs);
  std::vector<Eigen::MatrixXd> transitions;
  for (int a = 0; a < n_actions; ++a) {
    transitions.push_back(random_stochastic(n_states, n_states, rng));
  }
  Eigen::MatrixXd emissions = random_stochastic(n_outputs, n_states, rng);
  Eigen::VectorXd initial = random_stochastic(n_states, 1, rng).col(0);
  std::optional<std::string> goal;
  if (with_goal) {
    std::uniform_int_distribution<int> pick(0, n_states - 1);
    const int g = pick(rng);
    for (auto& p : transitions) {
      p.col(g).setZero();
      p(g, g) = 1.0;
    }
    goal = states[static_cast<std::size_t>(g)];
  }
  return ClassicalMoore(std::move(states), std::move(inputs),
                        std::move(outputs), std::move(transitions),
                        std::move(emissions), std::move(initial),
                        std::move(goal));
}

ClassicalPomdp random_classical_pomdp(int n_states, int n_actions,
                                      int n_outputs, double discount,
                                      Rng& rng) {
  auto machine = random_classical_moore(n_states, n_actions, n_outputs, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd rewards(n_states);
  for (int i = 0; i < n_states; ++i) rewards(i) = unit(rng);
  return ClassicalPomdp(std::move(machine), std::move(rewards), discount);
}

ClassicalPomdp random_classical_mdp(int n_states, int n_actions,
                                    double discount, Rng& rng) {
  auto states = numbered("s", n_states);
  auto inputs = numbered("a", n_actions);
  std::vector<Eigen::MatrixXd> transitions;
  for (int a = 0; a < n_actions; ++a) {
    transitions.push_back(random_stochastic(n_states, n_states, rng));
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd rewards(n_states);
  for (int i = 0; i < n_states; ++i) rewards(i) = unit(rng);
  Eigen::VectorXd initial = random_stochastic(n_states, 1, rng).col(0);
  return make_mdp(std::move(states), std::move(inputs), std::move(transitions),
                  std::move(rewards), std::move(initial), discount);
}

Qomdp random_qomdp(Eigen::Index dim, std::vector<std::string> actions,
                   std::vector<std::string> outcomes, double discount,
                   Rng& rng, bool state_reward) {
  const std::size_t n_actions = actions.size();
  auto transition = random_conditional_channel(dim, std::move(actions), 2, rng);
  auto output = random_instrument(dim, std::move(outcomes), 1, rng);
  auto rho0 = random_density_matrix(dim, rng);
  Qomdp::Rewards rewards;
  if (state_reward) {
    rewards = random_hermitian(dim, rng);
  } else {
    std::vector<ComplexMatrix> per_action;
    for (std::size_t a = 0; a < n_actions; ++a) {
      per_action.push_back(random_hermitian(dim, rng));
    }
    rewards = std::move(per_action);
  }
  return Qomdp(std::move(transition), std::move(output), std::move(rewards),
               discount, std::move(rho0));
}

}  // namespace qomdp
