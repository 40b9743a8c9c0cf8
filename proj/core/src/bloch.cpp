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

#include "qomdp/bloch.hpp"

#include <cmath>
#include <numbers>

namespace qomdp {

namespace {
constexpr Complex k_i{0.0, 1.0};
}

ComplexMatrix pauli_x() {
  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

ComplexMatrix pauli_y() {
  ComplexMatrix y(2, 2);
  y << 0, -k_i, k_i, 0;
  return y;
}

ComplexMatrix pauli_z() {
  ComplexMatrix z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

ComplexMatrix rotation_x(double theta) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  ComplexMatrix r(2, 2);
  r << c, -k_i * s, -k_i * s, c;
  return r;
}

ComplexMatrix rotation_y(double theta) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  ComplexMatrix r(2, 2);
  r << c, -s, s, c;
  return r;
}

ComplexMatrix rotation_z(double theta) {
  ComplexMatrix r = ComplexMatrix::Zero(2, 2);
  r(0, 0) = std::exp(-k_i * (theta / 2));
  r(1, 1) = std::exp(k_i * (theta / 2));
  return r;
}

std::array<double, 3> bloch_vector(const DensityMatrix& rho) {
  if (rho.dim() != 2) {
    throw std::invalid_argument("bloch_vector: state must be a qubit");
  }
  return {hs_inner(pauli_x(), rho.mat()), hs_inner(pauli_y(), rho.mat()),
          hs_inner(pauli_z(), rho.mat())};
}

QuantumMooreMachine make_bloch_transducer() {
  const double theta = std::numbers::pi / 3;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);

  std::vector<Channel> channels;
  channels.emplace_back(
      make_kraus_map({inv_sqrt2 * id, inv_sqrt2 * rotation_x(theta)}));
  channels.emplace_back(
      make_kraus_map({inv_sqrt2 * id, inv_sqrt2 * rotation_y(theta)}));

  std::vector<KrausMap> branches;
  branches.push_back(make_kraus_map({inv_sqrt2 * rotation_z(-theta)}));
  branches.push_back(make_kraus_map({inv_sqrt2 * rotation_z(theta)}));

  ComplexMatrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;

  return QuantumMooreMachine(
      ConditionalChannel({"a1", "a2"}, std::move(channels)),
      Instrument({"b-1", "b+1"}, std::move(branches)), DensityMatrix(plus),
      id);
}

}  // namespace qomdp
