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

#include <array>

#include "qomdp/transducers.hpp"

namespace qomdp {

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

// Single-qubit rotations exp(-i theta A / 2) about the Pauli axes:
//   R_x = [[cos(t/2), -i sin(t/2)], [-i sin(t/2), cos(t/2)]]
//   R_y = [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]
//   R_z = diag(exp(-i t/2), exp(i t/2))
ComplexMatrix rotation_x(double theta);
ComplexMatrix rotation_y(double theta);
ComplexMatrix rotation_z(double theta);

// (Tr(X rho), Tr(Y rho), Tr(Z rho)); requires a qubit state.
std::array<double, 3> bloch_vector(const DensityMatrix& rho);

// Demo qubit transducer: from |+><+|, action a1 applies the channel
// rho -> rho/2 + R_x(pi/3) rho R_x(pi/3)^dag / 2 (a2 the same about y), and
// the instrument branches are R_z(+-pi/3)/sqrt(2), so both outputs always
// carry probability 1/2. The accepting projection is the full space; the
// demo reports trajectories and branch probabilities rather than acceptance.
QuantumMooreMachine make_bloch_transducer();

}  // namespace qomdp
