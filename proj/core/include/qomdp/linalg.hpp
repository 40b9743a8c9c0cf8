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

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qomdp {

using Complex = std::complex<double>;

// Dense square complex matrix; the substrate for states, Kraus operators,
// observables and projections. Squareness and finiteness are enforced at the
// validation boundaries (wrapper types, machine constructors, model loading).
using ComplexMatrix = Eigen::MatrixXcd;

// Thrown when a value fails a structural invariant (trace, positivity,
// stochasticity, trace preservation, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an enumeration or cross-sum exceeds its resource cap.
struct CapExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structural validation tolerance (absolute, scaled by the max entry where
// stated). Eigensolver residuals are held to 1e-9; both are cheap at the
// desk-scale dimensions this library targets.
inline constexpr double k_structural_tol = 1e-10;
// Relative tolerance for the Hermitian-symmetry defect.
inline constexpr double k_hermitian_rel_tol = 1e-12;
// Branches with probability at or below this floor are reported with a null
// post-state and excluded from sampling (no 0/0 normalization is attempted).
inline constexpr double k_branch_floor = 1e-14;

bool is_square_finite(const ComplexMatrix& a);
double max_abs_entry(const ComplexMatrix& a);

// max_ij |A[i][j] - conj(A[j][i])|
double hermitian_defect(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double rel_tol = k_hermitian_rel_tol);

// Conjugate transpose. dagger(dagger(A)) == A.
ComplexMatrix dagger(const ComplexMatrix& a);

// Hilbert-Schmidt inner product Tr(A^dag B), real part. For Hermitian inputs
// the imaginary residual is below 1e-12. Throws on dimension mismatch.
double hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

// Ascending real eigenvalues of a Hermitian matrix. Rejects non-Hermitian
// input. The eigenvalue sum matches the trace to 1e-9.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a);

// True iff the minimum eigenvalue is >= -tol. Requires tol >= 0.
bool is_psd(const ComplexMatrix& a, double tol);

double lambda_min(const ComplexMatrix& hermitian);
double lambda_max(const ComplexMatrix& hermitian);
// Largest eigenvalue magnitude of a Hermitian matrix.
double lambda_abs_max(const ComplexMatrix& hermitian);

// Kronecker product, row-major index convention: (A ox B)[i*p+k][j*q+l].
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

// |i><j| on a dim-dimensional space.
ComplexMatrix ket_bra(Eigen::Index i, Eigen::Index j, Eigen::Index dim);

/// A square complex matrix validated to be Hermitian
/// (max |A[i][j] - conj(A[j][i])| <= 1e-12 * max(1, maxAbsEntry)).
class HermitianMatrix {
 public:
  explicit HermitianMatrix(ComplexMatrix m);

  const ComplexMatrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  ComplexMatrix mat_;
};

/// A Hermitian matrix additionally validated to have unit trace
/// (|Tr - 1| <= 1e-10) and min eigenvalue >= -1e-10: a quantum state.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);

  const ComplexMatrix& mat() const { return mat_.mat(); }
  Eigen::Index dim() const { return mat_.dim(); }

 private:
  HermitianMatrix mat_;
};

}  // namespace qomdp
