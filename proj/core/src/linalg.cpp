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

#include "qomdp/linalg.hpp"

#include <cmath>

namespace qomdp {

bool is_square_finite(const ComplexMatrix& a) {
  if (a.rows() == 0 || a.rows() != a.cols()) return false;
  return a.allFinite();
}

double max_abs_entry(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

double hermitian_defect(const ComplexMatrix& a) {
  return max_abs_entry(a - a.adjoint());
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
  if (!is_square_finite(a)) return false;
  return hermitian_defect(a) <= rel_tol * std::max(1.0, max_abs_entry(a));
}

ComplexMatrix dagger(const ComplexMatrix& a) { return a.adjoint(); }

double hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("hs_inner: dimension mismatch");
  }
  // Tr(A^dag B) = sum_ij conj(A[i][j]) B[i][j]
  return a.cwiseProduct(b.conjugate()).sum().real();
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
  if (!is_hermitian(a)) {
    throw std::invalid_argument("hermitian_eigenvalues: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eigenvalues: eigensolver failed");
  }
  const auto& vals = solver.eigenvalues();
  return std::vector<double>(vals.data(), vals.data() + vals.size());
}

bool is_psd(const ComplexMatrix& a, double tol) {
  if (tol < 0) throw std::invalid_argument("is_psd: tol must be >= 0");
  return lambda_min(a) >= -tol;
}

double lambda_min(const ComplexMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian,
                                                      Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double lambda_max(const ComplexMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian,
                                                      Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

double lambda_abs_max(const ComplexMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian,
                                                      Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix ket_bra(Eigen::Index i, Eigen::Index j, Eigen::Index dim) {
  if (i < 0 || j < 0 || i >= dim || j >= dim) {
    throw std::invalid_argument("ket_bra: index out of range");
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  out(i, j) = 1.0;
  return out;
}

HermitianMatrix::HermitianMatrix(ComplexMatrix m) : mat_(std::move(m)) {
  if (!is_square_finite(mat_)) {
    throw ValidationError("HermitianMatrix: matrix must be square with finite entries");
  }
  const double defect = hermitian_defect(mat_);
  const double scale = std::max(1.0, max_abs_entry(mat_));
  if (defect > k_hermitian_rel_tol * scale) {
    throw ValidationError("HermitianMatrix: symmetry defect " +
                          std::to_string(defect) + " exceeds tolerance");
  }
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {
  const double tr = mat_.mat().trace().real();
  if (std::abs(tr - 1.0) > k_structural_tol) {
    throw ValidationError("DensityMatrix: trace " + std::to_string(tr) +
                          " is not 1");
  }
  const double lmin = lambda_min(mat_.mat());
  if (lmin < -k_structural_tol) {
    throw ValidationError("DensityMatrix: minimum eigenvalue " +
                          std::to_string(lmin) + " is negative");
  }
}

}  // namespace qomdp
