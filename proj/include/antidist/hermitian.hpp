// Copyright 2026 The antidist developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace antidist {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when input data violates a structural precondition (wrong shape,
/// non-Hermitian beyond tolerance, NaN/Inf entries, bad indices, ...).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine fails to produce a trustworthy result.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Largest absolute value over all entries of a complex matrix.
inline double max_abs(const CMat& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

inline void check_finite(const CMat& a, const char* what) {
  if (!a.allFinite()) {
    throw ValidationError(std::string(what) + " contains NaN or Inf entries");
  }
}

/// A square complex matrix known to be Hermitian.
///
/// The constructor accepts anything within 1e-8 (entrywise) of Hermitian and
/// symmetrizes it to (A + A*)/2, so downstream code may rely on exact
/// self-adjointness: equal conjugate off-diagonal pairs and real diagonal.
/// Larger asymmetry is treated as a caller bug, not noise, and rejected.
class HermitianMatrix {
 public:
  static constexpr double kAsymmetryTol = 1e-8;

  explicit HermitianMatrix(const CMat& a) {
    if (a.rows() != a.cols()) {
      throw ValidationError("Hermitian matrix must be square, got " +
                            std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()));
    }
    if (a.rows() == 0) {
      throw ValidationError("Hermitian matrix must be nonempty");
    }
    check_finite(a, "Hermitian matrix");
    const double asym = max_abs(a - a.adjoint());
    if (asym > kAsymmetryTol) {
      std::ostringstream msg;
      msg << "matrix is not Hermitian: max |A - A*| = " << asym;
      throw ValidationError(msg.str());
    }
    mat_ = 0.5 * (a + a.adjoint());
    // Symmetrization leaves the diagonal real up to representation error;
    // force it exactly so tests may compare diagonals without tolerance.
    mat_.diagonal() = mat_.diagonal().real().cast<Complex>();
  }

  Index dim() const { return mat_.rows(); }
  const CMat& mat() const { return mat_; }
  Complex operator()(Index i, Index j) const { return mat_(i, j); }

  double trace_real() const { return mat_.trace().real(); }
  double frobenius_norm() const { return mat_.norm(); }

 private:
  CMat mat_;
};

/// Eigendecomposition of a Hermitian matrix: A = V diag(w) V* with the
/// eigenvalues sorted in descending order and V unitary.
struct Spectrum {
  RVec eigenvalues;   // descending
  CMat eigenvectors;  // column j pairs with eigenvalues[j]
};

/// Full eigendecomposition via a dedicated self-adjoint solver.
///
/// Sorting is descending by value; the permutation applied to a fixed solver
/// output is deterministic, so repeated calls on the same input agree bitwise.
inline Spectrum eig_hermitian(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMat> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "self-adjoint eigensolver failed to converge on a " << a.dim()
        << "x" << a.dim() << " matrix with Frobenius norm "
        << a.frobenius_norm();
    throw NumericError(msg.str());
  }
  Spectrum s;
  s.eigenvalues = solver.eigenvalues().reverse();
  s.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return s;
}

/// Largest eigenvalue only (still a full solve; kept for readability).
inline double max_eigenvalue(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMat> solver(a.mat(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("self-adjoint eigensolver failed in max_eigenvalue");
  }
  return solver.eigenvalues().maxCoeff();
}

inline double min_eigenvalue(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMat> solver(a.mat(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("self-adjoint eigensolver failed in min_eigenvalue");
  }
  return solver.eigenvalues().minCoeff();
}

/// Euclidean projection onto the positive semidefinite cone: eigenvalues are
/// clipped at zero and the matrix is rebuilt in the same eigenbasis.
inline HermitianMatrix project_psd(const HermitianMatrix& a) {
  const Spectrum s = eig_hermitian(a);
  const RVec clipped = s.eigenvalues.cwiseMax(0.0);
  CMat out = s.eigenvectors * clipped.asDiagonal() *
             s.eigenvectors.adjoint();
  return HermitianMatrix(out);
}

/// Moore-Penrose pseudoinverse of a general rectangular complex matrix.
///
/// Singular values at or below rank_tol are treated as zero. A negative
/// rank_tol selects the default 1e-10 * sigma_max.
inline CMat pseudoinverse(const CMat& w, double rank_tol = -1.0) {
  check_finite(w, "pseudoinverse input");
  Eigen::JacobiSVD<CMat> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  const double tol = rank_tol >= 0.0 ? rank_tol : 1e-10 * sigma_max;
  RVec inv = RVec::Zero(sigma.size());
  for (Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > tol) inv(k) = 1.0 / sigma(k);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

/// The (n-1)x(n-1) principal submatrix obtained by deleting row and column
/// `drop` from a Hermitian matrix.
inline HermitianMatrix principal_submatrix(const HermitianMatrix& a,
                                           Index drop) {
  const Index n = a.dim();
  if (drop < 0 || drop >= n) {
    throw ValidationError("principal_submatrix: index " +
                          std::to_string(drop) + " out of range for n = " +
                          std::to_string(n));
  }
  if (n < 2) {
    throw ValidationError("principal_submatrix requires n >= 2");
  }
  CMat out(n - 1, n - 1);
  for (Index i = 0, r = 0; i < n; ++i) {
    if (i == drop) continue;
    for (Index j = 0, c = 0; j < n; ++j) {
      if (j == drop) continue;
      out(r, c) = a(i, j);
      ++c;
    }
    ++r;
  }
  return HermitianMatrix(out);
}

/// Unitary discrete Fourier matrix F[j][k] = omega^{jk} / sqrt(n) with
/// omega = exp(2 pi i / n).
inline CMat fourier_matrix(Index n) {
  if (n < 1) throw ValidationError("fourier_matrix requires n >= 1");
  CMat f(n, n);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      // Reduce the exponent mod n before taking sin/cos so that entries with
      // equal phase are computed identically.
      const Index e = (j * k) % n;
      f(j, k) = scale * std::polar(1.0, step * static_cast<double>(e));
    }
  }
  return f;
}

/// Cyclic shift permutation: P[i][j] = 1 iff j = (i+1) mod n, so that
/// P e_{j+1 mod n} = e_j and conjugation by P rotates both indices.
inline CMat cyclic_shift_matrix(Index n) {
  if (n < 1) throw ValidationError("cyclic_shift_matrix requires n >= 1");
  CMat p = CMat::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    p(i, (i + 1) % n) = 1.0;
  }
  return p;
}

/// Average of a Hermitian matrix over the cyclic group generated by the shift
/// permutation. The result is circulant, the map is a trace-preserving
/// positive projection, and circulant inputs are fixed points.
inline HermitianMatrix circulant_twirl(const HermitianMatrix& a) {
  const Index n = a.dim();
  CMat out = CMat::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (Index m = 0; m < n; ++m) {
        acc += a((i + m) % n, (j + m) % n);
      }
      out(i, j) = acc / static_cast<double>(n);
    }
  }
  return HermitianMatrix(out);
}

}  // namespace antidist
