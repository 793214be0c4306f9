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

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "antidist/hermitian.hpp"

namespace antidist {

/// A family of n >= 2 pure states, stored as the columns of a d x n complex
/// matrix. Columns must arrive unit-norm up to 1e-8 (enough to absorb I/O
/// roundoff) and are renormalized exactly, so inner products computed from a
/// StateSet have unit diagonal to machine precision.
class StateSet {
 public:
  static constexpr double kNormTol = 1e-8;

  explicit StateSet(CMat columns) : w_(std::move(columns)) {
    if (w_.cols() < 2) {
      throw ValidationError("a state set needs at least two states, got " +
                            std::to_string(w_.cols()));
    }
    if (w_.rows() < 1) {
      throw ValidationError("state set has empty ambient dimension");
    }
    check_finite(w_, "state set");
    std::string offenders;
    for (Index j = 0; j < w_.cols(); ++j) {
      const double norm = w_.col(j).norm();
      if (std::abs(norm - 1.0) > kNormTol) {
        offenders += (offenders.empty() ? "" : ", ") + std::to_string(j);
      } else {
        w_.col(j) /= norm;
      }
    }
    if (!offenders.empty()) {
      throw ValidationError("states are not unit vectors at indices: " +
                            offenders);
    }
  }

  Index dim() const { return w_.rows(); }
  Index size() const { return w_.cols(); }
  const CMat& columns() const { return w_; }
  CVec state(Index j) const { return w_.col(j); }

 private:
  CMat w_;  // d x n; column j is the j-th state
};

/// Gram matrix of a family of pure states: Hermitian, positive semidefinite
/// (smallest eigenvalue >= -1e-8 n), unit diagonal within 1e-10, and
/// off-diagonal moduli at most 1 (within 1e-10, by Cauchy-Schwarz). The
/// constructor verifies all of this and pins the diagonal at exactly one so
/// downstream arithmetic does not accumulate diagonal drift.
class GramMatrix {
 public:
  static constexpr double kDiagonalTol = 1e-10;
  static constexpr double kModulusTol = 1e-10;
  static constexpr double kPsdTol = 1e-8;  // scaled by n

  explicit GramMatrix(const HermitianMatrix& h) : h_(h) {
    const Index n = h_.dim();
    if (n < 2) {
      throw ValidationError("a Gram matrix of a state family has n >= 2");
    }
    CMat m = h_.mat();
    for (Index i = 0; i < n; ++i) {
      if (std::abs(m(i, i).real() - 1.0) > kDiagonalTol) {
        throw ValidationError("Gram matrix diagonal entry " +
                              std::to_string(i) + " is not 1");
      }
      m(i, i) = 1.0;
      for (Index j = 0; j < n; ++j) {
        if (i != j && std::abs(m(i, j)) > 1.0 + kModulusTol) {
          throw ValidationError(
              "Gram matrix off-diagonal modulus exceeds 1 at (" +
              std::to_string(i) + ", " + std::to_string(j) + ")");
        }
      }
    }
    const double min_eig = min_eigenvalue(h_);
    if (min_eig < -kPsdTol * static_cast<double>(n)) {
      std::ostringstream msg;
      msg << "Gram matrix is not positive semidefinite: min eigenvalue "
          << min_eig;
      throw ValidationError(msg.str());
    }
    h_ = HermitianMatrix(m);
  }

  explicit GramMatrix(const CMat& a) : GramMatrix(HermitianMatrix(a)) {}

  Index size() const { return h_.dim(); }
  const HermitianMatrix& hermitian() const { return h_; }
  const CMat& mat() const { return h_.mat(); }
  Complex operator()(Index i, Index j) const { return h_(i, j); }

 private:
  HermitianMatrix h_;
};

/// G[i][j] = <psi_i|psi_j>.
inline GramMatrix gram_from_states(const StateSet& s) {
  return GramMatrix(CMat(s.columns().adjoint() * s.columns()));
}

/// Recovers a family of pure states with the given Gram matrix, embedded in
/// dimension d = rank(G). With G = Q diag(lambda) Q*, the state matrix is
/// W = diag(sqrt(lambda_r)) Q_r^* over the eigenvalues above rank_tol, so
/// that W^* W = G. A negative rank_tol selects 1e-10 * lambda_max.
inline StateSet states_from_gram(const GramMatrix& g, double rank_tol = -1.0) {
  const Spectrum s = eig_hermitian(g.hermitian());
  const double lambda_max = std::max(s.eigenvalues(0), 0.0);
  const double tol = rank_tol >= 0.0 ? rank_tol : 1e-10 * lambda_max;
  Index rank = 0;
  while (rank < g.size() && s.eigenvalues(rank) > tol) ++rank;
  if (rank == 0) {
    throw NumericError("states_from_gram: Gram matrix is numerically zero");
  }
  CMat w(rank, g.size());
  for (Index k = 0; k < rank; ++k) {
    w.row(k) = std::sqrt(s.eigenvalues(k)) * s.eigenvectors.col(k).adjoint();
  }
  return StateSet(std::move(w));
}

/// Circulant structure report for a Gram matrix.
///
/// first_row holds the cyclic-diagonal averages g_k = mean_i G[i][(i+k)%n]
/// (equal to G's own first row when G is circulant), deviation is the largest
/// shift-invariance residual |G[i][j] - G[(i+1)%n][(j+1)%n]|, and the
/// eigenvalues are the DFT of first_row: real parts sorted descending, with
/// the discarded imaginary residue recorded. dft_eigenvalues keeps the
/// unsorted Fourier-bin order needed to rebuild circulant objects.
struct CirculantProfile {
  bool is_circulant = false;
  double deviation = 0.0;
  CVec first_row;
  RVec eigenvalues;      // sorted descending
  RVec dft_eigenvalues;  // bin order: lambda_j = sum_k g_k omega^{jk}
  double imag_residue = 0.0;
};

namespace detail {

/// DFT-order eigenvalues of the circulant matrix with the given first row:
/// lambda_j = sum_k g_k omega^{jk}. Returns the discarded imaginary residue.
inline double dft_eigenvalues_of_row(const CVec& row, RVec& out) {
  const Index n = row.size();
  out.resize(n);
  double imag_residue = 0.0;
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (Index j = 0; j < n; ++j) {
    Complex acc = 0.0;
    for (Index k = 0; k < n; ++k) {
      acc += row(k) * std::polar(1.0, step * static_cast<double>((j * k) % n));
    }
    out(j) = acc.real();
    imag_residue = std::max(imag_residue, std::abs(acc.imag()));
  }
  return imag_residue;
}

}  // namespace detail

inline CirculantProfile profile_circulant_part(const HermitianMatrix& h,
                                               double tol) {
  const Index n = h.dim();
  CirculantProfile profile;
  profile.deviation = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      profile.deviation =
          std::max(profile.deviation,
                   std::abs(h(i, j) - h((i + 1) % n, (j + 1) % n)));
    }
  }
  profile.is_circulant = profile.deviation <= tol;
  profile.first_row = CVec::Zero(n);
  for (Index k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      acc += h(i, (i + k) % n);
    }
    profile.first_row(k) = acc / static_cast<double>(n);
  }
  profile.imag_residue =
      detail::dft_eigenvalues_of_row(profile.first_row,
                                     profile.dft_eigenvalues);
  profile.eigenvalues = profile.dft_eigenvalues;
  std::sort(profile.eigenvalues.data(), profile.eigenvalues.data() + n,
            std::greater<double>());
  return profile;
}

inline CirculantProfile circulant_profile(const GramMatrix& g,
                                          double tol = 1e-9) {
  return profile_circulant_part(g.hermitian(), tol);
}

/// Builds the circulant Gram matrix G = F diag(lambda) F* from a spectrum in
/// DFT bin order. The spectrum must be (numerically) nonnegative and sum to
/// n, which makes the constant diagonal of G equal to one.
inline GramMatrix circulant_from_eigenvalues(const RVec& dft_eigenvalues) {
  const Index n = dft_eigenvalues.size();
  if (n < 2) {
    throw ValidationError("circulant_from_eigenvalues needs n >= 2 values");
  }
  RVec lambda = dft_eigenvalues;
  double sum = 0.0;
  for (Index j = 0; j < n; ++j) {
    if (lambda(j) < -GramMatrix::kPsdTol) {
      throw ValidationError(
          "circulant_from_eigenvalues: negative eigenvalue " +
          std::to_string(lambda(j)));
    }
    lambda(j) = std::max(lambda(j), 0.0);
    sum += lambda(j);
  }
  if (std::abs(sum - static_cast<double>(n)) > 1e-8 * n) {
    throw ValidationError(
        "circulant_from_eigenvalues: eigenvalues sum to " +
        std::to_string(sum) + ", expected " + std::to_string(n));
  }
  const CMat f = fourier_matrix(n);
  return GramMatrix(CMat(f * lambda.cast<Complex>().asDiagonal() *
                         f.adjoint()));
}

/// Generator presentation of a circulant family: a single real nonnegative
/// state psi and a list of unit phases such that, with U the diagonal unitary
/// carrying those phases, the states {U^i psi} have Gram matrix G. The
/// convention fixed here is psi[j] = sqrt(lambda_j/n) (lambda in DFT bin
/// order) with U applying phase omega^{-j} to coordinate j.
struct SymmetricGenerator {
  RVec state;
  CVec phases;
};

inline SymmetricGenerator symmetric_generator(const GramMatrix& g,
                                              double tol = 1e-9) {
  CirculantProfile profile = circulant_profile(g, tol);
  if (!profile.is_circulant) {
    throw ValidationError(
        "symmetric_generator requires a circulant Gram matrix (deviation " +
        std::to_string(profile.deviation) + ")");
  }
  const Index n = g.size();
  SymmetricGenerator gen;
  gen.state = RVec(n);
  gen.phases = CVec(n);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (Index j = 0; j < n; ++j) {
    gen.state(j) = std::sqrt(
        std::max(profile.dft_eigenvalues(j), 0.0) / static_cast<double>(n));
    gen.phases(j) = std::polar(1.0, -step * static_cast<double>(j));
  }
  return gen;
}

/// Expands a symmetric generator into the explicit n-state family
/// {psi, U psi, ..., U^{n-1} psi}.
inline StateSet generator_states(const SymmetricGenerator& gen) {
  const Index n = gen.state.size();
  CMat w(n, n);
  CVec cur = gen.state.cast<Complex>();
  for (Index i = 0; i < n; ++i) {
    w.col(i) = cur;
    cur = gen.phases.cwiseProduct(cur);
  }
  return StateSet(std::move(w));
}

// ---------------------------------------------------------------------------
// Named input families.
// ---------------------------------------------------------------------------

/// Equiangular family: unit diagonal and constant off-diagonal gamma in
/// [0, 1]. Always positive semidefinite on that range.
inline GramMatrix make_equiangular(Index n, double gamma) {
  if (n < 2) throw ValidationError("make_equiangular requires n >= 2");
  if (gamma < 0.0 || gamma > 1.0) {
    throw ValidationError("make_equiangular: gamma " + std::to_string(gamma) +
                          " outside [0, 1]");
  }
  CMat g = CMat::Constant(n, n, gamma);
  g.diagonal().setConstant(1.0);
  return GramMatrix(g);
}

/// The three symmetric qubit states at mutual angle 120 degrees; all pairwise
/// inner products equal -1/2.
inline StateSet make_trine() {
  CMat w(2, 3);
  const double root3 = std::sqrt(3.0);
  w.col(0) << 1.0, 0.0;
  w.col(1) << -0.5, -0.5 * root3;
  w.col(2) << -0.5, 0.5 * root3;
  return StateSet(std::move(w));
}

/// A four-state family whose base Gram matrix g has all off-diagonal moduli
/// exactly 1/sqrt(3), together with a perturbed version g_eps whose moduli
/// stay near 1/sqrt(3) but which loses antidistinguishability for eps > 0.
/// Valid for 0 <= eps < 1/10 (positive semidefiniteness fails beyond that);
/// at eps = 0 the two matrices coincide.
struct D4Example {
  GramMatrix g;
  GramMatrix g_eps;
};

inline D4Example make_d4_example(double eps) {
  if (eps < 0.0 || eps >= 0.1) {
    throw ValidationError("make_d4_example requires 0 <= eps < 0.1");
  }
  const double c = 1.0 / std::sqrt(3.0);
  const Complex ci(0.0, c);
  CMat g(4, 4);
  g << 1.0, c, c, c,                          //
      c, 1.0, ci, 0.5 * (1.0 + ci),           //
      c, -ci, 1.0, 0.5 * (1.0 - ci),          //
      c, 0.5 * (1.0 - ci), 0.5 * (1.0 + ci), 1.0;
  GramMatrix base{g};
  if (eps == 0.0) return D4Example{base, base};

  const double root3 = std::sqrt(3.0);
  CVec v(4);
  v << 1.0, Complex(-root3 / 2.0, 0.5), Complex(-root3 / 2.0, -0.5), 0.0;
  CVec w = CVec::Zero(4);
  w(3) = 1.0;
  CMat perturbed =
      (g + eps * (v * v.adjoint() + w * w.adjoint() -
                  3.0 * CMat::Identity(4, 4))) /
      (1.0 - 2.0 * eps);
  return D4Example{base, GramMatrix{perturbed}};
}

}  // namespace antidist
