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

// Machine-checkable certificates for both possible answers.
//
// A YES answer (antidistinguishable) is certified by an incoherence
// decomposition: G = F_0 + ... + F_{n-1} with each F_i PSD and the i-th row
// and column of F_i identically zero. A NO answer is certified by a witness
// Y whose (n-1)x(n-1) principal submatrices are all PSD while Tr(YG) < 0;
// such a Y separates G from the cone of matrices admitting a decomposition.
//
// Verifiers re-derive every claim from the raw matrices; constructors for the
// closed-form certificate families and rounding routines that turn
// approximate solver iterates into exactly-structured certificates feed them.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "antidist/gram.hpp"

namespace antidist {

/// Certificate that G is antidistinguishable: blocks F_0..F_{n-1}, PSD, with
/// row/column i of F_i exactly zero, summing to G.
struct IncoherenceDecomposition {
  Index n = 0;
  std::vector<HermitianMatrix> blocks;
  double sum_residual = 0.0;   ///< ||sum F_i - target||_F at build time
  double min_block_eig = 0.0;  ///< smallest eigenvalue over all blocks
};

/// Certificate that G is not antidistinguishable: Y with every (n-1)x(n-1)
/// principal submatrix PSD and Tr(YG) < 0.
struct LocallyPsdWitness {
  Index n = 0;
  HermitianMatrix y;
  double min_submatrix_eig = 0.0;  ///< over all n principal submatrices
  double trace_product = 0.0;      ///< Tr(YG) against the bound target
};

struct DecompositionReport {
  bool accepted = false;
  double pattern_violation = 0.0;  ///< max |entry| on rows/columns that must be zero
  double min_block_eig = 0.0;
  double sum_residual = 0.0;
  std::string detail;
};

struct WitnessReport {
  bool accepted = false;
  double min_submatrix_eig = 0.0;
  double trace_product = 0.0;
  std::string detail;
};

namespace detail {

inline double trace_product_real(const HermitianMatrix& y,
                                 const HermitianMatrix& target) {
  return (y.mat() * target.mat()).trace().real();
}

inline double min_submatrix_eigenvalue(const HermitianMatrix& y) {
  double worst = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < y.dim(); ++i) {
    worst = std::min(worst, min_eigenvalue(principal_submatrix(y, i)));
  }
  return worst;
}

inline double min_block_eigenvalue(
    const std::vector<HermitianMatrix>& blocks) {
  double worst = std::numeric_limits<double>::infinity();
  for (const HermitianMatrix& f : blocks) {
    worst = std::min(worst, min_eigenvalue(f));
  }
  return worst;
}

inline CMat block_sum(const std::vector<HermitianMatrix>& blocks) {
  CMat sum = CMat::Zero(blocks.front().dim(), blocks.front().dim());
  for (const HermitianMatrix& f : blocks) sum += f.mat();
  return sum;
}

}  // namespace detail

/// Checks an incoherence decomposition against a Hermitian target: the zero
/// rows/columns must hold exactly (they are structural, not approximate),
/// blocks must be PSD within tol, and the blocks must sum to the target
/// within tol * n in Frobenius norm. Default tol 1e-7.
inline DecompositionReport verify_decomposition(
    const HermitianMatrix& target, const IncoherenceDecomposition& dec,
    double tol = 1e-7) {
  const Index n = target.dim();
  if (dec.n != n || static_cast<Index>(dec.blocks.size()) != n) {
    throw ValidationError("verify_decomposition: expected " +
                          std::to_string(n) + " blocks of size " +
                          std::to_string(n));
  }
  for (const HermitianMatrix& f : dec.blocks) {
    if (f.dim() != n) {
      throw ValidationError("verify_decomposition: block dimension mismatch");
    }
  }
  DecompositionReport report;
  for (Index i = 0; i < n; ++i) {
    const CMat& f = dec.blocks[static_cast<std::size_t>(i)].mat();
    for (Index k = 0; k < n; ++k) {
      report.pattern_violation =
          std::max({report.pattern_violation, std::abs(f(i, k)),
                    std::abs(f(k, i))});
    }
  }
  report.min_block_eig = detail::min_block_eigenvalue(dec.blocks);
  report.sum_residual = (detail::block_sum(dec.blocks) - target.mat()).norm();
  report.accepted = report.pattern_violation == 0.0 &&
                    report.min_block_eig >= -tol &&
                    report.sum_residual <= tol * static_cast<double>(n);
  std::ostringstream msg;
  msg << (report.accepted ? "accepted" : "rejected")
      << ": pattern violation " << report.pattern_violation
      << ", min block eigenvalue " << report.min_block_eig
      << ", sum residual " << report.sum_residual << " (tol " << tol << ")";
  report.detail = msg.str();
  return report;
}

inline DecompositionReport verify_decomposition(
    const GramMatrix& g, const IncoherenceDecomposition& dec,
    double tol = 1e-7) {
  return verify_decomposition(g.hermitian(), dec, tol);
}

/// Checks a witness against a Hermitian target: all n principal submatrices
/// of Y must be PSD within tol, and the trace pairing must be decisively
/// negative (<= -10 * tol * ||G||_F) so that submatrix tolerance slack cannot
/// explain the negativity away.
inline WitnessReport verify_witness(const HermitianMatrix& target,
                                    const LocallyPsdWitness& w,
                                    double tol = 1e-7) {
  if (w.n != target.dim() || w.y.dim() != target.dim()) {
    throw ValidationError("verify_witness: dimension mismatch (target " +
                          std::to_string(target.dim()) + ", witness " +
                          std::to_string(w.y.dim()) + ")");
  }
  WitnessReport report;
  report.min_submatrix_eig = detail::min_submatrix_eigenvalue(w.y);
  report.trace_product = detail::trace_product_real(w.y, target);
  report.accepted =
      report.min_submatrix_eig >= -tol &&
      report.trace_product <= -10.0 * tol * target.frobenius_norm();
  std::ostringstream msg;
  msg << (report.accepted ? "accepted" : "rejected")
      << ": min submatrix eigenvalue " << report.min_submatrix_eig
      << ", trace product " << report.trace_product << " (tol " << tol << ")";
  report.detail = msg.str();
  return report;
}

inline WitnessReport verify_witness(const GramMatrix& g,
                                    const LocallyPsdWitness& w,
                                    double tol = 1e-7) {
  return verify_witness(g.hermitian(), w, tol);
}

/// Closed-form decomposition for the equiangular family: for gamma up to
/// (n-2)/(n-1),
///   F_i = (1/(n-1) - gamma/(n-2)) (I - |i><i|)
///       + (gamma/(n-2)) (1 - e_i)(1 - e_i)^T
/// sums to I + gamma(J - I) with row/column i of F_i structurally zero.
/// Requires n >= 3 (the formula divides by n-2).
inline IncoherenceDecomposition make_equiangular_decomposition(Index n,
                                                               double gamma) {
  if (n < 3) {
    throw ValidationError(
        "make_equiangular_decomposition requires n >= 3, got " +
        std::to_string(n));
  }
  const double threshold =
      static_cast<double>(n - 2) / static_cast<double>(n - 1);
  if (!(gamma >= 0.0) || gamma > threshold) {
    throw ValidationError(
        "make_equiangular_decomposition requires 0 <= gamma <= (n-2)/(n-1)");
  }
  const double a =
      1.0 / static_cast<double>(n - 1) - gamma / static_cast<double>(n - 2);
  const double b = gamma / static_cast<double>(n - 2);
  IncoherenceDecomposition dec;
  dec.n = n;
  dec.blocks.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    CMat f = CMat::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      for (Index k = 0; k < n; ++k) {
        if (k == i) continue;
        f(j, k) = (j == k) ? Complex(a + b, 0.0) : Complex(b, 0.0);
      }
    }
    dec.blocks.emplace_back(f);
  }
  dec.min_block_eig = detail::min_block_eigenvalue(dec.blocks);
  dec.sum_residual =
      (detail::block_sum(dec.blocks) - make_equiangular(n, gamma).mat())
          .norm();
  return dec;
}

/// Witness behind the sum rule: Y = (n-1)I - E with E[i][j] the unit-modulus
/// phase of G[i][j] (phase 0, i.e. entry 1, where G[i][j] = 0). Every
/// principal submatrix is diagonally dominant (diagonal n-2 against n-2
/// unit-modulus entries), so Y is always locally PSD, and
/// Tr(YG) = n(n-2) - sum_{i != j} |G[i][j]|, negative exactly when the sum
/// rule fires.
inline LocallyPsdWitness make_sum_ip_witness(const GramMatrix& g) {
  const Index n = g.size();
  CMat y = CMat::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) {
        y(i, j) = Complex(static_cast<double>(n - 2), 0.0);
        continue;
      }
      const Complex entry = g(i, j);
      const double mod = std::abs(entry);
      y(i, j) = mod == 0.0 ? Complex(-1.0, 0.0) : -entry / mod;
    }
  }
  LocallyPsdWitness w{g.size(), HermitianMatrix(y)};
  w.min_submatrix_eig = detail::min_submatrix_eigenvalue(w.y);
  w.trace_product = detail::trace_product_real(w.y, g.hermitian());
  return w;
}

namespace detail {

/// First fixed witness part for the four-state example: trace pairs to zero
/// with every G_eps in the family.
inline HermitianMatrix d4_witness_y() {
  const double r = std::sqrt(3.0);
  CMat y(4, 4);
  y << Complex(2, 0), Complex(-r, -1), Complex(-r, 1), Complex(0, 0),
      Complex(-r, 1), Complex(2, 0), Complex(1, -r), Complex(0, 0),
      Complex(-r, -1), Complex(1, r), Complex(2, 0), Complex(0, 0),
      Complex(0, 0), Complex(0, 0), Complex(0, 0), Complex(0, 0);
  return HermitianMatrix(y);
}

/// Second, eps-dependent witness part: trace pairs to a strictly negative
/// value proportional to eps^2.
inline HermitianMatrix d4_witness_z(double eps) {
  const double r = std::sqrt(3.0);
  CMat z(4, 4);
  z << Complex(0, 0), Complex(1, r), Complex(1, -r), Complex(-2, 0),
      Complex(1, -r), Complex(0, 0), Complex(-r, 1), Complex(-r, -1),
      Complex(1, r), Complex(-r, -1), Complex(0, 0), Complex(-r, 1),
      Complex(-2, 0), Complex(-r, 1), Complex(-r, -1),
      Complex(2.0 * r * (1.0 + 5.0 * eps), 0);
  return HermitianMatrix(z);
}

}  // namespace detail

/// Witness X = Y + delta * Z for the perturbed four-state example, locally
/// PSD for 0 < delta <= 5 sqrt(3) eps / (1 + 5 eps), with
/// Tr(X G_eps) = -(20 sqrt(3)) delta eps^2 / (1 - 2 eps) < 0.
inline LocallyPsdWitness make_d4_witness(double eps, double delta) {
  if (!(eps > 0.0) || !(eps < 0.1)) {
    throw ValidationError("make_d4_witness requires 0 < eps < 1/10");
  }
  const double delta_max = 5.0 * std::sqrt(3.0) * eps / (1.0 + 5.0 * eps);
  if (!(delta > 0.0) || delta > delta_max) {
    throw ValidationError(
        "make_d4_witness requires 0 < delta <= 5*sqrt(3)*eps/(1+5*eps)");
  }
  const HermitianMatrix x(detail::d4_witness_y().mat() +
                          delta * detail::d4_witness_z(eps).mat());
  LocallyPsdWitness w{4, x};
  w.min_submatrix_eig = detail::min_submatrix_eigenvalue(w.y);
  w.trace_product =
      detail::trace_product_real(w.y, make_d4_example(eps).g_eps.hermitian());
  return w;
}

/// Rounds near-feasible solver blocks into an exactly-structured certificate:
/// 1. zero row/column i of block i (structural requirement, enforced exactly)
/// 2. project each block onto the PSD cone
/// 3. re-zero (the projection may smear dust back onto the zeroed lines;
///    compressing a PSD matrix keeps it PSD)
/// 4. spread the remaining sum residual G - sum F_i uniformly over the blocks
///    allowed to carry each entry (those whose zero pattern does not touch
///    it), restoring sum F_i = G up to accumulation dust
/// 5. verify; only a verified certificate is returned.
inline std::pair<std::optional<IncoherenceDecomposition>, DecompositionReport>
round_decomposition(const GramMatrix& g,
                    const std::vector<HermitianMatrix>& blocks,
                    double tol = 1e-7) {
  const Index n = g.size();
  if (static_cast<Index>(blocks.size()) != n) {
    throw ValidationError("round_decomposition: expected " +
                          std::to_string(n) + " blocks");
  }
  std::vector<CMat> work;
  work.reserve(blocks.size());
  for (Index i = 0; i < n; ++i) {
    if (blocks[static_cast<std::size_t>(i)].dim() != n) {
      throw ValidationError("round_decomposition: block dimension mismatch");
    }
    CMat f = blocks[static_cast<std::size_t>(i)].mat();
    f.row(i).setZero();
    f.col(i).setZero();
    f = project_psd(HermitianMatrix(f)).mat();
    f.row(i).setZero();
    f.col(i).setZero();
    work.push_back(std::move(f));
  }
  // Alternate between restoring the affine constraint (spread the residual
  // of sum F_i = G over the blocks allowed to carry each entry) and the cone
  // constraints (PSD projection, then re-zeroing row/column i). Both sets
  // are convex, so the alternation contracts; a few passes shrink the
  // negativity that a single redistribution can re-introduce. The loop ends
  // on a redistribution so the affine constraint holds to round-off.
  constexpr int kPasses = 3;
  for (int pass = 0; pass < kPasses; ++pass) {
    CMat residual = g.mat();
    for (const CMat& f : work) residual -= f;
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < n; ++k) {
        // Blocks i with i != j and i != k may carry entry (j, k).
        const Index count = (j == k) ? n - 1 : n - 2;
        if (count <= 0) continue;
        const Complex share = residual(j, k) / static_cast<double>(count);
        for (Index i = 0; i < n; ++i) {
          if (i == j || i == k) continue;
          work[static_cast<std::size_t>(i)](j, k) += share;
        }
      }
    }
    if (pass + 1 == kPasses) break;
    for (Index i = 0; i < n; ++i) {
      CMat& f = work[static_cast<std::size_t>(i)];
      f = project_psd(HermitianMatrix(f)).mat();
      f.row(i).setZero();
      f.col(i).setZero();
    }
  }
  IncoherenceDecomposition dec;
  dec.n = n;
  dec.blocks.reserve(work.size());
  for (CMat& f : work) dec.blocks.emplace_back(std::move(f));
  dec.min_block_eig = detail::min_block_eigenvalue(dec.blocks);
  dec.sum_residual = (detail::block_sum(dec.blocks) - g.mat()).norm();
  DecompositionReport report = verify_decomposition(g, dec, tol);
  if (!report.accepted) return {std::nullopt, std::move(report)};
  return {std::move(dec), std::move(report)};
}

/// Rounds an approximate dual iterate into a witness: optionally replace X by
/// its circulant twirl (valid when G is circulant: the twirl fixes G, so the
/// trace pairing is unchanged while local positivity can only improve), then
/// shift by eta*I with eta the worst submatrix deficiency so every principal
/// submatrix becomes PSD, and accept only if the trace pairing survives the
/// shift penalty of eta * Tr(G).
inline std::pair<std::optional<LocallyPsdWitness>, WitnessReport>
round_witness(const GramMatrix& g, const HermitianMatrix& x, bool circulant,
              double tol = 1e-7) {
  const Index n = g.size();
  if (x.dim() != n) {
    throw ValidationError("round_witness: dimension mismatch");
  }
  HermitianMatrix y = circulant ? circulant_twirl(x) : x;
  const double min_sub = detail::min_submatrix_eigenvalue(y);
  const double eta = std::max(0.0, -min_sub);
  if (eta > 0.0) {
    y = HermitianMatrix(y.mat() + eta * CMat::Identity(n, n));
  }
  LocallyPsdWitness w{n, y};
  w.min_submatrix_eig = detail::min_submatrix_eigenvalue(w.y);
  w.trace_product = detail::trace_product_real(w.y, g.hermitian());
  WitnessReport report = verify_witness(g, w, tol);
  if (!report.accepted) return {std::nullopt, std::move(report)};
  return {std::move(w), std::move(report)};
}

/// Closed-form witness for a circulant Gram matrix on the NO side of the
/// exact eigenvalue rule. Writing lam_max for the largest DFT eigenvalue of
/// G (bin j*) and q for the sum of the square roots of the others, the
/// witness is circulant with DFT eigenvalues
///   d_{j*} = -1,   d_j = q~ / sqrt(lam_j)  (j != j*),
/// where q~ clips vanishing eigenvalues at dust scale so that
/// sum_j 1/d_j = 1 exactly: that puts Y on the boundary of the locally-PSD
/// cone (the last elementary symmetric polynomial of d vanishes), and the
/// trace pairing is Tr(YG) = q~^2 - lam_max + O(sqrt(dust)), negative
/// precisely when the exact rule decides NO. For rank-one G the formula
/// degenerates to the flat witness (n-1)(I - |i><i|) pattern d = (-1,
/// n-1, ..., n-1). Returns the verified witness or the rejection report.
inline std::pair<std::optional<LocallyPsdWitness>, WitnessReport>
make_circulant_witness(const GramMatrix& g, double tol = 1e-7) {
  const CirculantProfile profile = circulant_profile(g);
  if (!profile.is_circulant) {
    throw ValidationError(
        "make_circulant_witness requires a circulant Gram matrix (deviation " +
        std::to_string(profile.deviation) + ")");
  }
  const Index n = g.size();
  const RVec& bins = profile.dft_eigenvalues;
  Index j_star = 0;
  for (Index j = 1; j < n; ++j) {
    if (bins(j) > bins(j_star)) j_star = j;
  }
  const double lam_max = bins(j_star);
  const double dust = 1e-12 * std::max(lam_max, 1.0);
  double q_clip = 0.0;
  for (Index j = 0; j < n; ++j) {
    if (j != j_star) q_clip += std::sqrt(std::max(bins(j), dust));
  }
  RVec d(n);
  d(j_star) = -1.0;
  for (Index j = 0; j < n; ++j) {
    if (j == j_star) continue;
    d(j) = q_clip / std::sqrt(std::max(bins(j), dust));
  }
  const CMat f = fourier_matrix(n);
  const CMat y = f * d.cast<Complex>().asDiagonal() * f.adjoint();
  LocallyPsdWitness w{n, HermitianMatrix(y)};
  w.min_submatrix_eig = detail::min_submatrix_eigenvalue(w.y);
  w.trace_product = detail::trace_product_real(w.y, g.hermitian());
  WitnessReport report = verify_witness(g, w, tol);
  if (!report.accepted) return {std::nullopt, std::move(report)};
  return {std::move(w), std::move(report)};
}

/// Result of the circulant local-positivity test: margins(k-1) holds the
/// elementary symmetric polynomial S_k of the DFT eigenvalues, k = 1..n-1.
struct CirculantLocalPsdResult {
  bool locally_psd = false;
  RVec margins;
  double imag_residue = 0.0;
};

/// A circulant Hermitian Y is locally PSD exactly when the first n-1
/// elementary symmetric polynomials of its eigenvalue vector d are
/// nonnegative. The S_k are read off as coefficients of prod_j (t + d_j),
/// accumulated in one pass; each is compared against -1e-9 times its own
/// natural scale e_k(|d|).
inline CirculantLocalPsdResult circulant_locally_psd_check(
    const HermitianMatrix& y, double circulant_tol = 1e-7) {
  const Index n = y.dim();
  if (n < 2) {
    throw ValidationError("circulant_locally_psd_check requires n >= 2");
  }
  CirculantProfile profile = profile_circulant_part(y, circulant_tol);
  if (!profile.is_circulant) {
    throw ValidationError(
        "circulant_locally_psd_check requires circulant input (deviation " +
        std::to_string(profile.deviation) + ")");
  }
  const RVec& d = profile.dft_eigenvalues;
  std::vector<double> e(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> e_abs(static_cast<std::size_t>(n) + 1, 0.0);
  e[0] = 1.0;
  e_abs[0] = 1.0;
  for (Index j = 0; j < n; ++j) {
    for (Index k = j + 1; k >= 1; --k) {
      e[static_cast<std::size_t>(k)] +=
          d(j) * e[static_cast<std::size_t>(k) - 1];
      e_abs[static_cast<std::size_t>(k)] +=
          std::abs(d(j)) * e_abs[static_cast<std::size_t>(k) - 1];
    }
  }
  CirculantLocalPsdResult result;
  result.margins = RVec(n - 1);
  result.imag_residue = profile.imag_residue;
  result.locally_psd = true;
  for (Index k = 1; k < n; ++k) {
    const double s = e[static_cast<std::size_t>(k)];
    result.margins(k - 1) = s;
    const double scale = std::max(1.0, e_abs[static_cast<std::size_t>(k)]);
    if (s < -1e-9 * scale) result.locally_psd = false;
  }
  return result;
}

}  // namespace antidist
