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

// Closed-form antidistinguishability criteria.
//
// Two families of inequalities on a Gram matrix G of n pure states:
//
//  * "large inner products" rules (strict), which certify that the family is
//    NOT antidistinguishable:
//      - sum rule:       sum_{i != j} |G[i][j]|  >  n(n-2)
//      - pairwise rule:  |G[i][j]| > (n-2)/(n-1) for every i != j
//
//  * "small inner products" rules (non-strict), which certify that the family
//    IS antidistinguishable:
//      - eigenvalue rule: sqrt(l_0) <= sum_{j>=1} sqrt(l_j) over the sorted
//        eigenvalues l_0 >= ... >= l_{n-1} of G
//      - Frobenius rule:  ||G||_F <= n/sqrt(2)
//      - pairwise rule:   |G[i][j]| <= sqrt((n-2)/(2n-2)) for every i != j
//
// The eigenvalue rule is exact (necessary AND sufficient) when G is
// circulant; decide_circulant_exact exposes that two-sided form. Each check
// returns a signed margin so callers can see how close an instance sits to
// the threshold, and the eigenvalue rule additionally returns a rank-one
// feasibility certificate for its conclusion.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "antidist/gram.hpp"

namespace antidist {

enum class Rule {
  SumIP_NotAnti,
  PairwiseIP_NotAnti,
  Eigenvalue_Anti,
  Frobenius_Anti,
  PairwiseIP_Anti,
  CirculantExact,
};

inline const char* rule_name(Rule rule) {
  switch (rule) {
    case Rule::SumIP_NotAnti: return "SumIP_NotAnti";
    case Rule::PairwiseIP_NotAnti: return "PairwiseIP_NotAnti";
    case Rule::Eigenvalue_Anti: return "Eigenvalue_Anti";
    case Rule::Frobenius_Anti: return "Frobenius_Anti";
    case Rule::PairwiseIP_Anti: return "PairwiseIP_Anti";
    case Rule::CirculantExact: return "CirculantExact";
  }
  return "unknown";
}

/// Outcome of evaluating one rule: whether it fired and by how much.
/// margin is the signed slack in the rule's inequality, oriented so the rule
/// fires when margin > 0 (strict rules) or margin >= 0 (non-strict rules).
/// Margins within 1e-9 of zero are flagged as boundary cases in `detail`,
/// since floating point cannot separate the two sides there.
struct BoundVerdict {
  Rule rule;
  bool applies = false;
  double margin = 0.0;
  std::string detail;

  bool boundary() const { return std::abs(margin) < kBoundaryTol; }
  static constexpr double kBoundaryTol = 1e-9;
};

namespace detail {

inline std::string margin_detail(double margin) {
  std::ostringstream msg;
  msg << "margin " << margin;
  if (std::abs(margin) < BoundVerdict::kBoundaryTol) msg << " (boundary)";
  return msg.str();
}

/// Eigenvalues clipped at zero before square-rooting: inputs are valid Gram
/// matrices up to tolerance, so negative dust is roundoff, not signal.
inline double clipped_sqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

/// Square root is non-Lipschitz at zero: an eigenvalue that is really zero
/// but computed as 1e-16 contributes 1e-8 of noise after the square root,
/// swamping the 1e-9 boundary resolution. Eigenvalues below this relative
/// threshold are treated as exact zeros; dropping them only shrinks the
/// right-hand sum, so a fired rule is still sound.
constexpr double kEigenvalueDustTol = 1e-12;

inline double dust_clipped(double lam, double lam_max) {
  return lam <= kEigenvalueDustTol * std::max(lam_max, 0.0) ? 0.0 : lam;
}

}  // namespace detail

/// Sum rule: sum_{i != j} |G[i][j]| > n(n-2) implies NOT antidistinguishable
/// (strict).
inline BoundVerdict check_sum_ip(const GramMatrix& g) {
  const Index n = g.size();
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) sum += std::abs(g(i, j));
    }
  }
  BoundVerdict v{Rule::SumIP_NotAnti};
  v.margin = sum - static_cast<double>(n) * static_cast<double>(n - 2);
  v.applies = v.margin > 0.0;
  v.detail = "sum of off-diagonal moduli " + std::to_string(sum) + "; " +
             detail::margin_detail(v.margin);
  return v;
}

/// Pairwise rule: every |G[i][j]| > (n-2)/(n-1) implies NOT
/// antidistinguishable (strict).
inline BoundVerdict check_pairwise_ip_large(const GramMatrix& g) {
  const Index n = g.size();
  double min_mod = 1.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) min_mod = std::min(min_mod, std::abs(g(i, j)));
    }
  }
  BoundVerdict v{Rule::PairwiseIP_NotAnti};
  const double threshold =
      static_cast<double>(n - 2) / static_cast<double>(n - 1);
  v.margin = min_mod - threshold;
  v.applies = v.margin > 0.0;
  v.detail = "smallest off-diagonal modulus " + std::to_string(min_mod) +
             " vs threshold " + std::to_string(threshold) + "; " +
             detail::margin_detail(v.margin);
  return v;
}

/// Rank-one feasibility certificate for the eigenvalue rule. With the sorted
/// eigenvalues l_0 >= ... >= l_{n-1} of G and q = sum_{j>=1} sqrt(l_j), the
/// vector v with v_0 = -q - sqrt(q^2 - l_0) and v_j = sqrt(l_j) makes
/// Lambda = v v^T satisfy
///     l_0 = -Lambda[0][0] - sum_{i>=1} (Lambda[0][i] + Lambda[i][0])
///     l_j =  Lambda[j][j]                (j >= 1),
/// which is exactly the feasibility system whose solvability is equivalent
/// to the rule's hypothesis sqrt(l_0) <= q.
struct LambdaCertificate {
  RVec v;
  double q = 0.0;
};

inline LambdaCertificate build_lambda_certificate(const RVec& sorted_lams) {
  const Index n = sorted_lams.size();
  if (n < 2) {
    throw ValidationError("build_lambda_certificate needs n >= 2 values");
  }
  double q = 0.0;
  for (Index j = 1; j < n; ++j) q += detail::clipped_sqrt(sorted_lams(j));
  const double l0 = std::max(sorted_lams(0), 0.0);
  // At the boundary q^2 == l_0 the discriminant may land a few ulp negative;
  // clamp that roundoff to zero but reject genuine infeasibility.
  double disc = q * q - l0;
  if (disc < 0.0) {
    if (disc < -1e-9 * std::max(l0, 1.0)) {
      throw ValidationError(
          "build_lambda_certificate: q^2 < lambda_0, no real solution");
    }
    disc = 0.0;
  }
  LambdaCertificate cert;
  cert.q = q;
  cert.v = RVec(n);
  cert.v(0) = -q - std::sqrt(disc);
  for (Index j = 1; j < n; ++j) cert.v(j) = detail::clipped_sqrt(sorted_lams(j));
  return cert;
}

/// Largest relative residual of the two defining equalities of the
/// certificate's feasibility system against the given sorted eigenvalues.
inline double lambda_certificate_residual(const LambdaCertificate& cert,
                                          const RVec& sorted_lams) {
  const Index n = sorted_lams.size();
  const RVec& v = cert.v;
  // Lambda = v v^T, so Lambda[0][j] = v_0 v_j.
  double first = -v(0) * v(0);
  for (Index i = 1; i < n; ++i) first -= 2.0 * v(0) * v(i);
  const double scale0 = std::max(1.0, std::abs(sorted_lams(0)));
  double worst = std::abs(first - sorted_lams(0)) / scale0;
  for (Index j = 1; j < n; ++j) {
    const double scale = std::max(1.0, std::abs(sorted_lams(j)));
    worst = std::max(worst, std::abs(v(j) * v(j) - sorted_lams(j)) / scale);
  }
  return worst;
}

namespace detail {

inline BoundVerdict eigenvalue_verdict(const RVec& sorted_lams, Rule rule) {
  const Index n = sorted_lams.size();
  const double lam_max = sorted_lams(0);
  double q = 0.0;
  for (Index j = 1; j < n; ++j) {
    q += clipped_sqrt(dust_clipped(sorted_lams(j), lam_max));
  }
  BoundVerdict v{rule};
  const double root0 = clipped_sqrt(lam_max);
  v.margin = q - root0;
  v.applies = v.margin >= 0.0;
  v.detail = "sqrt(lambda_0) " + std::to_string(root0) +
             " vs remaining sum " + std::to_string(q) + "; " +
             margin_detail(v.margin);
  return v;
}

}  // namespace detail

/// Eigenvalue rule: sqrt(l_0) <= sum_{j>=1} sqrt(l_j) implies
/// antidistinguishable (non-strict). When the rule fires, the accompanying
/// certificate witnesses feasibility of the underlying system.
inline std::pair<BoundVerdict, std::optional<LambdaCertificate>>
check_eigenvalue_sufficient(const GramMatrix& g) {
  const Spectrum s = eig_hermitian(g.hermitian());
  BoundVerdict v = detail::eigenvalue_verdict(s.eigenvalues,
                                              Rule::Eigenvalue_Anti);
  std::optional<LambdaCertificate> cert;
  if (v.applies) cert = build_lambda_certificate(s.eigenvalues);
  return {v, std::move(cert)};
}

/// Frobenius rule: ||G||_F <= n/sqrt(2) implies antidistinguishable
/// (non-strict).
inline BoundVerdict check_frobenius(const GramMatrix& g) {
  const double norm = g.hermitian().frobenius_norm();
  BoundVerdict v{Rule::Frobenius_Anti};
  v.margin = static_cast<double>(g.size()) / std::sqrt(2.0) - norm;
  v.applies = v.margin >= 0.0;
  v.detail = "Frobenius norm " + std::to_string(norm) + "; " +
             detail::margin_detail(v.margin);
  return v;
}

/// Pairwise rule: every |G[i][j]| <= sqrt((n-2)/(2n-2)) implies
/// antidistinguishable (non-strict).
inline BoundVerdict check_pairwise_ip_small(const GramMatrix& g) {
  const Index n = g.size();
  double max_mod = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) max_mod = std::max(max_mod, std::abs(g(i, j)));
    }
  }
  BoundVerdict v{Rule::PairwiseIP_Anti};
  const double threshold = std::sqrt(static_cast<double>(n - 2) /
                                     static_cast<double>(2 * n - 2));
  v.margin = threshold - max_mod;
  v.applies = v.margin >= 0.0;
  v.detail = "largest off-diagonal modulus " + std::to_string(max_mod) +
             " vs threshold " + std::to_string(threshold) + "; " +
             detail::margin_detail(v.margin);
  return v;
}

/// Two-sided circulant decision: for circulant G the eigenvalue rule is
/// necessary and sufficient, so margin >= 0 means antidistinguishable and
/// margin < 0 means not antidistinguishable. `applies` carries the YES/NO
/// answer (true = antidistinguishable); the rule itself always decides.
inline BoundVerdict decide_circulant_exact(const CirculantProfile& profile) {
  if (!profile.is_circulant) {
    throw ValidationError(
        "decide_circulant_exact requires a circulant profile (deviation " +
        std::to_string(profile.deviation) + ")");
  }
  BoundVerdict v = detail::eigenvalue_verdict(profile.eigenvalues,
                                              Rule::CirculantExact);
  v.detail += v.applies ? "; antidistinguishable"
                        : "; not antidistinguishable";
  return v;
}

}  // namespace antidist
