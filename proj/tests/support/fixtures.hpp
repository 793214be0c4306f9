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

// Embedded reference vectors: a worked 3x3 incoherence decomposition of a
// non-unit-diagonal Hermitian target, and the matching 3x3 witness pair
// (all-ones Gram vs the locally-PSD matrix pairing to trace -3). These are
// hand-checkable and anchor the verifiers independently of any constructor
// in the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "antidist/certificates.hpp"
#include "antidist/gram.hpp"

namespace antidist::testing {

/// Hermitian target [[2,1,2],[1,2,-1],[2,-1,5]] admitting an exact
/// incoherence decomposition.
inline HermitianMatrix worked_target_3x3() {
  CMat g(3, 3);
  g << 2, 1, 2, 1, 2, -1, 2, -1, 5;
  return HermitianMatrix(g);
}

/// Exact decomposition of worked_target_3x3: three PSD rank-<=1 blocks, the
/// i-th with row/column i zero.
inline IncoherenceDecomposition worked_decomposition_3x3() {
  IncoherenceDecomposition dec;
  dec.n = 3;
  CMat f0 = CMat::Zero(3, 3);
  f0(1, 1) = 1;
  f0(1, 2) = -1;
  f0(2, 1) = -1;
  f0(2, 2) = 1;
  CMat f1 = CMat::Zero(3, 3);
  f1(0, 0) = 1;
  f1(0, 2) = 2;
  f1(2, 0) = 2;
  f1(2, 2) = 4;
  CMat f2 = CMat::Zero(3, 3);
  f2(0, 0) = 1;
  f2(0, 1) = 1;
  f2(1, 0) = 1;
  f2(1, 1) = 1;
  dec.blocks.emplace_back(f0);
  dec.blocks.emplace_back(f1);
  dec.blocks.emplace_back(f2);
  dec.min_block_eig = 0.0;
  dec.sum_residual = 0.0;
  return dec;
}

/// Witness [[1,-1,-1],[-1,1,-1],[-1,-1,1]]: every 2x2 principal submatrix is
/// PSD, and against the all-ones Gram the trace pairing is exactly -3.
inline LocallyPsdWitness worked_witness_3x3() {
  CMat y(3, 3);
  y << 1, -1, -1, -1, 1, -1, -1, -1, 1;
  LocallyPsdWitness w{3, HermitianMatrix(y)};
  w.min_submatrix_eig = 0.0;
  w.trace_product = -3.0;
  return w;
}

/// The all-ones 3x3 Gram matrix (three copies of the same state).
inline GramMatrix all_ones_gram_3x3() { return make_equiangular(3, 1.0); }

/// Exact exclusion value of a circulant Gram from its eigenvalues:
///   max(0, sqrt(lam_max) - sum_j sqrt(lam_j))^2 / n.
/// Cross-checked against an independent interior-point solver to ~1e-12 on
/// equiangular instances across n = 3..8, and it reproduces the closed
/// two-state error curve 1 - sqrt(1 - gamma^2) and the all-ones value 1.
inline double circulant_value_oracle(RVec lams) {
  std::sort(lams.data(), lams.data() + lams.size(),
            std::greater<double>());
  double tail = 0.0;
  for (Index j = 1; j < lams.size(); ++j) {
    tail += std::sqrt(std::max(0.0, lams(j)));
  }
  const double margin = std::sqrt(std::max(0.0, lams(0))) - tail;
  if (margin <= 0.0) return 0.0;
  return margin * margin / static_cast<double>(lams.size());
}

/// circulant_value_oracle on the equiangular spectrum
/// {1 + (n-1) gamma, 1 - gamma, ...}.
inline double equiangular_value_oracle(Index n, double gamma) {
  RVec lams(n);
  lams(0) = 1.0 + static_cast<double>(n - 1) * gamma;
  for (Index j = 1; j < n; ++j) lams(j) = 1.0 - gamma;
  return circulant_value_oracle(lams);
}

}  // namespace antidist::testing
