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

#include "antidist/certificates.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "antidist/criteria.hpp"
#include "support/fixtures.hpp"
#include "support/test_helpers.hpp"

using namespace antidist;
using namespace antidist::testing;

TEST_CASE("verify_decomposition") {
  SECTION("accepts the worked 3x3 decomposition") {
    DecompositionReport r =
        verify_decomposition(worked_target_3x3(), worked_decomposition_3x3());
    REQUIRE(r.accepted);
    REQUIRE(r.pattern_violation == 0.0);
    REQUIRE(r.min_block_eig >= -1e-12);
    REQUIRE(r.sum_residual <= 1e-12);
  }
  SECTION("accepts equiangular closed forms below the threshold") {
    for (Index n : {3, 4, 5}) {
      for (double gamma : {0.0, 0.3, 0.5}) {
        const double threshold =
            static_cast<double>(n - 2) / static_cast<double>(n - 1);
        if (gamma > threshold) continue;
        CAPTURE(n, gamma);
        DecompositionReport r = verify_decomposition(
            make_equiangular(n, gamma),
            make_equiangular_decomposition(n, gamma), 1e-10);
        REQUIRE(r.accepted);
      }
    }
  }
  SECTION("rejects uniform blocks with nonzero diagonal") {
    GramMatrix g = make_equiangular(3, 0.2);
    IncoherenceDecomposition dec;
    dec.n = 3;
    for (Index i = 0; i < 3; ++i) {
      dec.blocks.emplace_back(CMat(g.mat() / 3.0));
    }
    DecompositionReport r = verify_decomposition(g, dec);
    REQUIRE_FALSE(r.accepted);
    REQUIRE(r.pattern_violation > 0.1);
  }
  SECTION("rejects a decomposition whose blocks sum wrong") {
    IncoherenceDecomposition dec = worked_decomposition_3x3();
    CMat f = dec.blocks[0].mat();
    f(1, 1) += 0.5;
    dec.blocks[0] = HermitianMatrix(f);
    REQUIRE_FALSE(verify_decomposition(worked_target_3x3(), dec).accepted);
  }
  SECTION("rejects an indefinite block") {
    CMat t(2, 2);
    t << 1, 0, 0, -1;
    HermitianMatrix target(CMat(CMat::Zero(2, 2)));
    IncoherenceDecomposition dec;
    dec.n = 2;
    CMat f0 = CMat::Zero(2, 2);
    f0(1, 1) = -1.0;
    CMat f1 = CMat::Zero(2, 2);
    f1(0, 0) = 1.0;
    dec.blocks.emplace_back(f0);
    dec.blocks.emplace_back(f1);
    DecompositionReport r = verify_decomposition(target, dec);
    REQUIRE_FALSE(r.accepted);
    REQUIRE(r.min_block_eig < -0.5);
  }
  SECTION("dimension mismatch throws") {
    REQUIRE_THROWS_AS(verify_decomposition(make_equiangular(4, 0.1).hermitian(),
                                           worked_decomposition_3x3()),
                      ValidationError);
  }
}

TEST_CASE("verify_witness") {
  SECTION("accepts the worked witness against the all-ones Gram") {
    WitnessReport r =
        verify_witness(all_ones_gram_3x3(), worked_witness_3x3());
    REQUIRE(r.accepted);
    REQUIRE_THAT(r.trace_product, Catch::Matchers::WithinAbs(-3.0, 1e-12));
    REQUIRE(r.min_submatrix_eig >= -1e-12);
  }
  SECTION("accepts the flat witness against equiangular (4, 0.7)") {
    // Y = (n-2)I - (J - I) has constant diagonal n-2 and off-diagonal -1;
    // paired with the equiangular Gram the trace is n(n-2) - n(n-1)gamma.
    const Index n = 4;
    CMat y = -CMat::Ones(n, n);
    for (Index i = 0; i < n; ++i) y(i, i) = static_cast<double>(n - 2);
    LocallyPsdWitness w{n, HermitianMatrix(y)};
    WitnessReport r = verify_witness(make_equiangular(4, 0.7), w);
    REQUIRE(r.accepted);
    REQUIRE_THAT(r.trace_product, Catch::Matchers::WithinAbs(-0.4, 1e-12));
  }
  SECTION("rejects the identity as a witness (trace positive)") {
    LocallyPsdWitness w{3, HermitianMatrix(CMat(CMat::Identity(3, 3)))};
    REQUIRE_FALSE(verify_witness(make_equiangular(3, 0.4), w).accepted);
  }
  SECTION("rejects a witness with a negative submatrix") {
    CMat y(3, 3);
    y << -1, 0, 0, 0, -1, 0, 0, 0, -1;
    LocallyPsdWitness w{3, HermitianMatrix(y)};
    WitnessReport r = verify_witness(all_ones_gram_3x3(), w);
    REQUIRE_FALSE(r.accepted);
    REQUIRE(r.min_submatrix_eig < -0.5);
  }
  SECTION("dimension mismatch throws") {
    REQUIRE_THROWS_AS(
        verify_witness(make_equiangular(4, 0.1), worked_witness_3x3()),
        ValidationError);
  }
}

TEST_CASE("make_equiangular_decomposition") {
  SECTION("boundary gamma gives rank-one blocks") {
    IncoherenceDecomposition dec =
        make_equiangular_decomposition(4, 2.0 / 3.0);
    DecompositionReport r =
        verify_decomposition(make_equiangular(4, 2.0 / 3.0), dec, 1e-10);
    REQUIRE(r.accepted);
    // First coefficient vanishes: each block is (gamma/(n-2)) w w^T, rank 1.
    const Spectrum s = eig_hermitian(dec.blocks[0]);
    REQUIRE(s.eigenvalues(0) > 0.1);
    REQUIRE(std::abs(s.eigenvalues(1)) < 1e-12);
  }
  SECTION("gamma = 0 gives scaled projectors summing to I") {
    IncoherenceDecomposition dec = make_equiangular_decomposition(5, 0.0);
    CMat sum = CMat::Zero(5, 5);
    for (const HermitianMatrix& f : dec.blocks) sum += f.mat();
    REQUIRE((sum - CMat::Identity(5, 5)).norm() < 1e-12);
  }
  SECTION("blocks sum to I + gamma (J - I) within 1e-12") {
    for (double gamma : {0.1, 0.35, 0.74}) {
      const Index n = 5;
      IncoherenceDecomposition dec = make_equiangular_decomposition(n, gamma);
      CMat expected = CMat::Ones(n, n) * gamma;
      for (Index i = 0; i < n; ++i) expected(i, i) = 1.0;
      CMat sum = CMat::Zero(n, n);
      for (const HermitianMatrix& f : dec.blocks) sum += f.mat();
      REQUIRE((sum - expected).norm() < 1e-12);
    }
  }
  SECTION("rejects out-of-range parameters") {
    REQUIRE_THROWS_AS(make_equiangular_decomposition(2, 0.0), ValidationError);
    REQUIRE_THROWS_AS(make_equiangular_decomposition(4, 0.7),
                      ValidationError);
    REQUIRE_THROWS_AS(make_equiangular_decomposition(4, -0.1),
                      ValidationError);
  }
}

TEST_CASE("make_sum_ip_witness") {
  SECTION("equiangular (4, 0.7): trace -0.4") {
    GramMatrix g = make_equiangular(4, 0.7);
    LocallyPsdWitness w = make_sum_ip_witness(g);
    REQUIRE_THAT(w.trace_product, Catch::Matchers::WithinAbs(-0.4, 1e-10));
    REQUIRE(verify_witness(g, w).accepted);
  }
  SECTION("identity: trace n(n-2), not a valid certificate") {
    GramMatrix g(CMat(CMat::Identity(4, 4)));
    LocallyPsdWitness w = make_sum_ip_witness(g);
    REQUIRE_THAT(w.trace_product, Catch::Matchers::WithinAbs(8.0, 1e-10));
    REQUIRE_FALSE(verify_witness(g, w).accepted);
  }
  SECTION("threshold gamma: trace zero, rejected as strict evidence") {
    GramMatrix g = make_equiangular(5, 0.75);
    LocallyPsdWitness w = make_sum_ip_witness(g);
    REQUIRE(std::abs(w.trace_product) < 1e-10);
    REQUIRE_FALSE(verify_witness(g, w).accepted);
  }
  SECTION("submatrix half holds unconditionally on random Grams") {
    auto gen = rng(401);
    for (int trial = 0; trial < 100; ++trial) {
      const Index n = 2 + trial % 7;
      const Index d = 1 + trial % n;
      GramMatrix g =
          gram_from_states(StateSet(random_unit_columns(d, n, gen)));
      LocallyPsdWitness w = make_sum_ip_witness(g);
      CAPTURE(trial, n, d);
      REQUIRE(w.min_submatrix_eig >= -1e-12);
    }
  }
  SECTION("trace formula matches the sum rule margin") {
    auto gen = rng(402);
    for (int trial = 0; trial < 50; ++trial) {
      const Index n = 3 + trial % 5;
      GramMatrix g =
          gram_from_states(StateSet(random_unit_columns(2, n, gen)));
      LocallyPsdWitness w = make_sum_ip_witness(g);
      BoundVerdict sum = check_sum_ip(g);
      REQUIRE_THAT(w.trace_product,
                   Catch::Matchers::WithinAbs(-sum.margin, 1e-10));
    }
  }
}

TEST_CASE("make_d4_witness") {
  const double r3 = std::sqrt(3.0);
  SECTION("stated trace identities at eps = 0.05") {
    const double eps = 0.05;
    const double delta = 5.0 * r3 * eps / (1.0 + 5.0 * eps);
    GramMatrix g_eps = make_d4_example(eps).g_eps;
    LocallyPsdWitness w = make_d4_witness(eps, delta);
    const double expected = -20.0 * r3 * delta * eps * eps / (1.0 - 2.0 * eps);
    REQUIRE_THAT(w.trace_product,
                 Catch::Matchers::WithinRel(expected, 1e-9));
    REQUIRE(w.min_submatrix_eig >= -1e-9);
    REQUIRE(verify_witness(g_eps, w).accepted);
  }
  SECTION("the two parts pair as claimed for several eps") {
    for (double eps : {0.01, 0.05, 0.09}) {
      GramMatrix g_eps = make_d4_example(eps).g_eps;
      const double ty =
          (antidist::detail::d4_witness_y().mat() * g_eps.mat())
              .trace()
              .real();
      const double tz =
          (antidist::detail::d4_witness_z(eps).mat() * g_eps.mat())
              .trace()
              .real();
      CAPTURE(eps);
      REQUIRE(std::abs(ty) < 1e-9);
      REQUIRE_THAT(tz, Catch::Matchers::WithinRel(
                           -20.0 * r3 * eps * eps / (1.0 - 2.0 * eps), 1e-9));
    }
  }
  SECTION("delta at its upper bound keeps submatrices PSD") {
    for (double eps : {0.01, 0.05, 0.09}) {
      const double delta = 5.0 * r3 * eps / (1.0 + 5.0 * eps);
      LocallyPsdWitness w = make_d4_witness(eps, delta);
      CAPTURE(eps);
      REQUIRE(w.min_submatrix_eig >= -1e-9);
    }
  }
  SECTION("parameter validation") {
    REQUIRE_THROWS_AS(make_d4_witness(0.0, 0.1), ValidationError);
    REQUIRE_THROWS_AS(make_d4_witness(0.2, 0.1), ValidationError);
    REQUIRE_THROWS_AS(make_d4_witness(0.05, 0.0), ValidationError);
    REQUIRE_THROWS_AS(make_d4_witness(0.05, 1.0), ValidationError);
  }
}

TEST_CASE("round_decomposition") {
  SECTION("idempotent on a verified decomposition") {
    GramMatrix g = make_equiangular(4, 0.5);
    IncoherenceDecomposition dec = make_equiangular_decomposition(4, 0.5);
    auto [rounded, report] = round_decomposition(g, dec.blocks);
    REQUIRE(rounded.has_value());
    REQUIRE(report.accepted);
    for (Index i = 0; i < 4; ++i) {
      REQUIRE((rounded->blocks[static_cast<std::size_t>(i)].mat() -
               dec.blocks[static_cast<std::size_t>(i)].mat())
                  .norm() < 1e-12);
    }
  }
  SECTION("repairs small perturbations of a valid decomposition") {
    auto gen = rng(403);
    GramMatrix g = make_equiangular(5, 0.4);
    IncoherenceDecomposition dec = make_equiangular_decomposition(5, 0.4);
    std::vector<HermitianMatrix> noisy;
    for (const HermitianMatrix& f : dec.blocks) {
      noisy.emplace_back(
          CMat(f.mat() + 1e-9 * random_hermitian(5, gen).mat()));
    }
    auto [rounded, report] = round_decomposition(g, noisy);
    REQUIRE(rounded.has_value());
    REQUIRE(report.pattern_violation == 0.0);
    REQUIRE(report.sum_residual < 1e-12);
  }
  SECTION("fails honestly on a non-antidistinguishable target") {
    GramMatrix g = make_equiangular(4, 0.9);
    std::vector<HermitianMatrix> blocks;
    for (Index i = 0; i < 4; ++i) {
      blocks.emplace_back(CMat(g.mat() / 4.0));
    }
    auto [rounded, report] = round_decomposition(g, blocks);
    REQUIRE_FALSE(rounded.has_value());
    REQUIRE_FALSE(report.accepted);
  }
}

TEST_CASE("round_witness") {
  SECTION("valid witness passes through with eta = 0") {
    GramMatrix g = all_ones_gram_3x3();
    auto [w, report] = round_witness(g, worked_witness_3x3().y, false);
    REQUIRE(w.has_value());
    REQUIRE((w->y.mat() - worked_witness_3x3().y.mat()).norm() < 1e-14);
    REQUIRE_THAT(report.trace_product,
                 Catch::Matchers::WithinAbs(-3.0, 1e-12));
  }
  SECTION("lifts a slightly indefinite witness") {
    GramMatrix g = make_equiangular(4, 0.9);
    // Flat witness minus a small full-matrix dent: submatrices dip below 0.
    CMat y = -CMat::Ones(4, 4);
    for (Index i = 0; i < 4; ++i) y(i, i) = 2.0;
    y -= 1e-3 * CMat::Identity(4, 4);
    auto [w, report] = round_witness(g, HermitianMatrix(y), false);
    REQUIRE(w.has_value());
    REQUIRE(w->min_submatrix_eig >= -1e-12);
    REQUIRE(report.accepted);
  }
  SECTION("twirls circulant instances without changing the trace") {
    auto gen = rng(404);
    GramMatrix g = make_equiangular(4, 0.9);
    // Strictly locally PSD base so the noise needs no eta lift: the twirl
    // alone must then leave the trace pairing untouched (it fixes G).
    CMat y = -CMat::Ones(4, 4);
    for (Index i = 0; i < 4; ++i) y(i, i) = 2.1;
    HermitianMatrix noisy(
        CMat(y + 1e-6 * random_hermitian(4, gen).mat()));
    auto [w, report] = round_witness(g, noisy, true);
    REQUIRE(w.has_value());
    CirculantProfile p = profile_circulant_part(w->y, 1e-9);
    REQUIRE(p.is_circulant);
    const double direct = (noisy.mat() * g.mat()).trace().real();
    REQUIRE_THAT(report.trace_product,
                 Catch::Matchers::WithinAbs(direct, 1e-9));
  }
  SECTION("fails honestly when the target is antidistinguishable") {
    GramMatrix g = make_equiangular(4, 0.3);
    CMat y = -CMat::Ones(4, 4);
    for (Index i = 0; i < 4; ++i) y(i, i) = 2.0;
    auto [w, report] = round_witness(g, HermitianMatrix(y), false);
    REQUIRE_FALSE(w.has_value());
  }
}

TEST_CASE("make_circulant_witness") {
  SECTION("all-ones Gram recovers the flat embedded witness") {
    auto [w, report] = make_circulant_witness(all_ones_gram_3x3());
    REQUIRE(w.has_value());
    REQUIRE((w->y.mat() - worked_witness_3x3().y.mat()).norm() < 1e-9);
    REQUIRE_THAT(report.trace_product,
                 Catch::Matchers::WithinAbs(-3.0, 1e-9));
  }
  SECTION("lopsided spectra: trace pairing is -2 eps") {
    for (Index n : {4, 6, 8}) {
      for (double eps : {0.01, 0.1}) {
        RVec lams = RVec::Zero(n);
        lams(0) = static_cast<double>(n) / 2.0 + eps;
        lams(1) = static_cast<double>(n) / 2.0 - eps;
        GramMatrix g = circulant_from_eigenvalues(lams);
        auto [w, report] = make_circulant_witness(g);
        CAPTURE(n, eps);
        REQUIRE(w.has_value());
        REQUIRE_THAT(report.trace_product,
                     Catch::Matchers::WithinAbs(-2.0 * eps, 1e-4));
      }
    }
  }
  SECTION("equiangular above threshold: trace q^2 - lam_max") {
    GramMatrix g = make_equiangular(4, 0.8);
    auto [w, report] = make_circulant_witness(g);
    REQUIRE(w.has_value());
    // lam_max = 1 + 3*0.8 = 3.4, q = 3 sqrt(0.2).
    const double expected = 9.0 * 0.2 - 3.4;
    REQUIRE_THAT(report.trace_product,
                 Catch::Matchers::WithinAbs(expected, 1e-9));
  }
  SECTION("fails honestly on the YES side") {
    auto [w, report] = make_circulant_witness(make_equiangular(4, 0.5));
    REQUIRE_FALSE(w.has_value());
  }
  SECTION("random NO-side circulant spectra all certify") {
    auto gen = rng(406);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    int accepted = 0;
    for (int trial = 0; trial < 25; ++trial) {
      const Index n = 3 + trial % 6;
      RVec lams(n);
      for (Index j = 1; j < n; ++j) lams(j) = unif(gen);
      // Dominant top eigenvalue forces the NO side, then normalize to
      // trace n as circulant_from_eigenvalues requires.
      double q = 0.0;
      for (Index j = 1; j < n; ++j) q += std::sqrt(lams(j));
      lams(0) = (q + 0.5) * (q + 0.5);
      lams *= static_cast<double>(n) / lams.sum();
      GramMatrix g = circulant_from_eigenvalues(lams);
      auto [w, report] = make_circulant_witness(g);
      CAPTURE(trial, n);
      REQUIRE(w.has_value());
      ++accepted;
    }
    REQUIRE(accepted == 25);
  }
  SECTION("rejects non-circulant input") {
    auto gen = rng(407);
    GramMatrix g =
        gram_from_states(StateSet(random_unit_columns(3, 4, gen)));
    REQUIRE_FALSE(circulant_profile(g).is_circulant);
    REQUIRE_THROWS_AS(make_circulant_witness(g), ValidationError);
  }
}

TEST_CASE("circulant_locally_psd_check") {
  SECTION("identity: all margins are binomial coefficients") {
    CirculantLocalPsdResult r =
        circulant_locally_psd_check(HermitianMatrix(CMat(CMat::Identity(4, 4))));
    REQUIRE(r.locally_psd);
    REQUIRE_THAT(r.margins(0), Catch::Matchers::WithinAbs(4.0, 1e-10));
    REQUIRE_THAT(r.margins(1), Catch::Matchers::WithinAbs(6.0, 1e-10));
    REQUIRE_THAT(r.margins(2), Catch::Matchers::WithinAbs(4.0, 1e-10));
  }
  SECTION("worked witness: margins (3, 0), boundary-positive") {
    CirculantLocalPsdResult r =
        circulant_locally_psd_check(worked_witness_3x3().y);
    REQUIRE(r.locally_psd);
    REQUIRE_THAT(r.margins(0), Catch::Matchers::WithinAbs(3.0, 1e-10));
    REQUIRE_THAT(r.margins(1), Catch::Matchers::WithinAbs(0.0, 1e-10));
  }
  SECTION("negative identity fails") {
    CirculantLocalPsdResult r = circulant_locally_psd_check(
        HermitianMatrix(CMat(-CMat::Identity(5, 5))));
    REQUIRE_FALSE(r.locally_psd);
    REQUIRE(r.margins(0) < -4.9);
  }
  SECTION("rejects non-circulant input") {
    CMat y(3, 3);
    y << 1, 2, 0, 2, 1, 0, 0, 0, 5;
    REQUIRE_THROWS_AS(circulant_locally_psd_check(HermitianMatrix(y)),
                      ValidationError);
  }
  SECTION("agrees with the direct submatrix test on random instances") {
    auto gen = rng(405);
    std::uniform_real_distribution<double> uni(-1.5, 2.0);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
      const Index n = 2 + trial % 9;
      RVec d(n);
      for (Index j = 0; j < n; ++j) d(j) = uni(gen);
      // Assemble the circulant Hermitian matrix with DFT eigenvalues d.
      const CMat f = fourier_matrix(n);
      CMat y = f * d.cast<Complex>().asDiagonal() * f.adjoint();
      HermitianMatrix yh(y);
      CirculantLocalPsdResult poly = circulant_locally_psd_check(yh);
      const double direct = antidist::detail::min_submatrix_eigenvalue(yh);
      CAPTURE(trial, n, direct);
      // Skip genuine boundary instances where both tests sit inside their
      // tolerance bands.
      double min_scaled = std::numeric_limits<double>::infinity();
      for (Index k = 0; k + 1 < n; ++k) {
        min_scaled = std::min(min_scaled, poly.margins(k));
      }
      if (std::abs(direct) < 1e-7 || std::abs(min_scaled) < 1e-7) continue;
      ++checked;
      REQUIRE(poly.locally_psd == (direct >= -1e-9));
    }
    REQUIRE(checked > 400);
  }
}

TEST_CASE("certificate soundness: both kinds cannot verify together") {
  // For targets where a decomposition verifies, every witness attempt must be
  // rejected, and vice versa; the trace pairing makes the two mutually
  // exclusive.
  SECTION("equiangular family, both sides of the threshold") {
    for (double gamma : {0.0, 0.3, 0.6, 0.7, 0.8, 1.0}) {
      const Index n = 4;
      GramMatrix g = make_equiangular(n, gamma);
      const double threshold = 2.0 / 3.0;
      CAPTURE(gamma);
      bool decomposition_ok = false;
      if (gamma <= threshold) {
        decomposition_ok =
            verify_decomposition(g, make_equiangular_decomposition(n, gamma))
                .accepted;
        REQUIRE(decomposition_ok);
      }
      LocallyPsdWitness w = make_sum_ip_witness(g);
      const bool witness_ok = verify_witness(g, w).accepted;
      if (gamma > threshold) REQUIRE(witness_ok);
      REQUIRE_FALSE((decomposition_ok && witness_ok));
    }
  }
}
