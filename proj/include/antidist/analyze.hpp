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

// Decision pipeline: run the closed-form bounds cheapest-first, use the
// exact rule when the Gram matrix is circulant, and fall back to the SDP
// with certificate rounding. Every definite decision carries evidence:
//   - YES by a sufficient bound: the lambda certificate of the eigenvalue
//     system (the bounds imply the eigenvalue condition, so it always
//     exists when one of them fires);
//   - NO by a strict bound: the constructed phase witness;
//   - either side by the SDP: a verified decomposition or witness.
// Strict rules whose margin sits inside the floating-point boundary band
// report Boundary rather than coercing a side; non-strict rules include
// their boundary by statement, so a zero margin decides YES.

#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "antidist/criteria.hpp"
#include "antidist/serialize.hpp"
#include "antidist/solver.hpp"

namespace antidist {

/// The pipeline shares the solver's verdict vocabulary.
using Decision = SdpVerdict;

inline const char* decision_name(Decision d) { return sdp_verdict_name(d); }

enum class Method { Auto, Bounds, Circulant, Sdp };

inline Method method_from_string(const std::string& name) {
  if (name == "auto") return Method::Auto;
  if (name == "bounds") return Method::Bounds;
  if (name == "circulant") return Method::Circulant;
  if (name == "sdp") return Method::Sdp;
  throw ValidationError("unknown method \"" + name +
                        "\" (expected auto|bounds|circulant|sdp)");
}

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Auto: return "auto";
    case Method::Bounds: return "bounds";
    case Method::Circulant: return "circulant";
    case Method::Sdp: return "sdp";
  }
  return "unknown";
}

struct AnalyzeOptions {
  Method method = Method::Auto;
  double cert_tol = 1e-7;  ///< certificate verification tolerance
  double zero_tol = 1e-6;  ///< SDP value fence for the YES side
  SolverConfig solver{};
};

struct AnalysisReport {
  Index n = 0;
  Decision decision = Decision::Undecided;
  std::string decided_by;  ///< rule name, "CirculantExact", or "SDP"
  /// Margins of every rule evaluated, in pipeline order.
  std::vector<std::pair<std::string, double>> margins;
  std::optional<double> sdp_value;
  std::optional<double> error_probability;  ///< sdp_value / n
  Json certificate;                         ///< null when none applies
  std::string diagnostics;
  std::vector<std::pair<std::string, double>> timings_ms;
};

namespace detail {

/// Shortest locale-independent decimal with 17 significant digits.
inline std::string format_double(double x) {
  char buf[64];
  const auto result =
      std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general,
                    17);
  return std::string(buf, result.ptr);
}

inline Json lambda_to_json(const LambdaCertificate& cert, double residual) {
  Json v = Json::array();
  for (Index i = 0; i < cert.v.size(); ++i) v.push_back(cert.v(i));
  return Json{{"kind", "lambda"},
              {"v", std::move(v)},
              {"q", cert.q},
              {"claims", {{"residual", residual}}}};
}

/// Lambda certificate JSON for a spectrum on the YES side of the eigenvalue
/// condition; null (with a diagnostic) in the degenerate case where the
/// firing bound sits so close to the fence that the construction fails.
inline Json try_lambda_json(const RVec& sorted_lams, std::string* diag) {
  try {
    const LambdaCertificate cert = build_lambda_certificate(sorted_lams);
    return lambda_to_json(cert,
                          lambda_certificate_residual(cert, sorted_lams));
  } catch (const ValidationError& e) {
    *diag += std::string("lambda certificate unavailable: ") + e.what() +
             "; ";
    return Json();
  }
}

class StageTimer {
 public:
  explicit StageTimer(AnalysisReport* rep) : rep_(rep) {}
  template <typename F>
  auto time(const char* label, F&& f) {
    const auto begin = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(label, begin);
    } else {
      auto result = f();
      record(label, begin);
      return result;
    }
  }

 private:
  void record(const char* label,
              std::chrono::steady_clock::time_point begin) {
    const auto end = std::chrono::steady_clock::now();
    rep_->timings_ms.emplace_back(
        label,
        std::chrono::duration<double, std::milli>(end - begin).count());
  }
  AnalysisReport* rep_;
};

}  // namespace detail

/// Analyzes one Gram matrix. Deterministic for fixed (G, opts) apart from
/// the timing entries.
inline AnalysisReport analyze(const GramMatrix& g,
                              const AnalyzeOptions& opts = {}) {
  validate_config(opts.solver);
  if (!(opts.cert_tol > 0.0) || !(opts.zero_tol > 0.0)) {
    throw ValidationError("analyze: tolerances must be positive");
  }
  AnalysisReport rep;
  rep.n = g.size();
  detail::StageTimer timer(&rep);

  // Closed-form margins are recorded for every method; they are cheap and
  // the report's margin map documents the instance either way.
  BoundVerdict small{Rule::PairwiseIP_Anti};
  BoundVerdict large{Rule::PairwiseIP_NotAnti};
  BoundVerdict frob{Rule::Frobenius_Anti};
  BoundVerdict sum{Rule::SumIP_NotAnti};
  BoundVerdict eig{Rule::Eigenvalue_Anti};
  RVec sorted_lams;
  timer.time("bounds", [&] {
    small = check_pairwise_ip_small(g);
    large = check_pairwise_ip_large(g);
    frob = check_frobenius(g);
    sum = check_sum_ip(g);
    eig = check_eigenvalue_sufficient(g).first;
    sorted_lams = eig_hermitian(g.hermitian()).eigenvalues;
  });
  for (const BoundVerdict* v : {&small, &large, &frob, &sum, &eig}) {
    rep.margins.emplace_back(rule_name(v->rule), v->margin);
  }

  const auto decide_yes_bound = [&](const BoundVerdict& v) {
    rep.decision = Decision::Antidistinguishable;
    rep.decided_by = rule_name(v.rule);
    rep.certificate = detail::try_lambda_json(sorted_lams, &rep.diagnostics);
    if (v.boundary()) rep.diagnostics += "margin at the boundary; ";
  };
  const auto decide_no_bound = [&](const BoundVerdict& v) {
    rep.decision = Decision::NotAntidistinguishable;
    rep.decided_by = rule_name(v.rule);
    const LocallyPsdWitness w = make_sum_ip_witness(g);
    const WitnessReport r = verify_witness(g, w, opts.cert_tol);
    rep.certificate = certificate_to_json(w);
    if (!r.accepted) {
      rep.diagnostics +=
          "constructed witness below verification resolution (" + r.detail +
          "); ";
    }
  };
  // A rule whose margin sits inside the floating-point boundary band cannot
  // decide: the strict rules abstain (remembered here, reported as Boundary
  // only if nothing downstream is definitive), and the non-strict pre-bounds
  // defer to the eigenvalue test they imply, which then decides with the
  // sharpest available margin. The eigenvalue rule itself is non-strict, so
  // a zero margin is a valid YES and only gets flagged.
  std::optional<Rule> pending_boundary;
  const auto abstain_strict = [&](const BoundVerdict& v) {
    if (!pending_boundary.has_value()) pending_boundary = v.rule;
    rep.diagnostics += std::string(rule_name(v.rule)) + " margin " +
                       detail::format_double(v.margin) +
                       " inside the boundary band, abstaining; ";
  };
  const auto defers = [&](const BoundVerdict& v) {
    if (!v.applies || !v.boundary()) return false;
    rep.diagnostics += std::string(rule_name(v.rule)) +
                       " margin inside the boundary band, deferring to the "
                       "eigenvalue test; ";
    return true;
  };
  const auto undecided = [&] {
    return rep.decision == Decision::Undecided;
  };

  bool need_sdp = false;
  if (opts.method == Method::Auto || opts.method == Method::Bounds) {
    if (undecided() && small.applies && !defers(small)) {
      decide_yes_bound(small);
    }
    if (undecided() && large.applies) {
      large.boundary() ? abstain_strict(large) : decide_no_bound(large);
    }
    if (undecided() && frob.applies && !defers(frob)) {
      decide_yes_bound(frob);
    }
    if (undecided() && sum.applies) {
      sum.boundary() ? abstain_strict(sum) : decide_no_bound(sum);
    }
    if (undecided() && eig.applies) {
      decide_yes_bound(eig);
    }
    if (undecided()) {
      if (opts.method == Method::Auto) {
        need_sdp = true;
      } else if (!pending_boundary.has_value()) {
        rep.diagnostics += "no closed-form rule fired; ";
      }
    }
  }

  if (opts.method == Method::Circulant ||
      (need_sdp && opts.method == Method::Auto)) {
    const CirculantProfile profile = timer.time(
        "circulant", [&] { return circulant_profile(g); });
    if (!profile.is_circulant && opts.method == Method::Circulant) {
      throw ValidationError(
          "analyze: --method circulant requires a circulant Gram matrix "
          "(deviation " +
          std::to_string(profile.deviation) + ")");
    }
    if (profile.is_circulant) {
      const BoundVerdict exact = decide_circulant_exact(profile);
      rep.margins.emplace_back(rule_name(exact.rule), exact.margin);
      if (exact.applies) {
        // The exact rule's YES side is non-strict (the threshold case is
        // antidistinguishable), so a zero margin decides and only gets
        // flagged.
        rep.decision = Decision::Antidistinguishable;
        rep.decided_by = rule_name(exact.rule);
        rep.certificate =
            detail::try_lambda_json(profile.eigenvalues, &rep.diagnostics);
        if (exact.boundary()) rep.diagnostics += "margin at the boundary; ";
        need_sdp = false;
      } else if (exact.boundary()) {
        // Negative but below floating-point resolution: the strict NO side
        // cannot claim it; the SDP (in auto mode) may still certify YES.
        if (opts.method == Method::Circulant) {
          rep.decision = Decision::Boundary;
          rep.decided_by = rule_name(exact.rule);
          rep.diagnostics += "exact circulant margin " +
                             detail::format_double(exact.margin) +
                             " inside the boundary band; ";
        } else {
          abstain_strict(exact);
          rep.diagnostics += "deferring to the SDP; ";
        }
      } else {
        auto [w, r] = make_circulant_witness(g, opts.cert_tol);
        if (w.has_value()) {
          rep.decision = Decision::NotAntidistinguishable;
          rep.decided_by = rule_name(exact.rule);
          rep.certificate = certificate_to_json(*w);
          need_sdp = false;
        } else if (opts.method == Method::Circulant) {
          rep.decision = Decision::Boundary;
          rep.decided_by = rule_name(exact.rule);
          rep.diagnostics += "circulant margin " +
                             detail::format_double(exact.margin) +
                             " below certification resolution (" + r.detail +
                             "); ";
        } else {
          rep.diagnostics += "circulant witness construction failed (" +
                             r.detail + "), deferring to the SDP; ";
        }
      }
    }
  }

  if (opts.method == Method::Sdp ||
      (need_sdp && opts.method == Method::Auto &&
       rep.decision == Decision::Undecided)) {
    const SdpDecision d = timer.time("sdp", [&] {
      return decide_by_sdp(g, opts.solver, opts.zero_tol, opts.cert_tol);
    });
    rep.decision = d.verdict;
    rep.decided_by = "SDP";
    rep.sdp_value = d.solution.value;
    rep.error_probability = d.solution.value / static_cast<double>(rep.n);
    if (d.decomposition.has_value()) {
      rep.certificate = certificate_to_json(*d.decomposition);
    } else if (d.witness.has_value()) {
      rep.certificate = certificate_to_json(*d.witness);
    }
    if (!d.diagnostics.empty()) rep.diagnostics += d.diagnostics;
  }

  // A strict rule fired at sub-resolution margin and nothing downstream
  // reached a definitive answer: Boundary, not a coerced side.
  if (rep.decision == Decision::Undecided && pending_boundary.has_value()) {
    rep.decision = Decision::Boundary;
    rep.decided_by = rule_name(*pending_boundary);
    rep.diagnostics +=
        "no definitive rule beyond the sub-resolution margin; ";
  }

  return rep;
}

inline AnalysisReport analyze(const StateSet& states,
                              const AnalyzeOptions& opts = {}) {
  return analyze(gram_from_states(states), opts);
}

/// Report JSON in deterministic field order; timings are attached last so
/// byte-level comparisons can strip them.
inline Json report_to_json(const AnalysisReport& rep,
                           bool with_timings = true) {
  Json margins = Json::object();
  for (const auto& [rule, margin] : rep.margins) margins[rule] = margin;
  Json j{{"n", rep.n},
         {"decision", decision_name(rep.decision)},
         {"decided_by", rep.decided_by},
         {"margins", std::move(margins)}};
  if (rep.sdp_value.has_value()) {
    j["sdp_value"] = *rep.sdp_value;
    j["error_probability"] = *rep.error_probability;
  }
  j["certificate"] = rep.certificate;
  if (!rep.diagnostics.empty()) j["diagnostics"] = rep.diagnostics;
  if (with_timings) {
    Json timings = Json::object();
    for (const auto& [stage, ms] : rep.timings_ms) timings[stage] = ms;
    j["timings_ms"] = std::move(timings);
  }
  return j;
}

/// One grid point of the equiangular sweep.
struct SweepRow {
  Index n = 0;
  double gamma = 0.0;
  double sdp_value = 0.0;
  double error_probability = 0.0;
  Decision decision = Decision::Undecided;
  bool converged = false;
};

/// Sweeps the equiangular family over gamma in [0, 1] with the given step
/// for each n in [n_min, n_max]. Rows come out in deterministic (n, gamma)
/// order. The decision column runs the full pipeline (closed-form rules
/// decide every equiangular instance away from the threshold); the value
/// column always runs the solver, and non-convergence is flagged in the
/// `converged` field rather than dropping the row.
inline std::vector<SweepRow> sweep_equiangular(
    Index n_min, Index n_max, double gamma_step,
    const AnalyzeOptions& opts = {}) {
  if (n_min < 2 || n_max < n_min) {
    throw ValidationError("sweep_equiangular: need 2 <= n_min <= n_max");
  }
  if (!(gamma_step > 0.0) || gamma_step > 1.0) {
    throw ValidationError("sweep_equiangular: step must lie in (0, 1]");
  }
  const Index steps = static_cast<Index>(std::llround(1.0 / gamma_step));
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>((n_max - n_min + 1) * (steps + 1)));
  for (Index n = n_min; n <= n_max; ++n) {
    for (Index k = 0; k <= steps; ++k) {
      const double gamma =
          (k == steps) ? 1.0 : static_cast<double>(k) * gamma_step;
      const GramMatrix g = make_equiangular(n, gamma);
      SweepRow row;
      row.n = n;
      row.gamma = gamma;
      row.decision = analyze(g, opts).decision;
      const SdpSolution sol = solve_exclusion_sdp(g, opts.solver);
      row.sdp_value = sol.value;
      row.error_probability = sol.value / static_cast<double>(n);
      row.converged = sol.converged;
      rows.push_back(row);
    }
  }
  return rows;
}

/// CSV with header n,gamma,sdp_value,error_probability,antidistinguishable,
/// converged; '.' decimal point and 17 significant digits throughout.
inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "n,gamma,sdp_value,error_probability,antidistinguishable,converged\n";
  for (const SweepRow& row : rows) {
    out += std::to_string(row.n);
    out += ',';
    out += detail::format_double(row.gamma);
    out += ',';
    out += detail::format_double(row.sdp_value);
    out += ',';
    out += detail::format_double(row.error_probability);
    out += ',';
    switch (row.decision) {
      case Decision::Antidistinguishable: out += "true"; break;
      case Decision::NotAntidistinguishable: out += "false"; break;
      case Decision::Boundary: out += "boundary"; break;
      case Decision::Undecided: out += "undecided"; break;
    }
    out += ',';
    out += row.converged ? "true" : "false";
    out += '\n';
  }
  return out;
}

}  // namespace antidist
