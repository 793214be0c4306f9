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

// antidist: decide antidistinguishability of a set of pure quantum states
// from its Gram matrix, with machine-verifiable certificates.
//
// Exit codes: 0 success (decision reached / certificate verified),
//             1 usage or input error,
//             2 certificate verification failure,
//             3 solver undecided.

#include <CLI11.hpp>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <Eigen/Core>

#include "antidist/analyze.hpp"

namespace {

using namespace antidist;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFailed = 2;
constexpr int kExitUndecided = 3;

void apply_thread_cap() {
  const char* env = std::getenv("ANTIDIST_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long cap = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || cap < 1) {
    std::cerr << "warning: ignoring invalid ANTIDIST_THREADS=\"" << env
              << "\" (expected a positive integer)\n";
    return;
  }
  Eigen::setNbThreads(static_cast<int>(cap));
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open \"" + path + "\" for reading");
  }
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("\"" + path + "\": " + e.what());
  }
}

/// Accepts either a Gram-matrix file or a states file.
GramMatrix load_gram_or_states(const std::string& path) {
  const Json j = load_json(path);
  if (j.is_object() && j.contains("states")) {
    return gram_from_states(states_from_json(j));
  }
  return gram_from_json(j);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot open \"" + path + "\" for writing");
  }
  out << content;
  if (!out) {
    throw ValidationError("failed writing \"" + path + "\"");
  }
}

std::string format17(double x) { return detail::format_double(x); }

void print_human_report(const AnalysisReport& rep, std::ostream& os) {
  os << "n:          " << rep.n << '\n';
  os << "decision:   " << decision_name(rep.decision) << '\n';
  os << "decided_by: " << (rep.decided_by.empty() ? "-" : rep.decided_by)
     << '\n';
  os << "margins:\n";
  for (const auto& [rule, margin] : rep.margins) {
    os << "  " << rule;
    for (std::size_t pad = rule.size(); pad < 22; ++pad) os << ' ';
    os << format17(margin) << '\n';
  }
  if (rep.sdp_value.has_value()) {
    os << "sdp_value:          " << format17(*rep.sdp_value) << '\n';
    os << "error_probability:  " << format17(*rep.error_probability) << '\n';
  }
  if (!rep.certificate.is_null()) {
    os << "certificate:        " << rep.certificate.at("kind").get<std::string>()
       << '\n';
  }
  if (!rep.diagnostics.empty()) {
    os << "diagnostics:        " << rep.diagnostics << '\n';
  }
  os << "timings_ms:\n";
  for (const auto& [stage, ms] : rep.timings_ms) {
    os << "  " << stage;
    for (std::size_t pad = stage.size(); pad < 22; ++pad) os << ' ';
    os << format17(ms) << '\n';
  }
}

int run_analyze(const std::string& input, const std::string& method,
                double tol, double zero_tol, Index max_iter, bool as_json,
                const std::string& out_path, const std::string& cert_path) {
  AnalyzeOptions opts;
  opts.method = method_from_string(method);
  opts.cert_tol = tol;
  opts.zero_tol = zero_tol;
  opts.solver.max_iter = max_iter;

  const GramMatrix g = load_gram_or_states(input);
  const AnalysisReport rep = analyze(g, opts);

  std::string rendered;
  if (as_json) {
    rendered = report_to_json(rep).dump(2) + "\n";
  } else {
    std::ostringstream os;
    print_human_report(rep, os);
    rendered = os.str();
  }
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    write_file(out_path, rendered);
  }

  if (!cert_path.empty()) {
    if (rep.certificate.is_null()) {
      std::cerr << "warning: no certificate exists at the deciding stage; "
                   "nothing written to \""
                << cert_path << "\"\n";
    } else {
      write_file(cert_path, rep.certificate.dump(2) + "\n");
    }
  }
  return rep.decision == Decision::Undecided ? kExitUndecided : kExitOk;
}

int run_sweep(Index n_min, Index n_max, double gamma_step, Index max_iter,
              const std::string& out_path) {
  AnalyzeOptions opts;
  opts.solver.max_iter = max_iter;
  const std::vector<SweepRow> rows =
      sweep_equiangular(n_min, n_max, gamma_step, opts);
  const std::string csv = sweep_to_csv(rows);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(out_path, csv);
  }
  return kExitOk;
}

/// "x.json" -> "x_eps.json"; no extension -> append "_eps".
std::string eps_sibling_path(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash)) {
    return path + "_eps";
  }
  return path.substr(0, dot) + "_eps" + path.substr(dot);
}

RVec parse_lams(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      throw ValidationError("--lams: cannot parse \"" + token + "\"");
    }
    while (used < token.size() &&
           std::isspace(static_cast<unsigned char>(token[used])) != 0) {
      ++used;
    }
    if (used != token.size()) {
      throw ValidationError("--lams: trailing junk in \"" + token + "\"");
    }
    values.push_back(v);
  }
  if (values.empty()) {
    throw ValidationError("--lams: expected a comma-separated list");
  }
  RVec lams(static_cast<Index>(values.size()));
  for (Index i = 0; i < lams.size(); ++i) {
    lams(i) = values[static_cast<std::size_t>(i)];
  }
  return lams;
}

int run_generate(const std::string& family, Index n, double gamma, double eps,
                 const std::string& lams_csv, const std::string& out_path) {
  if (family == "trine") {
    write_file(out_path, states_to_json(make_trine()).dump(2) + "\n");
    std::cout << "wrote trine states to " << out_path << '\n';
  } else if (family == "equiangular") {
    write_file(out_path,
               gram_to_json(make_equiangular(n, gamma)).dump(2) + "\n");
    std::cout << "wrote equiangular(n=" << n << ", gamma=" << format17(gamma)
              << ") Gram matrix to " << out_path << '\n';
  } else if (family == "d4") {
    const D4Example ex = make_d4_example(eps);
    const std::string eps_path = eps_sibling_path(out_path);
    write_file(out_path, gram_to_json(ex.g).dump(2) + "\n");
    write_file(eps_path, gram_to_json(ex.g_eps).dump(2) + "\n");
    std::cout << "wrote d4 Gram matrix to " << out_path
              << " and its eps=" << format17(eps) << " perturbation to "
              << eps_path << '\n';
  } else if (family == "circulant-spectrum") {
    const RVec lams = parse_lams(lams_csv);
    write_file(out_path,
               gram_to_json(circulant_from_eigenvalues(lams)).dump(2) + "\n");
    std::cout << "wrote circulant Gram matrix (n=" << lams.size() << ") to "
              << out_path << '\n';
  } else {
    throw ValidationError("unknown family \"" + family + "\"");
  }
  return kExitOk;
}

int run_verify(const std::string& gram_path, const std::string& cert_path,
               double tol) {
  const GramMatrix g = load_gram_or_states(gram_path);
  const Json cert = load_json(cert_path);
  const std::string kind = certificate_kind(cert);
  if (kind == "decomposition") {
    const IncoherenceDecomposition dec = decomposition_from_json(cert);
    const DecompositionReport r = verify_decomposition(g, dec, tol);
    std::cout << "kind:              decomposition\n"
              << "pattern_violation: " << format17(r.pattern_violation)
              << '\n'
              << "min_block_eig:     " << format17(r.min_block_eig) << '\n'
              << "sum_residual:      " << format17(r.sum_residual) << '\n'
              << "result:            " << r.detail << '\n';
    return r.accepted ? kExitOk : kExitVerifyFailed;
  }
  if (kind == "witness") {
    const LocallyPsdWitness w = witness_from_json(cert);
    const WitnessReport r = verify_witness(g, w, tol);
    std::cout << "kind:              witness\n"
              << "min_submatrix_eig: " << format17(r.min_submatrix_eig)
              << '\n'
              << "trace_product:     " << format17(r.trace_product) << '\n'
              << "result:            " << r.detail << '\n';
    return r.accepted ? kExitOk : kExitVerifyFailed;
  }
  throw ValidationError("certificate kind \"" + kind +
                        "\" is not independently verifiable (expected "
                        "decomposition or witness)");
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();

  CLI::App app{
      "antidist: decide antidistinguishability of pure-state sets from "
      "their Gram matrix, with machine-verifiable certificates"};
  app.require_subcommand(1);

  // analyze
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "Analyze a Gram-matrix or states JSON file");
  std::string an_input;
  std::string an_method = "auto";
  double an_tol = 1e-7;
  double an_zero_tol = 1e-6;
  Index an_max_iter = SolverConfig{}.max_iter;
  bool an_json = false;
  std::string an_out;
  std::string an_cert;
  analyze_cmd->add_option("input", an_input, "Gram or states JSON file")
      ->required();
  analyze_cmd
      ->add_option("--method", an_method,
                   "Decision method: auto|bounds|circulant|sdp")
      ->check(CLI::IsMember({"auto", "bounds", "circulant", "sdp"}));
  analyze_cmd->add_option("--tol", an_tol,
                          "certificate verification tolerance");
  analyze_cmd->add_option("--zero-tol", an_zero_tol,
                          "SDP value below which the YES side is attempted");
  analyze_cmd->add_option("--max-iter", an_max_iter,
                          "solver iteration cap");
  analyze_cmd->add_flag("--json", an_json,
                        "emit the report as JSON instead of text");
  analyze_cmd->add_option("--out", an_out,
                          "write the report to this file (default stdout)");
  analyze_cmd->add_option("--cert", an_cert,
                          "write the certificate JSON to this file");

  // sweep
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Sweep the equiangular family and emit CSV");
  std::string sw_family = "equiangular";
  Index sw_n_min = 2;
  Index sw_n_max = 10;
  double sw_gamma_step = 0.01;
  Index sw_max_iter = SolverConfig{}.max_iter;
  bool sw_csv = true;
  std::string sw_out;
  sweep_cmd->add_option("--family", sw_family, "sweep family")
      ->check(CLI::IsMember({"equiangular"}));
  sweep_cmd->add_option("--n-min", sw_n_min, "smallest n (>= 2)");
  sweep_cmd->add_option("--n-max", sw_n_max, "largest n");
  sweep_cmd->add_option("--gamma-step", sw_gamma_step,
                        "gamma grid step in (0, 1]");
  sweep_cmd->add_option("--max-iter", sw_max_iter, "solver iteration cap");
  sweep_cmd->add_flag("--csv", sw_csv, "emit CSV (the only sweep format)");
  sweep_cmd->add_option("--out", sw_out,
                        "write the CSV to this file (default stdout)");

  // generate
  auto* gen_cmd = app.add_subcommand(
      "generate", "Generate an example Gram-matrix or states file");
  std::string gen_family;
  Index gen_n = 4;
  double gen_gamma = 0.5;
  double gen_eps = 0.05;
  std::string gen_lams;
  std::string gen_out;
  gen_cmd
      ->add_option("--family", gen_family,
                   "trine|equiangular|d4|circulant-spectrum")
      ->required()
      ->check(CLI::IsMember(
          {"trine", "equiangular", "d4", "circulant-spectrum"}));
  gen_cmd->add_option("--n", gen_n, "number of states (equiangular)");
  gen_cmd->add_option("--gamma", gen_gamma,
                      "common inner product (equiangular)");
  gen_cmd->add_option("--eps", gen_eps, "perturbation size (d4)");
  gen_cmd->add_option("--lams", gen_lams,
                      "comma-separated eigenvalues summing to n "
                      "(circulant-spectrum)");
  gen_cmd->add_option("--out", gen_out, "output file")->required();

  // verify
  auto* verify_cmd = app.add_subcommand(
      "verify", "Verify a certificate against a Gram matrix");
  std::string vf_gram;
  std::string vf_cert;
  double vf_tol = 1e-7;
  verify_cmd->add_option("gram", vf_gram, "Gram or states JSON file")
      ->required();
  verify_cmd->add_option("certificate", vf_cert, "certificate JSON file")
      ->required();
  verify_cmd->add_option("--tol", vf_tol, "verification tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze_cmd) {
      return run_analyze(an_input, an_method, an_tol, an_zero_tol,
                         an_max_iter, an_json, an_out, an_cert);
    }
    if (*sweep_cmd) {
      return run_sweep(sw_n_min, sw_n_max, sw_gamma_step, sw_max_iter,
                       sw_out);
    }
    if (*gen_cmd) {
      return run_generate(gen_family, gen_n, gen_gamma, gen_eps, gen_lams,
                          gen_out);
    }
    if (*verify_cmd) {
      return run_verify(vf_gram, vf_cert, vf_tol);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
