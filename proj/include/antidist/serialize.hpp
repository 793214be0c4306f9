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

// JSON wire formats. Complex entries are stored as {"re": x, "im": y} with
// full double precision (the serializer emits shortest-round-trip decimal),
// so a certificate written to disk re-verifies with bit-identical numbers.
//
// Formats:
//   Gram matrix:  {"n": int, "entries": [[entry, ...], ...]}   (row-major)
//   State set:    {"d": int, "states": [[entry x d], ... x n]}
//   Certificate:  {"kind": "decomposition", "n": int, "blocks": [matrix...],
//                  "claims": {"residuals": {...}}}
//              or {"kind": "witness", "n": int, "Y": matrix,
//                  "claims": {"residuals": {...}}}

#pragma once

#include <string>
#include <utility>

#include <json.hpp>

#include "antidist/certificates.hpp"
#include "antidist/gram.hpp"

namespace antidist {

using Json = nlohmann::ordered_json;

namespace detail {

/// Translates nlohmann access/type errors (missing key, wrong type) into the
/// library's ValidationError so parse failures surface uniformly.
template <typename F>
auto parse_guard(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string(what) + ": malformed JSON (" +
                          e.what() + ")");
  }
}

}  // namespace detail

inline Json json_from_complex(const Complex& z) {
  return Json{{"re", z.real()}, {"im", z.imag()}};
}

inline Complex complex_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
    throw ValidationError(
        "complex entry must be an object with \"re\" and \"im\"");
  }
  return Complex(j.at("re").get<double>(), j.at("im").get<double>());
}

inline Json json_from_matrix(const CMat& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      row.push_back(json_from_complex(m(i, j)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMat matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError("matrix must be a non-empty array of rows");
  }
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.at(0).size());
  CMat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ValidationError("matrix rows must have equal length");
    }
    for (Index k = 0; k < cols; ++k) {
      m(i, k) = complex_from_json(row.at(static_cast<std::size_t>(k)));
    }
  }
  return m;
}

inline Json gram_to_json(const GramMatrix& g) {
  return Json{{"n", g.size()}, {"entries", json_from_matrix(g.mat())}};
}

inline GramMatrix gram_from_json(const Json& j) {
  return detail::parse_guard("Gram JSON", [&] {
  if (!j.is_object() || !j.contains("n") || !j.contains("entries")) {
    throw ValidationError(
        "Gram JSON must be an object with \"n\" and \"entries\"");
  }
  const Index n = j.at("n").get<Index>();
  CMat m = matrix_from_json(j.at("entries"));
  if (m.rows() != n || m.cols() != n) {
    throw ValidationError("Gram JSON: entries shape does not match n = " +
                          std::to_string(n));
  }
  return GramMatrix{std::move(m)};
  });
}

inline Json states_to_json(const StateSet& s) {
  Json states = Json::array();
  for (Index i = 0; i < s.size(); ++i) {
    Json amplitudes = Json::array();
    for (Index k = 0; k < s.dim(); ++k) {
      amplitudes.push_back(json_from_complex(s.columns()(k, i)));
    }
    states.push_back(std::move(amplitudes));
  }
  return Json{{"d", s.dim()}, {"states", states}};
}

inline StateSet states_from_json(const Json& j) {
  return detail::parse_guard("state-set JSON", [&] {
  if (!j.is_object() || !j.contains("d") || !j.contains("states")) {
    throw ValidationError(
        "state-set JSON must be an object with \"d\" and \"states\"");
  }
  const Index d = j.at("d").get<Index>();
  const Json& states = j.at("states");
  if (!states.is_array() || states.empty()) {
    throw ValidationError("state-set JSON: \"states\" must be a non-empty "
                          "array");
  }
  const Index n = static_cast<Index>(states.size());
  CMat columns(d, n);
  for (Index i = 0; i < n; ++i) {
    const Json& amplitudes = states.at(static_cast<std::size_t>(i));
    if (!amplitudes.is_array() || static_cast<Index>(amplitudes.size()) != d) {
      throw ValidationError("state-set JSON: each state needs d = " +
                            std::to_string(d) + " amplitudes");
    }
    for (Index k = 0; k < d; ++k) {
      columns(k, i) =
          complex_from_json(amplitudes.at(static_cast<std::size_t>(k)));
    }
  }
  return StateSet(std::move(columns));
  });
}

inline Json certificate_to_json(const IncoherenceDecomposition& dec) {
  Json blocks = Json::array();
  for (const HermitianMatrix& f : dec.blocks) {
    blocks.push_back(json_from_matrix(f.mat()));
  }
  return Json{{"kind", "decomposition"},
              {"n", dec.n},
              {"blocks", std::move(blocks)},
              {"claims",
               {{"residuals",
                 {{"sum_residual", dec.sum_residual},
                  {"min_block_eig", dec.min_block_eig}}}}}};
}

inline Json certificate_to_json(const LocallyPsdWitness& w) {
  return Json{{"kind", "witness"},
              {"n", w.n},
              {"Y", json_from_matrix(w.y.mat())},
              {"claims",
               {{"residuals",
                 {{"min_submatrix_eig", w.min_submatrix_eig},
                  {"trace_product", w.trace_product}}}}}};
}

/// "decomposition" or "witness"; throws on anything else.
inline std::string certificate_kind(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ValidationError("certificate JSON must be an object with \"kind\"");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != "decomposition" && kind != "witness") {
    throw ValidationError("certificate JSON: unknown kind \"" + kind + "\"");
  }
  return kind;
}

inline IncoherenceDecomposition decomposition_from_json(const Json& j) {
  return detail::parse_guard("certificate JSON", [&] {
  if (certificate_kind(j) != "decomposition") {
    throw ValidationError("certificate JSON: expected kind decomposition");
  }
  IncoherenceDecomposition dec;
  dec.n = j.at("n").get<Index>();
  const Json& blocks = j.at("blocks");
  if (!blocks.is_array() || static_cast<Index>(blocks.size()) != dec.n) {
    throw ValidationError("certificate JSON: expected n = " +
                          std::to_string(dec.n) + " blocks");
  }
  dec.blocks.reserve(blocks.size());
  for (const Json& b : blocks) {
    CMat m = matrix_from_json(b);
    if (m.rows() != dec.n || m.cols() != dec.n) {
      throw ValidationError("certificate JSON: block shape mismatch");
    }
    dec.blocks.emplace_back(std::move(m));
  }
  const Json& residuals = j.at("claims").at("residuals");
  dec.sum_residual = residuals.at("sum_residual").get<double>();
  dec.min_block_eig = residuals.at("min_block_eig").get<double>();
  return dec;
  });
}

inline LocallyPsdWitness witness_from_json(const Json& j) {
  return detail::parse_guard("certificate JSON", [&] {
  if (certificate_kind(j) != "witness") {
    throw ValidationError("certificate JSON: expected kind witness");
  }
  const Index n = j.at("n").get<Index>();
  CMat m = matrix_from_json(j.at("Y"));
  if (m.rows() != n || m.cols() != n) {
    throw ValidationError("certificate JSON: Y shape mismatch");
  }
  LocallyPsdWitness w{n, HermitianMatrix(std::move(m))};
  const Json& residuals = j.at("claims").at("residuals");
  w.min_submatrix_eig = residuals.at("min_submatrix_eig").get<double>();
  w.trace_product = residuals.at("trace_product").get<double>();
  return w;
  });
}

}  // namespace antidist
