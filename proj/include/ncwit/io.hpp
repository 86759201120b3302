// Copyright 2026 ncwit developers
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

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "ncwit/cmatrix.hpp"
#include "ncwit/deficit.hpp"
#include "ncwit/protocol.hpp"
#include "ncwit/search.hpp"
#include "ncwit/states.hpp"
#include "ncwit/witness.hpp"

namespace ncwit {

/// Reals serialize with 17 significant digits, enough to round-trip every
/// double exactly.
inline std::string format_real(double v) {
  if (!std::isfinite(v))
    throw std::invalid_argument("json: cannot serialize non-finite real");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Minimal streaming JSON writer. nlohmann::json handles parsing; output
/// goes through this writer so the 17-significant-digit contract holds.
class JsonWriter {
 public:
  JsonWriter& begin_object() {
    separate();
    buf_ += '{';
    stack_.push_back(false);
    return *this;
  }
  JsonWriter& end_object() {
    stack_.pop_back();
    buf_ += '}';
    return *this;
  }
  JsonWriter& begin_array() {
    separate();
    buf_ += '[';
    stack_.push_back(false);
    return *this;
  }
  JsonWriter& end_array() {
    stack_.pop_back();
    buf_ += ']';
    return *this;
  }
  JsonWriter& key(const std::string& name) {
    separate();
    append_quoted(name);
    buf_ += ':';
    after_key_ = true;
    return *this;
  }
  JsonWriter& value(double v) {
    separate();
    buf_ += format_real(v);
    return *this;
  }
  JsonWriter& value(bool v) {
    separate();
    buf_ += v ? "true" : "false";
    return *this;
  }
  JsonWriter& value(const char* v) { return value(std::string(v)); }
  JsonWriter& value(const std::string& v) {
    separate();
    append_quoted(v);
    return *this;
  }
  template <typename T,
            std::enable_if_t<std::is_integral_v<T> && !std::is_same_v<T, bool>,
                             int> = 0>
  JsonWriter& value(T v) {
    separate();
    if constexpr (std::is_signed_v<T>)
      buf_ += std::to_string(static_cast<long long>(v));
    else
      buf_ += std::to_string(static_cast<unsigned long long>(v));
    return *this;
  }

  const std::string& str() const { return buf_; }

 private:
  void separate() {
    if (after_key_) {
      after_key_ = false;
      return;
    }
    if (!stack_.empty()) {
      if (stack_.back()) buf_ += ',';
      stack_.back() = true;
    }
  }
  void append_quoted(const std::string& s) {
    buf_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': buf_ += "\\\""; break;
        case '\\': buf_ += "\\\\"; break;
        case '\n': buf_ += "\\n"; break;
        case '\t': buf_ += "\\t"; break;
        case '\r': buf_ += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char esc[8];
            std::snprintf(esc, sizeof(esc), "\\u%04x", c);
            buf_ += esc;
          } else {
            buf_ += c;
          }
      }
    }
    buf_ += '"';
  }

  std::string buf_;
  std::vector<bool> stack_;
  bool after_key_ = false;
};

// --- writers (shared matrix file format) ---

inline void write_matrix_fields(JsonWriter& w, const CMatrix& m) {
  w.key("rows").value(m.rows());
  w.key("cols").value(m.cols());
  w.key("entries").begin_array();
  for (const Complex& z : m.data())
    w.begin_array().value(z.real()).value(z.imag()).end_array();
  w.end_array();
}

inline void write_matrix(JsonWriter& w, const CMatrix& m) {
  w.begin_object();
  write_matrix_fields(w, m);
  w.end_object();
}

inline void write_state(JsonWriter& w, const DensityMatrix& rho) {
  w.begin_object();
  write_matrix_fields(w, rho.mat);
  w.key("dim_a").value(rho.dim_a);
  w.key("dim_b").value(rho.dim_b);
  w.end_object();
}

inline void write_witness(JsonWriter& w, const WitnessMap& wit) {
  w.begin_object();
  w.key("c").value(wit.c);
  w.key("factors").begin_array();
  for (const CMatrix& a : wit.factors) write_matrix(w, a);
  w.end_array();
  w.key("dim_a").value(wit.dim_a);
  w.key("dim_b").value(wit.dim_b);
  w.end_object();
}

inline void write_pcc_sample(JsonWriter& w, const PccSample& s) {
  CMatrix grid(s.dim_a, s.dim_b);
  for (std::size_t i = 0; i < s.dim_a; ++i)
    for (std::size_t j = 0; j < s.dim_b; ++j)
      grid(i, j) = s.eigenvalues[i * s.dim_b + j];
  w.begin_object();
  w.key("dim_a").value(s.dim_a);
  w.key("dim_b").value(s.dim_b);
  w.key("eigenvalues");
  write_matrix(w, grid);
  w.key("basis_a");
  write_matrix(w, s.basis_a);
  w.key("basis_b");
  write_matrix(w, s.basis_b);
  w.end_object();
}

inline std::string eig_mode_to_string(const EigMode& mode) {
  if (mode.kind == EigMode::Kind::dirichlet_uniform) return "dirichlet";
  std::string s = "fixed:";
  for (std::size_t i = 0; i < mode.fixed_values.size(); ++i) {
    if (i) s += ',';
    s += format_real(mode.fixed_values[i]);
  }
  return s;
}

inline void write_search_config(JsonWriter& w, const SearchConfig& c) {
  w.begin_object();
  w.key("n_samples").value(c.n_samples);
  w.key("seed").value(c.seed);
  w.key("shards").value(c.shards);
  w.key("eig_mode").value(eig_mode_to_string(c.eig_mode));
  w.key("refine_steps").value(c.refine_steps);
  w.key("refine_initial_step").value(c.refine_initial_step);
  w.key("refine_decay").value(c.refine_decay);
  w.end_object();
}

inline void write_search_report(JsonWriter& w, const SearchReport& r,
                                const SearchConfig& config) {
  w.begin_object();
  w.key("max_f").value(r.max_f);
  w.key("best_purity").value(r.best_purity);
  w.key("distinct_nonzero_eigenvalues").value(r.distinct_nonzero_eigenvalues);
  w.key("samples_evaluated").value(r.samples_evaluated);
  w.key("refine_improvement").value(r.refine_improvement);
  w.key("best_sample");
  write_pcc_sample(w, r.best_sample);
  w.key("config");
  write_search_config(w, config);
  w.end_object();
}

inline void write_protocol_result(JsonWriter& w, const ProtocolResult& r) {
  w.begin_object();
  w.key("z1_ii").value(r.z1_ii);
  w.key("z2_ii").value(r.z2_ii);
  w.key("z2_iv").value(r.z2_iv);
  w.key("w_value").value(r.w_value);
  w.key("c_used").value(r.c_used);
  w.end_object();
}

inline void write_classification(JsonWriter& w, const ClassificationResult& c) {
  w.begin_object();
  w.key("verdict").value(to_string(c.verdict));
  w.key("residual").value(c.residual);
  w.key("path").value(to_string(c.path));
  if (c.witness_basis) {
    w.key("witness_basis").begin_object();
    w.key("u_a");
    write_matrix(w, c.witness_basis->u_a);
    w.key("u_b");
    write_matrix(w, c.witness_basis->u_b);
    w.end_object();
  }
  w.end_object();
}

inline void write_plan(JsonWriter& w, const MeasurementPlan& plan) {
  w.begin_object();
  w.key("n_qubits").value(plan.n_qubits);
  w.key("diagonalizer");
  write_matrix(w, plan.diagonalizer);
  w.key("terms").begin_array();
  for (std::size_t t = 0; t < plan.terms.size(); ++t) {
    w.begin_object();
    w.key("label").value(z_mask_label(plan.terms[t].z_mask, plan.n_qubits));
    w.key("z_mask").value(plan.terms[t].z_mask);
    w.key("coefficient").value(plan.terms[t].coefficient);
    w.key("network").begin_array();
    for (const auto& [control, target] : plan.networks[t])
      w.begin_array().value(control).value(target).end_array();
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

// --- parsers ---

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("cannot parse " + path + ": " + e.what());
  }
  return j;
}

inline CMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("entries"))
    throw std::invalid_argument("matrix json: needs rows, cols, entries");
  const std::size_t rows = j.at("rows").get<std::size_t>();
  const std::size_t cols = j.at("cols").get<std::size_t>();
  const auto& entries = j.at("entries");
  if (!entries.is_array() || entries.size() != rows * cols)
    throw std::invalid_argument("matrix json: entries length must be rows*cols");
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw std::invalid_argument("matrix json: entry " + std::to_string(i) +
                                  " must be [re, im]");
    m.data()[i] = Complex(e[0].get<double>(), e[1].get<double>());
  }
  if (!has_finite_entries(m))
    throw std::invalid_argument("matrix json: non-finite entry");
  return m;
}

inline DensityMatrix state_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim_a") || !j.contains("dim_b"))
    throw std::invalid_argument("state json: needs dim_a and dim_b");
  return make_density(matrix_from_json(j), j.at("dim_a").get<std::size_t>(),
                      j.at("dim_b").get<std::size_t>());
}

inline WitnessMap witness_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("c") || !j.contains("factors") ||
      !j.contains("dim_a") || !j.contains("dim_b"))
    throw std::invalid_argument("witness json: needs c, factors, dim_a, dim_b");
  if (!j.at("c").is_number())
    throw std::invalid_argument("witness json: c must be a number");
  const auto& factors_json = j.at("factors");
  if (!factors_json.is_array())
    throw std::invalid_argument("witness json: factors must be an array");
  std::vector<CMatrix> factors;
  factors.reserve(factors_json.size());
  for (const auto& f : factors_json) factors.push_back(matrix_from_json(f));
  return make_witness(j.at("c").get<double>(), std::move(factors),
                      j.at("dim_a").get<std::size_t>(),
                      j.at("dim_b").get<std::size_t>());
}

inline DensityMatrix load_state_file(const std::string& path) {
  return state_from_json(load_json_file(path));
}

inline WitnessMap load_witness_file(const std::string& path) {
  return witness_from_json(load_json_file(path));
}

inline void save_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << text;
}

}  // namespace ncwit
