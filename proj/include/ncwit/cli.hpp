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

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ncwit/canonical.hpp"
#include "ncwit/deficit.hpp"
#include "ncwit/io.hpp"
#include "ncwit/protocol.hpp"
#include "ncwit/search.hpp"
#include "ncwit/states.hpp"
#include "ncwit/witness.hpp"

namespace ncwit {

inline constexpr const char* kVersion = "0.1.0";

// Noise draws for the protocol command come from lane 2 (the search module
// owns lanes 0 and 1).
inline constexpr std::uint64_t kProtocolLane = 2;

namespace cli_detail {

struct ScalarRow {
  std::string key;
  std::string value;
};

inline std::uint64_t env_default_seed() {
  const char* v = std::getenv("NCWIT_SEED");
  if (v == nullptr) return 0;
  try {
    std::size_t used = 0;
    const unsigned long long parsed = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(v);
    return parsed;
  } catch (const std::exception&) {
    throw std::invalid_argument("NCWIT_SEED must be an unsigned integer");
  }
}

inline DensityMatrix resolve_state(const std::string& spec) {
  if (auto canonical = try_canonical_state(spec)) return *canonical;
  return load_state_file(spec);
}

inline WitnessMap resolve_witness(const std::string& spec) {
  if (auto canonical = try_canonical_witness(spec)) return *canonical;
  return load_witness_file(spec);
}

inline EigMode parse_eig_mode(const std::string& s) {
  if (s == "dirichlet") return EigMode::dirichlet();
  if (s.rfind("fixed:", 0) == 0) {
    std::vector<double> values;
    for (const std::string& tok : split(s.substr(6), ','))
      values.push_back(parse_real(tok));
    return EigMode::fixed(std::move(values));
  }
  throw std::invalid_argument(
      "eig-mode must be 'dirichlet' or 'fixed:v1,v2,...'");
}

/// One JSON document on stdout; CSV keeps the scalar fields only.
inline void emit_record(std::ostream& out, const std::string& format,
                        const std::string& command, std::uint64_t seed,
                        const std::function<void(JsonWriter&)>& config_echo,
                        const std::function<void(JsonWriter&)>& payload,
                        const std::vector<ScalarRow>& scalars,
                        long long wall_time_ms) {
  if (format == "json") {
    JsonWriter w;
    w.begin_object();
    w.key("command").value(command);
    w.key("version").value(kVersion);
    w.key("seed").value(seed);
    w.key("config_echo");
    config_echo(w);
    w.key("result");
    payload(w);
    w.key("wall_time_ms").value(wall_time_ms);
    w.end_object();
    out << w.str() << "\n";
  } else {
    out << "command,version,seed";
    for (const ScalarRow& s : scalars) out << ',' << s.key;
    out << ",wall_time_ms\n";
    out << command << ',' << kVersion << ',' << seed;
    for (const ScalarRow& s : scalars) out << ',' << s.value;
    out << ',' << wall_time_ms << "\n";
  }
}

}  // namespace cli_detail

/// Entry point shared by the binary and the in-process tests. `args` is the
/// command line without the program name. Exit code 0 means the command ran
/// (verdicts are data, never exit codes); 1 means an input or usage error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  using cli_detail::ScalarRow;

  CLI::App app{"Nonclassical-correlation witness maps: evaluation, optimal-"
               "constant search, ensemble-protocol simulation, classification"};
  app.name("ncwit");
  app.require_subcommand(1);

  std::uint64_t default_seed = 0;
  try {
    default_seed = cli_detail::env_default_seed();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  const std::string state_help =
      "State: canonical name (sigma, bell, rho_02plus, max_mixed:AxB, "
      "tau:theta,a,re_b,im_b, bitstring like 00) or a JSON file path";
  const std::string witness_help =
      "Witness: canonical name (w_sigma, w_bell, w_02plus) or a JSON file path";

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a witness map on a state");
  std::string eval_state, eval_witness, eval_format = "json";
  double eval_tol = 1e-9;
  bool eval_verbose = false;
  eval_cmd->add_option("--state", eval_state, state_help)->required();
  eval_cmd->add_option("--witness", eval_witness, witness_help)->required();
  eval_cmd->add_option("--tol", eval_tol, "Detection tolerance");
  eval_cmd->add_option("--format", eval_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  eval_cmd->add_flag("--verbose", eval_verbose, "Human summary on stderr");

  // search
  auto* search_cmd =
      app.add_subcommand("search", "Monte-Carlo search for the optimal constant");
  std::string search_witness, search_eig_mode = "dirichlet",
              search_format = "json";
  SearchConfig search_config;
  bool search_verbose = false;
  search_cmd->add_option("--witness", search_witness, witness_help)->required();
  search_cmd->add_option("--samples", search_config.n_samples, "Sample count");
  search_cmd->add_option("--seed", search_config.seed, "RNG seed")
      ->default_val(default_seed);
  search_cmd->add_option("--shards", search_config.shards,
                         "Shard count (never changes the result)");
  search_cmd->add_option("--eig-mode", search_eig_mode,
                         "dirichlet or fixed:v1,v2,...");
  search_cmd->add_option("--refine-steps", search_config.refine_steps,
                         "Hill-climb steps");
  search_cmd->add_option("--refine-step", search_config.refine_initial_step,
                         "Initial hill-climb step size");
  search_cmd->add_option("--refine-decay", search_config.refine_decay,
                         "Hill-climb step decay per iteration");
  search_cmd->add_option("--format", search_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  search_cmd->add_flag("--verbose", search_verbose, "Human summary on stderr");

  // protocol
  auto* protocol_cmd = app.add_subcommand(
      "protocol", "Simulate the single-run ensemble measurement protocol");
  std::string protocol_state, protocol_format = "json";
  double protocol_c = closed_form_c_opt().c_opt;
  double protocol_noise = 0.0;
  std::uint64_t protocol_seed = 0;
  bool protocol_verbose = false;
  protocol_cmd->add_option("--state", protocol_state, state_help)->required();
  protocol_cmd->add_option("--c", protocol_c, "Witness constant");
  protocol_cmd->add_option("--noise", protocol_noise,
                           "Gaussian readout noise sigma");
  protocol_cmd->add_option("--seed", protocol_seed, "RNG seed")
      ->default_val(default_seed);
  protocol_cmd->add_option("--format", protocol_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  protocol_cmd->add_flag("--verbose", protocol_verbose,
                         "Human summary on stderr");

  // classify
  auto* classify_cmd = app.add_subcommand(
      "classify", "Decide whether a state has a product eigenbasis");
  std::string classify_state, classify_format = "json";
  std::size_t classify_restarts = 64;
  double classify_tol = 1e-7;
  std::uint64_t classify_seed = 0;
  bool classify_verbose = false;
  classify_cmd->add_option("--state", classify_state, state_help)->required();
  classify_cmd->add_option("--restarts", classify_restarts,
                           "Deficit-minimization restarts");
  classify_cmd->add_option("--tol", classify_tol, "Classification tolerance");
  classify_cmd->add_option("--seed", classify_seed, "RNG seed")
      ->default_val(default_seed);
  classify_cmd->add_option("--format", classify_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  classify_cmd->add_flag("--verbose", classify_verbose,
                         "Human summary on stderr");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("ncwit");
  for (const std::string& a : args) argv_storage.push_back(a);
  std::vector<const char*> argv;
  argv.reserve(argv_storage.size());
  for (const std::string& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  const auto start = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&start]() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  try {
    if (*eval_cmd) {
      const DensityMatrix rho = cli_detail::resolve_state(eval_state);
      const WitnessMap w = cli_detail::resolve_witness(eval_witness);
      const Verdict v = verdict(w, rho, eval_tol);
      std::vector<double> traces;
      for (const CMatrix& a : w.factors)
        traces.push_back(trace_product(rho.mat, a));
      const double f = product_of_traces(traces);
      if (eval_verbose)
        err << "eval: value=" << format_real(v.value)
            << " detected=" << (v.detected ? "true" : "false") << "\n";
      cli_detail::emit_record(
          out, eval_format, "eval", 0,
          [&](JsonWriter& jw) {
            jw.begin_object();
            jw.key("state").value(eval_state);
            jw.key("witness").value(eval_witness);
            jw.key("tol").value(eval_tol);
            jw.key("format").value(eval_format);
            jw.end_object();
          },
          [&](JsonWriter& jw) {
            jw.begin_object();
            jw.key("value").value(v.value);
            jw.key("detected").value(v.detected);
            jw.key("f_value").value(f);
            jw.key("tolerance").value(v.tolerance);
            jw.key("factor_traces").begin_array();
            for (double t : traces) jw.value(t);
            jw.end_array();
            jw.end_object();
          },
          {{"value", format_real(v.value)},
           {"detected", v.detected ? "true" : "false"},
           {"f_value", format_real(f)},
           {"tolerance", format_real(v.tolerance)}},
          elapsed_ms());
      return 0;
    }

    if (*search_cmd) {
      const WitnessMap w = cli_detail::resolve_witness(search_witness);
      search_config.eig_mode = cli_detail::parse_eig_mode(search_eig_mode);
      const SearchReport report =
          monte_carlo_search(w.factors, w.dim_a, w.dim_b, search_config);
      if (search_verbose)
        err << "search: max_f=" << format_real(report.max_f)
            << " purity=" << format_real(report.best_purity)
            << " distinct=" << report.distinct_nonzero_eigenvalues << "\n";
      cli_detail::emit_record(
          out, search_format, "search", search_config.seed,
          [&](JsonWriter& jw) {
            jw.begin_object();
            jw.key("witness").value(search_witness);
            jw.key("format").value(search_format);
            jw.key("config");
            write_search_config(jw, search_config);
            jw.end_object();
          },
          [&](JsonWriter& jw) { write_search_report(jw, report, search_config); },
          {{"max_f", format_real(report.max_f)},
           {"best_purity", format_real(report.best_purity)},
           {"distinct_nonzero_eigenvalues",
            std::to_string(report.distinct_nonzero_eigenvalues)},
           {"samples_evaluated", std::to_string(report.samples_evaluated)},
           {"refine_improvement", format_real(report.refine_improvement)}},
          elapsed_ms());
      return 0;
    }

    if (*protocol_cmd) {
      const DensityMatrix rho = cli_detail::resolve_state(protocol_state);
      RngStream rng = RngStream::substream(protocol_seed, kProtocolLane, 0);
      const ProtocolResult result =
          run_sigma_protocol(rho, protocol_c, protocol_noise, rng);
      const double direct =
          protocol_c - f_value(rho, sigma_witness_factors());
      if (protocol_verbose)
        err << "protocol: z=(" << format_real(result.z1_ii) << ","
            << format_real(result.z2_ii) << "," << format_real(result.z2_iv)
            << ") w=" << format_real(result.w_value) << "\n";
      cli_detail::emit_record(
          out, protocol_format, "protocol", protocol_seed,
          [&](JsonWriter& jw) {
            jw.begin_object();
            jw.key("state").value(protocol_state);
            jw.key("c").value(protocol_c);
            jw.key("noise").value(protocol_noise);
            jw.key("seed").value(protocol_seed);
            jw.key("format").value(protocol_format);
            jw.end_object();
          },
          [&](JsonWriter& jw) {
            jw.begin_object();
            jw.key("z1_ii").value(result.z1_ii);
            jw.key("z2_ii").value(result.z2_ii);
            jw.key("z2_iv").value(result.z2_iv);
            jw.key("w_value").value(result.w_value);
            jw.key("c_used").value(result.c_used);
            jw.key("direct_value").value(direct);
            jw.end_object();
          },
          {{"z1_ii", format_real(result.z1_ii)},
           {"z2_ii", format_real(result.z2_ii)},
           {"z2_iv", format_real(result.z2_iv)},
           {"w_value", format_real(result.w_value)},
           {"c_used", format_real(result.c_used)},
           {"direct_value", format_real(direct)}},
          elapsed_ms());
      return 0;
    }

    if (*classify_cmd) {
      const DensityMatrix rho = cli_detail::resolve_state(classify_state);
      const ClassificationResult result = has_product_eigenbasis(
          rho, classify_tol, classify_restarts, classify_seed);
      RngStream rng(classify_seed);
      const DeficitResult deficit =
          zero_way_deficit(rho, classify_restarts, rng);
      const EntropyPurity ep = entropy_purity(rho);
      if (classify_verbose)
        err << "classify: verdict=" << to_string(result.verdict)
            << " residual=" << format_real(result.residual)
            << " deficit=" << format_real(deficit.deficit_bits) << "\n";
      cli_detail::emit_record(
          out, classify_format, "classify", classify_seed,
          [&](JsonWriter& jw) {
            jw.begin_object();
            jw.key("state").value(classify_state);
            jw.key("restarts").value(classify_restarts);
            jw.key("tol").value(classify_tol);
            jw.key("seed").value(classify_seed);
            jw.key("format").value(classify_format);
            jw.end_object();
          },
          [&](JsonWriter& jw) {
            jw.begin_object();
            jw.key("verdict").value(to_string(result.verdict));
            jw.key("residual").value(result.residual);
            jw.key("path").value(to_string(result.path));
            jw.key("deficit_bits").value(deficit.deficit_bits);
            jw.key("deficit_unclamped_bits").value(deficit.unclamped_bits);
            jw.key("entropy_bits").value(ep.entropy_bits);
            jw.key("purity").value(ep.purity);
            if (result.witness_basis) {
              jw.key("witness_basis").begin_object();
              jw.key("u_a");
              write_matrix(jw, result.witness_basis->u_a);
              jw.key("u_b");
              write_matrix(jw, result.witness_basis->u_b);
              jw.end_object();
            }
            jw.end_object();
          },
          {{"verdict", to_string(result.verdict)},
           {"residual", format_real(result.residual)},
           {"path", to_string(result.path)},
           {"deficit_bits", format_real(deficit.deficit_bits)},
           {"entropy_bits", format_real(ep.entropy_bits)},
           {"purity", format_real(ep.purity)}},
          elapsed_ms());
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no command selected\n";
  return 1;
}

}  // namespace ncwit
