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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "ncwit/cmatrix.hpp"
#include "ncwit/rng.hpp"
#include "ncwit/search.hpp"
#include "ncwit/states.hpp"
#include "ncwit/witness.hpp"

using namespace ncwit;

namespace {

const double kCOpt = (3.0 + 2.0 * std::sqrt(2.0)) / 32.0;
const double kAHat = (2.0 + std::sqrt(2.0)) / 4.0;

/// The stationary configuration of the two-factor objective: a pure product
/// state with B-side amplitudes (sqrt(a_hat), sqrt(1 - a_hat)).
PccSample tau_hat_sample() {
  const double r = 1.0 / std::sqrt(2.0);
  PccSample s;
  s.dim_a = 2;
  s.dim_b = 2;
  s.eigenvalues = {1.0, 0.0, 0.0, 0.0};
  s.basis_a = CMatrix(2, 2);
  s.basis_a(0, 0) = r;
  s.basis_a(1, 0) = r;
  s.basis_a(0, 1) = r;
  s.basis_a(1, 1) = -r;
  const double w0 = std::sqrt(kAHat);
  const double w1 = std::sqrt(1.0 - kAHat);
  s.basis_b = CMatrix(2, 2);
  s.basis_b(0, 0) = w0;
  s.basis_b(1, 0) = w1;
  s.basis_b(0, 1) = w1;
  s.basis_b(1, 1) = -w0;
  return s;
}

}  // namespace

TEST_CASE("tau_f frozen values") {
  REQUIRE(std::abs(tau_f(kAHat, std::sqrt(1.0 / 8.0)) - kCOpt) < 1e-12);
  REQUIRE(std::abs(tau_f(1.0, 0.0) - 0.125) < 1e-15);
  REQUIRE(tau_f(0.0, 0.0) == 0.0);
  REQUIRE_THROWS_AS(tau_f(0.25, 0.6), std::invalid_argument);
}

TEST_CASE("closed_form_c_opt matches the analytic stationary point") {
  const COptResult r = closed_form_c_opt();
  REQUIRE(std::abs(r.c_opt - kCOpt) < 1e-9);
  // The argument is noise-limited near a quadratic maximum: sqrt(eps) ~ 5e-9.
  REQUIRE(std::abs(r.a_hat - kAHat) < 1e-7);
  REQUIRE(std::abs(r.c_opt - 0.182138) < 1e-6);
  REQUIRE(std::abs(r.a_hat - 0.853553) < 1e-6);

  // Interior maximum: the midpoint value is strictly below, and small
  // perturbations of a_hat only lose value.
  REQUIRE(std::abs(tau_f(0.5, std::sqrt(0.25)) - 0.125) < 1e-15);
  const auto g = [](double a) { return tau_f(a, std::sqrt(a * (1.0 - a))); };
  REQUIRE(g(kAHat - 0.01) < r.c_opt);
  REQUIRE(g(kAHat + 0.01) < r.c_opt);
}

TEST_CASE("tau states reproduce tau_f through the full map") {
  RngStream rng(41);
  const auto factors = sigma_witness_factors();
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform();
    const double cap = std::sqrt(a * (1.0 - a));
    const double r = rng.uniform() * cap;
    const double phase = rng.uniform() * 6.283185307179586;
    const Complex b = r * std::exp(Complex(0.0, phase));
    const double theta = rng.uniform() * 6.283185307179586;
    const DensityMatrix tau = tau_state({theta, a, b});
    REQUIRE(std::abs(f_value(tau, factors) - tau_f(a, b.real())) < 1e-12);
  }
}

TEST_CASE("pcc_factor_traces agrees with dense trace products") {
  RngStream rng(42);
  const auto factors = qutrit_witness_factors();
  for (int trial = 0; trial < 20; ++trial) {
    const auto [rho, sample] = random_pcc(3, 3, EigMode::dirichlet(), rng);
    const std::vector<double> fast = pcc_factor_traces(sample, factors);
    REQUIRE(fast.size() == factors.size());
    for (std::size_t k = 0; k < factors.size(); ++k) {
      REQUIRE(std::abs(fast[k] - trace_product(rho.mat, factors[k])) < 1e-12);
    }
    REQUIRE(std::abs(pcc_f(sample, factors) - f_value(rho, factors)) < 1e-12);
  }
}

TEST_CASE("refine never decreases the objective") {
  RngStream rng(43);
  const auto factors = sigma_witness_factors();
  SearchConfig config;
  config.seed = 9;
  config.refine_steps = 200;
  for (int trial = 0; trial < 5; ++trial) {
    const auto [rho, sample] = random_pcc(2, 2, EigMode::dirichlet(), rng);
    const double before = pcc_f(sample, factors);
    const RefineResult out = refine(factors, sample, config);
    REQUIRE(out.max_f >= before);
    REQUIRE(std::abs(pcc_f(out.sample, factors) - out.max_f) < 1e-12);
  }
}

TEST_CASE("refine treats the stationary configuration as a fixed point") {
  const auto factors = sigma_witness_factors();
  const PccSample hat = tau_hat_sample();
  REQUIRE(std::abs(pcc_f(hat, factors) - kCOpt) < 1e-12);
  SearchConfig config;
  config.seed = 4;
  config.refine_steps = 2000;
  const RefineResult out = refine(factors, hat, config);
  REQUIRE(out.max_f >= kCOpt - 1e-15);
  REQUIRE(out.max_f <= kCOpt + 1e-9);
}

TEST_CASE("search config validation") {
  SearchConfig config;
  config.n_samples = 0;
  REQUIRE_THROWS_AS(validate_search_config(config), std::invalid_argument);
  config = SearchConfig{};
  config.shards = 0;
  REQUIRE_THROWS_AS(validate_search_config(config), std::invalid_argument);
  config = SearchConfig{};
  config.refine_initial_step = -0.5;
  REQUIRE_THROWS_AS(validate_search_config(config), std::invalid_argument);
  config = SearchConfig{};
  config.refine_decay = 1.5;
  REQUIRE_THROWS_AS(validate_search_config(config), std::invalid_argument);
  config = SearchConfig{};
  config.eig_mode = EigMode::fixed({0.5, 0.6});
  REQUIRE_THROWS_AS(
      monte_carlo_search(sigma_witness_factors(), 2, 2, config),
      std::invalid_argument);
}

TEST_CASE("monte_carlo_search is deterministic and shard-invariant") {
  SearchConfig config;
  config.n_samples = 2000;
  config.seed = 77;
  config.refine_steps = 100;
  const auto factors = sigma_witness_factors();

  const SearchReport base = monte_carlo_search(factors, 2, 2, config);
  REQUIRE(base.samples_evaluated == 2000);

  const SearchReport again = monte_carlo_search(factors, 2, 2, config);
  REQUIRE(again.max_f == base.max_f);
  REQUIRE(max_abs_diff(again.best_sample.basis_a, base.best_sample.basis_a) ==
          0.0);

  for (std::size_t shards : {4u, 16u}) {
    SearchConfig sharded = config;
    sharded.shards = shards;
    const SearchReport r = monte_carlo_search(factors, 2, 2, sharded);
    REQUIRE(r.max_f == base.max_f);
    REQUIRE(max_abs_diff(r.best_sample.basis_a, base.best_sample.basis_a) ==
            0.0);
    REQUIRE(max_abs_diff(r.best_sample.basis_b, base.best_sample.basis_b) ==
            0.0);
  }
}

TEST_CASE("searched maxima respect the closed-form ceiling") {
  SearchConfig config;
  config.n_samples = 4000;
  config.seed = 5;
  config.refine_steps = 400;
  const SearchReport r =
      monte_carlo_search(sigma_witness_factors(), 2, 2, config);
  REQUIRE(r.max_f <= kCOpt + 1e-8);
  REQUIRE(r.max_f > 0.05);
  REQUIRE(r.best_purity <= 1.0 + 1e-12);
  REQUIRE(r.refine_improvement >= 0.0);
}

TEST_CASE("fixed-profile search stays below the degenerate-spectrum bound") {
  SearchConfig config;
  config.n_samples = 4000;
  config.seed = 6;
  config.refine_steps = 400;
  config.eig_mode = EigMode::fixed({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0});
  const SearchReport r =
      monte_carlo_search(sigma_witness_factors(), 2, 2, config);
  REQUIRE(r.max_f <= 1.0 / 6.0 + 1e-9);
  REQUIRE(r.distinct_nonzero_eigenvalues == 1);
  REQUIRE(std::abs(r.best_purity - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("the qutrit constant 0.02 is not a ceiling over classical states") {
  // Frozen product-eigenbasis configuration found by hill-climbing (and
  // reproduced by an independent optimizer): a valid classical state whose
  // factor-trace product exceeds 0.02. The canonical w_02plus constant is
  // therefore a raw-sampling estimate, not a proven bound; refined searches
  // cross it. Kept as a regression anchor for the evaluation path.
  PccSample s;
  s.dim_a = 3;
  s.dim_b = 3;
  s.eigenvalues.assign(9, 0.0);
  s.eigenvalues[1 * 3 + 2] = 0.6666662318988138;
  s.eigenvalues[2 * 3 + 1] = 0.33333376810118615;

  const double u[3][3] = {
      {-5.3907801685380982e-06, -0.78614921479040378, 0.61803674005302467},
      {0.35682748468525427, 0.57735005358567082, 0.73439843531819782},
      {-0.93417029825622999, 0.22053645437671671, 0.28051653453372877}};
  const double v[3][3] = {
      {-0.38268638592900622, 0.92387830908601676, 4.9958171313465721e-06},
      {3.686279335497647e-06, -3.8805199559992846e-06, 0.99999999998567679},
      {0.92387830909216995, 0.38268638594194077, -1.9206513621428568e-06}};
  s.basis_a = CMatrix(3, 3);
  s.basis_b = CMatrix(3, 3);
  for (std::size_t col = 0; col < 3; ++col)
    for (std::size_t row = 0; row < 3; ++row) {
      s.basis_a(row, col) = u[col][row];
      s.basis_b(row, col) = v[col][row];
    }

  // Certify the product-eigenbasis structure before using the value.
  REQUIRE(max_abs_diff(s.basis_a.adjoint() * s.basis_a,
                       CMatrix::identity(3)) < 5e-12);
  REQUIRE(max_abs_diff(s.basis_b.adjoint() * s.basis_b,
                       CMatrix::identity(3)) < 5e-12);

  const DensityMatrix rho = make_density(assemble_pcc(s), 3, 3);
  const double f = f_value(rho, qutrit_witness_factors());
  REQUIRE(std::abs(f - 0.022166751475564652) < 1e-9);
  REQUIRE(f > 0.02);
  REQUIRE(std::abs(pcc_f(s, qutrit_witness_factors()) - f) < 1e-12);
}

TEST_CASE("count_distinct_nonzero clusters nearby eigenvalues") {
  REQUIRE(count_distinct_nonzero({1.0, 0.0, 0.0, 0.0}) == 1);
  REQUIRE(count_distinct_nonzero({0.5, 0.5, 0.0, 0.0}) == 1);
  REQUIRE(count_distinct_nonzero({0.7, 0.2, 0.1, 0.0}) == 3);
  REQUIRE(count_distinct_nonzero({0.5, 0.5 - 1e-12, 0.0, 0.0}) == 1);
}
