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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "ncwit/cmatrix.hpp"
#include "ncwit/rng.hpp"
#include "ncwit/states.hpp"
#include "ncwit/witness.hpp"

namespace ncwit {

// Stream lanes: lane 0 feeds sample k from (seed, 0, k), lane 1 feeds the
// refinement walk. Results therefore depend on the seed and sample count
// only, never on the shard count.
inline constexpr std::uint64_t kSampleLane = 0;
inline constexpr std::uint64_t kRefineLane = 1;

/// f on the tau family: a(1 + 2 Re b)/8, independent of theta.
inline double tau_f(double a, Complex b) {
  validate_tau_parameters(TauParameters{0.0, a, b});
  return a * (1.0 + 2.0 * b.real()) / 8.0;
}

struct COptResult {
  double c_opt = 0.0;
  double a_hat = 0.0;
};

/// Maximizes g(a) = a(1 + 2 sqrt(a(1-a)))/8 over [0,1] by golden-section
/// search to bracket width 1e-12. g is unimodal there, so the bracket
/// contains the unique interior maximum.
inline COptResult closed_form_c_opt() {
  const auto g = [](double a) {
    return a * (1.0 + 2.0 * std::sqrt(a * (1.0 - a))) / 8.0;
  };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = g(x1), f2 = g(x2);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = g(x1);
    }
  }
  COptResult out;
  out.a_hat = 0.5 * (lo + hi);
  out.c_opt = g(out.a_hat);
  return out;
}

struct SearchConfig {
  std::uint64_t n_samples = 100000;
  std::uint64_t seed = 0;
  std::uint64_t shards = 1;
  EigMode eig_mode;
  std::size_t refine_steps = 2000;
  double refine_initial_step = 0.3;
  double refine_decay = 0.995;
};

inline void validate_search_config(const SearchConfig& c) {
  if (c.n_samples < 1)
    throw std::invalid_argument("search: n_samples must be >= 1");
  if (c.shards < 1) throw std::invalid_argument("search: shards must be >= 1");
  if (!(c.refine_decay > 0.0 && c.refine_decay < 1.0))
    throw std::invalid_argument("search: refine_decay must lie in (0,1)");
  if (!(c.refine_initial_step > 0.0))
    throw std::invalid_argument("search: refine_initial_step must be > 0");
}

struct SearchReport {
  double max_f = 0.0;
  PccSample best_sample;
  double best_purity = 0.0;
  std::size_t distinct_nonzero_eigenvalues = 0;
  std::uint64_t samples_evaluated = 0;
  double refine_improvement = 0.0;
};

/// Tr(rho_pcc A) for every factor, computed from the generator form without
/// assembling the density matrix: Tr(rho_pcc A) = sum_ij e_ij <u_i v_j|A|u_i v_j>.
/// The inner form is evaluated through the partial contraction
/// B_i(x2,y2) = sum_{x1,y1} conj(u_i[x1]) A(x1*db+x2, y1*db+y2) u_i[y1].
inline std::vector<double> pcc_factor_traces(
    const PccSample& s, const std::vector<CMatrix>& factors) {
  const std::size_t da = s.dim_a, db = s.dim_b;
  std::vector<double> traces;
  traces.reserve(factors.size());
  CMatrix b(db, db);
  for (const CMatrix& a : factors) {
    double tr = 0.0;
    for (std::size_t i = 0; i < da; ++i) {
      for (std::size_t x2 = 0; x2 < db; ++x2)
        for (std::size_t y2 = 0; y2 < db; ++y2) {
          Complex acc = 0.0;
          for (std::size_t x1 = 0; x1 < da; ++x1) {
            const Complex cu = std::conj(s.basis_a(x1, i));
            for (std::size_t y1 = 0; y1 < da; ++y1)
              acc += cu * a(x1 * db + x2, y1 * db + y2) * s.basis_a(y1, i);
          }
          b(x2, y2) = acc;
        }
      for (std::size_t j = 0; j < db; ++j) {
        const double e = s.eigenvalues[i * db + j];
        if (e == 0.0) continue;
        Complex q = 0.0;
        for (std::size_t x2 = 0; x2 < db; ++x2) {
          Complex row = 0.0;
          for (std::size_t y2 = 0; y2 < db; ++y2) row += b(x2, y2) * s.basis_b(y2, j);
          q += std::conj(s.basis_b(x2, j)) * row;
        }
        tr += e * q.real();
      }
    }
    traces.push_back(tr);
  }
  return traces;
}

inline double pcc_f(const PccSample& s, const std::vector<CMatrix>& factors) {
  return product_of_traces(pcc_factor_traces(s, factors));
}

/// exp(i * eps * H) for Hermitian H, via its spectrum.
inline CMatrix unitary_exp(double eps, const CMatrix& h) {
  const HermitianEigen eig = hermitian_eig(h);
  const std::size_t d = h.rows();
  CMatrix u(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        acc += eig.vectors(i, k) * std::exp(Complex(0.0, eps * eig.values[k])) *
               std::conj(eig.vectors(j, k));
      u(i, j) = acc;
    }
  return u;
}

inline CMatrix random_hermitian(std::size_t d, RngStream& rng) {
  const CMatrix g = ginibre(d, d, rng);
  return Complex(0.5) * (g + g.adjoint());
}

struct RefineResult {
  PccSample sample;
  double max_f = 0.0;
};

/// Hill climb from `start`: each step perturbs both bases by exp(i eps H)
/// with Haar-direction H and (unless the eigenvalue mode is fixed) jitters
/// the eigenvalue grid on the simplex; only improvements are accepted, so
/// the f sequence is non-decreasing. Step size follows
/// refine_initial_step * refine_decay^t.
inline RefineResult refine(const std::vector<CMatrix>& factors,
                           const PccSample& start, const SearchConfig& config) {
  validate_search_config(config);
  RngStream rng = RngStream::substream(config.seed, kRefineLane, 0);
  RefineResult out{start, pcc_f(start, factors)};
  const bool fixed = config.eig_mode.kind == EigMode::Kind::fixed;
  const std::size_t grid = start.dim_a * start.dim_b;
  double eps = config.refine_initial_step;
  for (std::size_t t = 0; t < config.refine_steps; ++t, eps *= config.refine_decay) {
    PccSample prop = out.sample;
    prop.basis_a = prop.basis_a * unitary_exp(eps, random_hermitian(start.dim_a, rng));
    prop.basis_b = prop.basis_b * unitary_exp(eps, random_hermitian(start.dim_b, rng));
    if (!fixed) {
      std::vector<double> e(grid);
      double sum = 0.0;
      for (std::size_t m = 0; m < grid; ++m) {
        e[m] = std::max(0.0, prop.eigenvalues[m] + eps * 0.25 * rng.gaussian());
        sum += e[m];
      }
      if (sum > 1e-12) {
        for (double& v : e) v /= sum;
        prop.eigenvalues = std::move(e);
      }
    }
    const double f = pcc_f(prop, factors);
    if (f > out.max_f) {
      out.max_f = f;
      out.sample = std::move(prop);
    }
  }
  return out;
}

inline double pcc_purity(const PccSample& s) {
  double p = 0.0;
  for (double e : s.eigenvalues) p += e * e;
  return p;
}

/// Number of distinct eigenvalues above 1e-12, clustering values closer
/// than 1e-9.
inline std::size_t count_distinct_nonzero(const std::vector<double>& values) {
  std::vector<double> v;
  for (double x : values)
    if (x > 1e-12) v.push_back(x);
  std::sort(v.begin(), v.end());
  std::size_t n = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i == 0 || v[i] - v[i - 1] > 1e-9) ++n;
  return n;
}

/// Draws config.n_samples product-eigenbasis states (sample k from the
/// substream (seed, lane 0, k)), maximizes f over them, then refines the
/// best sample. The shard count only partitions the index range; ties
/// resolve to the lowest sample index, so the report is a function of
/// (seed, n_samples, eig_mode) alone.
inline SearchReport monte_carlo_search(const std::vector<CMatrix>& factors,
                                       std::size_t dim_a, std::size_t dim_b,
                                       const SearchConfig& config) {
  validate_witness_factors(factors, dim_a, dim_b);
  validate_search_config(config);
  if (config.eig_mode.kind == EigMode::Kind::fixed)
    checked_grid(config.eig_mode.fixed_values, dim_a * dim_b);

  struct ShardBest {
    double f = -1.0;
    std::uint64_t index = 0;
    PccSample sample;
    std::exception_ptr error;
  };
  const std::uint64_t n = config.n_samples;
  const std::uint64_t shards = std::min(config.shards, n);
  const std::uint64_t chunk = (n + shards - 1) / shards;
  std::vector<ShardBest> best(shards);

  const auto run_shard = [&](std::uint64_t s) {
    ShardBest& out = best[s];
    try {
      const std::uint64_t lo = s * chunk;
      const std::uint64_t hi = std::min(n, lo + chunk);
      for (std::uint64_t k = lo; k < hi; ++k) {
        RngStream rng = RngStream::substream(config.seed, kSampleLane, k);
        PccSample sample = sample_pcc(dim_a, dim_b, config.eig_mode, rng);
        const double f = pcc_f(sample, factors);
        if (f > out.f) {
          out.f = f;
          out.index = k;
          out.sample = std::move(sample);
        }
      }
    } catch (...) {
      out.error = std::current_exception();
    }
  };

  if (shards == 1) {
    run_shard(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(shards);
    for (std::uint64_t s = 0; s < shards; ++s) pool.emplace_back(run_shard, s);
    for (std::thread& t : pool) t.join();
  }

  // Shards hold disjoint ascending index ranges, so scanning them in order
  // with a strict comparison keeps the lowest-index winner on ties.
  const ShardBest* winner = nullptr;
  for (const ShardBest& b : best) {
    if (b.error) std::rethrow_exception(b.error);
    if (b.f >= 0.0 && (winner == nullptr || b.f > winner->f)) winner = &b;
  }

  SearchReport report;
  report.samples_evaluated = n;
  const RefineResult refined = refine(factors, winner->sample, config);
  report.max_f = refined.max_f;
  report.best_sample = refined.sample;
  report.refine_improvement = refined.max_f - winner->f;
  report.best_purity = pcc_purity(report.best_sample);
  report.distinct_nonzero_eigenvalues =
      count_distinct_nonzero(report.best_sample.eigenvalues);
  return report;
}

}  // namespace ncwit
