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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncwit/cmatrix.hpp"
#include "ncwit/rng.hpp"
#include "ncwit/search.hpp"
#include "ncwit/states.hpp"

namespace ncwit {

struct LocalBasisPair {
  CMatrix u_a;
  CMatrix u_b;
};

enum class PccVerdict { Yes, No, Indeterminate };

enum class ClassifierPath { exact_nondegenerate, deficit_minimization };

struct ClassificationResult {
  PccVerdict verdict = PccVerdict::Indeterminate;
  double residual = 0.0;
  std::optional<LocalBasisPair> witness_basis;
  ClassifierPath path = ClassifierPath::exact_nondegenerate;
};

/// Zeroes every off-diagonal entry in the computational product basis.
inline DensityMatrix dephase(const DensityMatrix& rho) {
  const std::size_t d = rho.mat.rows();
  CMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i) out(i, i) = rho.mat(i, i).real();
  return make_density(std::move(out), rho.dim_a, rho.dim_b);
}

/// Probabilities q_ij = <u_i v_j| rho |u_i v_j> of dephasing in the local
/// basis pair, computed through the same partial contraction as the search
/// hot path. Roundoff negatives clamp to 0.
inline std::vector<double> local_diag_probs(const DensityMatrix& rho,
                                            const LocalBasisPair& basis) {
  const std::size_t da = rho.dim_a, db = rho.dim_b;
  std::vector<double> q(da * db, 0.0);
  CMatrix b(db, db);
  for (std::size_t i = 0; i < da; ++i) {
    for (std::size_t x2 = 0; x2 < db; ++x2)
      for (std::size_t y2 = 0; y2 < db; ++y2) {
        Complex acc = 0.0;
        for (std::size_t x1 = 0; x1 < da; ++x1) {
          const Complex cu = std::conj(basis.u_a(x1, i));
          for (std::size_t y1 = 0; y1 < da; ++y1)
            acc += cu * rho.mat(x1 * db + x2, y1 * db + y2) * basis.u_a(y1, i);
        }
        b(x2, y2) = acc;
      }
    for (std::size_t j = 0; j < db; ++j) {
      Complex v = 0.0;
      for (std::size_t x2 = 0; x2 < db; ++x2) {
        Complex row = 0.0;
        for (std::size_t y2 = 0; y2 < db; ++y2) row += b(x2, y2) * basis.u_b(y2, j);
        v += std::conj(basis.u_b(x2, j)) * row;
      }
      q[i * db + j] = std::max(0.0, v.real());
    }
  }
  return q;
}

struct DeficitResult {
  double deficit_bits = 0.0;    // clamped at 0 from below
  double unclamped_bits = 0.0;  // raw minimum minus S(rho)
  LocalBasisPair best_basis;
};

/// min over local bases of S(dephased rho) - S(rho), in bits. Hill climb on
/// both local unitaries with the search module's refinement schedule;
/// restart 0 starts from the computational basis, the rest from Haar pairs.
/// Mathematically the quantity is nonnegative; the raw minimum is exposed
/// and the headline value clamps roundoff to 0.
inline DeficitResult zero_way_deficit(const DensityMatrix& rho,
                                      std::size_t restarts, RngStream& rng) {
  if (restarts < 1)
    throw std::invalid_argument("zero_way_deficit: restarts must be >= 1");
  const double s_rho = entropy_purity(rho).entropy_bits;
  const SearchConfig schedule;  // refinement defaults
  const std::uint64_t base = rng.next_u64();

  DeficitResult out;
  bool have = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    RngStream walk = RngStream::substream(base, 0, r);
    LocalBasisPair basis;
    if (r == 0) {
      basis.u_a = CMatrix::identity(rho.dim_a);
      basis.u_b = CMatrix::identity(rho.dim_b);
    } else {
      basis.u_a = haar_unitary(rho.dim_a, walk);
      basis.u_b = haar_unitary(rho.dim_b, walk);
    }
    double h = shannon_entropy_bits(local_diag_probs(rho, basis));
    double eps = schedule.refine_initial_step;
    for (std::size_t t = 0; t < schedule.refine_steps;
         ++t, eps *= schedule.refine_decay) {
      LocalBasisPair prop;
      prop.u_a = basis.u_a * unitary_exp(eps, random_hermitian(rho.dim_a, walk));
      prop.u_b = basis.u_b * unitary_exp(eps, random_hermitian(rho.dim_b, walk));
      const double hp = shannon_entropy_bits(local_diag_probs(rho, prop));
      if (hp < h) {
        h = hp;
        basis = std::move(prop);
      }
      if (h - s_rho <= 1e-9) break;
    }
    if (!have || h - s_rho < out.unclamped_bits) {
      have = true;
      out.unclamped_bits = h - s_rho;
      out.best_basis = basis;
    }
    if (out.unclamped_bits <= 1e-9) break;
  }
  if (out.unclamped_bits < -1e-9)
    throw std::runtime_error(
        "zero_way_deficit: dephased entropy fell below the state entropy by " +
        std::to_string(-out.unclamped_bits) + " bits");
  out.deficit_bits = std::max(0.0, out.unclamped_bits);
  return out;
}

/// Deficit-threshold verdict: Yes at or below tol, No at or above 100*tol,
/// Indeterminate in the band between.
inline PccVerdict verdict_from_deficit(double deficit_bits, double tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("verdict_from_deficit: tol must be > 0");
  if (deficit_bits <= tol) return PccVerdict::Yes;
  if (deficit_bits >= 100.0 * tol) return PccVerdict::No;
  return PccVerdict::Indeterminate;
}

namespace detail {

/// Schmidt data of one eigenvector reshaped to dim_a x dim_b: the top
/// singular pair and the Frobenius norm of the rank-1 deflation residual
/// (an upper bound on the second singular value that stays at roundoff
/// scale for true product vectors).
struct SchmidtTop {
  std::vector<Complex> a_factor;
  std::vector<Complex> b_factor;
  double residual = 0.0;
};

inline SchmidtTop schmidt_top(const std::vector<Complex>& psi, std::size_t da,
                              std::size_t db) {
  CMatrix m(da, db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j) m(i, j) = psi[i * db + j];
  const HermitianEigen eig = hermitian_eig(m.adjoint() * m);
  const std::vector<Complex> v = column(eig.vectors, db - 1);
  const double s1 = std::sqrt(std::max(0.0, eig.values.back()));
  SchmidtTop out;
  if (s1 < 1e-12) {
    // Zero vector cannot occur for unit eigenvectors; defensive fallback.
    out.residual = 1.0;
    out.a_factor = basis_ket(da, 0);
    out.b_factor = basis_ket(db, 0);
    return out;
  }
  std::vector<Complex> u(da, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j) u[i] += m(i, j) * v[j];
  for (Complex& z : u) z /= s1;
  double rsq = 0.0;
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j)
      rsq += std::norm(m(i, j) - s1 * u[i] * std::conj(v[j]));
  out.residual = std::sqrt(rsq);
  out.a_factor = std::move(u);
  out.b_factor.resize(db);
  for (std::size_t j = 0; j < db; ++j) out.b_factor[j] = std::conj(v[j]);
  return out;
}

/// Groups vectors by overlap: a vector joins the first representative with
/// |<rep|x>| >= 0.5 (contributing deviation 1 - overlap), otherwise it
/// becomes a new representative. Returns cluster indices.
struct Clusters {
  std::vector<std::vector<Complex>> reps;
  std::vector<std::size_t> assignment;
  double worst_deviation = 0.0;
};

inline Clusters cluster_by_overlap(
    const std::vector<std::vector<Complex>>& vectors) {
  Clusters out;
  for (const auto& x : vectors) {
    std::size_t best = 0;
    double best_overlap = -1.0;
    for (std::size_t r = 0; r < out.reps.size(); ++r) {
      const double o = std::abs(inner(out.reps[r], x));
      if (o > best_overlap) {
        best_overlap = o;
        best = r;
      }
    }
    if (best_overlap >= 0.5) {
      out.assignment.push_back(best);
      out.worst_deviation = std::max(out.worst_deviation, 1.0 - best_overlap);
    } else {
      out.assignment.push_back(out.reps.size());
      out.reps.push_back(x);
    }
  }
  return out;
}

inline double worst_cross_overlap(const std::vector<std::vector<Complex>>& reps) {
  double worst = 0.0;
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j)
      worst = std::max(worst, std::abs(inner(reps[i], reps[j])));
  return worst;
}

}  // namespace detail

inline constexpr std::uint64_t kClassifierSeed = 0x5D3A11CE;

/// Decides whether rho has a product eigenbasis.
///
/// Nondegenerate spectrum (every eigenvalue gap above 1e-8): the eigenbasis
/// is unique up to phases, so the state is product-eigenbasis iff every
/// eigenvector has Schmidt rank 1, the A-factors collapse onto dim_a
/// orthonormal vectors (likewise B), and the (i,j) labels fill the grid
/// bijectively; the residual is the worst violated quantity. Degenerate
/// spectrum: falls back to deficit minimization with the (tol, 100*tol)
/// verdict band and an explicit Indeterminate in between.
inline ClassificationResult has_product_eigenbasis(
    const DensityMatrix& rho, double tol = 1e-7, std::size_t restarts = 64,
    std::uint64_t seed = kClassifierSeed) {
  if (!(tol > 0.0))
    throw std::invalid_argument("has_product_eigenbasis: tol must be > 0");
  const HermitianEigen eig = hermitian_eig(rho.mat);
  const std::size_t d = rho.mat.rows();
  bool nondegenerate = true;
  for (std::size_t k = 0; k + 1 < d; ++k)
    if (eig.values[k + 1] - eig.values[k] <= 1e-8) {
      nondegenerate = false;
      break;
    }

  ClassificationResult result;
  if (!nondegenerate) {
    result.path = ClassifierPath::deficit_minimization;
    RngStream rng(seed);
    const DeficitResult deficit = zero_way_deficit(rho, restarts, rng);
    result.verdict = verdict_from_deficit(deficit.deficit_bits, tol);
    result.residual = deficit.deficit_bits;
    if (result.verdict == PccVerdict::Yes)
      result.witness_basis = deficit.best_basis;
    return result;
  }

  result.path = ClassifierPath::exact_nondegenerate;
  std::vector<std::vector<Complex>> a_factors, b_factors;
  double worst = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const detail::SchmidtTop top =
        detail::schmidt_top(column(eig.vectors, k), rho.dim_a, rho.dim_b);
    worst = std::max(worst, top.residual);
    a_factors.push_back(top.a_factor);
    b_factors.push_back(top.b_factor);
  }
  const detail::Clusters ca = detail::cluster_by_overlap(a_factors);
  const detail::Clusters cb = detail::cluster_by_overlap(b_factors);
  worst = std::max({worst, ca.worst_deviation, cb.worst_deviation,
                    detail::worst_cross_overlap(ca.reps),
                    detail::worst_cross_overlap(cb.reps)});

  bool structure_ok =
      ca.reps.size() == rho.dim_a && cb.reps.size() == rho.dim_b;
  if (structure_ok) {
    std::vector<int> seen(d, 0);
    for (std::size_t k = 0; k < d; ++k)
      ++seen[ca.assignment[k] * rho.dim_b + cb.assignment[k]];
    for (int count : seen)
      if (count != 1) structure_ok = false;
  }

  if (!structure_ok) {
    result.verdict = PccVerdict::No;
    result.residual = std::max(worst, 1.0);
    return result;
  }
  result.residual = worst;
  if (worst <= tol) {
    result.verdict = PccVerdict::Yes;
    LocalBasisPair basis;
    basis.u_a = CMatrix(rho.dim_a, rho.dim_a);
    basis.u_b = CMatrix(rho.dim_b, rho.dim_b);
    for (std::size_t r = 0; r < ca.reps.size(); ++r)
      for (std::size_t i = 0; i < rho.dim_a; ++i)
        basis.u_a(i, r) = ca.reps[r][i];
    for (std::size_t r = 0; r < cb.reps.size(); ++r)
      for (std::size_t j = 0; j < rho.dim_b; ++j)
        basis.u_b(j, r) = cb.reps[r][j];
    result.witness_basis = basis;
  } else {
    result.verdict = PccVerdict::No;
  }
  return result;
}

inline std::string to_string(PccVerdict v) {
  switch (v) {
    case PccVerdict::Yes:
      return "Yes";
    case PccVerdict::No:
      return "No";
    default:
      return "Indeterminate";
  }
}

inline std::string to_string(ClassifierPath p) {
  return p == ClassifierPath::exact_nondegenerate ? "exact_nondegenerate"
                                                  : "deficit_minimization";
}

}  // namespace ncwit
