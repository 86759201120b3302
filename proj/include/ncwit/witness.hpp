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
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncwit/cmatrix.hpp"
#include "ncwit/states.hpp"

namespace ncwit {

/// Witness map W rho = c - prod_i Tr(rho A_i) with c >= 0 and each A_i
/// positive Hermitian. Nonnegative on every product-eigenbasis state once
/// c is at least the supremum of the product over such states.
struct WitnessMap {
  double c = 0.0;
  std::vector<CMatrix> factors;
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
};

struct Verdict {
  double value = 0.0;
  bool detected = false;
  double tolerance = 0.0;
};

/// Throws unless every factor is a positive Hermitian matrix of size
/// (dim_a*dim_b)^2: Hermitian within 1e-10, smallest eigenvalue >= -1e-9.
/// Error messages carry the offending factor index.
inline void validate_witness_factors(const std::vector<CMatrix>& factors,
                                     std::size_t dim_a, std::size_t dim_b) {
  if (dim_a < 1 || dim_b < 1)
    throw std::invalid_argument("witness: dimensions must be >= 1");
  if (factors.empty())
    throw std::invalid_argument("witness: needs at least one factor");
  const std::size_t d = dim_a * dim_b;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const CMatrix& a = factors[k];
    if (a.rows() != d || a.cols() != d)
      throw std::invalid_argument("witness: factor " + std::to_string(k) +
                                  " has wrong shape");
    if (!has_finite_entries(a))
      throw std::invalid_argument("witness: factor " + std::to_string(k) +
                                  " has a non-finite entry");
    const double defect = hermiticity_defect(a);
    if (defect > 1e-10)
      throw std::invalid_argument("witness: factor " + std::to_string(k) +
                                  " is not Hermitian (max asymmetry " +
                                  std::to_string(defect) + ")");
    const double lo = min_eigenvalue(a);
    if (lo < -1e-9)
      throw std::invalid_argument("witness: factor " + std::to_string(k) +
                                  " has negative eigenvalue " +
                                  std::to_string(lo));
  }
}

inline WitnessMap make_witness(double c, std::vector<CMatrix> factors,
                               std::size_t dim_a, std::size_t dim_b) {
  if (!(c >= 0.0))
    throw std::invalid_argument("witness: c must be >= 0, got " +
                                std::to_string(c));
  validate_witness_factors(factors, dim_a, dim_b);
  return WitnessMap{c, std::move(factors), dim_a, dim_b};
}

/// Product of per-factor traces. Traces in [-1e-10, 0) are roundoff from
/// positive factors and clamp to 0; anything below -1e-10 is rejected.
/// Multiplication runs in descending order of the traces, which makes the
/// result independent of the factor-list permutation bit for bit.
inline double product_of_traces(std::vector<double> traces) {
  for (double& t : traces) {
    if (t < -1e-10)
      throw std::invalid_argument("witness: factor trace " +
                                  std::to_string(t) +
                                  " is negative beyond tolerance");
    if (t < 0.0) t = 0.0;
  }
  std::sort(traces.begin(), traces.end(), std::greater<double>());
  double f = 1.0;
  for (double t : traces) f *= t;
  return f;
}

/// prod_i Tr(rho A_i), the quantity the witness compares against c.
inline double f_value(const DensityMatrix& rho,
                      const std::vector<CMatrix>& factors) {
  if (factors.empty())
    throw std::invalid_argument("f_value: needs at least one factor");
  std::vector<double> traces;
  traces.reserve(factors.size());
  for (const CMatrix& a : factors) {
    if (a.rows() != rho.mat.rows() || a.cols() != rho.mat.cols())
      throw std::invalid_argument("f_value: factor dimension mismatch");
    traces.push_back(trace_product(rho.mat, a));
  }
  return product_of_traces(std::move(traces));
}

inline double evaluate(const WitnessMap& w, const DensityMatrix& rho) {
  if (w.dim_a != rho.dim_a || w.dim_b != rho.dim_b)
    throw std::invalid_argument("evaluate: witness/state dimension mismatch");
  return w.c - f_value(rho, w.factors);
}

/// Values in [-tol, 0) count as NOT detected: a witness must never
/// false-positive on roundoff.
inline Verdict verdict(const WitnessMap& w, const DensityMatrix& rho,
                       double tol = 1e-9) {
  if (!(tol >= 0.0))
    throw std::invalid_argument("verdict: tolerance must be >= 0");
  Verdict v;
  v.value = evaluate(w, rho);
  v.tolerance = tol;
  v.detected = v.value < -tol;
  return v;
}

/// The pair of projectors |00><00|, |1+><1+| from the two-qubit witness.
inline std::vector<CMatrix> sigma_witness_factors() {
  return {outer(kron_vec(basis_ket(2, 0), basis_ket(2, 0))),
          outer(kron_vec(basis_ket(2, 1), plus_ket(2)))};
}

/// max over product pure states |a b> of <a b|A|a b> for positive Hermitian
/// A on a dim_a x dim_b bipartition. Alternating eigen-iteration: with one
/// side fixed the objective is a quadratic form on the other side, maximized
/// by its top eigenvector. Alternation is monotone, so it converges to a
/// local maximum; Haar restarts cover the domain.
inline double linear_optimal_c(const CMatrix& a, std::size_t dim_a,
                               std::size_t dim_b, std::size_t restarts,
                               RngStream& rng) {
  validate_witness_factors({a}, dim_a, dim_b);
  if (restarts < 1)
    throw std::invalid_argument("linear_optimal_c: restarts must be >= 1");

  const auto contract_b = [&](const std::vector<Complex>& b) {
    CMatrix m(dim_a, dim_a);
    for (std::size_t i = 0; i < dim_a; ++i)
      for (std::size_t k = 0; k < dim_a; ++k) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < dim_b; ++j)
          for (std::size_t l = 0; l < dim_b; ++l)
            s += std::conj(b[j]) * a(i * dim_b + j, k * dim_b + l) * b[l];
        m(i, k) = s;
      }
    return m;
  };
  const auto contract_a = [&](const std::vector<Complex>& va) {
    CMatrix m(dim_b, dim_b);
    for (std::size_t j = 0; j < dim_b; ++j)
      for (std::size_t l = 0; l < dim_b; ++l) {
        Complex s = 0.0;
        for (std::size_t i = 0; i < dim_a; ++i)
          for (std::size_t k = 0; k < dim_a; ++k)
            s += std::conj(va[i]) * a(i * dim_b + j, k * dim_b + l) * va[k];
        m(j, l) = s;
      }
    return m;
  };

  double best = 0.0;
  for (std::size_t r = 0; r < restarts; ++r) {
    std::vector<Complex> vb = column(haar_unitary(dim_b, rng), 0);
    double value = 0.0;
    for (int iter = 0; iter < 500; ++iter) {
      const HermitianEigen ea = hermitian_eig(contract_b(vb));
      const std::vector<Complex> va = column(ea.vectors, dim_a - 1);
      const HermitianEigen eb = hermitian_eig(contract_a(va));
      vb = column(eb.vectors, dim_b - 1);
      const double next = eb.values.back();
      if (next - value < 1e-12) {
        value = std::max(value, next);
        break;
      }
      value = next;
    }
    best = std::max(best, value);
  }
  return best;
}

}  // namespace ncwit
