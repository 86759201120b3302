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
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ncwit/cmatrix.hpp"
#include "ncwit/rng.hpp"

namespace ncwit {

/// Bipartite density matrix. Subsystem A is the left tensor factor;
/// the basis index of |x1 x2> is x1*dim_b + x2.
struct DensityMatrix {
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  CMatrix mat;
};

/// Product-eigenbasis state in generator form: eigenvalue grid e_ij
/// (row-major, i indexes subsystem A) plus the two local bases whose
/// columns are {|u_i>} and {|v_j>}.
struct PccSample {
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  std::vector<double> eigenvalues;  // size dim_a*dim_b, e[i*dim_b + j]
  CMatrix basis_a;
  CMatrix basis_b;
};

struct TauParameters {
  double theta = 0.0;
  double a = 0.0;
  Complex b = 0.0;
};

struct EntropyPurity {
  double entropy_bits = 0.0;
  double purity = 0.0;
};

/// Throws unless `mat` is a valid bipartite density matrix for the given
/// dimensions: Hermitian within 1e-10, unit trace within 1e-10, smallest
/// eigenvalue >= -1e-9.
inline void validate_density(const CMatrix& mat, std::size_t dim_a,
                             std::size_t dim_b) {
  if (dim_a < 1 || dim_b < 1)
    throw std::invalid_argument("density matrix: dimensions must be >= 1");
  const std::size_t d = dim_a * dim_b;
  if (mat.rows() != d || mat.cols() != d)
    throw std::invalid_argument(
        "density matrix: shape does not match dim_a*dim_b = " +
        std::to_string(d));
  if (!has_finite_entries(mat))
    throw std::invalid_argument("density matrix: non-finite entry");
  const double defect = hermiticity_defect(mat);
  if (defect > 1e-10)
    throw std::invalid_argument(
        "density matrix: not Hermitian (max asymmetry " +
        std::to_string(defect) + ")");
  const Complex tr = mat.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > 1e-10)
    throw std::invalid_argument("density matrix: trace " +
                                std::to_string(tr.real()) + " is not 1");
  const double lo = min_eigenvalue(mat);
  if (lo < -1e-9)
    throw std::invalid_argument("density matrix: negative eigenvalue " +
                                std::to_string(lo));
}

inline DensityMatrix make_density(CMatrix mat, std::size_t dim_a,
                                  std::size_t dim_b) {
  validate_density(mat, dim_a, dim_b);
  return DensityMatrix{dim_a, dim_b, std::move(mat)};
}

// --- ket helpers ---

inline std::vector<Complex> basis_ket(std::size_t dim, std::size_t k) {
  if (k >= dim) throw std::invalid_argument("basis_ket: index out of range");
  std::vector<Complex> v(dim, Complex(0.0, 0.0));
  v[k] = 1.0;
  return v;
}

/// (|0> + |1>)/sqrt(2) embedded in the given dimension.
inline std::vector<Complex> plus_ket(std::size_t dim) {
  if (dim < 2) throw std::invalid_argument("plus_ket: dim must be >= 2");
  std::vector<Complex> v(dim, Complex(0.0, 0.0));
  v[0] = v[1] = 1.0 / std::sqrt(2.0);
  return v;
}

inline std::vector<Complex> kron_vec(const std::vector<Complex>& x,
                                     const std::vector<Complex>& y) {
  std::vector<Complex> out(x.size() * y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out[i * y.size() + j] = x[i] * y[j];
  return out;
}

// --- canonical states ---

/// sigma = (|00><00| + |1+><1+|)/2, the separable two-qubit state with no
/// product eigenbasis.
inline DensityMatrix sigma_state() {
  const CMatrix p00 = outer(kron_vec(basis_ket(2, 0), basis_ket(2, 0)));
  const CMatrix p1p = outer(kron_vec(basis_ket(2, 1), plus_ket(2)));
  return make_density(Complex(0.5) * (p00 + p1p), 2, 2);
}

inline std::vector<Complex> bell_phi_plus_ket() {
  std::vector<Complex> v(4, Complex(0.0, 0.0));
  v[0] = v[3] = 1.0 / std::sqrt(2.0);
  return v;
}

inline DensityMatrix bell_phi_plus_state() {
  return make_density(outer(bell_phi_plus_ket()), 2, 2);
}

/// The three two-qutrit projectors |02><02|, |+0><+0|, |2+><2+| whose
/// pairwise product-state overlaps all vanish.
inline std::vector<CMatrix> qutrit_witness_factors() {
  return {outer(kron_vec(basis_ket(3, 0), basis_ket(3, 2))),
          outer(kron_vec(plus_ket(3), basis_ket(3, 0))),
          outer(kron_vec(basis_ket(3, 2), plus_ket(3)))};
}

inline DensityMatrix rho_02plus_state() {
  const std::vector<CMatrix> a = qutrit_witness_factors();
  return make_density(Complex(1.0 / 3.0) * (a[0] + a[1] + a[2]), 3, 3);
}

inline DensityMatrix max_mixed_state(std::size_t dim_a, std::size_t dim_b) {
  const std::size_t d = dim_a * dim_b;
  if (d < 1) throw std::invalid_argument("max_mixed: dimensions must be >= 1");
  return make_density(Complex(1.0 / static_cast<double>(d)) *
                          CMatrix::identity(d),
                      dim_a, dim_b);
}

inline void validate_tau_parameters(const TauParameters& p) {
  if (!std::isfinite(p.theta) || !std::isfinite(p.a) ||
      !std::isfinite(p.b.real()) || !std::isfinite(p.b.imag()))
    throw std::invalid_argument("tau: non-finite parameter");
  if (p.a < -1e-12 || p.a > 1.0 + 1e-12)
    throw std::invalid_argument("tau: a must lie in [0,1]");
  const double cap = std::sqrt(std::max(0.0, p.a * (1.0 - p.a)));
  if (std::abs(p.b) > cap + 1e-12)
    throw std::invalid_argument(
        "tau: |b| exceeds sqrt(a(1-a)), rho_B not positive");
}

/// tau = |s><s| (x) rho_B with |s> = (|0> + e^{i theta}|1>)/sqrt(2) and
/// rho_B = [[a, b], [conj(b), 1-a]].
inline DensityMatrix tau_state(const TauParameters& p) {
  validate_tau_parameters(p);
  std::vector<Complex> s(2);
  s[0] = 1.0 / std::sqrt(2.0);
  s[1] = std::exp(Complex(0.0, p.theta)) / std::sqrt(2.0);
  CMatrix rho_b(2, 2);
  rho_b(0, 0) = p.a;
  rho_b(0, 1) = p.b;
  rho_b(1, 0) = std::conj(p.b);
  rho_b(1, 1) = 1.0 - p.a;
  return make_density(kron(outer(s), rho_b), 2, 2);
}

// --- random generators ---

struct EigMode {
  enum class Kind { dirichlet_uniform, fixed };
  Kind kind = Kind::dirichlet_uniform;
  std::vector<double> fixed_values;

  static EigMode dirichlet() { return EigMode{}; }
  static EigMode fixed(std::vector<double> values) {
    return EigMode{Kind::fixed, std::move(values)};
  }
};

/// Validates a fixed eigenvalue grid and returns it normalized to unit sum.
inline std::vector<double> checked_grid(const std::vector<double>& values,
                                        std::size_t expected_size) {
  if (values.size() != expected_size)
    throw std::invalid_argument("fixed eigenvalues: expected " +
                                std::to_string(expected_size) + " entries, got " +
                                std::to_string(values.size()));
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("fixed eigenvalues: entries must be >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("fixed eigenvalues: sum " +
                                std::to_string(sum) + " is not 1");
  std::vector<double> out = values;
  for (double& v : out) v /= sum;
  return out;
}

/// Draws the generator form of a random product-eigenbasis state without
/// assembling the density matrix (the search hot path works on this form).
inline PccSample sample_pcc(std::size_t dim_a, std::size_t dim_b,
                            const EigMode& mode, RngStream& rng) {
  if (dim_a < 1 || dim_b < 1)
    throw std::invalid_argument("sample_pcc: dimensions must be >= 1");
  PccSample s;
  s.dim_a = dim_a;
  s.dim_b = dim_b;
  if (mode.kind == EigMode::Kind::fixed)
    s.eigenvalues = checked_grid(mode.fixed_values, dim_a * dim_b);
  else
    s.eigenvalues = dirichlet_uniform(dim_a * dim_b, rng);
  s.basis_a = haar_unitary(dim_a, rng);
  s.basis_b = haar_unitary(dim_b, rng);
  return s;
}

inline CMatrix assemble_pcc(const PccSample& s) {
  const std::size_t d = s.dim_a * s.dim_b;
  CMatrix rho(d, d);
  for (std::size_t i = 0; i < s.dim_a; ++i) {
    const CMatrix pi = outer(column(s.basis_a, i));
    for (std::size_t j = 0; j < s.dim_b; ++j) {
      const double e = s.eigenvalues[i * s.dim_b + j];
      if (e == 0.0) continue;
      rho = rho + Complex(e) * kron(pi, outer(column(s.basis_b, j)));
    }
  }
  return rho;
}

inline std::pair<DensityMatrix, PccSample> random_pcc(std::size_t dim_a,
                                                      std::size_t dim_b,
                                                      const EigMode& mode,
                                                      RngStream& rng) {
  PccSample s = sample_pcc(dim_a, dim_b, mode, rng);
  DensityMatrix dm = make_density(assemble_pcc(s), dim_a, dim_b);
  return {std::move(dm), std::move(s)};
}

/// Convex mixture of k Haar-random product pure projectors with uniform
/// Dirichlet weights.
inline DensityMatrix random_separable(std::size_t dim_a, std::size_t dim_b,
                                      std::size_t k, RngStream& rng) {
  if (k < 1) throw std::invalid_argument("random_separable: k must be >= 1");
  const std::vector<double> w = dirichlet_uniform(k, rng);
  const std::size_t d = dim_a * dim_b;
  CMatrix rho(d, d);
  for (std::size_t t = 0; t < k; ++t) {
    const std::vector<Complex> xa = column(haar_unitary(dim_a, rng), 0);
    const std::vector<Complex> xb = column(haar_unitary(dim_b, rng), 0);
    rho = rho + Complex(w[t]) * outer(kron_vec(xa, xb));
  }
  return make_density(std::move(rho), dim_a, dim_b);
}

/// G G^dagger / Tr(G G^dagger) with G a (dim_a*dim_b) x rank Ginibre sample.
inline DensityMatrix random_density(std::size_t dim_a, std::size_t dim_b,
                                    std::size_t rank, RngStream& rng) {
  const std::size_t d = dim_a * dim_b;
  if (rank < 1 || rank > d)
    throw std::invalid_argument("random_density: rank must be in [1, d]");
  const CMatrix g = ginibre(d, rank, rng);
  CMatrix rho = g * g.adjoint();
  const double tr = rho.trace().real();
  rho = Complex(1.0 / tr) * rho;
  for (std::size_t i = 0; i < d; ++i)
    rho(i, i) = Complex(rho(i, i).real(), 0.0);
  return make_density(std::move(rho), dim_a, dim_b);
}

/// Shannon entropy of the spectrum in bits (eigenvalues below 1e-12 are
/// treated as exactly zero) and purity Tr(rho^2).
inline EntropyPurity entropy_purity(const DensityMatrix& rho) {
  EntropyPurity out;
  for (const Complex& z : rho.mat.data()) out.purity += std::norm(z);
  const HermitianEigen eig = hermitian_eig(rho.mat);
  for (double v : eig.values)
    if (v > 1e-12) out.entropy_bits -= v * std::log2(v);
  return out;
}

inline double shannon_entropy_bits(const std::vector<double>& p) {
  double s = 0.0;
  for (double v : p)
    if (v > 1e-12) s -= v * std::log2(v);
  return s;
}

}  // namespace ncwit
