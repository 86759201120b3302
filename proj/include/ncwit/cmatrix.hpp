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
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncwit/rng.hpp"

namespace ncwit {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Small dimensions only (the library
/// targets bipartite systems up to dimension ~64), so all algorithms here
/// favor robustness over asymptotic speed.
///
/// Tensor convention used throughout: subsystem A (qubit 1) is always the
/// LEFT Kronecker factor, and the basis index of |x1 x2> is x1*dim_b + x2.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Complex(0.0, 0.0)) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
      throw std::invalid_argument("CMatrix: entry count does not match shape");
  }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Complex& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  const std::vector<Complex>& data() const { return data_; }
  std::vector<Complex>& data() { return data_; }

  CMatrix adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  bool operator==(const CMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

inline CMatrix operator+(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix add: shape mismatch");
  CMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

inline CMatrix operator-(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix subtract: shape mismatch");
  CMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

inline CMatrix operator*(const Complex& s, const CMatrix& a) {
  CMatrix out = a;
  for (auto& v : out.data()) v *= s;
  return out;
}

inline CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matrix multiply: inner dimension mismatch");
  CMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

inline double max_abs(const CMatrix& m) {
  double v = 0.0;
  for (const auto& z : m.data()) v = std::max(v, std::abs(z));
  return v;
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  return max_abs(a - b);
}

inline bool has_finite_entries(const CMatrix& m) {
  for (const auto& z : m.data())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

/// Largest |h(i,j) - conj(h(j,i))| over all entries.
inline double hermiticity_defect(const CMatrix& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = i; j < h.cols(); ++j)
      worst = std::max(worst, std::abs(h(i, j) - std::conj(h(j, i))));
  return worst;
}

inline double unitarity_defect(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return max_abs_diff(u.adjoint() * u, CMatrix::identity(u.rows()));
}

// --- vector helpers (column vectors as std::vector<Complex>) ---

inline std::vector<Complex> column(const CMatrix& m, std::size_t k) {
  std::vector<Complex> v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, k);
  return v;
}

/// <x|y>, conjugate-linear in the first argument.
inline Complex inner(const std::vector<Complex>& x,
                     const std::vector<Complex>& y) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

inline double vec_norm(const std::vector<Complex>& x) {
  return std::sqrt(std::real(inner(x, x)));
}

/// Projector |x><x|.
inline CMatrix outer(const std::vector<Complex>& x) {
  CMatrix m(x.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) m(i, j) = x[i] * std::conj(x[j]);
  return m;
}

/// <x|M|x> for square M.
inline Complex quadratic_form(const std::vector<Complex>& x, const CMatrix& m) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex row = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) row += m(i, j) * x[j];
    s += std::conj(x[i]) * row;
  }
  return s;
}

/// Kronecker product; `a` is the left (subsystem-A / qubit-1) factor.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ia = 0; ia < a.rows(); ++ia)
    for (std::size_t ja = 0; ja < a.cols(); ++ja) {
      const Complex f = a(ia, ja);
      if (f == Complex(0.0, 0.0)) continue;
      for (std::size_t ib = 0; ib < b.rows(); ++ib)
        for (std::size_t jb = 0; jb < b.cols(); ++jb)
          out(ia * b.rows() + ib, ja * b.cols() + jb) = f * b(ib, jb);
    }
  return out;
}

/// U rho U^dagger. Rejects non-unitary U (defect above 1e-10).
inline CMatrix conjugate(const CMatrix& rho, const CMatrix& u) {
  if (u.rows() != u.cols() || rho.rows() != rho.cols() ||
      rho.rows() != u.rows())
    throw std::invalid_argument("conjugate: dimension mismatch");
  const double defect = unitarity_defect(u);
  if (defect > 1e-10)
    throw std::invalid_argument("conjugate: matrix is not unitary (defect " +
                                std::to_string(defect) + ")");
  return u * rho * u.adjoint();
}

struct HermitianEigen {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // k-th column belongs to values[k]
};

/// Full spectrum of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Off-diagonal Frobenius threshold 1e-14, at most 100 sweeps. Eigenvalues
/// come back ascending, ties keeping their pre-sort order.
inline HermitianEigen hermitian_eig(const CMatrix& h) {
  if (h.rows() != h.cols())
    throw std::invalid_argument("hermitian_eig: matrix is not square");
  const double defect = hermiticity_defect(h);
  if (defect > 1e-10)
    throw std::invalid_argument(
        "hermitian_eig: matrix is not Hermitian (max asymmetry " +
        std::to_string(defect) + ")");

  const std::size_t n = h.rows();
  // Work on the symmetrized matrix so the diagonal stays exactly real.
  CMatrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      w(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));
  CMatrix v = CMatrix::identity(n);

  const double off_threshold = 1e-14;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) off += std::norm(w(i, j));
    if (std::sqrt(off) <= off_threshold) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex wpq = w(p, q);
        const double r = std::abs(wpq);
        if (r < 1e-300) continue;
        const Complex phase = wpq / r;
        const double tau = (w(q, q).real() - w(p, p).real()) / (2.0 * r);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex su = s * phase;

        // w <- G^dagger w G with G the identity except
        // G(p,p)=c, G(p,q)=s*phase, G(q,p)=-s*conj(phase), G(q,q)=c.
        for (std::size_t i = 0; i < n; ++i) {
          const Complex wip = w(i, p), wiq = w(i, q);
          w(i, p) = c * wip - std::conj(su) * wiq;
          w(i, q) = su * wip + c * wiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const Complex wpj = w(p, j), wqj = w(q, j);
          w(p, j) = c * wpj - su * wqj;
          w(q, j) = std::conj(su) * wpj + c * wqj;
        }
        w(p, q) = 0.0;
        w(q, p) = 0.0;
        w(p, p) = Complex(w(p, p).real(), 0.0);
        w(q, q) = Complex(w(q, q).real(), 0.0);

        for (std::size_t i = 0; i < n; ++i) {
          const Complex vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - std::conj(su) * viq;
          v(i, q) = su * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return w(a, a).real() < w(b, b).real();
  });

  HermitianEigen out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = w(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

inline double min_eigenvalue(const CMatrix& h) {
  return hermitian_eig(h).values.front();
}

inline CMatrix ginibre(std::size_t rows, std::size_t cols, RngStream& rng) {
  CMatrix g(rows, cols);
  for (auto& z : g.data()) z = rng.complex_gaussian();
  return g;
}

/// Haar-distributed d x d unitary: Ginibre sample orthonormalized by
/// modified Gram-Schmidt (two passes). MGS produces the unique QR factor
/// whose triangular diagonal is real positive, which is exactly the
/// phase-fixed factor the Haar measure requires.
inline CMatrix haar_unitary(std::size_t d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("haar_unitary: d must be >= 1");
  CMatrix u = ginibre(d, d, rng);
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<Complex> col = column(u, k);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {
        const std::vector<Complex> qj = column(u, j);
        const Complex proj = inner(qj, col);
        for (std::size_t i = 0; i < d; ++i) col[i] -= proj * qj[i];
      }
    }
    const double nrm = vec_norm(col);
    if (nrm < 1e-150)
      throw std::runtime_error("haar_unitary: degenerate Ginibre sample");
    for (std::size_t i = 0; i < d; ++i) u(i, k) = col[i] / nrm;
  }
  return u;
}

/// Tr(rho * a) for Hermitian rho and a. The product is real up to roundoff;
/// an imaginary residue above 1e-10 signals corrupted inputs and is rejected.
inline double trace_product(const CMatrix& rho, const CMatrix& a) {
  if (rho.rows() != a.rows() || rho.cols() != a.cols() ||
      rho.rows() != rho.cols())
    throw std::invalid_argument("trace_product: dimension mismatch");
  const double drho = hermiticity_defect(rho);
  if (drho > 1e-10)
    throw std::invalid_argument(
        "trace_product: first argument is not Hermitian (max asymmetry " +
        std::to_string(drho) + ")");
  const double da = hermiticity_defect(a);
  if (da > 1e-10)
    throw std::invalid_argument(
        "trace_product: second argument is not Hermitian (max asymmetry " +
        std::to_string(da) + ")");
  Complex t = 0.0;
  for (std::size_t i = 0; i < rho.rows(); ++i)
    for (std::size_t j = 0; j < rho.cols(); ++j) t += rho(i, j) * a(j, i);
  if (std::abs(t.imag()) > 1e-10)
    throw std::invalid_argument("trace_product: imaginary residue " +
                                std::to_string(t.imag()) +
                                " signals corrupted inputs");
  return t.real();
}

}  // namespace ncwit
