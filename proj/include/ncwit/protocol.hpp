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
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncwit/cmatrix.hpp"
#include "ncwit/rng.hpp"
#include "ncwit/states.hpp"

namespace ncwit {

struct Gate {
  std::string label;
  CMatrix unitary;
};

struct StandardGates {
  Gate controlled_h;
  Gate cnot;
};

/// controlled-H and CNOT, both with qubit 1 (the left tensor factor) as
/// control and qubit 2 as target.
inline StandardGates standard_gates() {
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix ch = CMatrix::identity(4);
  ch(2, 2) = r;
  ch(2, 3) = r;
  ch(3, 2) = r;
  ch(3, 3) = -r;
  CMatrix cx = CMatrix::identity(4);
  cx(2, 2) = 0.0;
  cx(3, 3) = 0.0;
  cx(2, 3) = 1.0;
  cx(3, 2) = 1.0;
  return StandardGates{{"controlled-H", std::move(ch)}, {"CNOT", std::move(cx)}};
}

inline bool is_power_of_two(std::size_t x) { return x > 0 && (x & (x - 1)) == 0; }

inline std::size_t log2_exact(std::size_t x) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < x) ++n;
  return n;
}

/// Requires both subsystem dimensions to be powers of two and returns the
/// total qubit count.
inline std::size_t qubit_count(const DensityMatrix& rho) {
  if (!is_power_of_two(rho.dim_a) || !is_power_of_two(rho.dim_b))
    throw std::invalid_argument(
        "protocol: subsystem dimensions must be powers of 2");
  return log2_exact(rho.dim_a * rho.dim_b);
}

/// Ensemble expectation <Z_qubit>. `qubit` is 1-based with qubit 1 the left
/// tensor factor, matching the Z_1, Z_2 naming. The state is untouched;
/// noise_sigma > 0 adds one Gaussian draw to the reading.
inline double polarization(const DensityMatrix& rho, std::size_t qubit,
                           double noise_sigma, RngStream& rng) {
  const std::size_t n = qubit_count(rho);
  if (qubit < 1 || qubit > n)
    throw std::invalid_argument("polarization: qubit index out of range");
  if (!(noise_sigma >= 0.0))
    throw std::invalid_argument("polarization: noise_sigma must be >= 0");
  const std::size_t bit = n - qubit;  // qubit 1 owns the highest bit
  double z = 0.0;
  const std::size_t d = rho.mat.rows();
  for (std::size_t x = 0; x < d; ++x)
    z += ((x >> bit) & 1) ? -rho.mat(x, x).real() : rho.mat(x, x).real();
  if (noise_sigma > 0.0) z += noise_sigma * rng.gaussian();
  return z;
}

inline double polarization(const DensityMatrix& rho, std::size_t qubit) {
  RngStream unused(0);
  return polarization(rho, qubit, 0.0, unused);
}

struct ProtocolResult {
  double z1_ii = 0.0;
  double z2_ii = 0.0;
  double z2_iv = 0.0;
  double w_value = 0.0;
  double c_used = 0.0;
};

/// Single-run ensemble protocol for the two-qubit witness: apply
/// controlled-H, read <Z1> and <Z2>, apply CNOT, read <Z2> again, and
/// combine the three polarizations into
/// w = c - (1/16)(1 + z1 + z2 + z2')(1 - z1 + z2 - z2').
/// Noisy readings are clamped to the physical range [-1, 1]; noise-free
/// readings are recorded as computed.
inline ProtocolResult run_sigma_protocol(const DensityMatrix& rho, double c,
                                         double noise_sigma, RngStream& rng) {
  if (rho.dim_a != 2 || rho.dim_b != 2)
    throw std::invalid_argument("protocol: state must be two qubits (2x2)");
  if (!std::isfinite(c))
    throw std::invalid_argument("protocol: c must be finite");
  const StandardGates gates = standard_gates();
  const auto record = [&](const DensityMatrix& state, std::size_t qubit) {
    double z = polarization(state, qubit, noise_sigma, rng);
    if (noise_sigma > 0.0) z = std::min(1.0, std::max(-1.0, z));
    return z;
  };

  ProtocolResult out;
  out.c_used = c;
  DensityMatrix hat{2, 2, conjugate(rho.mat, gates.controlled_h.unitary)};
  out.z1_ii = record(hat, 1);
  out.z2_ii = record(hat, 2);
  DensityMatrix hat2{2, 2, conjugate(hat.mat, gates.cnot.unitary)};
  out.z2_iv = record(hat2, 2);
  out.w_value = c - (1.0 + out.z1_ii + out.z2_ii + out.z2_iv) *
                        (1.0 - out.z1_ii + out.z2_ii - out.z2_iv) / 16.0;
  return out;
}

/// Noise-free protocol run; no randomness is consumed.
inline ProtocolResult run_sigma_protocol(const DensityMatrix& rho, double c) {
  RngStream unused(0);
  return run_sigma_protocol(rho, c, 0.0, unused);
}

struct ZTerm {
  double coefficient = 0.0;
  std::uint64_t z_mask = 0;  // bit (n - q) set means Z acts on qubit q
};

/// Ordered CNOT list (control, target), both 1-based qubit indices.
using ReductionNetwork = std::vector<std::pair<std::size_t, std::size_t>>;

struct MeasurementPlan {
  std::size_t n_qubits = 0;
  CMatrix diagonalizer;        // D with D A D^dagger diagonal
  std::vector<ZTerm> terms;    // sorted by z_mask ascending
  std::vector<ReductionNetwork> networks;  // parallel to terms
};

inline std::string z_mask_label(std::uint64_t mask, std::size_t n_qubits) {
  std::string s(n_qubits, 'I');
  for (std::size_t q = 1; q <= n_qubits; ++q)
    if ((mask >> (n_qubits - q)) & 1) s[q - 1] = 'Z';
  return s;
}

/// Compiles Tr(rho A) into single-qubit polarization readouts: diagonalize
/// A, expand the diagonal into Z-strings by the Walsh-Hadamard transform,
/// and give every multi-qubit string a CNOT chain folding its parity onto
/// the lowest-index active qubit (controls walk from the highest-index
/// active qubit down). Coefficients with |c| <= 1e-13 are dropped.
///
/// Exactly diagonal inputs keep the computational ordering (diagonalizer I),
/// so the Z-string signs line up with the basis labels; other inputs use
/// the eigensolver's ascending ordering.
inline MeasurementPlan compile_measurement_plan(const CMatrix& a) {
  if (a.rows() != a.cols() || !is_power_of_two(a.rows()))
    throw std::invalid_argument(
        "measurement plan: dimension must be a power of 2");
  const double defect = hermiticity_defect(a);
  if (defect > 1e-10)
    throw std::invalid_argument(
        "measurement plan: matrix is not Hermitian (max asymmetry " +
        std::to_string(defect) + ")");
  const std::size_t d = a.rows();
  const std::size_t n = log2_exact(d);

  double off = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (i != j) off = std::max(off, std::abs(a(i, j)));

  MeasurementPlan plan;
  plan.n_qubits = n;
  std::vector<double> diag(d);
  if (off <= 1e-15) {
    plan.diagonalizer = CMatrix::identity(d);
    for (std::size_t i = 0; i < d; ++i) diag[i] = a(i, i).real();
  } else {
    const HermitianEigen eig = hermitian_eig(a);
    plan.diagonalizer = eig.vectors.adjoint();
    diag = eig.values;
  }

  for (std::uint64_t m = 0; m < d; ++m) {
    double coeff = 0.0;
    for (std::uint64_t x = 0; x < d; ++x)
      coeff += (__builtin_popcountll(m & x) & 1) ? -diag[x] : diag[x];
    coeff /= static_cast<double>(d);
    if (std::abs(coeff) <= 1e-13) continue;

    ZTerm term{coeff, m};
    ReductionNetwork net;
    if (m != 0) {
      std::vector<std::size_t> active;  // 1-based, ascending qubit index
      for (std::size_t q = 1; q <= n; ++q)
        if ((m >> (n - q)) & 1) active.push_back(q);
      for (std::size_t i = active.size(); i-- > 1;)
        net.emplace_back(active[i], active.front());
    }
    plan.terms.push_back(term);
    plan.networks.push_back(std::move(net));
  }
  return plan;
}

/// In-place conjugation by CNOT(control, target): a pure index permutation,
/// exact in floating point. Qubit indices are 1-based.
inline void apply_cnot(CMatrix& rho, std::size_t n, std::size_t control,
                       std::size_t target) {
  const std::size_t cbit = n - control;
  const std::size_t tbit = n - target;
  const std::size_t d = rho.rows();
  const auto image = [&](std::size_t x) {
    return ((x >> cbit) & 1) ? x ^ (std::size_t{1} << tbit) : x;
  };
  std::vector<bool> done(d, false);
  // Permute rows and columns simultaneously by walking the 2-cycles.
  for (std::size_t x = 0; x < d; ++x) {
    const std::size_t y = image(x);
    if (y == x || done[x] || done[y]) continue;
    done[x] = done[y] = true;
    for (std::size_t c = 0; c < d; ++c) std::swap(rho(x, c), rho(y, c));
    for (std::size_t r = 0; r < d; ++r) std::swap(rho(r, x), rho(r, y));
  }
}

/// Runs the plan on one ensemble: conjugate by the diagonalizer, then for
/// each term apply its reduction network, read one polarization, and undo
/// the network before the next term. The identity term contributes its
/// coefficient directly (no readout, no noise draw). With noise off the
/// result equals Tr(rho A) within roundoff.
inline double execute_plan(const MeasurementPlan& plan, const DensityMatrix& rho,
                           double noise_sigma, RngStream& rng) {
  if (qubit_count(rho) != plan.n_qubits)
    throw std::invalid_argument("execute_plan: qubit count mismatch");
  const std::size_t n = plan.n_qubits;
  DensityMatrix work{rho.dim_a, rho.dim_b,
                     conjugate(rho.mat, plan.diagonalizer)};
  double acc = 0.0;
  for (std::size_t t = 0; t < plan.terms.size(); ++t) {
    const ZTerm& term = plan.terms[t];
    if (term.z_mask == 0) {
      acc += term.coefficient;
      continue;
    }
    const ReductionNetwork& net = plan.networks[t];
    for (const auto& [control, target] : net)
      apply_cnot(work.mat, n, control, target);
    std::size_t lowest_active = 1;
    while (!((term.z_mask >> (n - lowest_active)) & 1)) ++lowest_active;
    acc += term.coefficient * polarization(work, lowest_active, noise_sigma, rng);
    for (std::size_t i = net.size(); i-- > 0;)
      apply_cnot(work.mat, n, net[i].first, net[i].second);
  }
  return acc;
}

}  // namespace ncwit
