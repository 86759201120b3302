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
#include <cstddef>
#include <vector>

#include "ncwit/cmatrix.hpp"
#include "ncwit/protocol.hpp"
#include "ncwit/rng.hpp"
#include "ncwit/states.hpp"
#include "ncwit/witness.hpp"

using namespace ncwit;

namespace {

const double kCOpt = (3.0 + 2.0 * std::sqrt(2.0)) / 32.0;

CMatrix random_hermitian_matrix(std::size_t d, RngStream& rng) {
  const CMatrix g = ginibre(d, d, rng);
  return Complex(0.5) * (g + g.adjoint());
}

/// Diagonal +/-1 matrix for a Z string encoded as a bit mask over basis
/// indices, bit (n-q) carrying qubit q.
CMatrix z_string(std::size_t n_qubits, std::size_t mask) {
  const std::size_t d = std::size_t{1} << n_qubits;
  CMatrix m(d, d);
  for (std::size_t x = 0; x < d; ++x) {
    m(x, x) = (__builtin_popcountll(mask & x) % 2 == 0) ? 1.0 : -1.0;
  }
  return m;
}

}  // namespace

TEST_CASE("standard gate fixtures") {
  const StandardGates g = standard_gates();
  const double r = 1.0 / std::sqrt(2.0);

  REQUIRE(g.controlled_h.unitary.rows() == 4);
  REQUIRE(g.controlled_h.unitary(0, 0) == Complex(1.0));
  REQUIRE(g.controlled_h.unitary(1, 1) == Complex(1.0));
  REQUIRE(g.controlled_h.unitary(2, 2) == Complex(r));
  REQUIRE(g.controlled_h.unitary(2, 3) == Complex(r));
  REQUIRE(g.controlled_h.unitary(3, 2) == Complex(r));
  REQUIRE(g.controlled_h.unitary(3, 3) == Complex(-r));
  REQUIRE(g.controlled_h.unitary(0, 1) == Complex(0.0));

  const CMatrix ch2 = g.controlled_h.unitary * g.controlled_h.unitary;
  REQUIRE(max_abs_diff(ch2, CMatrix::identity(4)) < 1e-15);

  // CNOT conjugation lifts a target-qubit Z to the parity observable.
  CMatrix pauli_z(2, 2);
  pauli_z(0, 0) = 1.0;
  pauli_z(1, 1) = -1.0;
  const CMatrix i_z = kron(CMatrix::identity(2), pauli_z);
  const CMatrix lifted = g.cnot.unitary * i_z * g.cnot.unitary;
  const CMatrix zz = kron(pauli_z, pauli_z);
  REQUIRE(max_abs_diff(lifted, zz) == 0.0);
}

TEST_CASE("polarization reads single-qubit Z expectations") {
  RngStream rng(51);
  CMatrix p00(4, 4);
  p00(0, 0) = 1.0;
  const DensityMatrix pure00 = make_density(p00, 2, 2);
  REQUIRE(polarization(pure00, 1) == 1.0);
  REQUIRE(polarization(pure00, 2) == 1.0);

  // One-way transformed sigma: an even mixture of |00> and |10>.
  CMatrix rho_hat(4, 4);
  rho_hat(0, 0) = 0.5;
  rho_hat(2, 2) = 0.5;
  const DensityMatrix hat = make_density(rho_hat, 2, 2);
  REQUIRE(std::abs(polarization(hat, 1)) < 1e-15);
  REQUIRE(std::abs(polarization(hat, 2) - 1.0) < 1e-15);

  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho = random_density(2, 2, 1 + trial % 4, rng);
    for (std::size_t q : {std::size_t{1}, std::size_t{2}}) {
      const double z = polarization(rho, q);
      REQUIRE(z <= 1.0 + 1e-12);
      REQUIRE(z >= -1.0 - 1e-12);
    }
  }

  const DensityMatrix qutrit_b{1, 3, CMatrix::identity(3)};
  REQUIRE_THROWS_AS(polarization(qutrit_b, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(polarization(pure00, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(polarization(pure00, 3), std::invalid_argument);
}

TEST_CASE("run_sigma_protocol on frozen states") {
  RngStream rng(52);
  const ProtocolResult r = run_sigma_protocol(sigma_state(), kCOpt, 0.0, rng);
  REQUIRE(std::abs(r.z1_ii) < 1e-15);
  REQUIRE(std::abs(r.z2_ii - 1.0) < 1e-15);
  REQUIRE(std::abs(r.z2_iv) < 1e-15);
  REQUIRE(std::abs(r.w_value - (kCOpt - 0.25)) < 1e-12);
  REQUIRE(r.c_used == kCOpt);

  CMatrix p00(4, 4);
  p00(0, 0) = 1.0;
  const DensityMatrix pure00 = make_density(p00, 2, 2);
  const ProtocolResult r00 = run_sigma_protocol(pure00, kCOpt, 0.0, rng);
  REQUIRE(r00.z1_ii == 1.0);
  REQUIRE(r00.z2_ii == 1.0);
  REQUIRE(r00.z2_iv == 1.0);
  REQUIRE(std::abs(r00.w_value - kCOpt) < 1e-15);
}

TEST_CASE("protocol equals direct evaluation on random states") {
  RngStream rng(53);
  const WitnessMap w = make_witness(kCOpt, sigma_witness_factors(), 2, 2);
  for (int trial = 0; trial < 1000; ++trial) {
    const DensityMatrix rho = (trial % 3 == 0)
                                  ? random_separable(2, 2, 1 + trial % 5, rng)
                                  : random_density(2, 2, 1 + trial % 4, rng);
    const ProtocolResult r = run_sigma_protocol(rho, kCOpt, 0.0, rng);
    REQUIRE(std::abs(r.w_value - evaluate(w, rho)) <= 1e-10);
  }
}

TEST_CASE("protocol noise is seeded and bounded") {
  const DensityMatrix rho = sigma_state();
  RngStream a = RngStream::substream(9, 2, 0);
  RngStream b = RngStream::substream(9, 2, 0);
  const ProtocolResult ra = run_sigma_protocol(rho, kCOpt, 0.05, a);
  const ProtocolResult rb = run_sigma_protocol(rho, kCOpt, 0.05, b);
  REQUIRE(ra.w_value == rb.w_value);
  REQUIRE(ra.z1_ii == rb.z1_ii);
  for (double z : {ra.z1_ii, ra.z2_ii, ra.z2_iv}) {
    REQUIRE(z <= 1.0);
    REQUIRE(z >= -1.0);
  }

  RngStream c = RngStream::substream(10, 2, 0);
  const ProtocolResult rc = run_sigma_protocol(rho, kCOpt, 0.05, c);
  REQUIRE(rc.w_value != ra.w_value);

  RngStream d(11);
  REQUIRE_THROWS_AS(run_sigma_protocol(rho, kCOpt, -0.1, d),
                    std::invalid_argument);
}

TEST_CASE("measurement plans for computational projectors") {
  CMatrix p00(4, 4);
  p00(0, 0) = 1.0;
  const MeasurementPlan plan00 = compile_measurement_plan(p00);
  REQUIRE(plan00.n_qubits == 2);
  REQUIRE(plan00.terms.size() == 4);
  for (const ZTerm& t : plan00.terms) {
    REQUIRE(t.coefficient == 0.25);
  }

  CMatrix p10(4, 4);
  p10(2, 2) = 1.0;
  const MeasurementPlan plan10 = compile_measurement_plan(p10);
  REQUIRE(plan10.terms.size() == 4);
  for (const ZTerm& t : plan10.terms) {
    const double expected =
        (t.z_mask == 0 || t.z_mask == 1) ? 0.25 : -0.25;
    REQUIRE(t.coefficient == expected);
    if (t.z_mask == 1) REQUIRE(z_mask_label(t.z_mask, 2) == "IZ");
    if (t.z_mask == 2) REQUIRE(z_mask_label(t.z_mask, 2) == "ZI");
    if (t.z_mask == 3) REQUIRE(z_mask_label(t.z_mask, 2) == "ZZ");
  }

  const MeasurementPlan plan_id =
      compile_measurement_plan(CMatrix::identity(8));
  REQUIRE(plan_id.terms.size() == 1);
  REQUIRE(plan_id.terms[0].z_mask == 0);
  REQUIRE(plan_id.terms[0].coefficient == 1.0);

  REQUIRE_THROWS_AS(compile_measurement_plan(CMatrix::identity(3)),
                    std::invalid_argument);
}

TEST_CASE("plans reconstruct the observable") {
  RngStream rng(54);
  for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
    const std::size_t d = std::size_t{1} << n;
    for (int trial = 0; trial < 10; ++trial) {
      const CMatrix a = random_hermitian_matrix(d, rng);
      const MeasurementPlan plan = compile_measurement_plan(a);
      CMatrix diag(d, d);
      for (const ZTerm& t : plan.terms) {
        diag = diag + Complex(t.coefficient) * z_string(n, t.z_mask);
      }
      // The plan promises D A D^dagger = diag, so A = D^dagger diag D.
      const CMatrix rebuilt =
          plan.diagonalizer.adjoint() * diag * plan.diagonalizer;
      REQUIRE(max_abs_diff(rebuilt, a) < 1e-10);
    }
  }
}

TEST_CASE("reduction networks target the lowest active qubit") {
  CMatrix p10(4, 4);
  p10(2, 2) = 1.0;
  const MeasurementPlan plan = compile_measurement_plan(p10);
  for (std::size_t k = 0; k < plan.terms.size(); ++k) {
    const ZTerm& t = plan.terms[k];
    const ReductionNetwork& net = plan.networks[k];
    if (t.z_mask == 3) {
      REQUIRE(net.size() == 1);
      REQUIRE(net[0].first == 2);
      REQUIRE(net[0].second == 1);
    } else {
      REQUIRE(net.empty());
    }
  }
}

TEST_CASE("execute_plan matches dense traces and leaves the state intact") {
  RngStream rng(55);
  CMatrix p00(4, 4);
  p00(0, 0) = 1.0;
  const MeasurementPlan plan00 = compile_measurement_plan(p00);
  const DensityMatrix sig = sigma_state();
  const CMatrix before = sig.mat;
  RngStream noiseless(1);
  const double got = execute_plan(plan00, sig, 0.0, noiseless);
  REQUIRE(std::abs(got - 0.5) < 1e-12);
  REQUIRE(max_abs_diff(sig.mat, before) == 0.0);

  const std::vector<std::pair<std::size_t, std::size_t>> splits{
      {2, 2}, {2, 4}, {4, 2}};
  int done = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto [da, db] = splits[trial % splits.size()];
    const std::size_t d = da * db;
    const CMatrix a = random_hermitian_matrix(d, rng);
    const DensityMatrix rho =
        random_density(da, db, 1 + trial % d, rng);
    const MeasurementPlan plan = compile_measurement_plan(a);
    const double via_plan = execute_plan(plan, rho, 0.0, rng);
    const double direct = trace_product(rho.mat, a);
    REQUIRE(std::abs(via_plan - direct) <= 1e-10);
    ++done;
  }
  REQUIRE(done == 1000);
}

TEST_CASE("execute_plan noise is reproducible") {
  RngStream rng(56);
  const CMatrix a = random_hermitian_matrix(4, rng);
  const MeasurementPlan plan = compile_measurement_plan(a);
  const DensityMatrix rho = random_density(2, 2, 4, rng);
  RngStream n1 = RngStream::substream(3, 2, 0);
  RngStream n2 = RngStream::substream(3, 2, 0);
  const double v1 = execute_plan(plan, rho, 0.02, n1);
  const double v2 = execute_plan(plan, rho, 0.02, n2);
  REQUIRE(v1 == v2);
  RngStream n3(4);
  REQUIRE_THROWS_AS(execute_plan(plan, rho, -1.0, n3),
                    std::invalid_argument);
}
