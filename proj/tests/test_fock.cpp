// Copyright 2026 The Photocount Authors
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

#include <cmath>
#include <random>

#include "doctest.h"
#include "photocount/errors.hpp"
#include "photocount/fock.hpp"

using namespace photocount;
using namespace photocount::fock;

namespace {

CMatrix random_density(int dim, int support, std::mt19937_64& rng, int rank = 2) {
  std::normal_distribution<double> g;
  CMatrix a = CMatrix::Zero(dim, rank);
  for (int i = 0; i < support; ++i)
    for (int j = 0; j < rank; ++j) a(i, j) = cplx(g(rng), g(rng));
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

// Wigner function of |m><n| in closed form (Laguerre polynomials).
cplx wigner_element(int m, int n, cplx beta) {
  const double r2 = std::norm(beta);
  if (m >= n) {
    const int d = m - n;
    double pref = (2 / kPi) * ((n % 2) ? -1.0 : 1.0) * std::exp(0.5 * (std::lgamma(n + 1) - std::lgamma(m + 1)));
    return pref * std::pow(2.0 * std::conj(beta), d) * std::exp(-2 * r2) * std::assoc_laguerre(n, d, 4 * r2);
  }
  return std::conj(wigner_element(n, m, beta));
}

}  // namespace

TEST_CASE("truncated commutator and parity") {
  auto ops = make_operators(5);
  CMatrix comm = ops.a * ops.adag - ops.adag * ops.a;
  for (int i = 0; i < 4; ++i) CHECK(std::abs(comm(i, i) - 1.0) < 1e-14);
  CHECK(std::abs(comm(4, 4) + 4.0) < 1e-14);
  auto ops3 = make_operators(3);
  CHECK(ops3.parity(0, 0).real() == 1.0);
  CHECK(ops3.parity(1, 1).real() == -1.0);
  CHECK(ops3.parity(2, 2).real() == 1.0);
  CHECK_THROWS_AS(make_operators(1), DimensionError);
}

TEST_CASE("lifted qubit and memory operators commute") {
  auto ops = make_operators(8);
  CMatrix a = ops.lift_qubit(ops.sz), b = ops.lift_memory(ops.num);
  CHECK((a * b - b * a).norm() < 1e-14);
  CHECK(a.rows() == ops.joint_dim());
  // qubit-major: |e, n> sits at index n_max + n
  CHECK(std::abs(a(8 + 3, 8 + 3) - 1.0) < 1e-15);
  CHECK(std::abs(b(8 + 3, 8 + 3) - 3.0) < 1e-15);
}

TEST_CASE("displacement") {
  CHECK((displacement(0.0, 10).matrix - CMatrix::Identity(10, 10)).norm() < 1e-14);

  const cplx beta = 0.7;
  auto d = displacement(beta, 30).matrix;
  for (int n = 0; n <= 4; ++n) {
    cplx exact = std::exp(-0.5 * std::norm(beta)) * std::pow(beta, n) / std::sqrt(std::tgamma(n + 1.0));
    CHECK(std::abs(d(n, 0) - exact) < 1e-8);
  }
  for (cplx b : {cplx(1.0, 0.0), cplx(0.3, -0.8), cplx(-0.5, 0.5)}) {
    CMatrix prod = displacement(b, 30).matrix * displacement(-b, 30).matrix;
    CHECK((prod - CMatrix::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_FALSE(displacement(1.0, 30).containment_warning);
  CHECK(displacement(3.0, 30).containment_warning);
}

TEST_CASE("fast displacer agrees with the matrix exponential") {
  Displacer disp(20);
  for (cplx b : {cplx(0.4, 0.1), cplx(-1.1, 0.6), cplx(0.0, -1.5)}) {
    CMatrix ref = displacement(b, 20).matrix;
    CHECK((disp(b) - ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((disp.top_rows(b, 7) - ref.topRows(7)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("state builders are valid density operators") {
  for (const CMatrix& rho : {projector(fock_state(3, 12)), projector(coherent_state(cplx(0.8, 0.3), 30)),
                             thermal_state(0.3, 30)}) {
    auto v = check_density(rho);
    CHECK(v.ok(1e-12, 1e-8, 1e-8));
  }
  CHECK(std::abs(thermal_state(0.5, 40)(1, 1).real() - 0.5 / 1.5 / 1.5) < 1e-12);
  CHECK(std::abs(purity(projector(fock_state(2, 5))) - 1.0) < 1e-14);
}

TEST_CASE("point Wigner values") {
  CHECK(std::abs(wigner(projector(fock_state(0, 20)), 0.0) - 2 / kPi) < 1e-10);
  CHECK(std::abs(wigner(projector(fock_state(1, 20)), 0.0) + 2 / kPi) < 1e-10);
  const cplx alpha(0.6, -0.4);
  CHECK(std::abs(wigner(projector(coherent_state(alpha, 30)), alpha) - 2 / kPi) < 1e-8);
}

TEST_CASE("Wigner function agrees with the Laguerre closed form on random states") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const int support = 8;
    CMatrix rho = random_density(30, support, rng, 1 + trial % 3);
    for (int p = 0; p < 6; ++p) {
      cplx beta(u(rng), u(rng));
      cplx exact = 0.0;
      for (int m = 0; m < support; ++m)
        for (int n = 0; n < support; ++n) exact += rho(m, n) * wigner_element(m, n, beta);
      CHECK(std::abs(exact.imag()) < 1e-12);
      CHECK(std::abs(wigner(rho, beta) - exact.real()) < 1e-6);
    }
  }
}

TEST_CASE("Wigner overlaps") {
  auto axis = linspace(-4.0, 4.0, 81);
  auto grids = wigner_grids({projector(fock_state(0, 30)), projector(fock_state(1, 30)),
                             projector(coherent_state(1.0, 30))},
                            axis, axis);
  CHECK(std::abs(overlap_from_wigner(grids[0], grids[0]) - 1.0) < 1e-3);
  CHECK(std::abs(overlap_from_wigner(grids[0], grids[1])) < 1e-3);
  CHECK(std::abs(overlap_from_wigner(grids[2], grids[0]) - std::exp(-1.0)) < 1e-3);
  CHECK(std::abs(grids[0].integral() - 1.0) < 1e-6);

  auto other = wigner_grid(projector(fock_state(0, 30)), linspace(-4, 4, 41), axis);
  CHECK_THROWS_AS(overlap_from_wigner(grids[0], other), ShapeError);
}

TEST_CASE("Wigner overlap converges to the purity under refinement") {
  std::mt19937_64 rng(11);
  CMatrix rho = random_density(30, 4, rng, 2);
  const double exact = purity(rho);
  double prev = 1e9;
  for (int points : {9, 17, 33}) {
    auto axis = linspace(-4.5, 4.5, points);
    auto g = wigner_grid(rho, axis, axis);
    double err = std::abs(overlap_from_wigner(g, g) - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("fidelity") {
  CMatrix r0 = projector(fock_state(0, 6)), r1 = projector(fock_state(1, 6));
  CMatrix psi = projector(coherent_state(cplx(0.3, 0.2), 6).normalized());
  CHECK(std::abs(fidelity(psi, psi) - 1.0) < 1e-12);
  CHECK(std::abs(fidelity(r0, r1)) < 1e-14);
  CHECK(std::abs(fidelity(r0, 0.5 * (r0 + r1)) - 0.5) < 1e-14);
  CHECK_THROWS_AS(fidelity(r0, projector(fock_state(0, 7))), ShapeError);

  auto axis = linspace(-4.0, 4.0, 81);
  auto g = wigner_grids({psi.topLeftCorner(6, 6), 0.5 * (r0 + r1)}, axis, axis);
  CHECK(std::abs(fidelity_from_wigner(g[0], g[1]) - fidelity(psi, 0.5 * (r0 + r1))) < 1e-3);
}

TEST_CASE("ideal projection") {
  CVector two = fock_state(2, 10);
  CHECK((ideal_projection(two, 2) - two).norm() < 1e-15);

  CVector a = coherent_state(std::sqrt(0.5), 30);
  CVector p = ideal_projection(a, 0);
  CHECK(std::abs(std::norm(p(4)) / std::norm(p(0)) - std::pow(0.5, 4) / 24.0) < 1e-12);
  CHECK(std::abs(p.norm() - 1.0) < 1e-14);
  for (int n = 0; n < 30; ++n)
    if (n % 4) CHECK(p(n) == cplx(0.0));
  CHECK(std::abs(std::abs(ideal_projection(p, 0).dot(p)) - 1.0) < 1e-12);

  CHECK_THROWS_AS(ideal_projection(fock_state(1, 10), 0), EmptyProjectionError);
}
