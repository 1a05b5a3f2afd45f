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
#include <numbers>

#include "doctest.h"
#include "photocount/campaigns.hpp"
#include "photocount/errors.hpp"

using namespace photocount;
using namespace photocount::campaigns;

namespace {

Context device(int n_max = 20) {
  Context c;
  c.n_max = n_max;
  return c;
}

double max_row_error(const RMatrix& m) {
  double worst = 0.0;
  for (int i = 0; i < m.rows(); ++i) worst = std::max(worst, std::abs(m.row(i).sum() - 1.0));
  return worst;
}

}  // namespace

TEST_CASE("ideal counting curve is Poisson modulo 4") {
  Context ctx = ideal_context(device(30));
  auto curve = coherent_counting_curve({0.0, 0.25, 0.5, 1.0, 2.0}, ctx);
  REQUIRE(curve.measured.size() == 5);
  CHECK(std::abs(curve.measured[0][0] - 1.0) < 1e-12);
  for (std::size_t i = 0; i < curve.alpha2.size(); ++i)
    for (int n = 0; n < 4; ++n) CHECK(std::abs(curve.measured[i][n] - curve.ideal[i][n]) < 1e-4);
  CHECK_FALSE(curve.truncation_warning);

  auto high = coherent_counting_curve({5.0}, ctx);
  CHECK(high.truncation_warning);
}

TEST_CASE("confusion matrix") {
  RMatrix ideal = fock_confusion_matrix(ideal_context(device()));
  CHECK((ideal - RMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-6);

  RMatrix m = fock_confusion_matrix(device());
  CHECK(max_row_error(m) < 1e-6);
  CHECK(m.minCoeff() >= 0.0);
  // the counter still mostly reports the right number
  for (int n = 0; n < 4; ++n) CHECK(m(n, n) == m.row(n).maxCoeff());
  // a lost photon from |1> comes out as 3 once the second question sees
  // the wrong feedback phase; the reverse is much rarer
  CHECK(m(1, 3) > m(1, 2));
}

TEST_CASE("ideal conditional tomography") {
  auto t = conditional_wigner_tomography(0.5, ideal_context(device(30)), 51, 2.2);
  REQUIRE(t.present.size() == 4);
  for (int n2 = 0; n2 < 4; ++n2) {
    REQUIRE(t.present[n2]);
    CHECK(std::abs(t.fidelity_direct[n2] - 1.0) < 1e-6);
    CHECK(std::abs(t.fidelity_direct[n2] - t.fidelity_wigner[n2]) < 2e-2);
  }
  // n2 = 1 is |1> up to a 1e-2 admixture of |5>
  const auto& w = t.maps[1];
  CHECK(std::abs(w.values(25, 25) + 2.0 / std::numbers::pi) < 2e-3);
  CHECK(std::abs(w.integral() - 1.0) < 1e-2);
}

TEST_CASE("device tomography: direct and Wigner fidelities agree") {
  const int n_max = 20;
  auto t = conditional_wigner_tomography(0.5, device(n_max), 51, 2.2);
  CVector psi = fock::coherent_state(std::sqrt(0.5), n_max);
  double total = 0.0;
  for (int n2 = 0; n2 < 4; ++n2) {
    total += t.weights[n2];
    if (!t.present[n2]) continue;
    CHECK(t.fidelity_direct[n2] > 0.0);
    CHECK(t.fidelity_direct[n2] <= 1.0 + 1e-9);
    // beyond <n> = 2 the 2.2 span clips the Wigner tails
    CVector ideal = fock::ideal_projection(psi, n2);
    double mean_n = 0.0;
    for (int n = 0; n < n_max; ++n) mean_n += n * std::norm(ideal(n));
    if (mean_n > 2.0 + 1e-6) continue;
    INFO("n2 = ", n2, " direct ", t.fidelity_direct[n2], " wigner ", t.fidelity_wigner[n2]);
    CHECK(std::abs(t.fidelity_direct[n2] - t.fidelity_wigner[n2]) < 2e-2);
  }
  CHECK(std::abs(total - 1.0) < 1e-9);
}

TEST_CASE("tomography of an impossible outcome is flagged") {
  Context ctx = ideal_context(device(12));
  auto t = conditional_wigner_tomography(0.0, ctx, 11, 2.0);
  CHECK(t.present[0]);
  for (int n2 = 1; n2 < 4; ++n2) {
    CHECK_FALSE(t.present[n2]);
    CHECK(std::isnan(t.fidelity_direct[n2]));
  }
}

TEST_CASE("sweep knobs") {
  CHECK(parse_knob("both_T1") == Knob::BothT1);
  CHECK(knob_name(parse_knob("epsilon_o")) == "epsilon_o");
  CHECK_THROWS_AS(parse_knob("T2"), ConfigError);

  lindblad::DeviceParams p;
  auto q = scale_params(p, Knob::BothT1, 2.0);
  CHECK(std::abs(q.T1_q - 2 * p.T1_q) < 1e-15);
  CHECK(std::abs(q.T1_m - 2 * p.T1_m) < 1e-15);
  // pure dephasing is held fixed: 1/T2 - 1/(2 T1) does not move
  CHECK(std::abs(q.gamma_phi() - p.gamma_phi()) < 1e-9 * p.gamma_phi());
  CHECK(scale_params(p, Knob::KerrE, 0.0).K_e == 0.0);
  CHECK_THROWS_AS(scale_params(p, Knob::BothT1, 0.0), DomainError);
}

TEST_CASE("longer lifetimes help, monotonically") {
  auto sweep = error_budget_sweep(Knob::BothT1, {0.5, 1.0, 2.0, 5.0}, device(16));
  REQUIRE(sweep.size() == 4);
  for (std::size_t i = 1; i < sweep.size(); ++i)
    for (int n = 0; n < 4; ++n) CHECK(sweep[i].success[n] >= sweep[i - 1].success[n] - 1e-9);
}

TEST_CASE("removing K_e improves |3>") {
  auto sweep = error_budget_sweep(Knob::KerrE, {0.0, 1.0}, device(16));
  CHECK(sweep[0].success[3] > sweep[1].success[3]);
}

TEST_CASE("calibration procedures follow their laws") {
  Context ctx = device(20);
  std::vector<double> delays;
  for (int i = 0; i <= 10; ++i) delays.push_back(0.6e-6 + i * 1.2e-6);
  auto vac = vacuum_detector(4.0, delays, ctx);
  CHECK(vac.rms < 1e-2);
  CHECK(std::abs(vac.fitted - 4.0) < 0.04);

  std::vector<double> waits;
  for (int i = 0; i <= 30; ++i) waits.push_back(i * 40e-9);
  auto ramsey = populated_ramsey(1.0, waits, ctx);
  CHECK(std::abs(ramsey.simulated[0] - 1.0) < 1e-9);
  CHECK(ramsey.rms < 1e-2);
  CHECK(std::abs(ramsey.fitted - 1.0) < 0.01);

  auto sel = selective_pi(1.0, ctx);
  CHECK(std::abs(sel.fitted - 1.0) < 0.03);
}

TEST_CASE("seeded sampling is reproducible") {
  std::vector<double> d = {0.5, 0.25, 0.25, 0.0};
  auto a = sample_counts(d, 10000, 7);
  auto b = sample_counts(d, 10000, 7);
  CHECK(a == b);
  CHECK(a[3] == 0);
  CHECK(a[0] + a[1] + a[2] == 10000);
  CHECK(std::abs(a[0] / 10000.0 - 0.5) < 0.03);
  CHECK(sample_counts(d, 10000, 8) != a);
}
