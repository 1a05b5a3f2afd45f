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

#include "doctest.h"
#include "photocount/fock.hpp"
#include "photocount/ode.hpp"

using namespace photocount;

TEST_CASE("dopri5 reproduces exponential decay") {
  Eigen::VectorXd y(1);
  y << 1.0;
  auto f = [](double, const Eigen::VectorXd& v) -> Eigen::VectorXd { return -2.0 * v; };
  ode::Options opt;
  opt.rtol = 1e-11;
  opt.atol = 1e-14;
  ode::Stats st;
  auto out = ode::dopri5(f, 0.0, 3.0, y, opt, nullptr, &st);
  CHECK(std::abs(out(0) - std::exp(-6.0)) < 1e-11);
  CHECK(st.accepted > 0);
}

TEST_CASE("dopri5 harmonic oscillator keeps phase and amplitude") {
  CVector y(1);
  y << cplx(1.0, 0.0);
  const double w = 50.0;
  auto f = [w](double, const CVector& v) -> CVector { return cplx(0, -w) * v; };
  ode::Options opt;
  opt.rtol = 1e-10;
  opt.atol = 1e-12;
  auto out = ode::dopri5(f, 0.0, 2.0, y, opt);
  CHECK(std::abs(out(0) - std::polar(1.0, -w * 2.0)) < 1e-8);
}

TEST_CASE("dopri5 lands exactly on t1 across adjacent calls with a step hint") {
  Eigen::VectorXd y(2);
  y << 1.0, 0.0;
  auto f = [](double, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    Eigen::VectorXd d(2);
    d << v(1), -v(0);
    return d;
  };
  double h = 0.0;
  ode::Options opt;
  opt.rtol = 1e-10;
  opt.atol = 1e-12;
  Eigen::VectorXd v = y;
  for (int i = 0; i < 10; ++i) v = ode::dopri5(f, 0.1 * i, 0.1 * (i + 1), v, opt, &h);
  CHECK(h > 0.0);
  CHECK(std::abs(v(0) - std::cos(1.0)) < 1e-9);
  CHECK(std::abs(v(1) + std::sin(1.0)) < 1e-9);
}

TEST_CASE("rk4 converges at fourth order") {
  Eigen::VectorXd y(1);
  y << 1.0;
  auto f = [](double t, const Eigen::VectorXd& v) -> Eigen::VectorXd { return std::cos(t) * v; };
  const double exact = std::exp(std::sin(2.0));
  double e1 = std::abs(ode::rk4(f, 0.0, 2.0, y, 20)(0) - exact);
  double e2 = std::abs(ode::rk4(f, 0.0, 2.0, y, 40)(0) - exact);
  CHECK(e1 / e2 > 14.0);
  CHECK(e1 / e2 < 18.0);
}

TEST_CASE("integrator errors") {
  Eigen::VectorXd y(1);
  y << 1.0;
  auto f = [](double, const Eigen::VectorXd& v) -> Eigen::VectorXd { return v; };
  CHECK_THROWS_AS(ode::dopri5(f, 1.0, 0.0, y), IntegratorError);
  CHECK_THROWS_AS(ode::rk4(f, 0.0, 1.0, y, 0), IntegratorError);
  ode::Options tight;
  tight.max_steps = 3;
  tight.rtol = 1e-12;
  tight.atol = 1e-14;
  CHECK_THROWS_AS(ode::dopri5(f, 0.0, 10.0, y, tight), IntegratorError);
  auto blowup = [](double, const Eigen::VectorXd& v) -> Eigen::VectorXd { return v.array().square() * 1e3; };
  CHECK_THROWS_AS(ode::dopri5(blowup, 0.0, 10.0, y), IntegratorError);
}
