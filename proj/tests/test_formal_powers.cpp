#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tkernel/formal_powers.hpp"

using namespace tkernel;
using tktest::max_over;

TEST_CASE("unit particular solution gives monomials") {
  const auto p = tktest::pot("0");
  const auto f = build_particular_solution(p, cplx(0.0));
  const auto t = build_phi_psi(f, 9);
  const double h4 = std::pow(p.q.grid().step(), 4);
  for (int k = 0; k <= 9; ++k) {
    // Simpson is exact through cubics; beyond that the error scales with h^4 k!/(k-5)!
    double d5 = k >= 5 ? 1.0 : 0.0;
    for (int j = 0; j < 5 && k >= 5; ++j) d5 *= k - j;
    const double tol = 1e-12 + h4 * d5;
    CHECK(max_over(t.phi[k], [k](double x) { return std::pow(x, k); }) < tol);
    CHECK(max_over(t.psi[k], [k](double x) { return std::pow(x, k); }) < tol);
  }
}

TEST_CASE("psi_0 = 1/f and values at the origin") {
  const auto p = tktest::pot("cos(2*x) + x");
  const auto f = build_particular_solution(p);
  const auto t = build_phi_psi(f, 7);
  CHECK(max_abs_diff(t.phi[0], f.f) == 0.0);
  CHECK(max_abs_diff(t.psi[0], GridFunction::constant(f.f.grid(), 1.0) / f.f) < 1e-15);
  for (int k = 1; k <= 7; ++k) {
    CHECK(t.phi[k][0] == cplx(0.0));
    CHECK(t.psi[k][0] == cplx(0.0));
  }
}

TEST_CASE("phi_1 for q = 1 with f = e^x") {
  const auto p = tktest::pot("1");
  const auto f = build_particular_solution(p, cplx(1.0));
  CHECK(max_over(f.f, [](double x) { return std::exp(x); }) < 1e-10);
  const auto t = build_phi_psi(f, 1);
  CHECK(max_over(t.phi[1], [](double x) { return std::sinh(x); }) <= 1e-9);
}

TEST_CASE("derivative coupling f^2 (phi_k/f)' = k f psi_{k-1}") {
  const auto p = tktest::pot("exp(x)");
  const auto f = build_particular_solution(p, cplx(0.25));
  const auto t = build_phi_psi(f, 8);
  for (int k = 1; k <= 8; ++k) {
    const auto lhs = f.f * differentiate(t.phi[k]) - f.f_prime * t.phi[k];
    const auto rhs = double(k) * f.f * t.psi[k - 1];
    double m = 0.0;
    for (int i = 2; i < lhs.size() - 2; ++i) m = std::max(m, std::abs(lhs[i] - rhs[i]));
    CHECK(m <= 1e-7);
  }
}

TEST_CASE("Y powers: definitions") {
  const auto p = tktest::pot("sin(x) + 2");
  const auto f = build_particular_solution(p);
  const auto Y = build_Y_powers(f, 4);
  REQUIRE(Y.Y.size() == 10);
  REQUIRE(Y.Ytilde.size() == 9);
  CHECK(Y.Y[0].max_norm() == 1.0);
  CHECK(Y.Ytilde[0].max_norm() == 1.0);
  for (std::size_t n = 1; n < Y.Y.size(); ++n) CHECK(Y.Y[n][0] == cplx(0.0));
  for (std::size_t n = 1; n < Y.Ytilde.size(); ++n) CHECK(Y.Ytilde[n][0] == cplx(0.0));
  CHECK(max_abs_diff(Y.Ytilde[1], f.f * f.f - cplx(1.0)) < 1e-9);
}

TEST_CASE("Y powers for f = 1") {
  const auto p = tktest::pot("0");
  const auto f = build_particular_solution(p, cplx(0.0));
  const auto Y = build_Y_powers(f, 3);
  CHECK(max_over(Y.Y[1], [](double x) { return x; }) < 1e-15);
  CHECK(Y.Ytilde[1].max_norm() == 0.0);
}
