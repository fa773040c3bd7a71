#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tkernel/errors.hpp"
#include "tkernel/grid.hpp"

using namespace tkernel;
using tktest::max_over;

TEST_CASE("grid construction") {
  const Grid g(0.0, 1.0, 101);
  CHECK(g.x(0) == 0.0);
  CHECK(g.x(100) == 1.0);
  CHECK(g.step() == doctest::Approx(0.01));
  CHECK(g.node_of(0.37).value() == 37);
  CHECK_FALSE(g.node_of(0.375).has_value());
  CHECK_THROWS_AS(Grid(1.0, 0.0, 11), DomainError);
  CHECK_THROWS_AS(Grid(0.0, 1.0, 10), DomainError);
  CHECK_THROWS_AS(Grid(0.0, 1.0, 1), DomainError);
}

TEST_CASE("grid functions reject non-finite values and mismatched sizes") {
  const Grid g(0.0, 1.0, 5);
  CHECK_THROWS_AS(GridFunction(g, std::vector<cplx>(4)), DomainError);
  CHECK_THROWS_AS(GridFunction(g, {0.0, 1.0, NAN, 0.0, 0.0}), NumericalError);
  const auto a = GridFunction::constant(g, 1.0);
  const auto b = GridFunction::constant(Grid(0.0, 2.0, 5), 1.0);
  CHECK_THROWS_AS(a + b, DomainError);
}

TEST_CASE("cumulative integral: polynomial exactness") {
  const Grid g(0.0, 1.0, 101);
  const auto one = GridFunction::constant(g, 1.0);
  CHECK(max_over(cumulative_integral(one, 0.0), [](double x) { return x; }) < 1e-15);
  const auto sq = GridFunction::sample(g, [](double x) { return x * x; });
  CHECK(max_over(cumulative_integral(sq, 0.0), [](double x) { return x * x * x / 3; }) <= 1e-14);
}

TEST_CASE("cumulative integral: exponential") {
  const Grid g(0.0, 1.0, 1001);
  const auto e = GridFunction::sample(g, [](double x) { return std::exp(x); });
  const auto F = cumulative_integral(e, 0.0);
  CHECK(F[0] == cplx(0.0));
  CHECK(max_over(F, [](double x) { return std::exp(x) - 1.0; }) <= 1e-10);
}

TEST_CASE("cumulative integral from an interior origin") {
  const Grid g(-1.0, 1.0, 201);
  const auto c = GridFunction::sample(g, [](double x) { return std::cos(x); });
  const auto F = cumulative_integral(c, 0.0);
  CHECK(F[100] == cplx(0.0));
  CHECK(max_over(F, [](double x) { return std::sin(x); }) < 1e-9);
  CHECK_THROWS_AS(cumulative_integral(c, 0.005), DomainError);
}

TEST_CASE("cumulative integral is linear") {
  const Grid g(0.0, 2.0, 301);
  const auto f = GridFunction::sample(g, [](double x) { return std::sin(5 * x); });
  const auto h = GridFunction::sample(g, [](double x) { return cplx(x, x * x); });
  const cplx a(0.3, -1.2), b(2.5, 0.0);
  const auto lhs = cumulative_integral(a * f + b * h, 0.0);
  const auto rhs = a * cumulative_integral(f, 0.0) + b * cumulative_integral(h, 0.0);
  CHECK(max_abs_diff(lhs, rhs) < 1e-14);
}

TEST_CASE("differentiate") {
  const Grid g(0.0, 1.0, 101);
  const auto p = GridFunction::sample(g, [](double x) { return std::pow(x, 4); });
  CHECK(max_over(differentiate(p), [](double x) { return 4 * x * x * x; }) <= 1e-10);
  const auto c = GridFunction::constant(g, cplx(3.0, -1.0));
  CHECK(differentiate(c).max_norm() == 0.0);
  const Grid g2(0.0, M_PI, 1001);
  const auto s = GridFunction::sample(g2, [](double x) { return std::sin(x); });
  CHECK(max_over(differentiate(s), [](double x) { return std::cos(x); }) <= 1e-10);
  CHECK_THROWS_AS(differentiate(GridFunction::constant(Grid(0.0, 1.0, 3), 1.0)), DomainError);
}

TEST_CASE("differentiate undoes cumulative integration") {
  const Grid g(0.0, 1.0, 1001);
  const auto f = GridFunction::sample(g, [](double x) { return std::exp(-x) * std::cos(4 * x); });
  CHECK(max_abs_diff(differentiate(cumulative_integral(f, 0.0)), f) < 1e-7);
}

TEST_CASE("eval_at") {
  const Grid g(0.0, 1.0, 1001);
  const auto e = GridFunction::sample(g, [](double x) { return std::exp(x); });
  for (int i : {0, 1, 500, 999, 1000}) CHECK(eval_at(e, g.x(i)) == e[i]);
  CHECK(std::abs(eval_at(e, 1.0 / 3.0) - std::exp(1.0 / 3.0)) <= 1e-10);
  const Grid g2(0.0, 1.0, 11);
  const auto cube = GridFunction::sample(g2, [](double x) { return x * x * x; });
  for (double x : {0.05, 0.45, 0.95}) CHECK(std::abs(eval_at(cube, x) - x * x * x) <= 1e-14);
  CHECK_THROWS_AS(eval_at(e, 1.5), DomainError);
}

TEST_CASE("Simpson weights and Gauss-Legendre") {
  for (int m = 1; m <= 7; ++m) {
    const auto w = quad::definite_weights(m);
    double s = 0.0;
    for (double v : w) s += v;
    CHECK(s == doctest::Approx(m).epsilon(1e-14));
  }
  const auto v = quad::gauss_legendre([](double t) { return std::cos(t); }, 0.0, 10.0, 3);
  CHECK(std::abs(v - std::sin(10.0)) < 1e-13);
}
