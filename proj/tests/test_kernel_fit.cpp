#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tkernel/errors.hpp"
#include "tkernel/oracles.hpp"
#include "tkernel/pipeline.hpp"

using namespace tkernel;
using tktest::max_over;

TEST_CASE("zero potential gives a constant kernel") {
  const double h = 0.7;
  for (int N : {1, 4, 8}) {
    const auto fx = tktest::fit(tktest::pot("0"), cplx(h), N);
    const auto& k = fx.k;
    CHECK(k.N == N);
    CHECK(std::abs(k.a[0] - h / 2) < 1e-10);
    CHECK(std::abs(k.a[1] + h * h / 2) < 1e-10);
    for (int n = 2; n <= N; ++n) CHECK(std::abs(k.a[n]) < 1e-8);
    for (int n = 1; n <= N; ++n) CHECK(std::abs(k.b[n]) < 1e-8);
    CHECK(k.eps1 <= 1e-10);
    CHECK(k.eps2 <= 1e-10);
    for (double x : {0.1, 0.5, 1.0}) {
      for (double t : {-x, -0.3 * x, 0.0, 0.8 * x, x}) CHECK(std::abs(k.eval(x, t) - h / 2) < 1e-9);
    }
  }
}

TEST_CASE("zero potential with h = 0 gives the zero kernel") {
  const auto fx = tktest::fit(tktest::pot("0"), cplx(0.0), 5);
  for (const auto& a : fx.k.a) CHECK(std::abs(a) == 0.0);
  for (const auto& b : fx.k.b) CHECK(std::abs(b) == 0.0);
  CHECK(fx.k.eps1 == 0.0);
  CHECK(fx.k.eps2 == 0.0);
}

TEST_CASE("fit residuals decrease with N for q = 1") {
  const auto p = tktest::pot("1");
  double e1 = INFINITY;
  double e2 = INFINITY;
  for (int N = 1; N <= 8; ++N) {
    const auto fx = tktest::fit(p, cplx(0.0), N);
    CHECK(fx.k.N == N);
    CHECK(fx.k.eps1 < e1);
    CHECK(fx.k.eps2 < e2);
    e1 = fx.k.eps1;
    e2 = fx.k.eps2;
  }
  CHECK(e1 < 1e-8);
  CHECK(e2 < 1e-8);
}

TEST_CASE("Goursat data on the characteristic lines") {
  const auto fx = tktest::fit(tktest::pot("sin(x)"), cplx(0.4), 8);
  const auto& k = fx.k;
  const double tol = k.eps1 + k.eps2 + 1e-12;
  const auto& g = k.grid();
  for (int i = 0; i < g.size(); i += 50) {
    const double x = g.x(i);
    CHECK(std::abs(k.eval_node(i, x) - 0.2 - 0.5 * fx.Q[i]) <= tol);
    CHECK(std::abs(k.eval_node(i, -x) - 0.2) <= tol);
  }
  CHECK(std::abs(k.eval(0.0, 0.0) - 0.2) <= tol);
}

TEST_CASE("transmutation maps powers into formal powers") {
  const auto fx = tktest::fit(tktest::pot("exp(x)"), cplx(0.3), 10);
  const auto& k = fx.k;
  const double tol = k.error_bound() * 2.0 + 1e-9;
  const auto& g = k.grid();
  CHECK(max_abs_diff(transmute(k, GridFunction::constant(g, 1.0)), fx.f.f) <= tol);
  for (int n = 0; n <= 5; ++n) {
    const auto xn = GridFunction::sample(g, [n](double x) { return std::pow(x, n); });
    const auto ext = n % 2 == 0 ? Extension::even : Extension::odd;
    CHECK(max_abs_diff(transmute(k, xn, ext), fx.table->phi[n]) <= tol);
    CHECK(max_abs_diff(transmute(k, [n](double x) { return cplx(std::pow(x, n)); }), fx.table->phi[n]) <= tol);
  }
}

TEST_CASE("transmutation property for powers") {
  const auto fx = tktest::fit(tktest::pot("1"), cplx(0.0), 8);
  const auto& k = fx.k;
  const auto& g = k.grid();
  for (int n = 0; n <= 4; ++n) {
    const auto Tu = transmute(k, [n](double x) { return cplx(std::pow(x, n)); });
    const auto Tddu = transmute(k, [n](double x) { return n < 2 ? cplx(0.0) : cplx(-n * (n - 1) * std::pow(x, n - 2)); });
    const auto lhs = -differentiate(differentiate(Tu)) + fx.p.q * Tu;
    double norm = 0.0;
    for (int j = 0; j <= 2 && j <= n; ++j) {
      double c = 1.0;
      for (int m = 0; m < j; ++m) c *= n - m;
      norm = std::max(norm, c);
    }
    double worst = 0.0;
    for (int i = 4; i < g.size() - 4; ++i) worst = std::max(worst, std::abs(lhs[i] - Tddu[i]));
    CHECK(worst <= k.error_bound() * (1.0 + norm) + 1e-8);
  }
}

TEST_CASE("transmutation defect is carried by the Goursat residuals") {
  // (-d2 + q) T u - T[-u''] = -2 u(x) e1'(x) - 2 u(-x) e2'(x),
  // e1 = K_N(x,x) - h/2 - Q/2, e2 = K_N(x,-x) - h/2
  const cplx h(0.0);
  const auto fx = tktest::fit(tktest::pot("1"), h, 8);
  const auto& k = fx.k;
  const auto& g = k.grid();
  std::vector<cplx> e1(static_cast<std::size_t>(g.size())), e2(e1.size());
  for (int i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    e1[static_cast<std::size_t>(i)] = k.eval(x, x) - 0.5 * h - 0.5 * fx.Q[i];
    e2[static_cast<std::size_t>(i)] = k.eval(x, -x) - 0.5 * h;
  }
  const auto de1 = differentiate(GridFunction(g, std::move(e1)));
  const auto de2 = differentiate(GridFunction(g, std::move(e2)));
  for (int n = 0; n <= 4; ++n) {
    const auto Tu = transmute(k, [n](double x) { return cplx(std::pow(x, n)); });
    const auto Tddu = transmute(k, [n](double x) { return n < 2 ? cplx(0.0) : cplx(-n * (n - 1) * std::pow(x, n - 2)); });
    const auto lhs = -differentiate(differentiate(Tu)) + fx.p.q * Tu;
    double worst = 0.0;
    for (int i = 4; i < g.size() - 4; ++i) {
      const double x = g.x(i);
      const cplx predicted = -2.0 * std::pow(x, n) * de1[i] - 2.0 * std::pow(-x, n) * de2[i];
      worst = std::max(worst, std::abs(lhs[i] - Tddu[i] - predicted));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("kernel solves the wave equation") {
  const auto fx = tktest::fit(tktest::pot("exp(x)"), cplx(0.5), 8);
  const auto& k = fx.k;
  const auto& g = k.grid();
  const double dx = g.step();
  const double dt = 1e-3;
  double worst = 0.0;
  for (int i = 200; i < g.size() - 1; i += 200) {
    const double x = g.x(i);
    for (double r : {-0.7, -0.2, 0.0, 0.4, 0.8}) {
      const double t = r * x;
      const cplx kxx = (k.eval_node(i + 1, t) - 2.0 * k.eval_node(i, t) + k.eval_node(i - 1, t)) / (dx * dx);
      const cplx ktt = (k.eval_node(i, t + dt) - 2.0 * k.eval_node(i, t) + k.eval_node(i, t - dt)) / (dt * dt);
      worst = std::max(worst, std::abs(kxx - fx.p.q[i] * k.eval_node(i, t) - ktt));
    }
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("full-segment fit and inverse transmutation") {
  const auto p = tktest::pot("sin(x)", 1.0, 801, Mode::full);
  const auto fx = tktest::fit(p, cplx(0.2), 8);
  const auto& k = fx.k;
  CHECK(k.mode == Mode::full);
  const double bound = k.error_bound();
  const auto& g = k.grid();
  for (int n = 0; n <= 4; ++n) {
    const auto xn = GridFunction::sample(g, [n](double x) { return std::pow(x, n); });
    CHECK(max_abs_diff(inverse_transmute(k, fx.table->phi[n]), xn) <= 2.0 * bound + 1e-8);
  }
  const auto v = GridFunction::sample(g, [](double x) { return 1.0 + x - 2.0 * x * x * x; });
  CHECK(max_abs_diff(inverse_transmute(k, transmute(k, v)), v) <= 2.0 * k.bound_constant * (k.eps1 + k.eps2) * v.max_norm() + 1e-8);
  CHECK_THROWS_AS(inverse_transmute(tktest::fit(tktest::pot("1"), cplx(0.0), 2).k, GridFunction::constant(working_grid(1.0, 2001, Mode::half), 1.0)),
                  DomainError);
}

TEST_CASE("inverse transmutation is the identity for q = 0, h = 0") {
  const auto p = tktest::pot("0", 1.0, 401, Mode::full);
  const auto fx = tktest::fit(p, cplx(0.0), 3);
  const auto v = GridFunction::sample(p.grid(), [](double x) { return std::cos(3 * x); });
  CHECK(max_abs_diff(inverse_transmute(fx.k, v), v) == 0.0);
}

TEST_CASE("Darboux kernel") {
  SUBCASE("zero potential, h = 0") {
    const auto fx = tktest::fit(tktest::pot("0"), cplx(0.0), 4);
    const auto kd = build_darboux_kernel(fx.k, fx.f, fx.p.q);
    for (double x : {0.3, 1.0}) CHECK(std::abs(kd.eval(x, 0.5 * x)) == 0.0);
  }
  SUBCASE("zero potential, h != 0") {
    const double h = 0.5;
    const auto fx = tktest::fit(tktest::pot("0"), cplx(h), 6);
    const auto kd = build_darboux_kernel(fx.k, fx.f, fx.p.q);
    CHECK(max_over(kd.q_D, [h](double x) { return 2 * h * h / ((1 + h * x) * (1 + h * x)); }) < 1e-10);
    const auto& g = kd.q_D.grid();
    double worst = 0.0;
    for (int i = 0; i < g.size(); i += 20) {
      const double x = g.x(i);
      worst = std::max(worst, std::abs(kd.eval_node(i, x) - (-h / 2 + h * h * x / (1 + h * x))));
    }
    CHECK(worst <= kd.bound + 1e-9);
  }
  SUBCASE("smooth potential") {
    const auto fx = tktest::fit(tktest::pot("exp(x)"), cplx(0.3), 10);
    const auto kd = build_darboux_kernel(fx.k, fx.f, fx.p.q);
    const auto QD = cumulative_integral(kd.q_D, 0.0);
    const auto& g = kd.q_D.grid();
    double worst = 0.0;
    for (int i = 0; i < g.size(); i += 20) {
      worst = std::max(worst, std::abs(kd.eval_node(i, g.x(i)) - (-0.15 + 0.5 * QD[i])));
    }
    CHECK(worst <= kd.bound);
    CHECK(kd.bound > 0.0);
  }
}

TEST_CASE("diagonal diagnostics") {
  SUBCASE("zero potential") {
    const auto fx = tktest::fit(tktest::pot("0"), cplx(0.6), 4);
    const auto r = diagonal_diagnostics(fx.k, fx.p.q, fx.Q, fx.f.h);
    CHECK(r.k1_diag < 1e-8);
    CHECK(r.k2_diag < 1e-8);
    CHECK(r.k1_anti < 1e-8);
    CHECK(r.k1_k2_anti < 1e-8);
    CHECK(r.goursat_diag < 1e-10);
    CHECK(r.goursat_anti < 1e-10);
  }
  SUBCASE("constant potential") {
    const auto fx = tktest::fit(tktest::pot("2"), cplx(0.0), 8);
    const auto r = diagonal_diagnostics(fx.k, fx.p.q, fx.Q, fx.f.h);
    CHECK(r.k1_diag < 1e-5);
    CHECK(r.k2_diag < 1e-5);
    CHECK(r.k1_anti < 1e-5);
    CHECK(r.k1_k2_anti < 1e-5);
    CHECK(r.goursat_diag <= fx.k.eps1 + fx.k.eps2 + 1e-12);
  }
}

TEST_CASE("preimage diagnostics") {
  const double h = 0.8;
  KernelFn Kc = [h](double, double) { return cplx(h / 2); };
  const auto v0 = preimage_diagnostics(Kc, h, 0.0, 0.0);
  CHECK(std::abs(v0.diag - h / 2) < 1e-15);
  CHECK(std::abs(v0.anti - h / 2) < 1e-15);
  for (double x : {0.25, 0.5, 1.0}) {
    const auto v = preimage_diagnostics(Kc, h, 0.0, x);
    CHECK(std::abs(v.diag - (h / 2 - h * h * x / 2)) < 1e-13);
  }
  const auto p = tktest::pot("cos(x)", 1.0, 801, Mode::full);
  const auto fx = tktest::fit(p, cplx(h), 8);
  KernelFn K = [&](double x, double t) { return fx.k.eval(x, t); };
  for (double x : {0.3, 0.6}) {
    const auto plus = preimage_diagnostics(K, h, eval_at(fx.Q, x), x);
    const auto minus = preimage_diagnostics(K, h, eval_at(fx.Q, -x), -x);
    CHECK(std::abs(plus.anti + minus.anti - h) < 1e-10);
  }
}

TEST_CASE("error bound against the successive-approximation kernel") {
  for (const char* q : {"1", "sin(x)", "0.5*exp(-x)"}) {
    const auto kb = build_kernel(tktest::pot(q), cplx(0.25), 6);
    const auto cmp = compare_with_oracle(kb, 500);
    CHECK(cmp.lattice == 500);
    CHECK(cmp.max_error <= kb.kernel.error_bound());
  }
}

TEST_CASE("kernel values converge as N grows") {
  const auto p = tktest::pot("cos(3*x)");
  const auto ref = tktest::fit(p, cplx(0.1), 14).k;
  double prev = INFINITY;
  for (int N : {2, 4, 6, 8, 10}) {
    const auto k = tktest::fit(p, cplx(0.1), N).k;
    double worst = 0.0;
    for (double x : {0.25, 0.5, 0.75, 1.0}) {
      for (double r : {-0.9, -0.4, 0.1, 0.6}) worst = std::max(worst, std::abs(k.eval(x, r * x) - ref.eval(x, r * x)));
    }
    CHECK(worst < prev);
    prev = worst;
  }
}

TEST_CASE("kernel JSON") {
  const auto fx = tktest::fit(tktest::pot("1"), cplx(0.5), 3);
  const auto j = to_json(fx.k);
  CHECK(j.at("N") == 3);
  CHECK(j.at("mode") == "half");
  CHECK(j.at("a").size() == 4);
  CHECK(j.at("b").size() == 3);
  CHECK(j.contains("h"));
  CHECK(j.at("eps1").get<double>() == doctest::Approx(fx.k.eps1));
  CHECK(j.at("eps2").get<double>() == doctest::Approx(fx.k.eps2));
}

TEST_CASE("fit argument checks") {
  const auto fx = tktest::fit(tktest::pot("1"), cplx(0.0), 3);
  CHECK_THROWS_AS(fit_goursat_data(fx.basis, fx.p.q, fx.Q, fx.f.h, 4), DomainError);
  CHECK_THROWS_AS(fit_goursat_data(fx.basis, fx.p.q, fx.Q, fx.f.h, -1), DomainError);
  CHECK(bessel_i0(0.0) == 1.0);
  CHECK(bessel_i0(1.0) == doctest::Approx(1.2660658777520082).epsilon(1e-14));
}
