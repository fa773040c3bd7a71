#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tkernel/tkernel.h"

namespace {

tk_problem* problem(const char* expr, double b = 1.0, int nodes = 2001) {
  tk_problem* p = nullptr;
  REQUIRE(tk_problem_from_expression(expr, b, nodes, TK_MODE_HALF, &p) == TK_OK);
  REQUIRE(p != nullptr);
  return p;
}

double cabs(tk_complex z) { return std::hypot(z.re, z.im); }

}  // namespace

TEST_CASE("version and problem handles") {
  CHECK(std::string(tk_version()) == "1.0.0");
  tk_problem* p = problem("exp(x)", 2.0, 401);
  double b = 0.0;
  int nodes = 0;
  tk_mode mode = TK_MODE_FULL;
  double m = 0.0;
  CHECK(tk_problem_info(p, &b, &nodes, &mode, &m) == TK_OK);
  CHECK(b == 2.0);
  CHECK(nodes == 401);
  CHECK(mode == TK_MODE_HALF);
  CHECK(m == doctest::Approx(std::exp(2.0)));
  tk_problem_free(p);
  tk_problem_free(nullptr);
}

TEST_CASE("problem construction errors") {
  tk_problem* p = nullptr;
  CHECK(tk_problem_from_expression("exp(", 1.0, 101, TK_MODE_HALF, &p) == TK_ERR_PARSE);
  CHECK(p == nullptr);
  CHECK(std::string(tk_last_error()).size() > 0);
  CHECK(tk_problem_from_expression("x", -1.0, 101, TK_MODE_HALF, &p) == TK_ERR_DOMAIN);
  CHECK(tk_problem_from_expression("x", 1.0, 100, TK_MODE_HALF, &p) == TK_ERR_DOMAIN);
  CHECK(tk_problem_from_expression(nullptr, 1.0, 101, TK_MODE_HALF, &p) == TK_ERR_ARGUMENT);
  CHECK(tk_problem_from_expression("x", 1.0, 101, TK_MODE_HALF, nullptr) == TK_ERR_ARGUMENT);
  CHECK(tk_problem_from_csv("/nonexistent/q.csv", 1.0, 101, TK_MODE_HALF, &p) == TK_ERR_IO);
}

TEST_CASE("problem from CSV") {
  const std::string path = "capi_potential.csv";
  {
    std::ofstream out(path);
    out << "x,q\n";
    for (int i = 0; i <= 200; ++i) {
      const double x = i / 200.0;
      out << x << "," << std::cos(x) << "\n";
    }
  }
  tk_problem* p = nullptr;
  REQUIRE(tk_problem_from_csv(path.c_str(), 1.0, 401, TK_MODE_HALF, &p) == TK_OK);
  double m = 0.0;
  CHECK(tk_problem_info(p, nullptr, nullptr, nullptr, &m) == TK_OK);
  CHECK(m == doctest::Approx(1.0));
  tk_problem_free(p);
  std::remove(path.c_str());
}

TEST_CASE("kernel fit, coefficients and evaluation") {
  tk_problem* p = problem("0");
  tk_kernel* k = nullptr;
  REQUIRE(tk_kernel_fit(p, 1, {1.0, 0.0}, 4, 0, &k) == TK_OK);
  tk_kernel_info info{};
  REQUIRE(tk_kernel_get_info(k, &info) == TK_OK);
  CHECK(info.N == 4);
  CHECK(info.requested_N == 4);
  CHECK(info.h.re == 1.0);
  CHECK(info.eps1 < 1e-10);
  CHECK(info.fallback_f == 0);

  std::vector<tk_complex> a(5), bb(5);
  CHECK(tk_kernel_coefficients(k, a.data(), bb.data(), 5) == TK_OK);
  CHECK(std::abs(a[0].re - 0.5) < 1e-10);
  CHECK(std::abs(a[1].re + 0.5) < 1e-10);
  CHECK(bb[0].re == 0.0);
  CHECK(tk_kernel_coefficients(k, a.data(), bb.data(), 4) == TK_ERR_BUFFER);

  tk_complex v{};
  CHECK(tk_kernel_eval(k, 0.6, -0.2, &v) == TK_OK);
  CHECK(std::abs(v.re - 0.5) < 1e-10);
  CHECK(tk_kernel_eval(k, 0.5, 0.9, &v) == TK_ERR_DOMAIN);
  CHECK(tk_kernel_eval(k, 2.0, 0.0, &v) == TK_ERR_DOMAIN);

  tk_complex c{}, s{}, dc{}, ds{};
  CHECK(tk_solve(k, {3.0, 0.0}, 0.5, &c, &s) == TK_OK);
  CHECK(tk_solve_derivatives(k, {3.0, 0.0}, 0.5, &dc, &ds) == TK_OK);
  // f = 1 + x: c(0) = 1, c'(0) = h = 1
  const double w = 3.0, x = 0.5;
  CHECK(std::abs(c.re - (std::cos(w * x) + std::sin(w * x) / w)) < 1e-10);
  CHECK(std::abs(s.re - std::sin(w * x) / w) < 1e-10);
  CHECK(std::abs(c.re * ds.re - dc.re * s.re - 1.0) < 1e-8);

  tk_kernel_free(k);
  tk_kernel_free(nullptr);
  tk_problem_free(p);
}

TEST_CASE("fit errors") {
  tk_problem* p = problem("1");
  tk_kernel* k = nullptr;
  CHECK(tk_kernel_fit(p, 0, {0.0, 0.0}, -1, 0, &k) == TK_ERR_DOMAIN);
  CHECK(k == nullptr);
  CHECK(tk_kernel_fit(nullptr, 0, {0.0, 0.0}, 2, 0, &k) == TK_ERR_ARGUMENT);
  CHECK(tk_kernel_fit(p, 0, {0.0, 0.0}, 2, 0, nullptr) == TK_ERR_ARGUMENT);
  tk_problem_free(p);
}

TEST_CASE("automatic order selection") {
  tk_problem* p = problem("sin(x)");
  tk_kernel* k = nullptr;
  REQUIRE(tk_kernel_fit_auto(p, 1, {0.0, 0.0}, 1e-8, 24, &k) == TK_OK);
  tk_kernel_info info{};
  REQUIRE(tk_kernel_get_info(k, &info) == TK_OK);
  CHECK(std::max(info.eps1, info.eps2) < 1e-8);
  CHECK(info.N >= 1);
  CHECK(info.N <= 24);
  CHECK(info.darboux_bound > 0.0);
  double err = 0.0;
  int iters = 0;
  CHECK(tk_oracle_compare(k, 200, &err, &iters) == TK_OK);
  CHECK(err <= info.error_bound);
  CHECK(iters > 0);
  CHECK(tk_oracle_compare(k, 7, &err, &iters) == TK_ERR_DOMAIN);
  tk_kernel_free(k);
  tk_problem_free(p);
}

TEST_CASE("JSON documents and buffer sizing") {
  tk_problem* p = problem("1");
  tk_kernel* k = nullptr;
  REQUIRE(tk_kernel_fit(p, 1, {0.0, 0.0}, 3, 0, &k) == TK_OK);
  size_t needed = 0;
  char tiny[4];
  CHECK(tk_kernel_json(k, tiny, sizeof tiny, &needed) == TK_ERR_BUFFER);
  REQUIRE(needed > sizeof tiny);
  std::string buf(needed, '\0');
  CHECK(tk_kernel_json(k, buf.data(), buf.size(), &needed) == TK_OK);
  const auto j = nlohmann::json::parse(buf.c_str());
  CHECK(j.at("N") == 3);
  CHECK(tk_kernel_json(k, nullptr, 0, &needed) == TK_ERR_BUFFER);

  CHECK(tk_diagnostics_json(k, nullptr, 0, &needed) == TK_ERR_BUFFER);
  std::string diag(needed, '\0');
  CHECK(tk_diagnostics_json(k, diag.data(), diag.size(), &needed) == TK_OK);
  CHECK(nlohmann::json::parse(diag.c_str()).contains("particular_solution"));

  CHECK(tk_verify_json(p, {0.0, 0.0}, 6, nullptr, 0, &needed) == TK_ERR_BUFFER);
  std::string ver(needed, '\0');
  CHECK(tk_verify_json(p, {0.0, 0.0}, 6, ver.data(), ver.size(), &needed) == TK_OK);
  const auto v = nlohmann::json::parse(ver.c_str());
  REQUIRE(v.contains("checks"));
  for (const auto& c : v.at("checks")) CHECK_MESSAGE(c.at("pass").get<bool>(), c.dump());
  tk_kernel_free(k);
  tk_problem_free(p);
}

TEST_CASE("eigenvalues through the C interface") {
  tk_problem* p = problem("0", 3.141592653589793);
  const tk_spectral_problem sp{1.0, 0.0, 1.0, 0.0, 0.5, 5.5, 0, 0.0};
  double omega[8];
  double res[8];
  size_t found = 0;
  REQUIRE(tk_eigenvalues(p, &sp, 2, omega, nullptr, res, 8, &found) == TK_OK);
  REQUIRE(found == 5);
  for (int n = 1; n <= 5; ++n) {
    CHECK(std::abs(omega[n - 1] - n) < 1e-9);
    CHECK(res[n - 1] < 1e-10);
  }
  CHECK(tk_eigenvalues(p, &sp, 2, omega, nullptr, res, 3, &found) == TK_ERR_BUFFER);
  CHECK(found == 5);
  const tk_spectral_problem none{1.0, 0.0, 1.0, 0.0, 1.2, 1.8, 0, 0.0};
  CHECK(tk_eigenvalues(p, &none, 2, omega, nullptr, res, 8, &found) == TK_ERR_NUMERICAL);
  tk_problem_free(p);
}

TEST_CASE("shifted eigenvalues through the C interface") {
  tk_problem* p = problem("1 + x", 3.141592653589793);
  double c = 0.0;
  REQUIRE(tk_problem_midrange(p, &c) == TK_OK);
  CHECK(std::abs(c - (1.0 + 0.5 * 3.141592653589793)) < 1e-12);
  tk_spectral_problem sp{1.0, 0.0, 1.0, 0.0, 0.5, 5.5, 4, 0.0};
  double w0[4], l0[4], w1[4], l1[4];
  size_t found = 0;
  REQUIRE(tk_eigenvalues(p, &sp, 20, w0, l0, nullptr, 4, &found) == TK_OK);
  REQUIRE(found == 4);
  sp.shift = c;
  REQUIRE(tk_eigenvalues(p, &sp, 20, w1, l1, nullptr, 4, &found) == TK_OK);
  REQUIRE(found == 4);
  for (int n = 0; n < 4; ++n) {
    CHECK(std::abs(l1[n] - l0[n]) < 1e-8 * l0[n]);
    CHECK(std::abs(w1[n] * w1[n] - l1[n]) < 1e-9 * l1[n]);
  }
  sp.shift = std::nan("");
  CHECK(tk_eigenvalues(p, &sp, 20, w1, l1, nullptr, 4, &found) == TK_ERR_ARGUMENT);
  tk_problem_free(p);
}

TEST_CASE("Taylor coefficients through the C interface") {
  tk_problem* p = problem("exp(x)");
  const double h = 1.0 / 3.0;
  tk_complex a[5], b[5];
  REQUIRE(tk_taylor(p, {h, 0.0}, 4, a, b, 5) == TK_OK);
  CHECK(std::abs(a[0].re - h / 2) < 1e-10);
  CHECK(std::abs(a[1].re - (0.25 - h * h / 2)) < 1e-8);
  CHECK(std::abs(b[1].re - 0.25) < 1e-8);
  CHECK(cabs(b[0]) == 0.0);
  CHECK(tk_taylor(p, {h, 0.0}, 4, a, b, 4) == TK_ERR_BUFFER);
  tk_problem_free(p);
}

TEST_CASE("convergence study through the C interface") {
  tk_problem* p = problem("sin(x)");
  tk_study_row rows[6];
  size_t count = 0;
  double slope = 0.0;
  REQUIRE(tk_convergence_study(p, {0.0, 0.0}, 2, 12, 2, 0, rows, 6, &count, &slope) == TK_OK);
  CHECK(count == 6);
  CHECK(rows[0].N == 2);
  CHECK(rows[5].N == 12);
  CHECK(slope < -5.0);
  CHECK(tk_convergence_study(p, {0.0, 0.0}, 2, 12, 2, 0, rows, 2, &count, &slope) == TK_ERR_BUFFER);
  tk_problem_free(p);
}
