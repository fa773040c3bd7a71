#include "tkernel/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "tkernel/errors.hpp"
#include "tkernel/formal_powers.hpp"
#include "tkernel/gen_calculus.hpp"
#include "tkernel/oracles.hpp"
#include "tkernel/spectral.hpp"
#include "tkernel/spps.hpp"

namespace tkernel {

namespace {

nlohmann::json pair(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

KernelBundle assemble(const Potential& p, const ParticularSolution& f, const GridFunction& Q,
                      std::shared_ptr<const WaveBasis> basis, int N, const FitOptions& opts) {
  auto k = fit_goursat_data(basis, p.q, Q, f.h, N, opts);
  auto kd = build_darboux_kernel(k, f, p.q);
  return KernelBundle{p, f, Q, std::move(k), std::move(kd)};
}

nlohmann::json check(const char* name, double value, double tol) {
  const bool ok = std::isfinite(value) && value <= tol;
  return {{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", ok}};
}

double interior_residual(const GridFunction& f, const GridFunction& q) {
  const auto r = differentiate(differentiate(f)) - q * f;
  double m = 0.0;
  for (int i = 4; i < r.size() - 4; ++i) m = std::max(m, std::abs(r[i]));
  return m;
}

}  // namespace

KernelBundle build_kernel(const Potential& p, std::optional<cplx> h, int N, const FitOptions& opts) {
  if (N < 0) throw DomainError("kernel order N must be non-negative");
  auto f = build_particular_solution(p, h);
  auto table = std::make_shared<const PhiPsiTable>(build_phi_psi(f, 2 * N + 1));
  auto basis = std::make_shared<const WaveBasis>(build_traces(table, N));
  auto Q = cumulative_potential(p);
  return assemble(p, f, Q, std::move(basis), N, opts);
}

KernelBundle build_kernel_auto(const Potential& p, std::optional<cplx> h, double target, int N_max,
                               const FitOptions& opts) {
  if (!(target > 0.0)) throw DomainError("auto N needs a positive target");
  if (N_max < 1) throw DomainError("auto N needs N_max >= 1");
  auto f = build_particular_solution(p, h);
  auto table = std::make_shared<const PhiPsiTable>(build_phi_psi(f, 2 * N_max + 1));
  auto basis = std::make_shared<const WaveBasis>(build_traces(table, N_max));
  auto Q = cumulative_potential(p);
  for (int N = 1;; ++N) {
    auto kb = assemble(p, f, Q, basis, N, opts);
    if (std::max(kb.kernel.eps1, kb.kernel.eps2) < target || N >= N_max) {
      if (std::max(kb.kernel.eps1, kb.kernel.eps2) >= target) {
        kb.kernel.warnings.push_back("auto N stopped at N_max before reaching the target");
      }
      return kb;
    }
  }
}

int default_lattice(const Grid& g, int L_max) {
  const auto i0 = g.node_of(0.0);
  if (!i0) return 0;
  const int intervals = g.size() - 1 - *i0;
  for (int L = std::min(L_max, intervals); L >= 8; --L) {
    if (L % 2 == 0 && intervals % L == 0) return L;
  }
  return 0;
}

OracleComparison compare_with_oracle(const KernelBundle& kb, int L) {
  const Grid& g = kb.kernel.grid();
  const int i0 = g.require_node(0.0);
  const int intervals = g.size() - 1 - i0;
  if (L <= 0 || intervals % L != 0) throw DomainError("oracle lattice must divide the grid intervals on [0,b]");
  const int stride = intervals / L;
  const KernelOracle o = kernel_oracle(kb.potential.q_fn, kb.f.h, g.b(), L);
  double e = 0.0;
  for (int i = 0; i <= L; ++i) {
    for (int j = 0; i + j <= L; ++j) {
      const double t = (i - j) * o.delta();
      e = std::max(e, std::abs(kb.kernel.eval_node(i0 + (i + j) * stride, t) - o.at_lattice(i, j)));
    }
  }
  return {e, o.iterations(), L};
}

nlohmann::json diagnostics_json(const KernelBundle& kb) {
  const auto& k = kb.kernel;
  const auto d = diagonal_diagnostics(k, kb.potential.q, kb.Q, k.h);
  nlohmann::json j;
  j["particular_solution"] = {{"h", pair(kb.f.h)},
                              {"fallback", kb.f.fallback},
                              {"min_abs", kb.f.min_abs},
                              {"iterations", kb.f.iterations},
                              {"ode_residual", interior_residual(kb.f.f, kb.potential.q)}};
  j["fit"] = {{"N", k.N},
              {"requested_N", k.requested_N},
              {"eps1", k.eps1},
              {"eps2", k.eps2},
              {"condition", {k.condition1, k.condition2}},
              {"bound_constant", k.bound_constant},
              {"error_bound", k.error_bound()},
              {"warnings", k.warnings}};
  j["darboux"] = {{"bound_constant", kb.darboux.bound_constant}, {"error_bound", kb.darboux.bound}};
  j["line_identities"] = {{"k1_diag", d.k1_diag},         {"k2_diag", d.k2_diag},
                          {"k1_anti", d.k1_anti},         {"k1_k2_anti", d.k1_k2_anti},
                          {"goursat_diag", d.goursat_diag}, {"goursat_anti", d.goursat_anti}};

  const GridFunction F1 = cplx(0.25) * kb.Q + 0.5 * k.h;
  const GridFunction F2 = cplx(0.25) * kb.Q;
  const auto alpha = taylor_coefficients(F1, TaylorKind::c, k.N, kb.f, kb.potential.q, "h/2 + Q/4");
  const auto beta = taylor_coefficients(F2, TaylorKind::s, k.N, kb.f, kb.potential.q, "Q/4");
  nlohmann::json rows = nlohmann::json::array();
  double fact = 1.0;
  for (int n = 0; n <= k.N; ++n) {
    if (n > 0) fact *= n;
    const auto i = static_cast<std::size_t>(n);
    rows.push_back({{"n", n},
                    {"a", pair(k.a[i])},
                    {"alpha_over_factorial", pair(alpha.coef[i] / fact)},
                    {"b", pair(k.b[i])},
                    {"beta_over_factorial", pair(beta.coef[i] / fact)}});
  }
  j["taylor_comparison"] = std::move(rows);
  return j;
}

nlohmann::json verify_problem(const Potential& p, std::optional<cplx> h, int N) {
  if (N < 2) throw DomainError("verification needs N >= 2");
  const auto kb = build_kernel(p, h, N);
  const auto& f = kb.f;
  const auto& k = kb.kernel;
  const auto& q = p.q;
  nlohmann::json checks = nlohmann::json::array();

  checks.push_back(check("particular_solution_residual", interior_residual(f.f, q), 1e-6));

  const int nt = std::min(N, 6);
  const auto table = std::make_shared<const PhiPsiTable>(build_phi_psi(f, 2 * nt + 1));
  const auto basis = build_traces(table, nt);
  double tr = 0.0;
  for (int n = 2; n <= nt; ++n) {
    tr = std::max(tr, max_abs_diff(gamma2gamma1(basis.c[n], q), double(n) * basis.s[n - 1]));
    tr = std::max(tr, max_abs_diff(gamma2gamma1(basis.s[n], q), double(n) * basis.c[n - 1]));
  }
  checks.push_back(check("trace_identities", tr, 1e-6));

  const auto Y = build_Y_powers(f, nt);
  double fp = 0.0;
  double fact = 1.0;
  for (int n = 1; n <= nt; ++n) {
    fact *= n;
    const auto& c = (n % 2 == 1) ? basis.c[n] : basis.s[n];
    fp = std::max(fp, max_abs_diff((1.0 / fact) * c, f.f * Y.Y[static_cast<std::size_t>(2 * n - 1)]));
  }
  checks.push_back(check("formal_power_consistency", fp, 1e-8));

  checks.push_back(check("goursat_fit_residual", std::max(k.eps1, k.eps2), 1e-2));

  if (p.mode == Mode::half) {
    if (const int L = default_lattice(k.grid()); L > 0) {
      const auto oc = compare_with_oracle(kb, L);
      checks.push_back(check("kernel_vs_oracle", oc.max_error, k.error_bound()));
    }
  }

  const auto spps_table = build_phi_psi(f, 80);
  const auto s = spps_solve(spps_table, f, 1.0, 1e-15);
  const auto o1 = ode_oracle(p.q_fn, p.grid(), 1.0, 1.0, f.h);
  const auto o2 = ode_oracle(p.q_fn, p.grid(), 1.0, 0.0, 1.0);
  checks.push_back(check("spps_vs_ode", std::max(max_abs_diff(s.y1, o1.u), max_abs_diff(s.y2, o2.u)), 1e-8));
  checks.push_back(check("spps_wronskian", (s.y1 * s.dy2 - s.y2 * s.dy1 - cplx(1.0)).max_norm(), 1e-8));

  double wr = 0.0;
  const Grid& g = k.grid();
  const int i0 = g.require_node(0.0);
  for (int i = i0; i < g.size(); i += std::max(1, (g.size() - i0) / 50)) {
    const auto cs = eval_cN_sN(k, 1.0, g.x(i));
    const auto d = eval_derivatives(k, kb.darboux, f, 1.0, g.x(i));
    wr = std::max(wr, std::abs(cs.c * d.s - cs.s * d.c - 1.0));
  }
  checks.push_back(check("solution_wronskian", wr, std::max(1e-6, 10.0 * kb.darboux.bound)));

  if (N >= 4) {
    const GridFunction F1 = cplx(0.25) * kb.Q + 0.5 * k.h;
    const GridFunction F2 = cplx(0.25) * kb.Q;
    const auto a = taylor_coefficients(F1, TaylorKind::c, 4, f, q);
    const auto b = taylor_coefficients(F2, TaylorKind::s, 4, f, q);
    checks.push_back(check("taylor_even_coefficients",
                           std::max(std::abs(a.coef[2] - b.coef[2]), std::abs(a.coef[4] - b.coef[4])), 1e-6));
  }

  bool all = true;
  for (const auto& c : checks) all = all && c["pass"].get<bool>();
  return {{"N", k.N}, {"h", pair(k.h)}, {"checks", std::move(checks)}, {"pass", all}};
}

}  // namespace tkernel
