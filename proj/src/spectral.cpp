#include "tkernel/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tkernel/errors.hpp"
#include "tkernel/formal_powers.hpp"
#include "tkernel/oracles.hpp"

namespace tkernel {

namespace {

constexpr int kSeriesTerms = 15;

// sin(w x)/w, finite at w = 0
cplx sin_over(cplx w, double x) {
  const cplx z = w * x;
  if (std::abs(z) < 0.5) {
    cplx term = x;
    cplx sum = term;
    for (int m = 1; m < kSeriesTerms; ++m) {
      term *= -z * z / (static_cast<double>(2 * m) * (2 * m + 1));
      sum += term;
    }
    return sum;
  }
  return std::sin(z) / w;
}

cplx ratio_at(const ParticularSolution& f, double x) { return eval_at(f.f_prime, x) / eval_at(f.f, x); }

std::vector<cplx> coefficients_at(const std::vector<GridFunction>& P, double x) {
  std::vector<cplx> out;
  out.reserve(P.size());
  for (const auto& p : P) out.push_back(eval_at(p, x));
  return out;
}

}  // namespace

TrigMoments trig_moments(int kmax, cplx w, double x) {
  if (kmax < 0) throw DomainError("trig_moments: k must be non-negative");
  const auto n = static_cast<std::size_t>(kmax) + 1;
  TrigMoments m{std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n)};
  const cplx z = w * x;
  const double az = std::abs(z);

  if (az < 0.5) {
    // power series in w
    for (int k = 0; k <= kmax; ++k) {
      cplx c = 0.0;
      cplx so = 0.0;
      cplx wp = 1.0;  // (-1)^m w^{2m}
      double fact_even = 1.0;
      double fact_odd = 1.0;
      for (int j = 0; j < kSeriesTerms; ++j) {
        if (j > 0) {
          wp *= -w * w;
          fact_even *= static_cast<double>(2 * j - 1) * (2 * j);
          fact_odd *= static_cast<double>(2 * j) * (2 * j + 1);
        }
        c += wp * std::pow(x, k + 2 * j + 1) / (fact_even * (k + 2 * j + 1));
        so += wp * std::pow(x, k + 2 * j + 2) / (fact_odd * (k + 2 * j + 2));
      }
      const auto i = static_cast<std::size_t>(k);
      m.C[i] = c;
      m.S_over_omega[i] = so;
      m.S[i] = w * so;
    }
    return m;
  }

  if (az >= kmax + 1.0) {
    // upward recurrence from the antiderivatives
    const cplx sx = std::sin(z);
    const cplx cx = std::cos(z);
    m.C[0] = sx / w;
    m.S[0] = (1.0 - cx) / w;
    double xk = 1.0;
    for (int k = 1; k <= kmax; ++k) {
      xk *= x;
      const auto i = static_cast<std::size_t>(k);
      m.C[i] = xk * sx / w - (static_cast<double>(k) / w) * m.S[i - 1];
      m.S[i] = -xk * cx / w + (static_cast<double>(k) / w) * m.C[i - 1];
    }
    for (std::size_t i = 0; i < n; ++i) m.S_over_omega[i] = m.S[i] / w;
    return m;
  }

  // intermediate range: composite Gauss-Legendre for all k at once
  const int panels = std::max(1, static_cast<int>(std::ceil(az / 8.0)));
  for (int k = 0; k <= kmax; ++k) {
    m.C[static_cast<std::size_t>(k)] =
        quad::gauss_legendre([&](double t) { return std::pow(t, k) * std::cos(w * t); }, 0.0, x, panels);
    m.S[static_cast<std::size_t>(k)] =
        quad::gauss_legendre([&](double t) { return std::pow(t, k) * std::sin(w * t); }, 0.0, x, panels);
    m.S_over_omega[static_cast<std::size_t>(k)] = m.S[static_cast<std::size_t>(k)] / w;
  }
  return m;
}

std::pair<cplx, cplx> trig_moment(int k, cplx omega, double x) {
  const auto m = trig_moments(k, omega, x);
  return {m.C.back(), m.S.back()};
}

SolutionPair eval_cN_sN(const KernelApproximation& k, cplx w, double x) {
  const auto P = coefficients_at(k.P, x);
  const auto m = trig_moments(static_cast<int>(P.size()) - 1, w, x);
  cplx c = std::cos(w * x);
  cplx s = sin_over(w, x);
  for (std::size_t j = 0; j < P.size(); ++j) {
    if (j % 2 == 0) {
      c += 2.0 * P[j] * m.C[j];
    } else {
      s += 2.0 * P[j] * m.S_over_omega[j];
    }
  }
  return {c, s};
}

SolutionPair eval_derivatives(const KernelApproximation& k, const DarbouxKernelApproximation& kd,
                              const ParticularSolution& f, cplx w, double x) {
  const auto cs = eval_cN_sN(k, w, x);
  const auto PD = coefficients_at(kd.P, x);
  const auto m = trig_moments(static_cast<int>(PD.size()) - 1, w, x);
  cplx tsin = std::sin(w * x);
  cplx tcos = std::cos(w * x);
  for (std::size_t j = 0; j < PD.size(); ++j) {
    if (j % 2 == 0) {
      tcos += 2.0 * PD[j] * m.C[j];
    } else {
      tsin += 2.0 * PD[j] * m.S[j];
    }
  }
  const cplx r = ratio_at(f, x);
  return {r * cs.c - w * tsin, r * cs.s + tcos};
}

BoundaryCondition dirichlet() { return {1.0, 0.0}; }
BoundaryCondition neumann() { return {0.0, 1.0}; }

std::optional<double> left_bc_h(const BoundaryCondition& bc) {
  if (bc.sin_a == 0.0) return std::nullopt;
  return -bc.cos_a / bc.sin_a;
}

namespace {

struct Characteristic {
  const SpectralProblem& sp;
  const KernelApproximation& k;
  const DarbouxKernelApproximation& kd;
  const ParticularSolution& f;
  std::optional<double> hbc;
  double b;

  // the solution satisfying the left condition, and its derivative
  SolutionPair solution(cplx w, double x, bool need_derivative) const {
    const auto cs = eval_cN_sN(k, w, x);
    SolutionPair d{0.0, 0.0};
    if (need_derivative) d = eval_derivatives(k, kd, f, w, x);
    if (!hbc) return {cs.s, d.s};
    const cplx shift = *hbc - k.h;
    return {cs.c + shift * cs.s, d.c + shift * d.s};
  }

  struct Value {
    cplx phi;
    double scale;
  };

  Value operator()(cplx w) const {
    const bool need_d = sp.right.sin_a != 0.0;
    const auto cs = eval_cN_sN(k, w, b);
    const auto u = solution(w, b, need_d);
    const cplx phi = u.c * sp.right.cos_a + (need_d ? u.s * sp.right.sin_a : cplx(0.0));
    const double scale = std::max({std::abs(cs.c), std::abs(cs.s), 1.0});
    return {phi, scale};
  }
};

}  // namespace

std::vector<Eigenpair> find_eigenvalues(const SpectralProblem& sp, const KernelApproximation& k,
                                        const DarbouxKernelApproximation& kd, const ParticularSolution& f,
                                        bool with_eigenfunctions) {
  if ((sp.left.cos_a == 0.0 && sp.left.sin_a == 0.0) || (sp.right.cos_a == 0.0 && sp.right.sin_a == 0.0)) {
    throw DomainError("boundary condition coefficients are both zero");
  }
  if (!(sp.omega_hi > sp.omega_lo)) throw DomainError("empty omega search range");
  const Grid& g = k.grid();
  const double b = g.b();
  const Characteristic phi{sp, k, kd, f, left_bc_h(sp.left), b};

  // scan variable: sigma^2 sign(sigma) = omega^2 sign(omega) - shift; the
  // shifted frequency is sigma or i|sigma|, where the characteristic stays real
  auto to_sigma = [&](double w) {
    const double ls = w * std::abs(w) - sp.shift;
    return std::copysign(std::sqrt(std::abs(ls)), ls);
  };
  auto shifted = [](double sg) { return sg >= 0.0 ? cplx(sg) : cplx(0.0, -sg); };
  const double s_lo = to_sigma(sp.omega_lo);
  const double s_hi = to_sigma(sp.omega_hi);
  const double max_step = std::numbers::pi / (4.0 * b);
  const int steps = std::max(1, static_cast<int>(std::ceil((s_hi - s_lo) / max_step)));
  const double dw = (s_hi - s_lo) / steps;

  std::vector<double> roots;
  std::vector<double> residuals;
  auto accept = [&](double w, double res) {
    if (!roots.empty() && std::abs(w - roots.back()) < 1e-9 * std::max(1.0, std::abs(w))) return;
    roots.push_back(w);
    residuals.push_back(res);
  };

  double wa = s_lo;
  auto va = phi(shifted(wa));
  for (int s = 1; s <= steps; ++s) {
    if (sp.count > 0 && static_cast<int>(roots.size()) >= sp.count) break;
    const double wb = s_lo + s * dw;
    const auto vb = phi(shifted(wb));
    const double fa = va.phi.real();
    const double fb = vb.phi.real();
    if (fa == 0.0) {
      accept(wa, 0.0);
    } else if (fa * fb < 0.0) {
      // safeguarded secant on [lo, hi]
      double lo = wa;
      double hi = wb;
      double flo = fa;
      double fhi = fb;
      double w = wa;
      double res = std::abs(va.phi) / va.scale;
      for (int it = 0; it < 200; ++it) {
        double cand = hi - fhi * (hi - lo) / (fhi - flo);
        if (!(cand > lo && cand < hi) || it % 4 == 3) cand = 0.5 * (lo + hi);
        const auto vc = phi(shifted(cand));
        const double fc = vc.phi.real();
        w = cand;
        res = std::abs(vc.phi) / vc.scale;
        if (res < 1e-12 || hi - lo < 4e-16 * std::max(1.0, std::abs(cand))) break;
        if ((fc < 0.0) == (flo < 0.0)) {
          lo = cand;
          flo = fc;
        } else {
          hi = cand;
          fhi = fc;
        }
      }
      accept(w, res);
    }
    wa = wb;
    va = vb;
  }
  if (roots.empty()) throw NumericalError("no eigenvalues found in the omega search range");
  if (sp.count > 0 && static_cast<int>(roots.size()) > sp.count) {
    roots.resize(static_cast<std::size_t>(sp.count));
    residuals.resize(static_cast<std::size_t>(sp.count));
  }

  std::vector<Eigenpair> out;
  for (std::size_t r = 0; r < roots.size(); ++r) {
    const cplx w = shifted(roots[r]);
    std::vector<cplx> u(static_cast<std::size_t>(with_eigenfunctions ? g.size() : 1), 0.0);
    if (with_eigenfunctions) {
      for (int i = 0; i < g.size(); ++i) u[static_cast<std::size_t>(i)] = phi.solution(w, g.x(i), false).c;
    }
    double norm = 0.0;
    for (const auto& v : u) norm = std::max(norm, std::abs(v));
    if (norm > 0.0) {
      for (auto& v : u) v /= norm;
    }
    GridFunction ef = with_eigenfunctions ? GridFunction(g, std::move(u)) : GridFunction::constant(g, 0.0);
    const cplx lambda = w * w + sp.shift;
    const cplx omega = sp.shift == 0.0 ? w : std::sqrt(lambda);
    out.push_back(Eigenpair{omega, lambda, std::move(ef), residuals[r], static_cast<int>(r) + 1});
  }
  return out;
}

nlohmann::json to_json(const std::vector<Eigenpair>& eigs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : eigs) {
    arr.push_back({{"index", e.index},
                   {"omega", {e.omega.real(), e.omega.imag()}},
                   {"lambda", {e.lambda.real(), e.lambda.imag()}},
                   {"bc_residual", e.bc_residual}});
  }
  return arr;
}

double loglog_slope(const std::vector<double>& n, const std::vector<double>& err) {
  if (n.size() != err.size() || n.size() < 2) throw DomainError("loglog_slope needs at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto m = static_cast<double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double lx = std::log(n[i]);
    const double ly = std::log(err[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

StudyResult convergence_study(const Potential& p, cplx h, int n_lo, int n_hi, int step, int lattice) {
  if (n_lo < 1 || n_hi < n_lo || step < 1) throw DomainError("invalid N range for the convergence study");
  const auto f = build_particular_solution(p, h);
  const auto table = std::make_shared<const PhiPsiTable>(build_phi_psi(f, n_hi));
  const auto basis = std::make_shared<const WaveBasis>(build_traces(table, n_hi));
  const auto Q = cumulative_potential(p);
  const Grid& g = p.grid();

  std::optional<KernelOracle> oracle;
  int stride = 0;
  int i0 = g.require_node(0.0);
  if (lattice > 0) {
    const int intervals = g.size() - 1 - i0;
    if (intervals % lattice != 0) throw DomainError("oracle lattice must divide the number of grid intervals on [0,b]");
    stride = intervals / lattice;
    oracle.emplace(kernel_oracle(p.q_fn, f.h, p.b, lattice));
  }

  StudyResult out;
  std::vector<double> ns;
  std::vector<double> errs;
  for (int N = n_lo; N <= n_hi; N += step) {
    const auto k = fit_goursat_data(basis, p.q, Q, f.h, N);
    StudyRow row{k.N, k.eps1, k.eps2, -1.0, k.error_bound()};
    if (oracle) {
      double e = 0.0;
      for (int i = 0; i <= lattice; ++i) {
        for (int j = 0; i + j <= lattice; ++j) {
          const double t = (i - j) * oracle->delta();
          e = std::max(e, std::abs(k.eval_node(i0 + (i + j) * stride, t) - oracle->at_lattice(i, j)));
        }
      }
      row.kernel_error = e;
    }
    out.rows.push_back(row);
    ns.push_back(N);
    errs.push_back(std::max({k.eps1, k.eps2, 1e-300}));
  }
  if (ns.size() >= 2) out.slope = loglog_slope(ns, errs);
  for (std::size_t i = 1; i < ns.size(); ++i) {
    out.local_slopes.push_back(std::log(errs[i] / errs[i - 1]) / std::log(ns[i] / ns[i - 1]));
  }
  return out;
}

}  // namespace tkernel
