#include "tkernel/gen_calculus.hpp"

#include <algorithm>
#include <cmath>

#include "tkernel/errors.hpp"

namespace tkernel {

namespace {

int origin(const Grid& g) { return g.require_node(0.0); }

// oriented walk from node a to node b
struct Walk {
  int a;
  int dir;
  int count;
  std::vector<double> w;
};

Walk walk(int a, int b) {
  const int d = b >= a ? 1 : -1;
  const int m = std::abs(b - a);
  return {a, d, m, quad::definite_weights(m)};
}

const GridFunction& particular(const KernelApproximation& k) { return k.basis->table->phi[0]; }

}  // namespace

GridFunction gamma1(const GridFunction& g, const ParticularSolution& f) {
  return f.f * differentiate(g) - f.f_prime * g;
}

GridFunction gamma2gamma1(const GridFunction& g, const GridFunction& q) {
  const auto dg = differentiate(g);
  const cplx d0 = dg[origin(g.grid())];
  return cplx(0.5) * (dg - d0 - cumulative_integral(q * g, 0.0));
}

UnitDerivativeTable unit_derivatives(const GridFunction& q, int J) {
  if (J < 0) throw DomainError("unit_derivatives: J must be non-negative");
  UnitDerivativeTable t;
  t.J = J;
  t.g.push_back(GridFunction::constant(q.grid(), 1.0));
  for (int j = 1; j <= J; ++j) t.g.push_back(cplx(2.0) * gamma2gamma1(t.g.back(), q));
  return t;
}

namespace {

using Series = std::vector<cplx>;

// Taylor coefficients at 0 of a grid function, from a least-squares
// polynomial fit over the nodes with |x| <= X.
Series local_series(const GridFunction& F, int degree) {
  const Grid& g = F.grid();
  const double X = std::min(0.5, 0.5 * std::max(std::abs(g.a()), g.b()));
  std::vector<int> idx;
  for (int i = 0; i < g.size(); ++i) {
    if (std::abs(g.x(i)) <= X + 1e-12) idx.push_back(i);
  }
  const int m = static_cast<int>(idx.size());
  degree = std::min(degree, m - 1);
  Eigen::MatrixXd A(m, degree + 1);
  Eigen::MatrixXd rhs(m, 2);
  for (int r = 0; r < m; ++r) {
    const double s = g.x(idx[static_cast<std::size_t>(r)]) / X;
    double p = 1.0;
    for (int k = 0; k <= degree; ++k, p *= s) A(r, k) = p;
    rhs(r, 0) = F[idx[static_cast<std::size_t>(r)]].real();
    rhs(r, 1) = F[idx[static_cast<std::size_t>(r)]].imag();
  }
  const Eigen::MatrixXd c = A.colPivHouseholderQr().solve(rhs);
  Series out(static_cast<std::size_t>(degree) + 1);
  double scale = 1.0;
  for (int k = 0; k <= degree; ++k, scale /= X) out[static_cast<std::size_t>(k)] = cplx(c(k, 0), c(k, 1)) * scale;
  return out;
}

Series deriv(const Series& a) {
  Series d(a.size() > 1 ? a.size() - 1 : 1, 0.0);
  for (std::size_t k = 1; k < a.size(); ++k) d[k - 1] = static_cast<double>(k) * a[k];
  return d;
}

Series integral(const Series& a, std::size_t len) {
  Series r(len, 0.0);
  for (std::size_t k = 1; k < len && k - 1 < a.size(); ++k) r[k] = a[k - 1] / static_cast<double>(k);
  return r;
}

Series product(const Series& a, const Series& b, std::size_t len) {
  Series r(len, 0.0);
  for (std::size_t i = 0; i < a.size() && i < len; ++i) {
    for (std::size_t j = 0; j < b.size() && i + j < len; ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

cplx at(const Series& a, std::size_t k) { return k < a.size() ? a[k] : cplx(0.0); }

// gamma2 gamma1 on truncated series: (g' - g'(0) - int q g) / 2
Series series_g2g1(const Series& g, const Series& q) {
  Series d = deriv(g);
  d[0] = 0.0;
  const auto I = integral(product(q, g, d.size()), d.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = 0.5 * (d[k] - I[k]);
  return d;
}

}  // namespace

TaylorCoefficients taylor_coefficients(const GridFunction& F, TaylorKind kind, int N, const ParticularSolution& f,
                                       const GridFunction& q, std::string description) {
  if (N < 0) throw DomainError("taylor_coefficients: N must be non-negative");
  const Grid& g = F.grid();
  const int i0 = origin(g);
  if (kind == TaylorKind::s && std::abs(F[i0]) > 1e-12 * std::max(1.0, F.max_norm())) {
    throw DomainError("s-type expansion needs F(0) = 0");
  }
  const int degree = std::max(12, N + 6);
  Series Fs = local_series(F, degree);
  Fs[0] = F[i0];
  const Series qs = local_series(q, degree);
  const cplx f0 = f.f[i0];
  const cplx f1 = f.f_prime[i0];
  auto gamma1_at0 = [&](const Series& s) { return f0 * at(s, 1) - f1 * at(s, 0); };

  // A[j] = gamma1 (g2g1)^j F (0), U[m] = gamma1 (g2g1)^m [1] (0)
  std::vector<cplx> A;
  std::vector<cplx> U;
  Series Fj = Fs;
  Series Uj(Fs.size(), 0.0);
  Uj[0] = 1.0;
  for (int j = 0; j < N; ++j) {
    A.push_back(gamma1_at0(Fj));
    U.push_back(gamma1_at0(Uj));
    Fj = series_g2g1(Fj, qs);
    Uj = series_g2g1(Uj, qs);
  }
  TaylorCoefficients t;
  t.kind = kind;
  t.N = N;
  t.description = std::move(description);
  t.coef.assign(static_cast<std::size_t>(N) + 1, 0.0);
  const int parity = kind == TaylorKind::c ? 0 : 1;
  if (kind == TaylorKind::c) t.coef[0] = F[i0];
  for (int j = 0; j < N; ++j) {
    cplx v = A[static_cast<std::size_t>(j)];
    for (int n = (parity == 0 ? 2 : 1); n <= j; n += 2) {
      v += t.coef[static_cast<std::size_t>(n)] * U[static_cast<std::size_t>(j - n)];
    }
    t.coef[static_cast<std::size_t>(j + 1)] = v;
  }
  return t;
}

nlohmann::json to_json(const TaylorCoefficients& t) {
  nlohmann::json c = nlohmann::json::array();
  for (const auto& z : t.coef) c.push_back({z.real(), z.imag()});
  return {{"kind", t.kind == TaylorKind::c ? "c" : "s"}, {"N", t.N}, {"coefficients", c}, {"F", t.description}};
}

GridFunction apply_Gamma(const KernelApproximation& k, GammaSign sign, const GridFunction& eta) {
  if (k.mode != Mode::full) throw DomainError("apply_Gamma on grid samples needs a full-segment kernel");
  const Grid& g = k.grid();
  if (!(eta.grid() == g)) throw DomainError("apply_Gamma: input lives on a different grid");
  const int c = origin(g);
  const double hs = g.step();
  std::vector<cplx> out(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    // s runs over [0,x] for Gamma+ and [-x,0] for Gamma-; t = 2s -+ x
    const auto wk = sign == GammaSign::plus ? walk(c, i) : walk(2 * c - i, c);
    const double shift = sign == GammaSign::plus ? -x : x;
    cplx acc = 0.0;
    for (int l = 0; l <= wk.count; ++l) {
      const int j = wk.a + wk.dir * l;
      acc += wk.w[static_cast<std::size_t>(l)] * k.eval_node(i, 2.0 * g.x(j) + shift) * eta[j];
    }
    const cplx base = sign == GammaSign::plus ? eta[i] : eta[c];
    out[static_cast<std::size_t>(i)] = base + 2.0 * wk.dir * hs * acc;
  }
  return GridFunction(g, std::move(out));
}

GridFunction apply_Gamma(const KernelApproximation& k, GammaSign sign, const PointFn& eta) {
  const Grid& g = k.grid();
  std::vector<cplx> out(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    cplx integral = 0.0;
    if (x != 0.0) {
      if (sign == GammaSign::plus) {
        integral = quad::gauss_legendre([&](double s) { return k.eval_node(i, 2.0 * s - x) * eta(s); }, 0.0, x, 4);
      } else {
        integral = quad::gauss_legendre([&](double s) { return k.eval_node(i, 2.0 * s + x) * eta(s); }, -x, 0.0, 4);
      }
    }
    const cplx base = sign == GammaSign::plus ? eta(x) : eta(0.0);
    out[static_cast<std::size_t>(i)] = base + 2.0 * integral;
  }
  return GridFunction(g, std::move(out));
}

GridFunction apply_G(const KernelApproximation& k, GWhich which, const GridFunction& eta) {
  const auto gp = apply_Gamma(k, GammaSign::plus, eta);
  const auto gm = apply_Gamma(k, GammaSign::minus, eta);
  const cplx e0 = eta[origin(eta.grid())];
  if (which == GWhich::G1) return gp + gm - e0 * particular(k);
  return gp - gm + e0;
}

GridFunction apply_G(const KernelApproximation& k, GWhich which, const PointFn& eta) {
  const auto gp = apply_Gamma(k, GammaSign::plus, eta);
  const auto gm = apply_Gamma(k, GammaSign::minus, eta);
  const cplx e0 = eta(0.0);
  if (which == GWhich::G1) return gp + gm - e0 * particular(k);
  return gp - gm + e0;
}

GMatrix::GMatrix(const KernelApproximation& k, GWhich which) : grid_(k.grid()) {
  if (k.mode != Mode::full) throw DomainError("the G-matrix needs a full-segment kernel");
  const Grid& g = grid_;
  const int n = g.size();
  const int c = origin(g);
  const double hs = g.step();
  const auto& f = particular(k);
  const double pm = which == GWhich::G1 ? 1.0 : -1.0;
  A_ = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double x = g.x(i);
    A_(i, i) += 1.0;
    A_(i, c) += pm;  // Gamma- delta part
    A_(i, c) += which == GWhich::G1 ? -f[i] : cplx(1.0);
    const auto wp = walk(c, i);
    for (int l = 0; l <= wp.count; ++l) {
      const int j = wp.a + wp.dir * l;
      A_(i, j) += 2.0 * wp.dir * hs * wp.w[static_cast<std::size_t>(l)] * k.eval_node(i, 2.0 * g.x(j) - x);
    }
    const auto wm = walk(2 * c - i, c);
    for (int l = 0; l <= wm.count; ++l) {
      const int j = wm.a + wm.dir * l;
      A_(i, j) += pm * 2.0 * wm.dir * hs * wm.w[static_cast<std::size_t>(l)] * k.eval_node(i, 2.0 * g.x(j) + x);
    }
  }
  lu_.compute(A_);
  const double anorm = A_.cwiseAbs().colwise().sum().maxCoeff();
  const Eigen::MatrixXcd inv = lu_.inverse();
  cond_ = anorm * inv.cwiseAbs().colwise().sum().maxCoeff();
}

GridFunction GMatrix::apply(const GridFunction& eta) const {
  if (!(eta.grid() == grid_)) throw DomainError("GMatrix: input lives on a different grid");
  Eigen::VectorXcd v(eta.size());
  for (int i = 0; i < eta.size(); ++i) v[i] = eta[i];
  const Eigen::VectorXcd r = A_ * v;
  return GridFunction(grid_, std::vector<cplx>(r.data(), r.data() + r.size()));
}

GridFunction GMatrix::solve(const GridFunction& eta) const {
  if (!(eta.grid() == grid_)) throw DomainError("GMatrix: input lives on a different grid");
  Eigen::VectorXcd v(eta.size());
  for (int i = 0; i < eta.size(); ++i) v[i] = eta[i];
  const Eigen::VectorXcd r = lu_.solve(v);
  return GridFunction(grid_, std::vector<cplx>(r.data(), r.data() + r.size()));
}

GInverse invert_G(const KernelApproximation& k, GWhich which, const GridFunction& eta) {
  const GMatrix G(k, which);
  auto value = G.solve(eta);
  const double residual = max_abs_diff(G.apply(value), eta);
  return GInverse{std::move(value), residual, G.condition()};
}

}  // namespace tkernel
