#include "tkernel/kernel_fit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "tkernel/errors.hpp"

namespace tkernel {

namespace {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct LsqResult {
  std::vector<cplx> coef;
  double max_residual = 0.0;
  double condition = 1.0;
  bool full_rank = true;
};

double max_abs(const Vector& r) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) m = std::max(m, std::abs(r[i]));
  return m;
}

LsqResult solve_scaled(const std::vector<const GridFunction*>& cols, const GridFunction& target, int rounds) {
  const auto rows = static_cast<Eigen::Index>(target.size());
  const auto ncol = static_cast<Eigen::Index>(cols.size());
  LsqResult out;
  out.coef.assign(cols.size(), 0.0);
  Vector y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) y[i] = target[static_cast<int>(i)];
  if (ncol == 0) {
    out.max_residual = max_abs(y);
    return out;
  }
  Matrix A(rows, ncol);
  std::vector<double> scale(cols.size(), 1.0);
  for (Eigen::Index j = 0; j < ncol; ++j) {
    const auto& c = *cols[static_cast<std::size_t>(j)];
    const double s = c.max_norm();
    scale[static_cast<std::size_t>(j)] = s > 0.0 ? s : 1.0;
    for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = c[static_cast<int>(i)] / scale[static_cast<std::size_t>(j)];
  }

  Eigen::VectorXd w = Eigen::VectorXd::Ones(rows);
  Vector best;
  double best_res = std::numeric_limits<double>::infinity();
  for (int round = 0; round <= rounds; ++round) {
    Eigen::VectorXd sw = w.cwiseSqrt();
    Matrix Aw = sw.asDiagonal() * A;
    Vector yw = sw.asDiagonal() * y;
    Eigen::ColPivHouseholderQR<Matrix> qr(Aw);
    if (round == 0) {
      out.full_rank = qr.rank() == ncol;
      const auto& R = qr.matrixR();
      const double d0 = std::abs(R(0, 0));
      const double dn = std::abs(R(ncol - 1, ncol - 1));
      out.condition = dn > 0.0 ? d0 / dn : std::numeric_limits<double>::infinity();
      if (!out.full_rank) return out;
    }
    Vector x = qr.solve(yw);
    Vector r = y - A * x;
    const double res = max_abs(r);
    if (res < best_res) {
      best_res = res;
      best = x;
    }
    const double total = (w.array() * r.cwiseAbs().array()).sum();
    if (!(total > 0.0)) break;
    for (Eigen::Index i = 0; i < rows; ++i) w[i] = std::max(w[i] * std::abs(r[i]) / total * rows, 1e-300);
  }
  for (Eigen::Index j = 0; j < ncol; ++j) out.coef[static_cast<std::size_t>(j)] = best[j] / scale[static_cast<std::size_t>(j)];
  out.max_residual = best_res;
  return out;
}

cplx horner(const std::vector<GridFunction>& P, int i, double t) {
  cplx acc = 0.0;
  for (auto it = P.rbegin(); it != P.rend(); ++it) acc = acc * t + (*it)[i];
  return acc;
}

cplx horner_at(const std::vector<GridFunction>& P, double x, double t) {
  cplx acc = 0.0;
  for (auto it = P.rbegin(); it != P.rend(); ++it) acc = acc * t + eval_at(*it, x);
  return acc;
}

std::vector<GridFunction> assemble(const std::vector<GridFunction>& powers, int N, const std::vector<cplx>& even_coef,
                                   const std::vector<cplx>& odd_coef, cplx zeroth, double sign) {
  const Grid& g = powers.front().grid();
  std::vector<GridFunction> P(static_cast<std::size_t>(N) + 1, GridFunction::constant(g, 0.0));
  P[0] = (sign * zeroth) * powers[0];
  for (int n = 1; n <= N; ++n) {
    for (int k = 0; k <= n; ++k) {
      const cplx c = (k % 2 == 0) ? even_coef[static_cast<std::size_t>(n)] : odd_coef[static_cast<std::size_t>(n)];
      if (c == cplx(0.0)) continue;
      P[static_cast<std::size_t>(k)] =
          P[static_cast<std::size_t>(k)] + (sign * c * binomial(n, k)) * powers[static_cast<std::size_t>(n - k)];
    }
  }
  return P;
}

// sign of the oriented integral int_{-x}^{x} and the node range it spans
struct Span {
  int lo;
  int count;  // intervals
  double sign;
};

Span symmetric_span(const Grid& g, int i) {
  const int c = g.require_node(0.0);
  const int m = std::abs(i - c);
  return {c - m, 2 * m, i >= c ? 1.0 : -1.0};
}

}  // namespace

double bessel_i0(double x) {
  const double y = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= y / (static_cast<double>(k) * k);
    sum += term;
  }
  return sum;
}

cplx KernelApproximation::eval(double x, double t) const { return horner_at(P, x, t); }
cplx KernelApproximation::eval_node(int i, double t) const { return horner(P, i, t); }
cplx DarbouxKernelApproximation::eval(double x, double t) const { return horner_at(P, x, t); }
cplx DarbouxKernelApproximation::eval_node(int i, double t) const { return horner(P, i, t); }

cplx eval_KN(const KernelApproximation& k, double x, double t) { return k.eval(x, t); }

KernelApproximation fit_goursat_data(std::shared_ptr<const WaveBasis> basis, const GridFunction& q, const GridFunction& Q,
                                     cplx h, int N, const FitOptions& opts) {
  if (!basis) throw DomainError("fit_goursat_data: no basis");
  if (basis->darboux) throw DomainError("fit_goursat_data: needs a phi-based basis");
  if (N < 0) throw DomainError("kernel order must be non-negative");
  if (N > basis->N) {
    throw DomainError("basis order " + std::to_string(basis->N) + " is below the requested N = " + std::to_string(N));
  }
  const Grid& g = basis->grid();
  if (!(q.grid() == g) || !(Q.grid() == g)) throw DomainError("fit_goursat_data: q, Q and basis grids differ");

  const auto g1 = Q * cplx(0.25) + h / 2.0;
  const auto g2 = Q * cplx(0.25);

  KernelApproximation k;
  k.requested_N = N;
  k.mode = g.a() < 0.0 ? Mode::full : Mode::half;
  k.h = h;
  k.segment = g.b();

  LsqResult r1;
  LsqResult r2;
  for (int n = N; n >= 0; --n) {
    std::vector<const GridFunction*> ccols;
    std::vector<const GridFunction*> scols;
    for (int j = 0; j <= n; ++j) ccols.push_back(&basis->c[static_cast<std::size_t>(j)]);
    for (int j = 1; j <= n; ++j) scols.push_back(&basis->s[static_cast<std::size_t>(j)]);
    r1 = solve_scaled(ccols, g1, opts.uniform_rounds);
    r2 = solve_scaled(scols, g2, opts.uniform_rounds);
    if (r1.full_rank && r2.full_rank) {
      k.N = n;
      break;
    }
  }
  if (k.N != N) {
    k.warnings.push_back("rank deficient least-squares system at N = " + std::to_string(N) + "; reduced to N = " +
                         std::to_string(k.N));
  }
  k.a = r1.coef;
  k.b.assign(static_cast<std::size_t>(k.N) + 1, 0.0);
  for (int j = 1; j <= k.N; ++j) k.b[static_cast<std::size_t>(j)] = r2.coef[static_cast<std::size_t>(j - 1)];
  k.eps1 = r1.max_residual;
  k.eps2 = r2.max_residual;
  k.condition1 = r1.condition;
  k.condition2 = r2.condition;
  k.bound_constant = 3.0 * bessel_i0(k.segment * std::sqrt(q.max_norm()));
  k.P = assemble(basis->powers(), k.N, k.a, k.b, k.a[0], 1.0);
  k.basis = std::move(basis);
  return k;
}

GridFunction transmute(const KernelApproximation& k, const GridFunction& v, Extension ext) {
  const Grid& g = k.grid();
  if (!(v.grid() == g)) throw DomainError("transmute: input lives on a different grid");
  const double hstep = g.step();
  std::vector<cplx> out(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    cplx integral = 0.0;
    if (k.mode == Mode::full) {
      const auto sp = symmetric_span(g, i);
      const auto w = quad::definite_weights(sp.count);
      for (int l = 0; l <= sp.count; ++l) {
        const int j = sp.lo + l;
        integral += w[static_cast<std::size_t>(l)] * k.eval_node(i, g.x(j)) * v[j];
      }
      integral *= sp.sign * hstep;
    } else {
      const double sgn = ext == Extension::even ? 1.0 : -1.0;
      const auto w = quad::definite_weights(i);
      for (int l = 0; l <= i; ++l) {
        const double t = g.x(l);
        integral += w[static_cast<std::size_t>(l)] * (k.eval_node(i, t) + sgn * k.eval_node(i, -t)) * v[l];
      }
      integral *= hstep;
    }
    (void)x;
    out[static_cast<std::size_t>(i)] = v[i] + integral;
  }
  return GridFunction(g, std::move(out));
}

GridFunction transmute(const KernelApproximation& k, const std::function<cplx(double)>& v) {
  const Grid& g = k.grid();
  std::vector<cplx> out(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    const cplx integral =
        x == 0.0 ? cplx(0.0) : quad::gauss_legendre([&](double t) { return k.eval_node(i, t) * v(t); }, -x, x, 8);
    out[static_cast<std::size_t>(i)] = v(x) + integral;
  }
  return GridFunction(g, std::move(out));
}

GridFunction inverse_transmute(const KernelApproximation& k, const GridFunction& u) {
  if (k.mode != Mode::full) throw DomainError("inverse_transmute needs a full-segment kernel");
  const Grid& g = k.grid();
  if (!(u.grid() == g)) throw DomainError("inverse_transmute: input lives on a different grid");
  std::vector<cplx> out(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) {
    const auto sp = symmetric_span(g, i);
    const auto w = quad::definite_weights(sp.count);
    cplx integral = 0.0;
    for (int l = 0; l <= sp.count; ++l) {
      const int j = sp.lo + l;
      integral += w[static_cast<std::size_t>(l)] * k.eval_node(j, g.x(i)) * u[j];
    }
    out[static_cast<std::size_t>(i)] = u[i] - sp.sign * g.step() * integral;
  }
  return GridFunction(g, std::move(out));
}

DarbouxKernelApproximation build_darboux_kernel(const KernelApproximation& k, const ParticularSolution& fs,
                                                const GridFunction& q) {
  const auto& table = k.basis->table;
  const auto ratio = fs.f_prime / fs.f;
  auto qD = cplx(2.0) * ratio * ratio - q;
  auto basis = std::make_shared<const WaveBasis>(build_traces(table, k.N, true));
  // -b0 v0 - sum b_n v_{2n-1} - sum a_n v_{2n}, b0 := a0
  auto P = assemble(table->psi, k.N, k.b, k.a, k.a[0], -1.0);

  const double M = qD.max_norm();
  const double M1 = (GridFunction::constant(fs.f.grid(), 1.0) / fs.f).max_norm();
  const double M2 = fs.f_prime.max_norm();
  const double b = k.segment;
  const double C = 3.0 * bessel_i0(b * std::sqrt(M));
  const double bound = C * (k.eps1 * M1 + (k.eps1 + k.eps2) * (2.0 * M1 * M2 * b + M1 + 1.0));
  return DarbouxKernelApproximation{k.N, std::move(qD), bound, C, std::move(basis), std::move(P)};
}

DiagonalReport diagonal_diagnostics(const KernelApproximation& k, const GridFunction& q, const GridFunction& Q, cplx h) {
  const Grid& g = k.grid();
  std::vector<GridFunction> dP;
  for (const auto& p : k.P) dP.push_back(differentiate(p));
  const cplx q0 = eval_at(q, 0.0);
  DiagonalReport r;
  for (int i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    auto k1 = [&](double t) { return horner(dP, i, t); };
    auto k2 = [&](double t) {
      cplx acc = 0.0;
      for (int j = static_cast<int>(k.P.size()) - 1; j >= 1; --j) acc = acc * t + cplx(j) * k.P[static_cast<std::size_t>(j)][i];
      return acc;
    };
    const cplx Qi = Q[i];
    r.k1_diag = std::max(r.k1_diag, std::abs(k1(x) - 0.25 * (q[i] + h * Qi + 0.5 * Qi * Qi)));
    r.k2_diag = std::max(r.k2_diag, std::abs(k2(x) - 0.25 * (q[i] - h * Qi - 0.5 * Qi * Qi)));
    r.k1_anti = std::max(r.k1_anti, std::abs(k1(-x) - 0.25 * (q0 + h * Qi)));
    r.k1_k2_anti = std::max(r.k1_k2_anti, std::abs(k1(-x) - k2(-x)));
    r.goursat_diag = std::max(r.goursat_diag, std::abs(k.eval_node(i, x) - 0.5 * h - 0.5 * Qi));
    r.goursat_anti = std::max(r.goursat_anti, std::abs(k.eval_node(i, -x) - 0.5 * h));
  }
  return r;
}

PreimageValues preimage_diagnostics(const KernelFn& K, cplx h, cplx Qx, double x) {
  if (x == 0.0) return {0.5 * h, 0.5 * h};
  const cplx sq = quad::gauss_legendre([&](double t) { return K(t, x) * K(t, x); }, -x, x, 8);
  const cplx mix = quad::gauss_legendre([&](double t) { return K(t, x) * K(t, -x); }, -x, x, 8);
  return {0.5 * h + 0.5 * Qx - sq, 0.5 * h - mix};
}

nlohmann::json to_json(const KernelApproximation& k) {
  auto pair = [](cplx z) { return nlohmann::json::array({z.real(), z.imag()}); };
  nlohmann::json a = nlohmann::json::array();
  nlohmann::json b = nlohmann::json::array();
  for (const auto& z : k.a) a.push_back(pair(z));
  for (std::size_t j = 1; j < k.b.size(); ++j) b.push_back(pair(k.b[j]));
  nlohmann::json j;
  j["N"] = k.N;
  j["requested_N"] = k.requested_N;
  j["h"] = pair(k.h);
  j["mode"] = to_string(k.mode);
  j["b_segment"] = k.segment;
  j["a"] = std::move(a);
  j["b"] = std::move(b);
  j["eps1"] = k.eps1;
  j["eps2"] = k.eps2;
  j["bound_constant"] = k.bound_constant;
  j["error_bound"] = k.error_bound();
  j["condition"] = {k.condition1, k.condition2};
  j["warnings"] = k.warnings;
  return j;
}

}  // namespace tkernel
