#include "tkernel/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "tkernel/errors.hpp"

namespace tkernel {

KernelOracle::KernelOracle(const std::function<double(double)>& q, cplx h, double b, int L, double tol, int max_iter)
    : b_(b), L_(L) {
  if (!(b > 0.0)) throw DomainError("kernel oracle: b must be positive");
  if (L < 8 || L % 2 != 0) throw DomainError("kernel oracle: lattice size must be even and >= 8");
  const double d = b / L;
  const auto n = static_cast<std::size_t>(L + 1);
  H_.assign(n * n, 0.0);

  std::vector<cplx> qs(n);
  for (int m = 0; m <= L; ++m) qs[static_cast<std::size_t>(m)] = q(m * d);
  std::vector<cplx> Q(n);
  quad::cumulative_simpson(qs, d, Q);

  std::vector<cplx> H0(n * n, 0.0);
  for (int i = 0; i <= L; ++i) {
    for (int j = 0; i + j <= L; ++j) H0[idx(i, j)] = 0.5 * h + 0.5 * Q[static_cast<std::size_t>(i)];
  }
  H_ = H0;

  std::vector<cplx> G(n * n, 0.0);
  std::vector<cplx> row(n);
  std::vector<cplx> acc(n);
  for (int it = 1; it <= max_iter; ++it) {
    // G(i, j) = int_0^{v_j} q(u_i + b) H(u_i, b) db
    for (int i = 0; i <= L; ++i) {
      const int len = L - i + 1;
      for (int j = 0; j < len; ++j) row[static_cast<std::size_t>(j)] = qs[static_cast<std::size_t>(i + j)] * H_[idx(i, j)];
      if (len == 1) {
        G[idx(i, 0)] = 0.0;
        continue;
      }
      quad::cumulative_simpson(std::span<const cplx>(row.data(), static_cast<std::size_t>(len)), d,
                               std::span<cplx>(acc.data(), static_cast<std::size_t>(len)));
      for (int j = 0; j < len; ++j) G[idx(i, j)] = acc[static_cast<std::size_t>(j)];
    }
    double diff = 0.0;
    for (int j = 0; j <= L; ++j) {
      const int len = L - j + 1;
      for (int i = 0; i < len; ++i) row[static_cast<std::size_t>(i)] = G[idx(i, j)];
      if (len == 1) {
        acc[0] = 0.0;
      } else {
        quad::cumulative_simpson(std::span<const cplx>(row.data(), static_cast<std::size_t>(len)), d,
                                 std::span<cplx>(acc.data(), static_cast<std::size_t>(len)));
      }
      for (int i = 0; i < len; ++i) {
        const cplx next = H0[idx(i, j)] + acc[static_cast<std::size_t>(i)];
        diff = std::max(diff, std::abs(next - H_[idx(i, j)]));
        H_[idx(i, j)] = next;
      }
    }
    iterations_ = it;
    if (diff < tol) {
      converged_ = true;
      break;
    }
  }
}

cplx KernelOracle::eval(double x, double t) const {
  const double slack = 1e-12 * b_;
  if (x > b_ + slack || std::abs(t) > x + slack) throw DomainError("kernel oracle: (x,t) outside |t| <= x <= b");
  const double d = delta();
  const double u = std::clamp(0.5 * (x + t) / d, 0.0, static_cast<double>(L_));
  const double v = std::clamp(0.5 * (x - t) / d, 0.0, static_cast<double>(L_) - u);
  int i = std::min(static_cast<int>(std::floor(u)), L_);
  int j = std::min(static_cast<int>(std::floor(v)), L_ - i);
  const double a = u - i;
  const double c = v - j;
  if (a == 0.0 && c == 0.0) return H(i, j);
  if (i + j + 2 <= L_) {
    return (1 - a) * (1 - c) * H(i, j) + a * (1 - c) * H(i + 1, j) + (1 - a) * c * H(i, j + 1) + a * c * H(i + 1, j + 1);
  }
  // cell cut by the hypotenuse u + v = L: linear on the lower triangle
  const cplx hi = i + 1 + j <= L_ ? H(i + 1, j) : H(i, j);
  const cplx hj = i + j + 1 <= L_ ? H(i, j + 1) : H(i, j);
  return H(i, j) + a * (hi - H(i, j)) + c * (hj - H(i, j));
}

namespace {

// fourth-order first derivative from five equally spaced samples starting at the point
cplx forward5(const std::array<cplx, 5>& f, double d) {
  return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * d);
}

}  // namespace

KernelOracle::LineDerivatives KernelOracle::diagonal() const {
  // t = x  <=>  (u, v) = (x, 0); K1 = (Hu + Hv)/2, K2 = (Hu - Hv)/2
  const double d = delta();
  std::vector<cplx> edge;
  for (int i = 0; i <= L_; ++i) edge.push_back(H(i, 0));
  const auto Hu = differentiate(GridFunction(Grid(0.0, b_, L_ + 1), edge));
  LineDerivatives out;
  for (int m = 0; m + 4 <= L_; ++m) {
    const cplx hv = forward5({H(m, 0), H(m, 1), H(m, 2), H(m, 3), H(m, 4)}, d);
    out.x.push_back(m * d);
    out.k1.push_back(0.5 * (Hu[m] + hv));
    out.k2.push_back(0.5 * (Hu[m] - hv));
  }
  return out;
}

KernelOracle::LineDerivatives KernelOracle::antidiagonal() const {
  // t = -x  <=>  (u, v) = (0, x)
  const double d = delta();
  std::vector<cplx> edge;
  for (int j = 0; j <= L_; ++j) edge.push_back(H(0, j));
  const auto Hv = differentiate(GridFunction(Grid(0.0, b_, L_ + 1), edge));
  LineDerivatives out;
  for (int m = 0; m + 4 <= L_; ++m) {
    const cplx hu = forward5({H(0, m), H(1, m), H(2, m), H(3, m), H(4, m)}, d);
    out.x.push_back(m * d);
    out.k1.push_back(0.5 * (hu + Hv[m]));
    out.k2.push_back(0.5 * (hu - Hv[m]));
  }
  return out;
}

KernelOracle kernel_oracle(const std::function<double(double)>& q, cplx h, double b, int L) {
  KernelOracle k(q, h, b, L);
  if (!k.converged()) throw NumericalError("kernel oracle: successive approximations did not converge");
  return k;
}

OdeSolution ode_oracle(const std::function<double(double)>& q, const Grid& grid, cplx lambda, cplx u0, cplx du0,
                       double tol) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 4>;  // Re u, Im u, Re u', Im u'
  if (tol < 1e-13) throw DomainError("ode_oracle: tolerance below 1e-13");
  const int c = grid.require_node(0.0);

  auto rhs = [&](const State& s, State& ds, double x) {
    const cplx u(s[0], s[1]);
    const cplx a = (q(x) + lambda) * u;
    ds[0] = s[2];
    ds[1] = s[3];
    ds[2] = a.real();
    ds[3] = a.imag();
  };

  std::vector<cplx> u(static_cast<std::size_t>(grid.size()));
  std::vector<cplx> du(u.size());
  auto run = [&](int last, int dir) {
    State s{u0.real(), u0.imag(), du0.real(), du0.imag()};
    std::vector<double> times;
    for (int i = c; i != last + dir; i += dir) times.push_back(grid.x(i));
    if (times.size() < 2) {
      u[static_cast<std::size_t>(c)] = u0;
      du[static_cast<std::size_t>(c)] = du0;
      return;
    }
    std::size_t k = 0;
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<State>());
    ode::integrate_times(stepper, rhs, s, times.begin(), times.end(), dir * grid.step(), [&](const State& st, double) {
      const auto i = static_cast<std::size_t>(c + dir * static_cast<int>(k++));
      u[i] = cplx(st[0], st[1]);
      du[i] = cplx(st[2], st[3]);
    });
  };
  try {
    run(grid.size() - 1, 1);
    if (c > 0) run(0, -1);
  } catch (const ode::step_adjustment_error& e) {
    throw NumericalError(std::string("ode_oracle: step size underflow: ") + e.what());
  } catch (const ode::no_progress_error& e) {
    throw NumericalError(std::string("ode_oracle: no progress: ") + e.what());
  }
  return OdeSolution{GridFunction(grid, std::move(u)), GridFunction(grid, std::move(du))};
}

}  // namespace tkernel
