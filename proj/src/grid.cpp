#include "tkernel/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "tkernel/errors.hpp"

namespace tkernel {

namespace {

void require_same_grid(const GridFunction& l, const GridFunction& r) {
  if (!(l.grid() == r.grid())) throw DomainError("grid functions live on different grids");
}

template <typename Op>
GridFunction zip(const GridFunction& l, const GridFunction& r, Op op) {
  require_same_grid(l, r);
  std::vector<cplx> out(static_cast<std::size_t>(l.size()));
  for (int i = 0; i < l.size(); ++i) out[static_cast<std::size_t>(i)] = op(l[i], r[i]);
  return GridFunction(l.grid(), std::move(out));
}

}  // namespace

Grid::Grid(double a, double b, int n) : a_(a), b_(b), n_(n) {
  if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b)) {
    std::ostringstream msg;
    msg << "grid endpoints must satisfy a < b (got a=" << a << ", b=" << b << ")";
    throw DomainError(msg.str());
  }
  if (n < 3 || n % 2 == 0) throw DomainError("grid node count must be odd and >= 3, got " + std::to_string(n));
}

double Grid::x(int i) const noexcept {
  if (i == n_ - 1) return b_;
  return a_ + i * step();
}

bool Grid::contains(double x) const noexcept {
  const double slack = 1e-12 * (b_ - a_);
  return x >= a_ - slack && x <= b_ + slack;
}

std::optional<int> Grid::node_of(double x) const noexcept {
  if (!contains(x)) return std::nullopt;
  const double pos = (x - a_) / step();
  const double idx = std::round(pos);
  if (std::abs(pos - idx) > 1e-9) return std::nullopt;
  return std::clamp(static_cast<int>(idx), 0, n_ - 1);
}

int Grid::require_node(double x) const {
  if (auto i = node_of(x)) return *i;
  std::ostringstream msg;
  msg << "x=" << x << " is not a node of the grid [" << a_ << ", " << b_ << "] with " << n_ << " nodes";
  throw DomainError(msg.str());
}

GridFunction::GridFunction(Grid grid, std::vector<cplx> values) : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.size()) {
    throw DomainError("grid function has " + std::to_string(values_.size()) + " values for " +
                      std::to_string(grid_.size()) + " nodes");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag())) {
      std::ostringstream msg;
      msg << "non-finite value at node " << i << " (x=" << grid_.x(static_cast<int>(i)) << ")";
      throw NumericalError(msg.str());
    }
  }
}

GridFunction GridFunction::constant(const Grid& grid, cplx value) {
  return GridFunction(grid, std::vector<cplx>(static_cast<std::size_t>(grid.size()), value));
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<cplx(double)>& fn) {
  std::vector<cplx> v(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i < grid.size(); ++i) v[static_cast<std::size_t>(i)] = fn(grid.x(i));
  return GridFunction(grid, std::move(v));
}

double GridFunction::max_norm() const noexcept {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridFunction GridFunction::operator-() const { return cplx(-1.0) * *this; }

GridFunction operator+(const GridFunction& l, const GridFunction& r) {
  return zip(l, r, [](cplx a, cplx b) { return a + b; });
}
GridFunction operator-(const GridFunction& l, const GridFunction& r) {
  return zip(l, r, [](cplx a, cplx b) { return a - b; });
}
GridFunction operator*(const GridFunction& l, const GridFunction& r) {
  return zip(l, r, [](cplx a, cplx b) { return a * b; });
}
GridFunction operator/(const GridFunction& l, const GridFunction& r) {
  return zip(l, r, [](cplx a, cplx b) { return a / b; });
}
GridFunction operator*(cplx s, const GridFunction& g) {
  std::vector<cplx> out(g.values().begin(), g.values().end());
  for (auto& v : out) v *= s;
  return GridFunction(g.grid(), std::move(out));
}
GridFunction operator+(const GridFunction& g, cplx s) {
  std::vector<cplx> out(g.values().begin(), g.values().end());
  for (auto& v : out) v += s;
  return GridFunction(g.grid(), std::move(out));
}

GridFunction GridFunction::map(const std::function<cplx(double, cplx)>& fn) const {
  std::vector<cplx> out(values_.size());
  for (int i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = fn(grid_.x(i), (*this)[i]);
  return GridFunction(grid_, std::move(out));
}

double max_abs_diff(const GridFunction& l, const GridFunction& r) {
  require_same_grid(l, r);
  double m = 0.0;
  for (int i = 0; i < l.size(); ++i) m = std::max(m, std::abs(l[i] - r[i]));
  return m;
}

namespace quad {

void cumulative_simpson(std::span<const cplx> f, double h, std::span<cplx> out) {
  const std::size_t m = f.size();
  if (out.size() != m) throw DomainError("cumulative_simpson: output size mismatch");
  if (m == 0) return;
  out[0] = 0.0;
  if (m == 2) {
    out[1] = 0.5 * h * (f[0] + f[1]);
    return;
  }
  for (std::size_t j = 1; j < m; ++j) {
    if (j % 2 == 0) {
      out[j] = out[j - 2] + (h / 3.0) * (f[j - 2] + 4.0 * f[j - 1] + f[j]);
    } else if (j + 1 < m) {
      out[j] = out[j - 1] + (h / 12.0) * (5.0 * f[j - 1] + 8.0 * f[j] - f[j + 1]);
    } else {
      out[j] = out[j - 1] + (h / 12.0) * (-f[j - 2] + 8.0 * f[j - 1] + 5.0 * f[j]);
    }
  }
}

std::vector<double> definite_weights(int m) {
  if (m < 0) throw DomainError("definite_weights: negative interval count");
  std::vector<double> w(static_cast<std::size_t>(m) + 1, 0.0);
  if (m == 0) return w;
  if (m == 1) {
    w[0] = w[1] = 0.5;
    return w;
  }
  const int even = (m % 2 == 0) ? m : m - 1;
  for (int j = 0; j + 2 <= even; j += 2) {
    w[static_cast<std::size_t>(j)] += 1.0 / 3.0;
    w[static_cast<std::size_t>(j + 1)] += 4.0 / 3.0;
    w[static_cast<std::size_t>(j + 2)] += 1.0 / 3.0;
  }
  if (even != m) {
    w[static_cast<std::size_t>(m - 2)] += -1.0 / 12.0;
    w[static_cast<std::size_t>(m - 1)] += 8.0 / 12.0;
    w[static_cast<std::size_t>(m)] += 5.0 / 12.0;
  }
  return w;
}

cplx simpson(std::span<const cplx> f, double h) {
  if (f.empty()) return 0.0;
  const auto w = definite_weights(static_cast<int>(f.size()) - 1);
  cplx s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += w[j] * f[j];
  return h * s;
}

cplx gauss_legendre(const std::function<cplx(double)>& fn, double a, double b, int panels) {
  using rule = boost::math::quadrature::gauss<double, 30>;
  static const auto& nodes = rule::abscissa();
  static const auto& weights = rule::weights();
  panels = std::max(panels, 1);
  const double width = (b - a) / panels;
  cplx total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    const double half = 0.5 * width;
    cplx s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      s += weights[k] * (fn(mid - half * nodes[k]) + fn(mid + half * nodes[k]));
    }
    total += half * s;
  }
  return total;
}

}  // namespace quad

GridFunction cumulative_integral(const GridFunction& f, double origin) {
  const Grid& g = f.grid();
  const int i0 = g.require_node(origin);
  const int n = g.size();
  const double h = g.step();
  std::vector<cplx> out(static_cast<std::size_t>(n));
  const auto vals = f.values();

  // rightwards from the origin
  {
    const auto len = static_cast<std::size_t>(n - i0);
    quad::cumulative_simpson(vals.subspan(static_cast<std::size_t>(i0), len), h,
                             std::span<cplx>(out).subspan(static_cast<std::size_t>(i0), len));
  }
  // leftwards: integrate the reversed prefix with negative spacing
  if (i0 > 0) {
    const auto len = static_cast<std::size_t>(i0 + 1);
    std::vector<cplx> rev(len), acc(len);
    for (std::size_t k = 0; k < len; ++k) rev[k] = vals[static_cast<std::size_t>(i0) - k];
    quad::cumulative_simpson(rev, -h, acc);
    for (std::size_t k = 1; k < len; ++k) out[static_cast<std::size_t>(i0) - k] = acc[k];
  }
  out[static_cast<std::size_t>(i0)] = 0.0;
  return GridFunction(g, std::move(out));
}

GridFunction differentiate(const GridFunction& f) {
  const Grid& g = f.grid();
  const int n = g.size();
  if (n < 5) throw DomainError("differentiate needs at least 5 nodes");
  const double h = g.step();
  const auto v = f.values();
  std::vector<cplx> d(static_cast<std::size_t>(n));
  auto at = [&](int i) { return v[static_cast<std::size_t>(i)]; };
  const double c = 1.0 / (12.0 * h);
  d[0] = c * (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4));
  d[1] = c * (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4));
  for (int i = 2; i < n - 2; ++i) {
    d[static_cast<std::size_t>(i)] = c * (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2));
  }
  d[static_cast<std::size_t>(n - 2)] =
      -c * (-3.0 * at(n - 1) - 10.0 * at(n - 2) + 18.0 * at(n - 3) - 6.0 * at(n - 4) + at(n - 5));
  d[static_cast<std::size_t>(n - 1)] =
      -c * (-25.0 * at(n - 1) + 48.0 * at(n - 2) - 36.0 * at(n - 3) + 16.0 * at(n - 4) - 3.0 * at(n - 5));
  return GridFunction(g, std::move(d));
}

cplx eval_at(const GridFunction& f, double x) {
  const Grid& g = f.grid();
  if (!g.contains(x)) {
    std::ostringstream msg;
    msg << "eval_at: x=" << x << " outside [" << g.a() << ", " << g.b() << "]";
    throw DomainError(msg.str());
  }
  const double pos = (x - g.a()) / g.step();
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-12) return f[std::clamp(static_cast<int>(nearest), 0, g.size() - 1)];

  const int n = g.size();
  const int width = std::min(4, n);
  int i0 = static_cast<int>(std::floor(pos)) - (width / 2 - 1);
  i0 = std::clamp(i0, 0, n - width);
  cplx sum = 0.0;
  for (int j = 0; j < width; ++j) {
    double w = 1.0;
    for (int k = 0; k < width; ++k) {
      if (k != j) w *= (pos - (i0 + k)) / static_cast<double>(j - k);
    }
    sum += w * f[i0 + j];
  }
  return sum;
}

}  // namespace tkernel
