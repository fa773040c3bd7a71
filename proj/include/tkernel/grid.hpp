#pragma once

// Uniform-grid sampled functions: the carrier for every table in the library.

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace tkernel {

using cplx = std::complex<double>;

/// Uniform grid x_i = a + i*(b-a)/(n-1), i = 0..n-1, with n odd and n >= 3.
class Grid {
 public:
  Grid(double a, double b, int n);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  int size() const noexcept { return n_; }
  double step() const noexcept { return (b_ - a_) / (n_ - 1); }
  double x(int i) const noexcept;

  bool contains(double x) const noexcept;
  /// Index of the node coinciding with x (to 1e-9 of a step), if any.
  std::optional<int> node_of(double x) const noexcept;
  /// Like node_of but throws DomainError when x is not a node.
  int require_node(double x) const;

  bool operator==(const Grid& other) const noexcept = default;

 private:
  double a_;
  double b_;
  int n_;
};

/// Complex samples on a Grid. Immutable once built; all values finite.
class GridFunction {
 public:
  GridFunction(Grid grid, std::vector<cplx> values);

  static GridFunction constant(const Grid& grid, cplx value);
  static GridFunction sample(const Grid& grid, const std::function<cplx(double)>& fn);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const cplx> values() const noexcept { return values_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  cplx operator[](int i) const noexcept { return values_[static_cast<std::size_t>(i)]; }

  double max_norm() const noexcept;

  GridFunction operator-() const;
  friend GridFunction operator+(const GridFunction& l, const GridFunction& r);
  friend GridFunction operator-(const GridFunction& l, const GridFunction& r);
  friend GridFunction operator*(const GridFunction& l, const GridFunction& r);
  friend GridFunction operator/(const GridFunction& l, const GridFunction& r);
  friend GridFunction operator*(cplx s, const GridFunction& g);
  friend GridFunction operator*(const GridFunction& g, cplx s) { return s * g; }
  friend GridFunction operator+(const GridFunction& g, cplx s);
  friend GridFunction operator-(const GridFunction& g, cplx s) { return g + (-s); }

  /// Pointwise map over (x_i, value_i).
  GridFunction map(const std::function<cplx(double, cplx)>& fn) const;

 private:
  Grid grid_;
  std::vector<cplx> values_;
};

/// max_i |l_i - r_i|; grids must agree.
double max_abs_diff(const GridFunction& l, const GridFunction& r);

/// F(x_i) = integral of f from `origin` to x_i. `origin` must be a grid node;
/// F(origin) is exactly zero. Composite Simpson on even prefixes, a three-point
/// Newton-Cotes panel for odd ones.
GridFunction cumulative_integral(const GridFunction& f, double origin);

/// Fourth-order finite differences (central inside, one-sided at the ends).
GridFunction differentiate(const GridFunction& f);

/// Local four-point cubic interpolation; node values are returned as stored.
cplx eval_at(const GridFunction& f, double x);

namespace quad {

/// Cumulative Simpson over equally spaced samples f[0..m-1] with spacing h
/// (h may be negative). out[0] = 0.
void cumulative_simpson(std::span<const cplx> f, double h, std::span<cplx> out);

/// Weights w[0..m] with sum w[j] f[j] approximating the integral over m
/// intervals of unit spacing. Uses composite Simpson; an odd m closes with a
/// backward three-point panel so no sample beyond the last node is touched.
std::vector<double> definite_weights(int m);

/// Integral over m = f.size()-1 intervals of spacing h using definite_weights.
cplx simpson(std::span<const cplx> f, double h);

/// Composite Gauss-Legendre (30 points per panel) of fn over [a,b].
cplx gauss_legendre(const std::function<cplx(double)>& fn, double a, double b, int panels = 1);

}  // namespace quad

}  // namespace tkernel
