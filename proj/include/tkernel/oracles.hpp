#pragma once

#include <functional>
#include <vector>

#include "tkernel/grid.hpp"

namespace tkernel {

/// H(u,v) on the lattice u = i d, v = j d, i + j <= L, d = b/L, solving
/// H = h/2 + Q(u)/2 + int_0^u int_0^v q(a+b) H(a,b) db da by successive
/// approximation. K(x,t) = H((x+t)/2, (x-t)/2).
class KernelOracle {
 public:
  KernelOracle(const std::function<double(double)>& q, cplx h, double b, int L, double tol = 1e-12,
               int max_iter = 200);

  double b() const noexcept { return b_; }
  int lattice() const noexcept { return L_; }
  double delta() const noexcept { return b_ / L_; }
  int iterations() const noexcept { return iterations_; }
  bool converged() const noexcept { return converged_; }

  cplx H(int i, int j) const { return H_[idx(i, j)]; }
  /// K at x = (i+j) d, t = (i-j) d.
  cplx at_lattice(int i, int j) const { return H(i, j); }
  /// Bilinear in (u,v); requires |t| <= x <= b.
  cplx eval(double x, double t) const;

  /// Partial derivatives on t = x and t = -x at x_m = m d, m = 0..L-4,
  /// by fourth-order differences on the lattice.
  struct LineDerivatives {
    std::vector<double> x;
    std::vector<cplx> k1;
    std::vector<cplx> k2;
  };
  LineDerivatives diagonal() const;
  LineDerivatives antidiagonal() const;

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * (L_ + 1) + static_cast<std::size_t>(j); }

  double b_;
  int L_;
  int iterations_ = 0;
  bool converged_ = false;
  std::vector<cplx> H_;
};

KernelOracle kernel_oracle(const std::function<double(double)>& q, cplx h, double b, int L);

struct OdeSolution {
  GridFunction u;
  GridFunction du;
};

/// u'' = (q + lambda) u with u(0) = u0, u'(0) = du0, adaptive embedded
/// Runge-Kutta (Fehlberg 7(8)), sampled on the grid nodes.
OdeSolution ode_oracle(const std::function<double(double)>& q, const Grid& grid, cplx lambda, cplx u0, cplx du0,
                       double tol = 1e-13);

}  // namespace tkernel
