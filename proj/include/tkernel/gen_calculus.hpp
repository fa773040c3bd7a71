#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "tkernel/kernel_fit.hpp"

namespace tkernel {

/// gamma1 g = f^2 (g/f)' = f g' - f' g.
GridFunction gamma1(const GridFunction& g, const ParticularSolution& f);

/// gamma2 gamma1 g = (g'(x) - g'(0) - int_0^x q g) / 2.
GridFunction gamma2gamma1(const GridFunction& g, const GridFunction& q);

/// g[j] = (2 gamma2 gamma1)^j [1], j = 0..J.
struct UnitDerivativeTable {
  int J = 0;
  std::vector<GridFunction> g;
};

UnitDerivativeTable unit_derivatives(const GridFunction& q, int J);

enum class TaylorKind { c, s };

/// F ~ sum alpha_n c_n/n! (kind c) or sum beta_n s_n/n! (kind s, coef[0] = 0).
struct TaylorCoefficients {
  TaylorKind kind = TaylorKind::c;
  int N = 0;
  std::vector<cplx> coef;
  std::string description;
};

TaylorCoefficients taylor_coefficients(const GridFunction& F, TaylorKind kind, int N, const ParticularSolution& f,
                                       const GridFunction& q, std::string description = {});

nlohmann::json to_json(const TaylorCoefficients& t);

enum class GammaSign { plus, minus };
enum class GWhich { G1, G2 };

using PointFn = std::function<cplx(double)>;

/// Gamma+ eta = eta(x) + int_{-x}^{x} K(x,t) eta((t+x)/2) dt,
/// Gamma- eta = eta(0) + int_{-x}^{x} K(x,t) eta((t-x)/2) dt.
/// The grid overload needs a full-segment kernel (eta sampled on [-b,b]).
GridFunction apply_Gamma(const KernelApproximation& k, GammaSign sign, const GridFunction& eta);
GridFunction apply_Gamma(const KernelApproximation& k, GammaSign sign, const PointFn& eta);

/// G1 = Gamma+ + Gamma- - f delta, G2 = Gamma+ - Gamma- + delta.
GridFunction apply_G(const KernelApproximation& k, GWhich which, const GridFunction& eta);
GridFunction apply_G(const KernelApproximation& k, GWhich which, const PointFn& eta);

/// Dense discretization of G1 or G2 on the (full) kernel grid.
class GMatrix {
 public:
  GMatrix(const KernelApproximation& k, GWhich which);

  const Eigen::MatrixXcd& matrix() const noexcept { return A_; }
  GridFunction apply(const GridFunction& eta) const;
  GridFunction solve(const GridFunction& eta) const;
  /// Estimated 1-norm condition number.
  double condition() const noexcept { return cond_; }

 private:
  Grid grid_;
  Eigen::MatrixXcd A_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  double cond_ = 1.0;
};

struct GInverse {
  GridFunction value;
  double residual = 0.0;   // max |G value - eta|
  double condition = 1.0;
};

GInverse invert_G(const KernelApproximation& k, GWhich which, const GridFunction& eta);

}  // namespace tkernel
