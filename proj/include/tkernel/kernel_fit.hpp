#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "tkernel/potential.hpp"
#include "tkernel/wave_system.hpp"

namespace tkernel {

/// I0 by its power series (30 terms).
double bessel_i0(double x);

struct FitOptions {
  /// Lawson reweighting rounds towards a minimax fit (0 = plain least squares).
  int uniform_rounds = 0;
};

/// K_N(x,t) = a0 u0 + sum a_n u_{2n-1} + sum b_n u_{2n}, stored as
/// sum_k P_k(x) t^k.
struct KernelApproximation {
  int N = 0;
  int requested_N = 0;
  std::vector<cplx> a;  // a_0..a_N
  std::vector<cplx> b;  // b_0..b_N, b_0 unused (zero)
  double eps1 = 0.0;
  double eps2 = 0.0;
  Mode mode = Mode::half;
  cplx h;
  double segment = 0.0;
  double bound_constant = 0.0;
  double condition1 = 1.0;
  double condition2 = 1.0;
  std::vector<std::string> warnings;
  std::shared_ptr<const WaveBasis> basis;
  std::vector<GridFunction> P;

  const Grid& grid() const { return P.front().grid(); }
  double error_bound() const noexcept { return bound_constant * (eps1 + eps2); }
  cplx eval(double x, double t) const;
  /// Coefficients P_k at node i.
  cplx eval_node(int i, double t) const;
};

KernelApproximation fit_goursat_data(std::shared_ptr<const WaveBasis> basis, const GridFunction& q, const GridFunction& Q,
                                     cplx h, int N, const FitOptions& opts = {});

cplx eval_KN(const KernelApproximation& k, double x, double t);

enum class Extension { even, odd };

/// T_f v on the kernel grid. Full mode: v lives on the full grid. Half mode:
/// v on [0,b] extended evenly or oddly to [-x,0].
GridFunction transmute(const KernelApproximation& k, const GridFunction& v, Extension ext = Extension::even);
/// T_f v for a pointwise v (Gauss-Legendre in t); any mode.
GridFunction transmute(const KernelApproximation& k, const std::function<cplx(double)>& v);

/// u - int_{-x}^{x} K_N(t,x) u(t) dt; full mode only.
GridFunction inverse_transmute(const KernelApproximation& k, const GridFunction& u);

struct DarbouxKernelApproximation {
  int N = 0;
  GridFunction q_D;
  double bound = 0.0;
  double bound_constant = 0.0;
  std::shared_ptr<const WaveBasis> basis;
  std::vector<GridFunction> P;

  cplx eval(double x, double t) const;
  cplx eval_node(int i, double t) const;
};

DarbouxKernelApproximation build_darboux_kernel(const KernelApproximation& k, const ParticularSolution& f,
                                                const GridFunction& q);

struct DiagonalReport {
  double k1_diag = 0.0;     // max |K1(x,x) - (q + hQ + Q^2/2)/4|
  double k2_diag = 0.0;     // max |K2(x,x) - (q - hQ - Q^2/2)/4|
  double k1_anti = 0.0;     // max |K1(x,-x) - (q(0) + hQ)/4|
  double k1_k2_anti = 0.0;  // max |K1(x,-x) - K2(x,-x)|
  double goursat_diag = 0.0;  // max |K(x,x) - h/2 - Q/2|
  double goursat_anti = 0.0;  // max |K(x,-x) - h/2|
};

DiagonalReport diagonal_diagnostics(const KernelApproximation& k, const GridFunction& q, const GridFunction& Q, cplx h);

using KernelFn = std::function<cplx(double, double)>;

struct PreimageValues {
  cplx diag;  // k(x,x)
  cplx anti;  // k(x,-x)
};

/// k(x,+-x) from the kernel representation; K must be defined on the full square.
PreimageValues preimage_diagnostics(const KernelFn& K, cplx h, cplx Qx, double x);

nlohmann::json to_json(const KernelApproximation& k);

}  // namespace tkernel
