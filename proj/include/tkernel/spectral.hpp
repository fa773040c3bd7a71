#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tkernel/kernel_fit.hpp"

namespace tkernel {

/// int_0^x t^k cos(w t) dt and int_0^x t^k sin(w t) dt for k = 0..kmax.
/// S_over_omega holds S_k / w (finite as w -> 0).
struct TrigMoments {
  std::vector<cplx> C;
  std::vector<cplx> S;
  std::vector<cplx> S_over_omega;
};

TrigMoments trig_moments(int kmax, cplx omega, double x);
/// Single (C_k, S_k).
std::pair<cplx, cplx> trig_moment(int k, cplx omega, double x);

struct SolutionPair {
  cplx c;
  cplx s;
};

/// c_N(w,x), s_N(w,x).
SolutionPair eval_cN_sN(const KernelApproximation& k, cplx omega, double x);
/// c_N'(w,x), s_N'(w,x) through the Darboux kernel.
SolutionPair eval_derivatives(const KernelApproximation& k, const DarbouxKernelApproximation& kd,
                              const ParticularSolution& f, cplx omega, double x);

/// u(0) cos a + u'(0) sin a = 0 (and likewise at b).
struct BoundaryCondition {
  double cos_a = 1.0;
  double sin_a = 0.0;
};

BoundaryCondition dirichlet();
BoundaryCondition neumann();

/// h = -cos a / sin a, or nothing for a Dirichlet left end.
std::optional<double> left_bc_h(const BoundaryCondition& bc);

/// Search range in omega (lambda = omega^2). With a nonzero shift the kernel
/// must have been built for q - shift; eigenvalues below the shift are then
/// found on the imaginary axis of the shifted problem.
struct SpectralProblem {
  BoundaryCondition left;
  BoundaryCondition right;
  double omega_lo = 0.0;
  double omega_hi = 0.0;
  int count = 0;
  double shift = 0.0;
};

struct Eigenpair {
  cplx omega;
  cplx lambda;
  GridFunction eigenfunction;
  double bc_residual = 0.0;
  int index = 0;
};

/// Real-omega scan of the characteristic function, secant refinement with
/// bisection safeguard. `f` must be the particular solution the kernel was
/// built from.
std::vector<Eigenpair> find_eigenvalues(const SpectralProblem& sp, const KernelApproximation& k,
                                        const DarbouxKernelApproximation& kd, const ParticularSolution& f,
                                        bool with_eigenfunctions = true);

nlohmann::json to_json(const std::vector<Eigenpair>& eigs);

struct StudyRow {
  int N = 0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double kernel_error = -1.0;  // max |K_N - oracle| on the lattice, -1 if not computed
  double bound = 0.0;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  /// least-squares slope of log max(eps1, eps2) against log N
  double slope = 0.0;
  /// slopes between consecutive rows
  std::vector<double> local_slopes;
};

/// Fits K_N for N = n_lo, n_lo+step, ..., n_hi. lattice > 0 also compares
/// against the successive-approximation kernel on that lattice (it must
/// divide the number of grid intervals on [0,b]).
StudyResult convergence_study(const Potential& p, cplx h, int n_lo, int n_hi, int step = 1, int lattice = 0);

double loglog_slope(const std::vector<double>& n, const std::vector<double>& err);

}  // namespace tkernel
