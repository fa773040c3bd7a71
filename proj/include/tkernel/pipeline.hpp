#pragma once

// End-to-end assembly of a kernel from a potential, plus the JSON reports
// shared by the C interface and the command line tool.

#include <optional>

#include <json.hpp>

#include "tkernel/kernel_fit.hpp"

namespace tkernel {

struct KernelBundle {
  Potential potential;
  ParticularSolution f;
  GridFunction Q;
  KernelApproximation kernel;
  DarbouxKernelApproximation darboux;
};

KernelBundle build_kernel(const Potential& p, std::optional<cplx> h, int N, const FitOptions& opts = {});

/// Increases N from 1 until max(eps1, eps2) < target or N = N_max.
KernelBundle build_kernel_auto(const Potential& p, std::optional<cplx> h, double target, int N_max = 24,
                               const FitOptions& opts = {});

/// Particular solution, conditioning, line identities and Taylor comparison.
nlohmann::json diagnostics_json(const KernelBundle& kb);

/// Invariant checks on the problem at order N: each entry carries the
/// measured value, its tolerance and a pass flag.
nlohmann::json verify_problem(const Potential& p, std::optional<cplx> h, int N);

/// max |K_N - oracle| over the half-square lattice (half mode; L divides the
/// number of grid intervals).
struct OracleComparison {
  double max_error = 0.0;
  int iterations = 0;
  int lattice = 0;
};

OracleComparison compare_with_oracle(const KernelBundle& kb, int L);

/// Largest L <= L_max dividing the grid intervals on [0,b] with L even and
/// L >= 8, or 0.
int default_lattice(const Grid& g, int L_max = 1000);

}  // namespace tkernel
