#pragma once

#include "tkernel/formal_powers.hpp"

namespace tkernel {

/// Solutions of y'' - q y = lambda y with y1(0)=1, y1'(0)=h, y2(0)=0, y2'(0)=1.
struct SppsSolution {
  cplx lambda;
  GridFunction y1;
  GridFunction y2;
  GridFunction dy1;
  GridFunction dy2;
  int terms_used = 0;
  double tail_estimate = 0.0;
  /// false when the table ran out before the last term dropped below tol.
  bool converged = true;
};

SppsSolution spps_solve(const PhiPsiTable& table, const ParticularSolution& f, cplx lambda, double tol);

}  // namespace tkernel
