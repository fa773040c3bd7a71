#pragma once

#include <vector>

#include "tkernel/grid.hpp"
#include "tkernel/potential.hpp"

namespace tkernel {

/// phi_k = f X^(k) (k odd), f Xt^(k) (k even); psi_k = Xt^(k)/f (k odd),
/// X^(k)/f (k even). Anchor x0 = 0.
struct PhiPsiTable {
  int K = 0;
  std::vector<GridFunction> phi;
  std::vector<GridFunction> psi;
};

PhiPsiTable build_phi_psi(const ParticularSolution& f, int K);

/// Y^(0..2N+1), Yt^(0..2N).
struct YTable {
  int N = 0;
  std::vector<GridFunction> Y;
  std::vector<GridFunction> Ytilde;
};

YTable build_Y_powers(const ParticularSolution& f, int N);

}  // namespace tkernel
