#pragma once

#include <memory>
#include <vector>

#include "tkernel/formal_powers.hpp"

namespace tkernel {

/// Traces c_n, s_n (n = 0..N) of the generalized wave polynomials built from
/// phi_k, or from psi_k when `darboux` (then they are c~_n, s~_n and the
/// polynomials are v_n).
struct WaveBasis {
  int N = 0;
  bool darboux = false;
  std::vector<GridFunction> c;
  std::vector<GridFunction> s;
  std::shared_ptr<const PhiPsiTable> table;

  const std::vector<GridFunction>& powers() const { return darboux ? table->psi : table->phi; }
  const Grid& grid() const { return c.front().grid(); }
  std::vector<double> c_norms() const;
  std::vector<double> s_norms() const;
};

double binomial(int n, int k);

WaveBasis build_traces(std::shared_ptr<const PhiPsiTable> table, int N, bool darboux = false);

/// u_n(x,t) (v_n for a Darboux basis), n = 0..2N.
cplx eval_wave_poly(const WaveBasis& basis, int n, double x, double t);

}  // namespace tkernel
