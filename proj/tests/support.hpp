#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "tkernel/kernel_fit.hpp"
#include "tkernel/spectral.hpp"

namespace tktest {

using tkernel::cplx;

inline tkernel::Potential pot(const std::string& q, double b = 1.0, int nodes = 2001,
                              tkernel::Mode mode = tkernel::Mode::half) {
  return tkernel::parse_potential(q, b, nodes, mode);
}

struct Fitted {
  tkernel::Potential p;
  tkernel::ParticularSolution f;
  tkernel::GridFunction Q;
  std::shared_ptr<const tkernel::PhiPsiTable> table;
  std::shared_ptr<const tkernel::WaveBasis> basis;
  tkernel::KernelApproximation k;
};

inline Fitted fit(const tkernel::Potential& p, std::optional<cplx> h, int N) {
  auto f = tkernel::build_particular_solution(p, h);
  auto table = std::make_shared<const tkernel::PhiPsiTable>(tkernel::build_phi_psi(f, 2 * N + 1));
  auto basis = std::make_shared<const tkernel::WaveBasis>(tkernel::build_traces(table, N));
  auto Q = tkernel::cumulative_potential(p);
  auto k = tkernel::fit_goursat_data(basis, p.q, Q, f.h, N);
  return Fitted{p, std::move(f), std::move(Q), std::move(table), std::move(basis), std::move(k)};
}

inline double max_over(const tkernel::GridFunction& g, const std::function<cplx(double)>& fn) {
  double m = 0.0;
  for (int i = 0; i < g.size(); ++i) m = std::max(m, std::abs(g[i] - fn(g.grid().x(i))));
  return m;
}

}  // namespace tktest
