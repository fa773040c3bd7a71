#include "tkernel/spps.hpp"

#include <algorithm>

#include "tkernel/errors.hpp"

namespace tkernel {

SppsSolution spps_solve(const PhiPsiTable& table, const ParticularSolution& fs, cplx lambda, double tol) {
  if (!(tol > 0.0)) throw DomainError("spps tolerance must be positive");
  if (table.K < 1) throw DomainError("spps needs a formal power table of depth >= 1");
  const auto& phi = table.phi;
  const auto& psi = table.psi;
  const auto ratio = fs.f_prime / fs.f;

  GridFunction y1 = phi[0];
  GridFunction dy1 = fs.f_prime;
  GridFunction y2 = phi[1];
  GridFunction dy2 = ratio * phi[1] + psi[0];

  // c1 = lambda^k/(2k)!, c2 = lambda^k/(2k+1)!
  cplx c1 = 1.0;
  cplx c2 = 1.0;
  double last = std::max(phi[0].max_norm(), phi[1].max_norm());
  int k = 0;
  bool converged = false;
  while (2 * (k + 1) + 1 <= table.K) {
    ++k;
    const auto idx = static_cast<std::size_t>(2 * k);
    c1 *= lambda / (static_cast<double>(2 * k - 1) * (2 * k));
    c2 *= lambda / (static_cast<double>(2 * k) * (2 * k + 1));
    const auto t1 = c1 * phi[idx];
    const auto t2 = c2 * phi[idx + 1];
    y1 = y1 + t1;
    y2 = y2 + t2;
    dy1 = dy1 + c1 * (ratio * phi[idx] + cplx(2 * k) * psi[idx - 1]);
    dy2 = dy2 + c2 * (ratio * phi[idx + 1] + cplx(2 * k + 1) * psi[idx]);
    last = std::max(t1.max_norm(), t2.max_norm());
    if (last < tol) {
      converged = true;
      break;
    }
  }
  if (lambda == cplx(0.0)) {
    converged = true;
    last = 0.0;
  }
  return SppsSolution{lambda, std::move(y1), std::move(y2), std::move(dy1), std::move(dy2), k + 1, last, converged};
}

}  // namespace tkernel
