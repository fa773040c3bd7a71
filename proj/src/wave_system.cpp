#include "tkernel/wave_system.hpp"

#include <cmath>

#include "tkernel/errors.hpp"

namespace tkernel {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

std::vector<double> WaveBasis::c_norms() const {
  std::vector<double> out;
  for (const auto& g : c) out.push_back(g.max_norm());
  return out;
}

std::vector<double> WaveBasis::s_norms() const {
  std::vector<double> out;
  for (const auto& g : s) out.push_back(g.max_norm());
  return out;
}

WaveBasis build_traces(std::shared_ptr<const PhiPsiTable> table, int N, bool darboux) {
  if (!table) throw DomainError("build_traces: no formal power table");
  if (N < 0 || table->K < N) {
    throw DomainError("formal power table depth " + std::to_string(table->K) + " is below the requested order " +
                      std::to_string(N));
  }
  const auto& p = darboux ? table->psi : table->phi;
  const Grid& g = p.front().grid();
  const auto x = GridFunction::sample(g, [](double s) { return cplx(s); });

  WaveBasis w;
  w.N = N;
  w.darboux = darboux;
  w.c.push_back(p[0]);
  w.s.push_back(GridFunction::constant(g, 0.0));
  for (int m = 1; m <= N; ++m) {
    auto c = GridFunction::constant(g, 0.0);
    auto s = GridFunction::constant(g, 0.0);
    auto xk = GridFunction::constant(g, 1.0);
    for (int k = 0; k <= m; ++k) {
      const auto term = binomial(m, k) * (xk * p[static_cast<std::size_t>(m - k)]);
      if (k % 2 == 0) {
        c = c + term;
      } else {
        s = s + term;
      }
      xk = xk * x;
    }
    w.c.push_back(std::move(c));
    w.s.push_back(std::move(s));
  }
  w.table = std::move(table);
  return w;
}

cplx eval_wave_poly(const WaveBasis& basis, int n, double x, double t) {
  if (n < 0 || n > 2 * basis.N) {
    throw DomainError("wave polynomial index " + std::to_string(n) + " outside 0.." + std::to_string(2 * basis.N));
  }
  const auto& p = basis.powers();
  if (n == 0) return eval_at(p[0], x);
  const int m = (n + 1) / 2;
  const int parity = (n % 2 == 1) ? 0 : 1;
  cplx sum = 0.0;
  for (int k = parity; k <= m; k += 2) {
    sum += binomial(m, k) * eval_at(p[static_cast<std::size_t>(m - k)], x) * std::pow(t, k);
  }
  return sum;
}

}  // namespace tkernel
