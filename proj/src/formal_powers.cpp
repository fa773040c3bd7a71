#include "tkernel/formal_powers.hpp"

#include "tkernel/errors.hpp"

namespace tkernel {

PhiPsiTable build_phi_psi(const ParticularSolution& fs, int K) {
  if (K < 0) throw DomainError("formal power depth must be non-negative");
  const auto& f = fs.f;
  const Grid& g = f.grid();
  const auto one = GridFunction::constant(g, 1.0);
  const auto f2 = f * f;
  const auto inv_f2 = one / f2;

  PhiPsiTable t;
  t.K = K;
  t.phi.reserve(static_cast<std::size_t>(K) + 1);
  t.psi.reserve(static_cast<std::size_t>(K) + 1);

  GridFunction X = one;
  GridFunction Xt = one;
  t.phi.push_back(f);
  t.psi.push_back(one / f);
  for (int n = 1; n <= K; ++n) {
    const bool odd = n % 2 == 1;
    X = cplx(n) * cumulative_integral(X * (odd ? inv_f2 : f2), 0.0);
    Xt = cplx(n) * cumulative_integral(Xt * (odd ? f2 : inv_f2), 0.0);
    if (odd) {
      t.phi.push_back(f * X);
      t.psi.push_back(Xt / f);
    } else {
      t.phi.push_back(f * Xt);
      t.psi.push_back(X / f);
    }
  }
  return t;
}

YTable build_Y_powers(const ParticularSolution& fs, int N) {
  if (N < 0) throw DomainError("Y table order must be non-negative");
  const auto& f = fs.f;
  const Grid& g = f.grid();
  const auto one = GridFunction::constant(g, 1.0);
  const auto inv_f2 = one / (f * f);
  const auto ffp = f * fs.f_prime;

  // f (f g)' = f f' g + f^2 g', and f^2 g' is the integrand of the previous
  // "1/f^2" step.
  YTable t;
  t.N = N;
  t.Y.push_back(one);
  t.Ytilde.push_back(one);
  for (int n = 1; n <= 2 * N + 1; ++n) {
    const bool odd = n % 2 == 1;
    const auto& prev = t.Y.back();
    if (odd) {
      t.Y.push_back(cumulative_integral(prev * inv_f2, 0.0));
    } else {
      const auto& prev2 = t.Y[static_cast<std::size_t>(n - 2)];
      t.Y.push_back(cplx(2.0) * cumulative_integral(ffp * prev + prev2, 0.0));
    }
  }
  for (int n = 1; n <= 2 * N; ++n) {
    const bool odd = n % 2 == 1;
    const auto& prev = t.Ytilde.back();
    if (odd) {
      if (n == 1) {
        t.Ytilde.push_back(cplx(2.0) * cumulative_integral(ffp, 0.0));
      } else {
        const auto& prev2 = t.Ytilde[static_cast<std::size_t>(n - 2)];
        t.Ytilde.push_back(cplx(2.0) * cumulative_integral(ffp * prev + prev2, 0.0));
      }
    } else {
      t.Ytilde.push_back(cumulative_integral(prev * inv_f2, 0.0));
    }
  }
  return t;
}

}  // namespace tkernel
