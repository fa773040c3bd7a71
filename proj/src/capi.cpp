#include "tkernel/tkernel.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>

#include "tkernel/errors.hpp"
#include "tkernel/gen_calculus.hpp"
#include "tkernel/pipeline.hpp"
#include "tkernel/spectral.hpp"

struct tk_problem {
  tkernel::Potential potential;
};

struct tk_kernel {
  tkernel::KernelBundle bundle;
};

namespace {

thread_local std::string last_error;

tk_status fail(tk_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <typename Fn>
tk_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const tkernel::ParseError& e) {
    return fail(TK_ERR_PARSE, e.what());
  } catch (const tkernel::DomainError& e) {
    return fail(TK_ERR_DOMAIN, e.what());
  } catch (const tkernel::NumericalError& e) {
    return fail(TK_ERR_NUMERICAL, e.what());
  } catch (const tkernel::IoError& e) {
    return fail(TK_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TK_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TK_ERR_INTERNAL, e.what());
  }
}

tkernel::cplx to_cplx(tk_complex z) { return {z.re, z.im}; }
tk_complex from_cplx(tkernel::cplx z) { return {z.real(), z.imag()}; }

std::optional<tkernel::cplx> optional_h(int has_h, tk_complex h) {
  if (!has_h) return std::nullopt;
  return to_cplx(h);
}

tkernel::Mode to_mode(tk_mode m) { return m == TK_MODE_FULL ? tkernel::Mode::full : tkernel::Mode::half; }

tk_status write_text(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || cap < s.size() + 1) return fail(TK_ERR_BUFFER, "buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return TK_OK;
}

#define TK_REQUIRE(cond, msg) \
  if (!(cond)) return fail(TK_ERR_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* tk_last_error(void) { return last_error.c_str(); }

const char* tk_version(void) { return "1.0.0"; }

tk_status tk_problem_from_expression(const char* expr, double b, int nodes, tk_mode mode, tk_problem** out) {
  TK_REQUIRE(expr && out, "null argument");
  return guarded([&] {
    *out = new tk_problem{tkernel::parse_potential(expr, b, nodes, to_mode(mode))};
    return TK_OK;
  });
}

tk_status tk_problem_from_csv(const char* path, double b, int nodes, tk_mode mode, tk_problem** out) {
  TK_REQUIRE(path && out, "null argument");
  return guarded([&] {
    *out = new tk_problem{tkernel::load_potential_csv(path, b, nodes, to_mode(mode))};
    return TK_OK;
  });
}

void tk_problem_free(tk_problem* p) { delete p; }

tk_status tk_problem_info(const tk_problem* p, double* b, int* nodes, tk_mode* mode, double* max_abs_q) {
  TK_REQUIRE(p, "null problem");
  if (b) *b = p->potential.b;
  if (nodes) *nodes = p->potential.grid().size();
  if (mode) *mode = p->potential.mode == tkernel::Mode::full ? TK_MODE_FULL : TK_MODE_HALF;
  if (max_abs_q) *max_abs_q = p->potential.max_abs();
  return TK_OK;
}

tk_status tk_kernel_fit(const tk_problem* p, int has_h, tk_complex h, int N, int uniform_rounds, tk_kernel** out) {
  TK_REQUIRE(p && out, "null argument");
  return guarded([&] {
    tkernel::FitOptions opts;
    opts.uniform_rounds = uniform_rounds;
    *out = new tk_kernel{tkernel::build_kernel(p->potential, optional_h(has_h, h), N, opts)};
    return TK_OK;
  });
}

tk_status tk_kernel_fit_auto(const tk_problem* p, int has_h, tk_complex h, double target, int N_max,
                             tk_kernel** out) {
  TK_REQUIRE(p && out, "null argument");
  return guarded([&] {
    *out = new tk_kernel{tkernel::build_kernel_auto(p->potential, optional_h(has_h, h), target, N_max)};
    return TK_OK;
  });
}

void tk_kernel_free(tk_kernel* k) { delete k; }

tk_status tk_kernel_get_info(const tk_kernel* k, tk_kernel_info* info) {
  TK_REQUIRE(k && info, "null argument");
  const auto& K = k->bundle.kernel;
  info->N = K.N;
  info->requested_N = K.requested_N;
  info->eps1 = K.eps1;
  info->eps2 = K.eps2;
  info->bound_constant = K.bound_constant;
  info->error_bound = K.error_bound();
  info->darboux_bound = k->bundle.darboux.bound;
  info->h = from_cplx(K.h);
  info->fallback_f = k->bundle.f.fallback ? 1 : 0;
  info->warnings = static_cast<int>(K.warnings.size());
  return TK_OK;
}

tk_status tk_kernel_coefficients(const tk_kernel* k, tk_complex* a, tk_complex* b, size_t cap) {
  TK_REQUIRE(k && a && b, "null argument");
  const auto& K = k->bundle.kernel;
  const auto n = static_cast<size_t>(K.N) + 1;
  if (cap < n) return fail(TK_ERR_BUFFER, "coefficient arrays need N+1 entries");
  for (size_t i = 0; i < n; ++i) {
    a[i] = from_cplx(K.a[i]);
    b[i] = from_cplx(K.b[i]);
  }
  return TK_OK;
}

tk_status tk_kernel_eval(const tk_kernel* k, double x, double t, tk_complex* out) {
  TK_REQUIRE(k && out, "null argument");
  return guarded([&] {
    if (std::abs(t) > std::abs(x) * (1.0 + 1e-12) + 1e-14) {
      throw tkernel::DomainError("kernel evaluated outside |t| <= |x|");
    }
    *out = from_cplx(k->bundle.kernel.eval(x, t));
    return TK_OK;
  });
}

tk_status tk_solve(const tk_kernel* k, tk_complex omega, double x, tk_complex* c, tk_complex* s) {
  TK_REQUIRE(k && c && s, "null argument");
  return guarded([&] {
    const auto r = tkernel::eval_cN_sN(k->bundle.kernel, to_cplx(omega), x);
    *c = from_cplx(r.c);
    *s = from_cplx(r.s);
    return TK_OK;
  });
}

tk_status tk_solve_derivatives(const tk_kernel* k, tk_complex omega, double x, tk_complex* dc, tk_complex* ds) {
  TK_REQUIRE(k && dc && ds, "null argument");
  return guarded([&] {
    const auto& kb = k->bundle;
    const auto r = tkernel::eval_derivatives(kb.kernel, kb.darboux, kb.f, to_cplx(omega), x);
    *dc = from_cplx(r.c);
    *ds = from_cplx(r.s);
    return TK_OK;
  });
}

tk_status tk_problem_midrange(const tk_problem* p, double* c) {
  TK_REQUIRE(p && c, "null argument");
  *c = tkernel::midrange(p->potential);
  return TK_OK;
}

tk_status tk_eigenvalues(const tk_problem* p, const tk_spectral_problem* sp, int N, double* omega, double* lambda,
                         double* bc_residual, size_t cap, size_t* found) {
  TK_REQUIRE(p && sp && omega && found, "null argument");
  TK_REQUIRE(std::isfinite(sp->shift), "shift must be finite");
  return guarded([&] {
    tkernel::SpectralProblem s;
    s.left = {sp->left_cos, sp->left_sin};
    s.right = {sp->right_cos, sp->right_sin};
    s.omega_lo = sp->omega_lo;
    s.omega_hi = sp->omega_hi;
    s.count = sp->count;
    s.shift = sp->shift;
    const auto hbc = tkernel::left_bc_h(s.left);
    const auto pot = sp->shift == 0.0 ? p->potential : tkernel::shift_potential(p->potential, sp->shift);
    const auto kb = tkernel::build_kernel(pot, tkernel::cplx(hbc.value_or(0.0)), N);
    const auto eigs = tkernel::find_eigenvalues(s, kb.kernel, kb.darboux, kb.f, false);
    *found = eigs.size();
    const size_t n = std::min(cap, eigs.size());
    for (size_t i = 0; i < n; ++i) {
      omega[i] = eigs[i].omega.real();
      if (lambda) lambda[i] = eigs[i].lambda.real();
      if (bc_residual) bc_residual[i] = eigs[i].bc_residual;
    }
    if (cap < eigs.size()) return fail(TK_ERR_BUFFER, "more eigenvalues found than fit in the output arrays");
    return TK_OK;
  });
}

tk_status tk_taylor(const tk_problem* p, tk_complex h, int N, tk_complex* alpha, tk_complex* beta, size_t cap) {
  TK_REQUIRE(p && alpha && beta, "null argument");
  TK_REQUIRE(N >= 0, "N must be non-negative");
  if (cap < static_cast<size_t>(N) + 1) return fail(TK_ERR_BUFFER, "coefficient arrays need N+1 entries");
  return guarded([&] {
    const auto& pot = p->potential;
    const auto f = tkernel::build_particular_solution(pot, to_cplx(h));
    const auto Q = tkernel::cumulative_potential(pot);
    const auto F1 = tkernel::cplx(0.25) * Q + 0.5 * f.h;
    const auto F2 = tkernel::cplx(0.25) * Q;
    const auto a = tkernel::taylor_coefficients(F1, tkernel::TaylorKind::c, N, f, pot.q);
    const auto b = tkernel::taylor_coefficients(F2, tkernel::TaylorKind::s, N, f, pot.q);
    for (int n = 0; n <= N; ++n) {
      alpha[n] = from_cplx(a.coef[static_cast<size_t>(n)]);
      beta[n] = from_cplx(b.coef[static_cast<size_t>(n)]);
    }
    return TK_OK;
  });
}

tk_status tk_kernel_json(const tk_kernel* k, char* buf, size_t cap, size_t* needed) {
  TK_REQUIRE(k, "null kernel");
  return guarded([&] { return write_text(tkernel::to_json(k->bundle.kernel).dump(2), buf, cap, needed); });
}

tk_status tk_diagnostics_json(const tk_kernel* k, char* buf, size_t cap, size_t* needed) {
  TK_REQUIRE(k, "null kernel");
  return guarded([&] { return write_text(tkernel::diagnostics_json(k->bundle).dump(2), buf, cap, needed); });
}

tk_status tk_verify_json(const tk_problem* p, tk_complex h, int N, char* buf, size_t cap, size_t* needed) {
  TK_REQUIRE(p, "null problem");
  return guarded([&] {
    return write_text(tkernel::verify_problem(p->potential, to_cplx(h), N).dump(2), buf, cap, needed);
  });
}

tk_status tk_oracle_compare(const tk_kernel* k, int L, double* max_error, int* iterations) {
  TK_REQUIRE(k && max_error, "null argument");
  return guarded([&] {
    const auto r = tkernel::compare_with_oracle(k->bundle, L);
    *max_error = r.max_error;
    if (iterations) *iterations = r.iterations;
    return TK_OK;
  });
}

tk_status tk_convergence_study(const tk_problem* p, tk_complex h, int n_lo, int n_hi, int step, int lattice,
                               tk_study_row* rows, size_t cap, size_t* count, double* slope) {
  TK_REQUIRE(p && count, "null argument");
  return guarded([&] {
    const auto r = tkernel::convergence_study(p->potential, to_cplx(h), n_lo, n_hi, step, lattice);
    *count = r.rows.size();
    if (slope) *slope = r.slope;
    if (!rows || cap < r.rows.size()) return fail(TK_ERR_BUFFER, "study rows do not fit");
    for (size_t i = 0; i < r.rows.size(); ++i) {
      const auto& s = r.rows[i];
      rows[i] = {s.N, s.eps1, s.eps2, s.kernel_error, s.bound};
    }
    return TK_OK;
  });
}

}  // extern "C"
