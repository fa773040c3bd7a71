#ifndef TKERNEL_H
#define TKERNEL_H

/* C interface to the transmutation-kernel library. Every function returns a
   tk_status; on failure tk_last_error() describes the problem (thread-local,
   valid until the next call on the same thread). */

#include <stddef.h>

#if defined(_WIN32)
#define TK_API __declspec(dllexport)
#else
#define TK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  TK_OK = 0,
  TK_ERR_DOMAIN = 1,
  TK_ERR_PARSE = 2,
  TK_ERR_NUMERICAL = 3,
  TK_ERR_IO = 4,
  TK_ERR_ARGUMENT = 5,
  TK_ERR_BUFFER = 6,
  TK_ERR_INTERNAL = 7
} tk_status;

typedef enum { TK_MODE_HALF = 0, TK_MODE_FULL = 1 } tk_mode;

typedef struct tk_problem tk_problem;
typedef struct tk_kernel tk_kernel;

typedef struct {
  double re;
  double im;
} tk_complex;

TK_API const char* tk_last_error(void);
TK_API const char* tk_version(void);

/* Potential q on [0,b] (half) or [-b,b] (full), sampled on `nodes` points
   (odd, >= 5). */
TK_API tk_status tk_problem_from_expression(const char* expr, double b, int nodes, tk_mode mode, tk_problem** out);
TK_API tk_status tk_problem_from_csv(const char* path, double b, int nodes, tk_mode mode, tk_problem** out);
TK_API void tk_problem_free(tk_problem* p);
TK_API tk_status tk_problem_info(const tk_problem* p, double* b, int* nodes, tk_mode* mode, double* max_abs_q);

/* Fit K_N. has_h = 0 lets the library choose the particular solution. */
TK_API tk_status tk_kernel_fit(const tk_problem* p, int has_h, tk_complex h, int N, int uniform_rounds,
                               tk_kernel** out);
/* Smallest N <= N_max with max(eps1, eps2) < target (or N_max). */
TK_API tk_status tk_kernel_fit_auto(const tk_problem* p, int has_h, tk_complex h, double target, int N_max,
                                    tk_kernel** out);
TK_API void tk_kernel_free(tk_kernel* k);

typedef struct {
  int N;
  int requested_N;
  double eps1;
  double eps2;
  double bound_constant;
  double error_bound;
  double darboux_bound;
  tk_complex h;
  int fallback_f;
  int warnings;
} tk_kernel_info;

TK_API tk_status tk_kernel_get_info(const tk_kernel* k, tk_kernel_info* info);
/* a[0..N], b[0..N] (b[0] = 0). cap is the length of each array. */
TK_API tk_status tk_kernel_coefficients(const tk_kernel* k, tk_complex* a, tk_complex* b, size_t cap);
TK_API tk_status tk_kernel_eval(const tk_kernel* k, double x, double t, tk_complex* out);

/* c_N(w,x), s_N(w,x) and, for the derivative call, c_N'(w,x), s_N'(w,x). */
TK_API tk_status tk_solve(const tk_kernel* k, tk_complex omega, double x, tk_complex* c, tk_complex* s);
TK_API tk_status tk_solve_derivatives(const tk_kernel* k, tk_complex omega, double x, tk_complex* dc,
                                      tk_complex* ds);

/* u(0) cos a + u'(0) sin a = 0 at each end, given as (cos, sin) pairs.
   A nonzero shift fits the kernel for q - shift and adds it back to lambda. */
typedef struct {
  double left_cos;
  double left_sin;
  double right_cos;
  double right_sin;
  double omega_lo;
  double omega_hi;
  int count;
  double shift;
} tk_spectral_problem;

/* (max q + min q) / 2, a good spectral shift for potentials of large range. */
TK_API tk_status tk_problem_midrange(const tk_problem* p, double* c);

/* Builds a kernel of order N whose h matches the left condition, then scans.
   Writes up to cap roots; *found gets the number located. omega is the real
   part of sqrt(lambda); lambda and bc_residual may be null. */
TK_API tk_status tk_eigenvalues(const tk_problem* p, const tk_spectral_problem* sp, int N, double* omega,
                                double* lambda, double* bc_residual, size_t cap, size_t* found);

/* alpha_0..alpha_N of h/2 + Q/4 and beta_0..beta_N of Q/4 (beta_0 = 0). */
TK_API tk_status tk_taylor(const tk_problem* p, tk_complex h, int N, tk_complex* alpha, tk_complex* beta,
                           size_t cap);

/* JSON documents. If cap is too small, *needed receives the required size
   (including the terminator) and TK_ERR_BUFFER is returned. */
TK_API tk_status tk_kernel_json(const tk_kernel* k, char* buf, size_t cap, size_t* needed);
TK_API tk_status tk_diagnostics_json(const tk_kernel* k, char* buf, size_t cap, size_t* needed);
/* Runs the module invariant checks on the problem at order N. */
TK_API tk_status tk_verify_json(const tk_problem* p, tk_complex h, int N, char* buf, size_t cap, size_t* needed);

/* max |K_N - oracle| over the half-square lattice with L cells per side
   (L must divide the number of grid intervals on [0,b]). */
TK_API tk_status tk_oracle_compare(const tk_kernel* k, int L, double* max_error, int* iterations);

typedef struct {
  int N;
  double eps1;
  double eps2;
  double kernel_error;
  double bound;
} tk_study_row;

TK_API tk_status tk_convergence_study(const tk_problem* p, tk_complex h, int n_lo, int n_hi, int step, int lattice,
                                      tk_study_row* rows, size_t cap, size_t* count, double* slope);

#ifdef __cplusplus
}
#endif

#endif
