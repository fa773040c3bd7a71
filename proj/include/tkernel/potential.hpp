#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "tkernel/grid.hpp"

namespace tkernel {

/// half: working segment [0,b]; full: [-b,b].
enum class Mode { half, full };

const char* to_string(Mode m) noexcept;
Mode mode_from_string(std::string_view s);

struct Potential {
  Mode mode = Mode::half;
  double b = 1.0;
  GridFunction q;
  std::optional<int> smoothness;
  /// Pointwise evaluator (the parsed expression, or cubic interpolation of
  /// CSV data). Used by the oracles and to resample onto other grids.
  std::function<double(double)> q_fn;
  std::string source;

  const Grid& grid() const noexcept { return q.grid(); }
  /// max |q| over [0,b] (half) or [-b,b] (full).
  double max_abs() const noexcept { return q.max_norm(); }
};

Grid working_grid(double b, int nodes, Mode mode);

Potential potential_from_function(std::function<double(double)> q, double b, int nodes, Mode mode,
                                  std::string source = "<function>");
Potential parse_potential(std::string_view text, double b, int nodes, Mode mode);
/// Two columns (x, q), optional header line, comma or whitespace separated.
Potential load_potential_csv(const std::string& path, double b, int nodes, Mode mode);

/// Same potential on a different node count / segment.
Potential resample(const Potential& p, double b, int nodes);

/// q - c on the same grid.
Potential shift_potential(const Potential& p, double c);
/// (max q + min q) / 2 of the real part over the grid.
double midrange(const Potential& p);

/// Q(x) = integral of q from 0 to x.
GridFunction cumulative_potential(const Potential& p);

struct ParticularSolution {
  GridFunction f;
  GridFunction f_prime;
  cplx h;
  double min_abs = 0.0;
  /// true when the requested h was rejected and f1 + i f2 was used instead.
  bool fallback = false;
  int iterations = 0;
};

/// Non-vanishing solution of f'' = q f with f(0) = 1. Without a request,
/// f = f1 + i f2; with h_request, f = f1 + h f2 unless that vanishes.
ParticularSolution build_particular_solution(const Potential& p, std::optional<cplx> h_request = std::nullopt);

}  // namespace tkernel
