#include "tkernel/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tkernel/errors.hpp"
#include "tkernel/expression.hpp"

namespace tkernel {

namespace {

constexpr double kVanish = 1e-12;
constexpr double kPicardTol = 1e-13;
// accepted once the update has stalled at rounding level
constexpr double kPicardFloor = 1e-9;
constexpr int kPicardStall = 10;
constexpr int kPicardMaxIter = 1000;

struct PicardResult {
  GridFunction f;
  GridFunction df;
  int iterations;
};

// f = c0 + c1 x + x * int_0^x q f - int_0^x s q f
PicardResult picard(const GridFunction& q, cplx c0, cplx c1) {
  const Grid& g = q.grid();
  const auto x = GridFunction::sample(g, [](double s) { return cplx(s); });
  const auto start = GridFunction::sample(g, [&](double s) { return c0 + c1 * s; });
  GridFunction f = start;
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 1; it <= kPicardMaxIter; ++it) {
    const auto qf = q * f;
    const auto I0 = cumulative_integral(qf, 0.0);
    const auto I1 = cumulative_integral(x * qf, 0.0);
    GridFunction next = start + x * I0 - I1;
    const double diff = max_abs_diff(next, f);
    f = std::move(next);
    const double scale = std::max(1.0, f.max_norm());
    if (diff < best) {
      best = diff;
      stalled = 0;
    } else {
      ++stalled;
    }
    if (diff < kPicardTol * scale || (stalled >= kPicardStall && best < kPicardFloor * scale)) {
      auto df = cumulative_integral(q * f, 0.0) + c1;
      return {std::move(f), std::move(df), it};
    }
  }
  throw NumericalError("Picard iteration for the particular solution did not converge in " +
                       std::to_string(kPicardMaxIter) + " iterations");
}

bool admissible(const GridFunction& f) {
  for (int i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) < kVanish) return false;
  }
  // a real-valued f may cross zero between nodes
  for (int i = 0; i + 1 < f.size(); ++i) {
    const cplx u = f[i];
    const cplx v = f[i + 1];
    const bool real_pair = std::abs(u.imag()) <= kVanish * std::abs(u) && std::abs(v.imag()) <= kVanish * std::abs(v);
    if (real_pair && u.real() * v.real() < 0.0) return false;
  }
  return true;
}

double min_abs(const GridFunction& f) {
  double m = std::abs(f[0]);
  for (int i = 1; i < f.size(); ++i) m = std::min(m, std::abs(f[i]));
  return m;
}

std::vector<std::pair<double, double>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open potential file '" + path + "'");
  std::vector<std::pair<double, double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double xv = 0.0;
    double qv = 0.0;
    if (!(ls >> xv)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (rows.empty()) continue;  // header
      throw ParseError(path + ": malformed line " + std::to_string(lineno), 0);
    }
    if (!(ls >> qv)) throw ParseError(path + ": missing q value on line " + std::to_string(lineno), 0);
    rows.emplace_back(xv, qv);
  }
  if (rows.size() < 4) throw ParseError(path + ": need at least 4 samples", 0);
  std::sort(rows.begin(), rows.end());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].first > rows[i - 1].first)) throw ParseError(path + ": duplicate abscissa", 0);
  }
  return rows;
}

// four-point Lagrange interpolation on scattered, sorted abscissae
std::function<double(double)> cubic_interpolant(std::vector<std::pair<double, double>> rows) {
  return [rows = std::move(rows)](double x) {
    const std::size_t n = rows.size();
    auto it = std::upper_bound(rows.begin(), rows.end(), x, [](double v, const auto& r) { return v < r.first; });
    std::ptrdiff_t i0 = (it - rows.begin()) - 2;
    i0 = std::clamp<std::ptrdiff_t>(i0, 0, static_cast<std::ptrdiff_t>(n) - 4);
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
      double w = 1.0;
      for (int k = 0; k < 4; ++k) {
        if (k == j) continue;
        w *= (x - rows[static_cast<std::size_t>(i0 + k)].first) /
             (rows[static_cast<std::size_t>(i0 + j)].first - rows[static_cast<std::size_t>(i0 + k)].first);
      }
      sum += w * rows[static_cast<std::size_t>(i0 + j)].second;
    }
    return sum;
  };
}

}  // namespace

const char* to_string(Mode m) noexcept { return m == Mode::half ? "half" : "full"; }

Mode mode_from_string(std::string_view s) {
  if (s == "half") return Mode::half;
  if (s == "full") return Mode::full;
  throw DomainError("mode must be 'half' or 'full', got '" + std::string(s) + "'");
}

Grid working_grid(double b, int nodes, Mode mode) {
  if (!(b > 0.0)) throw DomainError("segment length b must be positive");
  return mode == Mode::half ? Grid(0.0, b, nodes) : Grid(-b, b, nodes);
}

Potential potential_from_function(std::function<double(double)> q, double b, int nodes, Mode mode,
                                  std::string source) {
  const Grid g = working_grid(b, nodes, mode);
  auto samples = GridFunction::sample(g, [&](double x) {
    const double v = q(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "potential is not finite at x=" << x;
      throw DomainError(msg.str());
    }
    return cplx(v);
  });
  return Potential{mode, b, std::move(samples), std::nullopt, std::move(q), std::move(source)};
}

Potential parse_potential(std::string_view text, double b, int nodes, Mode mode) {
  auto expr = Expression::parse(text);
  return potential_from_function([expr](double x) { return expr(x); }, b, nodes, mode, std::string(text));
}

Potential load_potential_csv(const std::string& path, double b, int nodes, Mode mode) {
  auto rows = read_csv(path);
  const Grid g = working_grid(b, nodes, mode);
  const double slack = 1e-9 * (g.b() - g.a());
  if (rows.front().first > g.a() + slack || rows.back().first < g.b() - slack) {
    std::ostringstream msg;
    msg << path << ": samples cover [" << rows.front().first << ", " << rows.back().first
        << "] but the working segment is [" << g.a() << ", " << g.b() << "]";
    throw DomainError(msg.str());
  }
  return potential_from_function(cubic_interpolant(std::move(rows)), b, nodes, mode, path);
}

Potential resample(const Potential& p, double b, int nodes) {
  auto out = potential_from_function(p.q_fn, b, nodes, p.mode, p.source);
  out.smoothness = p.smoothness;
  return out;
}

Potential shift_potential(const Potential& p, double c) {
  Potential out = p;
  out.q = p.q - GridFunction::constant(p.grid(), cplx(c));
  out.q_fn = [fn = p.q_fn, c](double x) { return fn(x) - c; };
  std::ostringstream src;
  src.precision(17);
  src << "(" << p.source << ") - " << c;
  out.source = src.str();
  return out;
}

double midrange(const Potential& p) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < p.q.size(); ++i) {
    lo = std::min(lo, p.q[i].real());
    hi = std::max(hi, p.q[i].real());
  }
  return 0.5 * (lo + hi);
}

GridFunction cumulative_potential(const Potential& p) { return cumulative_integral(p.q, 0.0); }

ParticularSolution build_particular_solution(const Potential& p, std::optional<cplx> h_request) {
  if (!p.grid().node_of(0.0)) throw DomainError("x = 0 must be a grid node");
  const auto s1 = picard(p.q, 1.0, 0.0);
  const auto s2 = picard(p.q, 0.0, 1.0);
  const int iters = std::max(s1.iterations, s2.iterations);

  auto combine = [&](cplx h, bool fallback) -> std::optional<ParticularSolution> {
    auto f = s1.f + h * s2.f;
    if (!admissible(f)) return std::nullopt;
    auto df = s1.df + h * s2.df;
    const double m = min_abs(f);
    return ParticularSolution{std::move(f), std::move(df), h, m, fallback, iters};
  };

  if (h_request) {
    if (auto ps = combine(*h_request, false)) return *ps;
  }
  if (auto ps = combine(cplx(0.0, 1.0), h_request.has_value())) return *ps;
  throw NumericalError("no admissible non-vanishing particular solution (|f| < 1e-12)");
}

}  // namespace tkernel
