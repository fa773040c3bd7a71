#include "cli.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "tkernel/tkernel.h"

namespace tkcli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Bc {
  double cos_a = 1.0;
  double sin_a = 0.0;
};

struct Config {
  std::string potential;
  bool csv = false;
  double b = 1.0;
  bool has_h = false;
  tk_complex h{0.0, 0.0};
  int N = 10;
  std::optional<double> auto_target;
  int grid = 2001;
  tk_mode mode = TK_MODE_HALF;
  int uniform_rounds = 0;
  Bc left;
  Bc right;
  double omega_lo = 0.0;
  double omega_hi = 0.0;
  int count = 0;
  double shift = 0.0;
  bool auto_shift = false;
  std::vector<tk_complex> omegas;
  std::vector<double> xs;
  int n_lo = 2;
  int n_hi = 16;
  int n_step = 1;
  std::optional<int> lattice;
  int taylor_N = 4;
  int dump_cells = 40;
  json effective;
};

const std::vector<std::string> kKnownKeys = {"potential", "b",     "h",      "N",         "grid",       "mode",
                                             "uniform_rounds", "bc",  "omega_range", "count", "omega", "x",
                                             "N_range",  "lattice", "taylor_N", "dump_cells", "shift"};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

double number(const json& j, const char* key) {
  if (!j.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(std::string("'") + key + "' must be finite");
  return v;
}

int integer(const json& j, const char* key) {
  if (!j.is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return j.get<int>();
}

tk_complex complex_value(const json& j, const char* key) {
  if (j.is_number()) return {number(j, key), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], key), number(j[1], key)};
  throw ConfigError(std::string("'") + key + "' must be a number or a [re, im] pair");
}

Bc parse_bc(const json& j, const char* key) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "dirichlet") return {1.0, 0.0};
    if (s == "neumann") return {0.0, 1.0};
    throw ConfigError(std::string("'bc.") + key + "' must be dirichlet, neumann or [cos, sin]");
  }
  if (j.is_array() && j.size() == 2) {
    Bc bc{number(j[0], key), number(j[1], key)};
    if (bc.cos_a == 0.0 && bc.sin_a == 0.0) throw ConfigError("boundary coefficients cannot both vanish");
    return bc;
  }
  if (j.is_object() && j.contains("h")) {
    // u'(0) = h u(0)
    const double h = number(j["h"], key);
    const double r = std::hypot(1.0, h);
    return {-h / r, 1.0 / r};
  }
  throw ConfigError(std::string("'bc.") + key + "' must be dirichlet, neumann, [cos, sin] or {\"h\": value}");
}

Config load_config(const std::string& path, std::optional<int> seed_grid, std::optional<std::string> mode) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), k) == kKnownKeys.end()) {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
  if (seed_grid) j["grid"] = *seed_grid;
  if (mode) j["mode"] = *mode;

  Config c;
  if (!j.contains("potential") || !j["potential"].is_string()) throw ConfigError("'potential' (string) is required");
  c.potential = j["potential"].get<std::string>();
  c.csv = c.potential.size() > 4 && c.potential.compare(c.potential.size() - 4, 4, ".csv") == 0;
  if (c.csv && fs::path(c.potential).is_relative()) {
    c.potential = (fs::path(path).parent_path() / c.potential).string();
  }
  if (j.contains("b")) c.b = number(j["b"], "b");
  if (!(c.b > 0.0)) throw ConfigError("'b' must be positive");
  if (j.contains("h")) {
    if (j["h"].is_string()) {
      if (j["h"].get<std::string>() != "auto") throw ConfigError("'h' must be a number, [re, im] or \"auto\"");
    } else {
      c.h = complex_value(j["h"], "h");
      c.has_h = true;
    }
  }
  if (j.contains("N")) {
    if (j["N"].is_string()) {
      const auto s = j["N"].get<std::string>();
      if (s == "auto") {
        c.auto_target = 1e-10;
      } else if (s.rfind("auto(", 0) == 0 && s.back() == ')') {
        try {
          std::size_t used = 0;
          const auto inner = s.substr(5, s.size() - 6);
          c.auto_target = std::stod(inner, &used);
          if (used != inner.size()) throw std::invalid_argument(s);
        } catch (const std::exception&) {
          throw ConfigError("'N' auto target is not a number: " + s);
        }
        if (!(*c.auto_target > 0.0)) throw ConfigError("'N' auto target must be positive");
      } else {
        throw ConfigError("'N' must be an integer, \"auto\" or \"auto(eps)\"");
      }
    } else {
      c.N = integer(j["N"], "N");
      if (c.N < 0 || c.N > 40) throw ConfigError("'N' must lie in 0..40");
    }
  }
  if (j.contains("grid")) c.grid = integer(j["grid"], "grid");
  if (c.grid < 5 || c.grid % 2 == 0) throw ConfigError("'grid' must be odd and at least 5");
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) throw ConfigError("'mode' must be \"half\" or \"full\"");
    const auto m = j["mode"].get<std::string>();
    if (m == "half") {
      c.mode = TK_MODE_HALF;
    } else if (m == "full") {
      c.mode = TK_MODE_FULL;
    } else {
      throw ConfigError("'mode' must be \"half\" or \"full\"");
    }
  }
  if (j.contains("uniform_rounds")) c.uniform_rounds = integer(j["uniform_rounds"], "uniform_rounds");
  if (j.contains("bc")) {
    const auto& bc = j["bc"];
    if (!bc.is_object()) throw ConfigError("'bc' must be an object with 'left' and 'right'");
    if (bc.contains("left")) c.left = parse_bc(bc["left"], "left");
    if (bc.contains("right")) c.right = parse_bc(bc["right"], "right");
  }
  if (j.contains("omega_range")) {
    const auto& r = j["omega_range"];
    if (!r.is_array() || r.size() != 2) throw ConfigError("'omega_range' must be [lo, hi]");
    c.omega_lo = number(r[0], "omega_range");
    c.omega_hi = number(r[1], "omega_range");
    if (!(c.omega_hi > c.omega_lo)) throw ConfigError("'omega_range' must have hi > lo");
  }
  if (j.contains("count")) c.count = integer(j["count"], "count");
  if (j.contains("shift")) {
    if (j["shift"].is_string()) {
      if (j["shift"].get<std::string>() != "auto") throw ConfigError("'shift' must be a number or \"auto\"");
      c.auto_shift = true;
    } else {
      c.shift = number(j["shift"], "shift");
    }
  }
  if (j.contains("omega")) {
    if (!j["omega"].is_array()) throw ConfigError("'omega' must be a list");
    for (const auto& w : j["omega"]) c.omegas.push_back(complex_value(w, "omega"));
  }
  if (j.contains("x")) {
    if (!j["x"].is_array()) throw ConfigError("'x' must be a list");
    for (const auto& x : j["x"]) c.xs.push_back(number(x, "x"));
  }
  if (j.contains("N_range")) {
    const auto& r = j["N_range"];
    if (!r.is_array() || (r.size() != 2 && r.size() != 3)) throw ConfigError("'N_range' must be [lo, hi] or [lo, hi, step]");
    c.n_lo = integer(r[0], "N_range");
    c.n_hi = integer(r[1], "N_range");
    if (r.size() == 3) c.n_step = integer(r[2], "N_range");
    if (c.n_lo < 1 || c.n_hi < c.n_lo || c.n_step < 1) throw ConfigError("'N_range' must satisfy 1 <= lo <= hi, step >= 1");
  }
  if (j.contains("lattice")) {
    c.lattice = integer(j["lattice"], "lattice");
    if (*c.lattice < 0) throw ConfigError("'lattice' must be non-negative");
  }
  if (j.contains("taylor_N")) c.taylor_N = integer(j["taylor_N"], "taylor_N");
  if (c.taylor_N < 0) throw ConfigError("'taylor_N' must be non-negative");
  if (j.contains("dump_cells")) c.dump_cells = integer(j["dump_cells"], "dump_cells");
  if (c.dump_cells < 1) throw ConfigError("'dump_cells' must be positive");
  c.effective = j;
  return c;
}

// maps library status to the tool's failure classes
void check(tk_status s) {
  if (s == TK_OK) return;
  const std::string msg = tk_last_error();
  switch (s) {
    case TK_ERR_NUMERICAL:
    case TK_ERR_INTERNAL:
      throw NumericalFailure(msg);
    default:
      throw ConfigError(msg);
  }
}

struct ProblemHandle {
  tk_problem* p = nullptr;
  ~ProblemHandle() { tk_problem_free(p); }
};

struct KernelHandle {
  tk_kernel* k = nullptr;
  ~KernelHandle() { tk_kernel_free(k); }
};

std::string read_json(tk_status (*fn)(const tk_kernel*, char*, size_t, size_t*), const tk_kernel* k) {
  size_t needed = 0;
  const tk_status s = fn(k, nullptr, 0, &needed);
  if (s != TK_ERR_BUFFER) check(s);
  std::string buf(needed, '\0');
  check(fn(k, buf.data(), buf.size(), &needed));
  buf.resize(needed - 1);
  return buf;
}

json tolerances() {
  return {{"particular_solution_picard", 1e-13},
          {"eigenvalue_bc_residual", 1e-12},
          {"spps_term", 1e-15},
          {"ode_oracle", 1e-13},
          {"kernel_oracle_picard", 1e-12}};
}

class Run {
 public:
  Run(Config c, std::string command, fs::path out)
      : c_(std::move(c)), command_(std::move(command)), out_(std::move(out)) {
    hash_ = fnv1a_hex(c_.effective.dump());
  }

  json meta() const {
    return {{"config_hash", hash_}, {"tool_version", tk_version()}, {"command", command_}, {"tolerances", tolerances()}};
  }

  void write_json(const std::string& name, json body) const {
    body["meta"] = meta();
    std::ofstream o(out_ / name);
    if (!o) throw ConfigError("cannot write " + (out_ / name).string());
    o << body.dump(2) << "\n";
  }

  std::ofstream open_csv(const std::string& name) const {
    std::ofstream o(out_ / name);
    if (!o) throw ConfigError("cannot write " + (out_ / name).string());
    o << "# config_hash=" << hash_ << " tool_version=" << tk_version() << " command=" << command_ << "\n";
    o << "# tolerances " << tolerances().dump() << "\n";
    return o;
  }

  tk_problem* problem() {
    if (!problem_.p) {
      if (c_.csv) {
        check(tk_problem_from_csv(c_.potential.c_str(), c_.b, c_.grid, c_.mode, &problem_.p));
      } else {
        check(tk_problem_from_expression(c_.potential.c_str(), c_.b, c_.grid, c_.mode, &problem_.p));
      }
    }
    return problem_.p;
  }

  tk_kernel* kernel() {
    if (!kernel_.k) {
      if (c_.auto_target) {
        check(tk_kernel_fit_auto(problem(), c_.has_h, c_.h, *c_.auto_target, 24, &kernel_.k));
      } else {
        check(tk_kernel_fit(problem(), c_.has_h, c_.h, c_.N, c_.uniform_rounds, &kernel_.k));
      }
    }
    return kernel_.k;
  }

  int kernel_order() {
    tk_kernel_info info{};
    check(tk_kernel_get_info(kernel(), &info));
    return info.N;
  }

  std::optional<int> oracle_lattice() const {
    if (c_.mode != TK_MODE_HALF) return std::nullopt;
    const int intervals = c_.grid - 1;
    if (c_.lattice) {
      if (*c_.lattice == 0) return std::nullopt;
      return c_.lattice;
    }
    for (int L = std::min(1000, intervals); L >= 8; --L) {
      if (L % 2 == 0 && intervals % L == 0) return L;
    }
    return std::nullopt;
  }

  json oracle_report() {
    const auto L = oracle_lattice();
    if (!L) return nullptr;
    double err = 0.0;
    int it = 0;
    check(tk_oracle_compare(kernel(), *L, &err, &it));
    tk_kernel_info info{};
    check(tk_kernel_get_info(kernel(), &info));
    return {{"lattice", *L}, {"max_error", err}, {"picard_iterations", it}, {"error_bound", info.error_bound},
            {"within_bound", err <= info.error_bound}};
  }

  void fit() {
    auto kj = json::parse(read_json(tk_kernel_json, kernel()));
    write_json("kernel.json", std::move(kj));
    auto dj = json::parse(read_json(tk_diagnostics_json, kernel()));
    dj["oracle"] = oracle_report();
    write_json("diagnostics.json", std::move(dj));
  }

  void solve() {
    if (c_.omegas.empty()) throw ConfigError("'solve' needs an 'omega' list");
    std::vector<double> xs = c_.xs;
    if (xs.empty()) {
      const double a = c_.mode == TK_MODE_FULL ? -c_.b : 0.0;
      for (int i = 0; i <= 100; ++i) xs.push_back(a + (c_.b - a) * i / 100.0);
    }
    auto o = open_csv("solve.csv");
    o << "omega_re,omega_im,x,c_re,c_im,s_re,s_im,dc_re,dc_im,ds_re,ds_im\n";
    for (const auto& w : c_.omegas) {
      for (double x : xs) {
        tk_complex cc, ss, dc, ds;
        check(tk_solve(kernel(), w, x, &cc, &ss));
        check(tk_solve_derivatives(kernel(), w, x, &dc, &ds));
        o << fmt(w.re) << ',' << fmt(w.im) << ',' << fmt(x) << ',' << fmt(cc.re) << ',' << fmt(cc.im) << ','
          << fmt(ss.re) << ',' << fmt(ss.im) << ',' << fmt(dc.re) << ',' << fmt(dc.im) << ',' << fmt(ds.re) << ','
          << fmt(ds.im) << '\n';
      }
    }
  }

  void eigs() {
    if (!(c_.omega_hi > c_.omega_lo)) throw ConfigError("'eigs' needs 'omega_range'");
    if (c_.auto_target) throw ConfigError("'eigs' needs an integer 'N'");
    double shift = c_.shift;
    if (c_.auto_shift) check(tk_problem_midrange(problem(), &shift));
    tk_spectral_problem sp{c_.left.cos_a, c_.left.sin_a, c_.right.cos_a, c_.right.sin_a,
                           c_.omega_lo,   c_.omega_hi,   c_.count,       shift};
    std::vector<double> w(4096), l(4096), r(4096);
    size_t found = 0;
    const tk_status s = tk_eigenvalues(problem(), &sp, c_.N, w.data(), l.data(), r.data(), w.size(), &found);
    if (s == TK_ERR_BUFFER) {
      w.resize(found);
      l.resize(found);
      r.resize(found);
      check(tk_eigenvalues(problem(), &sp, c_.N, w.data(), l.data(), r.data(), w.size(), &found));
    } else {
      check(s);
    }
    auto o = open_csv("eigs.csv");
    o << "index,omega,lambda,bc_residual\n";
    json arr = json::array();
    for (size_t i = 0; i < found; ++i) {
      o << i + 1 << ',' << fmt(w[i]) << ',' << fmt(l[i]) << ',' << fmt(r[i]) << '\n';
      arr.push_back({{"index", i + 1}, {"omega", w[i]}, {"lambda", l[i]}, {"bc_residual", r[i]}});
    }
    write_json("eigs.json", {{"N", c_.N}, {"shift", shift}, {"eigenvalues", std::move(arr)}});
  }

  void kernel_dump() {
    auto kj = json::parse(read_json(tk_kernel_json, kernel()));
    kj["oracle"] = oracle_report();
    write_json("kernel.json", std::move(kj));
    const int M = c_.dump_cells;
    const double d = c_.b / M;
    auto o = open_csv("kernel_lattice.csv");
    o << "x,t,K_re,K_im\n";
    for (int i = 0; i <= M; ++i) {
      for (int j = 0; i + j <= M; ++j) {
        const double x = (i + j) * d;
        const double t = (i - j) * d;
        tk_complex v;
        check(tk_kernel_eval(kernel(), x, t, &v));
        o << fmt(x) << ',' << fmt(t) << ',' << fmt(v.re) << ',' << fmt(v.im) << '\n';
      }
    }
  }

  void taylor() {
    const int N = c_.taylor_N;
    std::vector<tk_complex> a(static_cast<size_t>(N) + 1), b(static_cast<size_t>(N) + 1);
    check(tk_taylor(problem(), c_.h, N, a.data(), b.data(), a.size()));
    json ja = json::array(), jb = json::array();
    for (int n = 0; n <= N; ++n) {
      ja.push_back({a[static_cast<size_t>(n)].re, a[static_cast<size_t>(n)].im});
      jb.push_back({b[static_cast<size_t>(n)].re, b[static_cast<size_t>(n)].im});
    }
    write_json("taylor.json", {{"N", N},
                               {"h", {c_.h.re, c_.h.im}},
                               {"alpha", {{"F", "h/2 + Q/4"}, {"coefficients", std::move(ja)}}},
                               {"beta", {{"F", "Q/4"}, {"coefficients", std::move(jb)}}}});
  }

  void converge() {
    const int L = c_.lattice.value_or(0);
    const size_t cap = static_cast<size_t>((c_.n_hi - c_.n_lo) / c_.n_step + 1);
    std::vector<tk_study_row> rows(cap);
    size_t count = 0;
    double slope = 0.0;
    check(tk_convergence_study(problem(), c_.h, c_.n_lo, c_.n_hi, c_.n_step, L, rows.data(), rows.size(), &count,
                               &slope));
    auto o = open_csv("study.csv");
    o << "N,eps1,eps2,kernel_error,bound\n";
    json arr = json::array();
    for (size_t i = 0; i < count; ++i) {
      const auto& r = rows[i];
      o << r.N << ',' << fmt(r.eps1) << ',' << fmt(r.eps2) << ',' << fmt(r.kernel_error) << ',' << fmt(r.bound)
        << '\n';
      arr.push_back({{"N", r.N}, {"eps1", r.eps1}, {"eps2", r.eps2}, {"kernel_error", r.kernel_error},
                     {"bound", r.bound}});
    }
    write_json("study.json", {{"slope", slope}, {"rows", std::move(arr)}});
  }

  bool verify() {
    const int N = c_.auto_target ? kernel_order() : c_.N;
    size_t needed = 0;
    const tk_status s = tk_verify_json(problem(), c_.h, std::max(N, 2), nullptr, 0, &needed);
    if (s != TK_ERR_BUFFER) check(s);
    std::string buf(needed, '\0');
    check(tk_verify_json(problem(), c_.h, std::max(N, 2), buf.data(), buf.size(), &needed));
    buf.resize(needed - 1);
    auto j = json::parse(buf);
    const bool ok = j["pass"].get<bool>();
    write_json("verify.json", std::move(j));
    return ok;
  }

 private:
  Config c_;
  std::string command_;
  fs::path out_;
  std::string hash_;
  ProblemHandle problem_;
  KernelHandle kernel_;
};

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Transmutation kernel approximation for Schroedinger equations", "tkernel"};
  std::string config_path;
  std::string out_dir = ".";
  bool verify = false;
  std::optional<int> seed_grid;
  std::optional<std::string> mode;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--verify", verify, "run the invariant checks on the configured problem");
  app.add_option("--seed-grid", seed_grid, "override the grid node count");
  app.add_option("--mode", mode, "override the segment mode")->check(CLI::IsMember({"half", "full"}));
  app.require_subcommand(1, 1);
  const std::pair<const char*, const char*> commands[] = {
      {"fit", "kernel coefficients, eps1/eps2 and diagnostics"},
      {"solve", "c_N, s_N and derivatives for the omega list"},
      {"eigs", "eigenvalues in omega_range"},
      {"kernel", "K_N lattice dump and oracle comparison"},
      {"taylor", "generalized Taylor coefficients alpha, beta"},
      {"converge", "eps and kernel error over N_range"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  fs::path out(out_dir);
  try {
    const Config cfg = load_config(config_path, seed_grid, mode);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory " + out.string());
    Run r(cfg, command, out);
    try {
      if (command == "fit") r.fit();
      if (command == "solve") r.solve();
      if (command == "eigs") r.eigs();
      if (command == "kernel") r.kernel_dump();
      if (command == "taylor") r.taylor();
      if (command == "converge") r.converge();
      if (verify && !r.verify()) {
        std::cerr << "tkernel: verification checks failed, see verify.json\n";
        return kExitNumerical;
      }
    } catch (const NumericalFailure& e) {
      r.write_json("diagnostics.json", {{"error", e.what()}, {"status", "numerical_failure"}});
      std::cerr << "tkernel: numerical failure: " << e.what() << "\n";
      return kExitNumerical;
    }
  } catch (const ConfigError& e) {
    std::cerr << "tkernel: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace tkcli
