#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "connexion/coeff_cache.hpp"
#include "connexion/coeffs.hpp"
#include "connexion/emit.hpp"
#include "connexion/ode.hpp"
#include "connexion/picard.hpp"
#include "connexion/real.hpp"
#include "connexion/series.hpp"
#include "connexion/verify.hpp"

namespace fs = std::filesystem;
using namespace connexion;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

// Usage problems found after parsing (bad ranges, rejected parameters).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::string format = "text";
  unsigned precision = 20;
  std::optional<std::string> cache;
  bool no_cache = false;
  std::string config_file;

  std::size_t coeffs_n = 10;

  std::string astar_method = "all";
  std::size_t astar_n = 200;
  std::optional<std::size_t> n1, n2;

  int picard_k = 20;
  double picard_M = 10;
  double picard_eps0 = 0.01;
  int quad_nodes = 32;
  int grid_nodes = 64;
  std::size_t picard_n = 200;

  ShootOptions shoot;
  bool trajectory = false;
  double stride = 0.01;

  std::string suite = "all";

  std::string plot_what;
  std::string plot_range = "0:1";
  std::size_t plot_n = 100;
  int plot_points = 101;
  double plot_x_max = 10;
  std::optional<double> plot_a;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Flat key=value file; '#' starts a comment line. Keys may use '_' or '-'.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(t.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
    entries.emplace_back(key, trim(t.substr(eq + 1)));
  }
  return entries;
}

// Shortest text that reads back as the same double.
std::string fmt_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

class Runner {
 public:
  explicit Runner(const Settings& s) : s_(s) {
    const auto format = parse_format(s.format);
    if (!format) throw UsageError("unknown format " + s.format);
    format_ = *format;
    if (s.precision < 15) throw UsageError("--precision must be at least 15");
    set_working_precision(std::max(kDefaultPrecisionDigits, s.precision + 10));
  }

  int coeffs() {
    if (s_.coeffs_n < 1) throw UsageError("--n must be at least 1");
    Output out = start("coeffs");
    out.config.emplace_back("n", std::to_string(s_.coeffs_n));
    add_cache_config(out);
    const CoeffTable t = table(s_.coeffs_n, true);
    for (std::size_t n = 1; n <= t.size(); ++n) {
      out.results.push_back({{"n", static_cast<long long>(n)}, {"b", exact(t.b(n))}});
    }
    return finish(out);
  }

  int astar() {
    const std::string& m = s_.astar_method;
    if (m != "series" && m != "sqrt" && m != "bounds" && m != "shoot" && m != "all") {
      throw UsageError("unknown --method " + m + " (series, sqrt, bounds, shoot, all)");
    }
    const std::size_t n1 = s_.n1.value_or(s_.astar_n);
    const std::size_t n2 = s_.n2.value_or(s_.astar_n);
    const bool want_bounds = m == "bounds" || m == "all";
    if (want_bounds && n1 < 2) throw UsageError("--n1 must be at least 2 for the lower bound");
    if (want_bounds && n2 < 1) throw UsageError("--n2 must be at least 1");
    if (s_.astar_n < 1) throw UsageError("--n must be at least 1");

    Output out = start("astar");
    out.config.emplace_back("method", m);
    if (m != "bounds") out.config.emplace_back("n", std::to_string(s_.astar_n));
    if (want_bounds) {
      out.config.emplace_back("n1", std::to_string(n1));
      out.config.emplace_back("n2", std::to_string(n2));
    }
    if (m == "shoot" || m == "all") add_shoot_config(out);
    if (m != "shoot") add_cache_config(out);

    auto row = [&out](const std::string& what, std::size_t n, Quantity q) {
      out.results.push_back({{"estimate", what}, {"n", static_cast<long long>(n)}, {"value", std::move(q)}});
    };
    std::size_t need = m == "bounds" ? 0 : s_.astar_n;
    if (want_bounds) need = std::max({need, n1, n2});
    std::optional<CoeffTable> t;
    if (m != "shoot") t = table(need, false);

    std::optional<SeriesEval> series, sq;
    if (m == "series" || m == "all") {
      series = astar_series(t->truncated(s_.astar_n));
      row("series", s_.astar_n, exact(*series->exact));
      if (series->tail_finite()) row("series_tail_estimate", s_.astar_n, real(series->est_tail, Provenance::Oracle));
    }
    if (m == "sqrt" || m == "all") {
      sq = astar_sqrt(t->truncated(s_.astar_n));
      row("sqrt_radicand", s_.astar_n, exact(*sq->radicand));
      if (sq->domain_signal) {
        out.checks.push_back(CheckRecord{"sqrt-domain", "sqrt formula defined", false, real(sq->value, Provenance::SeriesTruncation),
                                         "radicand > 0", *sq->domain_signal});
      } else {
        row("sqrt", s_.astar_n, real(sq->value, Provenance::SeriesTruncation));
      }
    }
    std::optional<AStarBracket> bracket;
    if (want_bounds) {
      bracket = astar_bounds(*t, n1, n2);
      row("bracket_lower", n1, real(bracket->lower, Provenance::SeriesTruncation));
      row("bracket_lower_squared", n1, exact(bracket->lower_sq));
      row("bracket_upper", n2, exact(bracket->upper));
      row("bracket_width", std::max(n1, n2), real(bracket->width(), Provenance::SeriesTruncation));
    }
    std::optional<ShootResult> shot;
    if (m == "shoot" || m == "all") {
      shot = shoot(s_.shoot);
      row("shoot_midpoint", 0, oracle(shot->midpoint()));
      row("shoot_width", 0, oracle(shot->width()));
    }
    if (m == "all") add_consistency_checks(out, *series, *sq, *bracket, *shot);
    return finish(out);
  }

  int picard() {
    Output out = start("picard");
    const PicardConfig cfg = make_config(s_.picard_M, s_.picard_eps0, s_.quad_nodes, s_.grid_nodes);
    if (s_.picard_k < 1) throw UsageError("--k must be at least 1");
    out.config.emplace_back("k", std::to_string(s_.picard_k));
    out.config.emplace_back("M", fmt_double(cfg.M));
    out.config.emplace_back("eps0", fmt_double(cfg.eps0));
    out.config.emplace_back("eps", fmt_double(cfg.eps));
    out.config.emplace_back("gamma", fmt_double(cfg.gamma));
    out.config.emplace_back("quad-nodes", std::to_string(cfg.quad_nodes));
    out.config.emplace_back("grid-nodes", std::to_string(cfg.grid_nodes));
    out.config.emplace_back("n", std::to_string(s_.picard_n));
    add_cache_config(out);

    const PicardRun<double> run = run_picard(cfg, s_.picard_k);
    for (const ContractionStep& st : run.steps) {
      out.results.push_back({{"step", static_cast<long long>(st.n)},
                             {"sup_diff", oracle(st.sup_diff)},
                             {"bound", oracle(st.bound)},
                             {"ratio", oracle(st.ratio)},
                             {"growth_margin", oracle(st.growth_margin)},
                             {"min_value", oracle(st.min_value)},
                             {"ok", st.ok}});
    }
    const CircleReport circle = complex_circle_check(cfg, s_.picard_k);
    double worst_ratio = 0;
    for (const auto& st : run.steps) worst_ratio = std::max(worst_ratio, st.ratio);
    out.checks.push_back(CheckRecord{"contraction", "real-line steps within M gamma^n", run.ok, oracle(worst_ratio),
                                     "every step ok; ratio <= gamma", "largest ratio shown"});
    out.checks.push_back(CheckRecord{"circle", "complex circle |q_n - 1| <= M|z|", circle.ok,
                                     oracle(circle.worst_growth), "<= 1",
                                     "real-point mismatch " + fmt_double(circle.real_point_mismatch)});
    const CoeffTable t = table(s_.picard_n, false);
    const Real cmp = compare_with_series(run.iterates.back(), t);
    out.checks.push_back(CheckRecord{"series", "-z q_k against P_N on [0, eps]", cmp <= Real("1e-8"),
                                     real(cmp, Provenance::Oracle), "<= 1e-8", ""});
    const double fp = fixed_point_residual(run.iterates.back(), cfg);
    out.checks.push_back(CheckRecord{"fixed-point", "fixed-point residual of q_k", fp <= 1e-8, oracle(fp), "<= 1e-8", ""});
    return finish(out);
  }

  int shoot_cmd() {
    Output out = start("shoot");
    add_shoot_config(out);
    const ShootResult r = shoot(s_.shoot);
    if (s_.trajectory) {
      out.config.emplace_back("stride", fmt_double(s_.stride));
      OdeOptions opts;
      opts.stride = s_.stride;
      opts.stop_margin = s_.shoot.margin;
      const Trajectory traj = integrate_second_order(r.midpoint(), s_.shoot.x_max, s_.shoot.rk_tol, opts);
      add_samples(out, traj);
    } else {
      out.results.push_back({{"a_lo", oracle(r.a_lo)},
                             {"a_hi", oracle(r.a_hi)},
                             {"midpoint", oracle(r.midpoint())},
                             {"width", oracle(r.width())},
                             {"iterations", static_cast<long long>(r.history.size())},
                             {"hit_converged", r.hit_converged}});
    }
    return finish(out);
  }

  int verify() {
    const auto suite = parse_suite(s_.suite);
    if (!suite) throw UsageError("unknown --suite " + s_.suite + " (exact, cross, picard, all)");
    Output out = start("verify");
    out.config.emplace_back("suite", s_.suite);
    const VerifyReport report = run_verify(*suite, s_.precision, [](const std::string& line) {
      std::cerr << line << std::endl;
    });
    out.checks = report.checks;
    const int status = finish(out);
    return status != 0 ? status : (report.all_passed() ? 0 : kExitCheckFailed);
  }

  int plot() {
    Output out = start("plot");
    out.config.emplace_back("what", s_.plot_what);
    if (s_.plot_what == "P") {
      const auto colon = s_.plot_range.find(':');
      if (colon == std::string::npos) throw UsageError("--range must look like a:b");
      const BigRational lo = parse_decimal(s_.plot_range.substr(0, colon));
      const BigRational hi = parse_decimal(s_.plot_range.substr(colon + 1));
      if (lo.raw() < -1 || hi.raw() > 1 || !(lo < hi)) throw UsageError("--range must satisfy -1 <= a < b <= 1");
      if (s_.plot_points < 2) throw UsageError("--points must be at least 2");
      out.config.emplace_back("range", s_.plot_range);
      out.config.emplace_back("n", std::to_string(s_.plot_n));
      out.config.emplace_back("points", std::to_string(s_.plot_points));
      add_cache_config(out);
      const CoeffTable t = table(s_.plot_n, false);
      const BigRational step = (hi - lo) / BigRational(s_.plot_points - 1);
      for (int i = 0; i < s_.plot_points; ++i) {
        const BigRational z = lo + step * BigRational(i);
        const SeriesEval p = eval_P(to_real(z), t);
        out.results.push_back({{"z", exact(z)}, {"P", real(p.value, Provenance::SeriesTruncation)}});
      }
    } else if (s_.plot_what == "bracket") {
      if (s_.plot_n < 2) throw UsageError("--n must be at least 2 for brackets");
      out.config.emplace_back("n", std::to_string(s_.plot_n));
      add_cache_config(out);
      const CoeffTable t = table(s_.plot_n, false);
      for (std::size_t n = 2; n <= s_.plot_n; ++n) {
        const AStarBracket b = astar_bounds(t, n, n);
        out.results.push_back({{"N", static_cast<long long>(n)},
                               {"lower", real(b.lower, Provenance::SeriesTruncation)},
                               {"upper", exact(b.upper)},
                               {"width", real(b.width(), Provenance::SeriesTruncation)}});
      }
    } else if (s_.plot_what == "trajectory") {
      double a = 0;
      if (s_.plot_a) {
        a = *s_.plot_a;
        out.config.emplace_back("a", fmt_double(a));
      } else {
        add_shoot_config(out);
        a = shoot(s_.shoot).midpoint();
      }
      out.config.emplace_back("plot-x-max", fmt_double(s_.plot_x_max));
      out.config.emplace_back("stride", fmt_double(s_.stride));
      OdeOptions opts;
      opts.stride = s_.stride;
      opts.stop_margin = s_.shoot.margin;
      add_samples(out, integrate_second_order(a, s_.plot_x_max, s_.shoot.rk_tol, opts));
    } else {
      throw UsageError("unknown --what " + s_.plot_what + " (P, bracket, trajectory)");
    }
    return finish(out);
  }

 private:
  Output start(const std::string& command) const {
    Output out;
    out.command = command;
    out.config.emplace_back("format", s_.format);
    out.config.emplace_back("precision", std::to_string(s_.precision));
    return out;
  }

  int finish(const Output& out) const {
    std::cout << render(out, format_);
    std::cout.flush();
    return std::cout ? 0 : kExitRuntime;
  }

  std::optional<fs::path> cache_path() const {
    if (s_.no_cache) return std::nullopt;
    if (s_.cache) return fs::path(*s_.cache);
    return default_cache_path();
  }

  void add_cache_config(Output& out) const {
    const auto path = cache_path();
    out.config.emplace_back("cache", path ? path->string() : "none");
  }

  void add_shoot_config(Output& out) const {
    out.config.emplace_back("x-max", fmt_double(s_.shoot.x_max));
    out.config.emplace_back("tol", fmt_double(s_.shoot.tol));
    out.config.emplace_back("margin", fmt_double(s_.shoot.margin));
    out.config.emplace_back("rk-tol", fmt_double(s_.shoot.rk_tol));
    out.config.emplace_back("lo", fmt_double(s_.shoot.lo));
    out.config.emplace_back("hi", fmt_double(s_.shoot.hi));
  }

  // Cache write failures are fatal only when the cache is the point of the
  // command (coeffs); elsewhere they are reported and ignored.
  CoeffTable table(std::size_t n, bool cache_is_output) const {
    std::string write_error;
    const CoeffTable t = load_or_compute(n, cache_path(), &write_error);
    if (!write_error.empty()) {
      if (cache_is_output) throw CacheError(write_error);
      std::cerr << "warning: " << write_error << "\n";
    }
    return t.truncated(n);
  }

  Quantity exact(const BigRational& q) const { return Quantity::from_exact(q, s_.precision); }
  Quantity real(const Real& x, Provenance p) const { return Quantity::from_real(x, p, s_.precision); }
  Quantity oracle(double x) const { return Quantity::from_double(x, Provenance::Oracle, std::min(s_.precision, 17u)); }

  static BigRational parse_decimal(const std::string& text) {
    const std::string t = trim(text);
    const bool neg = !t.empty() && t[0] == '-';
    const std::string body = neg || (!t.empty() && t[0] == '+') ? t.substr(1) : t;
    const auto dot = body.find('.');
    const std::string whole = body.substr(0, dot);
    const std::string frac = dot == std::string::npos ? "" : body.substr(dot + 1);
    const std::string digits = whole + frac;
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("not a decimal number: " + text);
    }
    mpz_class den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    mpz_class num(digits, 10);
    if (neg) num = -num;
    return BigRational(num, den);
  }

  void add_samples(Output& out, const Trajectory& traj) const {
    for (const Sample& s : traj.samples) {
      out.results.push_back({{"x", oracle(s.x)}, {"y", oracle(s.y)}, {"yp", oracle(s.yp)}});
    }
    if (traj.stopped_by) {
      out.checks.push_back(CheckRecord{"trajectory", "trajectory stays near y = 1", false, oracle(traj.samples.back().x),
                                       "no overshoot or undershoot event",
                                       "stopped early: " + to_string(*traj.stopped_by)});
    }
  }

  void add_consistency_checks(Output& out, const SeriesEval& series, const SeriesEval& sq, const AStarBracket& b,
                              const ShootResult& shot) const {
    const Real w = b.width();
    const Real gap = abs(series.value - sq.value);
    out.checks.push_back(CheckRecord{"series-sqrt", "series and sqrt estimates agree", gap <= 10 * w,
                                     real(gap, Provenance::SeriesTruncation), "<= 10 x bracket width", ""});
    const Real mid(shot.midpoint());
    Real outside = 0;
    if (mid < b.lower) outside = b.lower - mid;
    if (mid > b.upper_real) outside = mid - b.upper_real;
    out.checks.push_back(CheckRecord{"shoot-bracket", "shoot midpoint within its width of the bracket",
                                     outside <= Real(shot.width()), real(outside, Provenance::Oracle),
                                     "<= shoot width " + fmt_double(shot.width()),
                                     outside == 0 ? "midpoint inside the bracket" : "midpoint outside the bracket"});
  }

  const Settings& s_;
  Format format_ = Format::Text;
};

void add_common(CLI::App& app, Settings& s) {
  app.add_option("--format", s.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--precision", s.precision, "decimal digits in output (>= 15)")->check(CLI::Range(15u, 100000u));
  app.add_option("--cache", s.cache, "coefficient cache file");
  app.add_flag("--no-cache", s.no_cache, "do not read or write the coefficient cache");
  app.add_option("--config", s.config_file, "flat key=value file; command-line flags win");
}

void add_shoot_options(CLI::App& sub, Settings& s) {
  sub.add_option("--x-max", s.shoot.x_max, "integration end point");
  sub.add_option("--tol", s.shoot.tol, "bisection width");
  sub.add_option("--margin", s.shoot.margin, "classifier band around y = 1");
  sub.add_option("--rk-tol", s.shoot.rk_tol, "Runge-Kutta tolerance");
  sub.add_option("--lo", s.shoot.lo, "undershooting seed slope");
  sub.add_option("--hi", s.shoot.hi, "overshooting seed slope");
}

bool has_long_option(const CLI::App& app, const std::string& key) {
  for (const CLI::Option* opt : app.get_options()) {
    for (const std::string& name : opt->get_lnames()) {
      if (name == key) return true;
    }
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  CLI::App app{"Connection constant a*: exact coefficients, brackets, Picard iterates, shooting"};
  app.require_subcommand(1);
  app.fallthrough();
  add_common(app, s);

  CLI::App* coeffs = app.add_subcommand("coeffs", "exact coefficients b_1..b_N");
  coeffs->add_option("--n", s.coeffs_n, "number of coefficients")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 40));

  CLI::App* astar = app.add_subcommand("astar", "estimates and bracket for a*");
  astar->add_option("--method", s.astar_method, "series, sqrt, bounds, shoot or all");
  astar->add_option("--n", s.astar_n, "truncation order");
  astar->add_option("--n1", s.n1, "coefficients in the lower bound (>= 2)");
  astar->add_option("--n2", s.n2, "coefficients in the upper bound (>= 1)");
  add_shoot_options(*astar, s);

  CLI::App* picard = app.add_subcommand("picard", "q-iteration on [0, eps] and on |z| = eps");
  picard->add_option("--k", s.picard_k, "iterations");
  picard->add_option("--M", s.picard_M, "bound constant");
  picard->add_option("--eps0", s.picard_eps0, "radius before clamping to 1/4");
  picard->add_option("--quad-nodes", s.quad_nodes, "Gauss-Legendre nodes");
  picard->add_option("--grid-nodes", s.grid_nodes, "grid nodes");
  picard->add_option("--n", s.picard_n, "series order for the comparison");

  CLI::App* shoot_cmd = app.add_subcommand("shoot", "bisection shooting for a*");
  add_shoot_options(*shoot_cmd, s);
  shoot_cmd->add_flag("--trajectory", s.trajectory, "emit the midpoint trajectory instead of the bracket");
  shoot_cmd->add_option("--stride", s.stride, "trajectory sample spacing");

  CLI::App* verify = app.add_subcommand("verify", "acceptance checks");
  verify->add_option("--suite", s.suite, "exact, cross, picard or all");

  CLI::App* plot = app.add_subcommand("plot", "plot data as tables");
  plot->add_option("--what", s.plot_what, "P, bracket or trajectory")->required();
  plot->add_option("--range", s.plot_range, "z range a:b for P");
  plot->add_option("--n", s.plot_n, "series order");
  plot->add_option("--points", s.plot_points, "samples for P");
  plot->add_option("--plot-x-max", s.plot_x_max, "trajectory end point");
  plot->add_option("--a", s.plot_a, "initial slope (default: shoot)");
  plot->add_option("--stride", s.stride, "trajectory sample spacing");
  add_shoot_options(*plot, s);

  try {
    app.parse(argc, argv);
    if (!s.config_file.empty()) {
      // Append config entries the command line left unset, then parse again.
      CLI::App* sub = app.get_subcommands().front();
      std::vector<std::string> args(argv + 1, argv + argc);
      for (const auto& [key, value] : read_config_file(s.config_file)) {
        const std::string flag = "--" + key;
        const bool on_sub = has_long_option(*sub, key);
        const bool on_app = has_long_option(app, key);
        if (key == "config") continue;
        if (!on_sub && !on_app) {
          bool elsewhere = false;
          for (const CLI::App* other : app.get_subcommands({})) elsewhere = elsewhere || has_long_option(*other, key);
          if (!elsewhere) throw UsageError("unknown config key " + key);
          continue;
        }
        const CLI::Option* opt = on_sub ? sub->get_option(flag) : app.get_option(flag);
        if (opt->count() == 0) args.push_back(flag + "=" + value);
      }
      std::reverse(args.begin(), args.end());
      app.clear();
      app.parse(args);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    Runner runner(s);
    if (*coeffs) return runner.coeffs();
    if (*astar) return runner.astar();
    if (*picard) return runner.picard();
    if (*shoot_cmd) return runner.shoot_cmd();
    if (*verify) return runner.verify();
    if (*plot) return runner.plot();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: configuration rejected, violated inequality " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SeedBracketError& e) {
    std::cerr << "error: seed bracket misclassified: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
