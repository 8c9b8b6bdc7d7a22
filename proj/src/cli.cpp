#include "awgp/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "awgp/errors.hpp"
#include "awgp/fsde.hpp"
#include "awgp/gauss_aw.hpp"
#include "awgp/goldens.hpp"
#include "awgp/io.hpp"
#include "awgp/kernels.hpp"
#include "awgp/mart_approx.hpp"

namespace awgp::cli {

namespace {

using json = io::json;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("'" + s + "' is not a number");
  }
  if (used != s.size()) throw ValidationError("'" + s + "' is not a number");
  return v;
}

/// name(arg, arg, ...) -> (name, args)
std::pair<std::string, std::vector<std::string>> parse_call(const std::string& text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos) return {t, {}};
  if (t.back() != ')') throw ValidationError("malformed specification '" + t + "'");
  return {trim(t.substr(0, open)), split(t.substr(open + 1, t.size() - open - 2), ',')};
}

struct KernelOptions {
  double horizon = 1.0;
  double lambda = 1.0;
  FouConvention convention = FouConvention::as_printed;
};

/// mg(H), rl(H), fou(H[, lambda]), brownian, levy, tabulated(path)
VolterraKernel parse_kernel(const std::string& text, const KernelOptions& o) {
  const auto [name, args] = parse_call(text);
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) throw ValidationError("wrong argument count in '" + text + "'");
  };
  if (name == "mg") {
    arity(1, 1);
    return VolterraKernel::molchan_golosov(parse_number(args[0]), o.horizon);
  }
  if (name == "rl") {
    arity(1, 1);
    return VolterraKernel::riemann_liouville(parse_number(args[0]), o.horizon);
  }
  if (name == "fou") {
    arity(1, 2);
    const double lambda = args.size() == 2 ? parse_number(args[1]) : o.lambda;
    return VolterraKernel::fou(parse_number(args[0]), lambda, o.horizon, 64, o.convention);
  }
  if (name == "brownian") {
    arity(0, 0);
    return VolterraKernel::brownian(o.horizon);
  }
  if (name == "levy") {
    arity(0, 0);
    return levy_noncanonical_kernel(o.horizon);
  }
  if (name == "tabulated") {
    arity(1, 1);
    return VolterraKernel::tabulated(load_kernel_table(args[0]), o.horizon);
  }
  throw ValidationError("unknown kernel '" + text + "'");
}

IntensityMeasure parse_measure(const std::string& text) {
  const std::string t = trim(text);
  if (t == "lebesgue") return IntensityMeasure::lebesgue();
  if (t == "cantor") return IntensityMeasure::cantor();
  throw ValidationError("unknown intensity measure '" + text + "'");
}

GaussianProcessSpec parse_process(const std::string& kernels, const std::string& measures, const KernelOptions& o) {
  const auto ks = split(kernels, ';');
  auto ms = measures.empty() ? std::vector<std::string>(ks.size(), "lebesgue") : split(measures, ';');
  if (ms.size() != ks.size()) {
    throw ValidationError("kernel list and measure list have different lengths");
  }
  std::vector<ProcessComponent> comps;
  for (std::size_t i = 0; i < ks.size(); ++i) comps.push_back({parse_kernel(ks[i], o), parse_measure(ms[i])});
  return GaussianProcessSpec(std::move(comps), o.horizon);
}

/// Flags shared by all commands.
struct Common {
  std::string out_path;
  std::string format = "json";
  unsigned threads = 0;
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::size_t grid = 256;
  std::size_t t_grid = 0;
  std::string scheme = "graded_midpoint";
  bool no_crosscheck = false;
  double crosscheck_tol = 1e-3;

  quad::QuadratureGrid quadrature() const {
    quad::QuadratureGrid g;
    g.s_nodes = grid;
    g.t_nodes = t_grid == 0 ? grid : t_grid;
    g.scheme = quad::scheme_from_string(scheme);
    g.crosscheck = !no_crosscheck;
    g.crosscheck_tol = crosscheck_tol;
    g.threads = threads;
    return g;
  }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out_path, "Output file (default: standard output)");
  sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", c.threads, "Worker count (0: AWGP_THREADS, else 1)");
  sub->add_option("--seed", c.seed, "Random seed")->each([&c](const std::string&) { c.seed_given = true; });
  sub->add_option("--grid", c.grid, "Quadrature nodes in s")->check(CLI::PositiveNumber);
  sub->add_option("--t-grid", c.t_grid, "Quadrature nodes in t (default: --grid)");
  sub->add_option("--scheme", c.scheme, "graded_midpoint or graded_gauss_legendre")
      ->check(CLI::IsMember({"graded_midpoint", "graded_gauss_legendre"}));
  sub->add_flag("--no-crosscheck", c.no_crosscheck, "Skip the second quadrature scheme");
  sub->add_option("--crosscheck-tol", c.crosscheck_tol, "Relative crosscheck tolerance")
      ->check(CLI::PositiveNumber);
}

std::string csv_row(std::initializer_list<double> xs) {
  std::string s;
  for (double x : xs) {
    if (!s.empty()) s += ',';
    s += io::format_double(x);
  }
  return s + "\n";
}

std::string report_csv(const DistanceReport& r) {
  return "distance_squared,trace_term,cross_term\n" + csv_row({r.distance_squared, r.trace_term, r.cross_term});
}

std::string render(const Common& c, const DistanceReport& r) {
  return c.format == "csv" ? report_csv(r) : io::dump(io::to_json(r));
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + c.out_path + "'");
  f << text;
  if (!f) throw ValidationError("failed writing '" + c.out_path + "'");
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

/// Turns a config object into flags placed ahead of the explicit ones, so
/// that explicit flags win under the take-last policy.
std::vector<std::string> config_flags(const json& cfg) {
  std::vector<std::string> out;
  for (const auto& [key, val] : cfg.items()) {
    if (key == "command") continue;
    const std::string flag = "--" + key;
    if (val.is_boolean()) {
      if (val.get<bool>()) out.push_back(flag);
    } else if (val.is_string()) {
      out.push_back(flag);
      out.push_back(val.get<std::string>());
    } else if (val.is_number()) {
      out.push_back(flag);
      out.push_back(val.is_number_float() ? io::format_double(val.get<double>()) : val.dump());
    } else if (val.is_array()) {
      std::string joined;
      for (const auto& e : val) {
        if (!joined.empty()) joined += ';';
        joined += e.is_string() ? e.get<std::string>() : e.dump();
      }
      out.push_back(flag);
      out.push_back(joined);
    } else {
      throw ValidationError("config field '" + key + "' must be a scalar or an array");
    }
  }
  return out;
}

// ---- simulate -------------------------------------------------------------

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario field '") + key + "': " + e.what());
  }
}

/// The i-th entry of a per-process field: `key` as a two-element array, or
/// `key1` / `key2`.
template <class T>
T per_process(const json& j, const std::string& key, int i, T fallback) {
  const std::string k = key + std::to_string(i);
  if (j.contains(k)) return get_or<T>(j, k.c_str(), fallback);
  const std::string plural = key + "s";
  if (j.contains(plural)) {
    const auto& a = j.at(plural);
    if (!a.is_array() || a.size() != 2) throw ValidationError("scenario field '" + plural + "' needs two entries");
    return get_or<T>(json{{"v", a.at(static_cast<std::size_t>(i - 1))}}, "v", fallback);
  }
  return get_or<T>(j, key.c_str(), fallback);
}

FsdeSpec scenario_spec(const json& sc, int i, double horizon) {
  const std::string kind = per_process<std::string>(sc, "kernel", i, "mg");
  const double h = get_or<double>(sc, ("h" + std::to_string(i)).c_str(), 0.5);
  const double lambda = per_process<double>(sc, "lambda", i, 1.0);
  KernelOptions ko;
  ko.horizon = horizon;
  ko.lambda = lambda;
  ko.convention = fou_convention_from_string(get_or<std::string>(sc, "fou_convention", "as_printed"));
  std::string ktext = kind;
  if (kind == "mg" || kind == "rl" || kind == "fou") ktext = kind + "(" + io::format_double(h) + ")";
  FsdeSpec s;
  s.kernel = parse_kernel(ktext, ko);
  s.drift = ScalarFunction::parse(per_process<std::string>(sc, "drift", i, "zero"));
  s.diffusion = ScalarFunction::parse(per_process<std::string>(sc, "diffusion", i, "constant(1)"));
  s.x0 = per_process<double>(sc, "x0", i, 0.0);
  const std::string integ = per_process<std::string>(sc, "integrator", i, "euler");
  if (integ == "euler") {
    s.integrator = Integrator::euler;
  } else if (integ == "lamperti") {
    s.integrator = Integrator::lamperti;
  } else {
    throw ValidationError("unknown integrator '" + integ + "'");
  }
  return s;
}

/// "synchronous", "antithetic", "independent", {"piecewise_constant": [...]},
/// {"tabulated": {"times": [...], "values": [...]}},
/// {"random_piecewise": {"count": 8, "cells": 16, "seed": 1}}
void append_controls(const json& c, double horizon, std::vector<CouplingControl>& out) {
  if (c.is_string()) {
    const auto s = c.get<std::string>();
    if (s == "synchronous") {
      out.push_back(CouplingControl::synchronous());
    } else if (s == "antithetic") {
      out.push_back(CouplingControl::antithetic());
    } else if (s == "independent") {
      out.push_back(CouplingControl::independent());
    } else {
      throw ValidationError("unknown control '" + s + "'");
    }
    return;
  }
  if (!c.is_object() || c.size() != 1) throw ValidationError("control entries are strings or one-key objects");
  const auto& [key, val] = *c.items().begin();
  try {
    if (key == "piecewise_constant") {
      out.push_back(CouplingControl::piecewise_constant(val.get<std::vector<double>>(), horizon));
    } else if (key == "tabulated") {
      out.push_back(CouplingControl::tabulated(val.at("times").get<std::vector<double>>(),
                                               val.at("values").get<std::vector<double>>()));
    } else if (key == "random_piecewise") {
      auto battery = control_battery(horizon, get_or<std::size_t>(val, "count", 8),
                                     get_or<std::size_t>(val, "cells", 16), get_or<std::uint64_t>(val, "seed", 1));
      out.insert(out.end(), battery.begin() + 2, battery.end());
    } else {
      throw ValidationError("unknown control '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError("control '" + key + "': " + e.what());
  }
}

void write_path_dump(const std::string& path, const PathEnsemble& x1, const PathEnsemble& x2) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << "path_id,t,x1,x2\n";
  for (std::size_t p = 0; p < x1.n_paths; ++p) {
    for (std::size_t m = 0; m <= x1.grid.steps; ++m) {
      f << p << ',' << io::format_double(x1.grid.time(m)) << ',' << io::format_double(x1.at(p, m)) << ','
        << io::format_double(x2.at(p, m)) << '\n';
    }
  }
}

// ---- dispatch -------------------------------------------------------------

int classify(const std::exception& e, std::ostream& err) {
  if (const auto* ne = dynamic_cast<const NumericalError*>(&e)) {
    err << "numerical failure: " << ne->what() << "\n";
    return numerical_failure;
  }
  err << "error: " << e.what() << "\n";
  return validation_failure;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  try {
    // Pull --config out first and splice its flags in after the command name.
    std::vector<std::string> args;
    std::optional<json> config;
    for (std::size_t i = 0; i < raw_args.size(); ++i) {
      const std::string& a = raw_args[i];
      if (a == "--config" || a.rfind("--config=", 0) == 0) {
        std::string path;
        if (a == "--config") {
          if (i + 1 >= raw_args.size()) throw ValidationError("--config needs a file");
          path = raw_args[++i];
        } else {
          path = a.substr(9);
        }
        config = load_json(path);
        if (!config->is_object()) throw ValidationError("config file must hold a JSON object");
      } else {
        args.push_back(a);
      }
    }
    if (config) {
      std::vector<std::string> merged;
      std::size_t rest = 0;
      if (!args.empty() && args[0].rfind("-", 0) != 0) {
        merged.push_back(args[0]);
        rest = 1;
      } else if (config->contains("command")) {
        merged.push_back(config->at("command").get<std::string>());
      } else {
        throw ValidationError("no command given");
      }
      for (auto& f : config_flags(*config)) merged.push_back(std::move(f));
      merged.insert(merged.end(), args.begin() + static_cast<std::ptrdiff_t>(rest), args.end());
      args = std::move(merged);
    }

    CLI::App app{"Adapted Wasserstein distances between Gaussian processes", "awgp"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    Common common;

    // aw-fbm
    double h1 = 0.5, h2 = 0.75, horizon = 1.0, lambda = 1.0;
    bool sweep = false;
    double h_min = 0.5, h_max = 0.95;
    std::size_t h_steps = 10;
    auto* fbm = app.add_subcommand("aw-fbm", "Distance between two fractional Brownian motions");
    fbm->add_option("--h1", h1, "Hurst index of the first process");
    fbm->add_option("--h2", h2, "Hurst index of the second process");
    fbm->add_option("--T", horizon, "Horizon");
    fbm->add_flag("--sweep", sweep, "Emit H1,H2,aw_squared over a square grid of Hurst indices");
    fbm->add_option("--h-min", h_min, "Sweep lower Hurst index");
    fbm->add_option("--h-max", h_max, "Sweep upper Hurst index");
    fbm->add_option("--h-steps", h_steps, "Sweep points per axis")->check(CLI::Range(2, 1000));
    add_common(fbm, common);

    // aw-discrete
    std::string cov1, cov2;
    auto* disc = app.add_subcommand("aw-discrete", "Distance between two discrete-time Gaussian laws");
    disc->add_option("--cov1", cov1, "CSV covariance of the first process")->required();
    disc->add_option("--cov2", cov2, "CSV covariance of the second process")->required();
    add_common(disc, common);

    // aw-unit and aw-multi
    std::string k1 = "mg(0.5)", k2 = "mg(0.75)", mu1, mu2, convention = "as_printed";
    auto add_process_flags = [&](CLI::App* sub) {
      sub->add_option("--k1", k1, "Kernel(s) of the first process: mg(H), rl(H), fou(H[,lambda]), brownian, levy, "
                                  "tabulated(path); ';'-separated for aw-multi");
      sub->add_option("--k2", k2, "Kernel(s) of the second process");
      sub->add_option("--mu1", mu1, "Intensity measure(s): lebesgue or cantor (default lebesgue)");
      sub->add_option("--mu2", mu2, "Intensity measure(s) of the second process");
      sub->add_option("--T", horizon, "Horizon");
      sub->add_option("--lambda", lambda, "Default fOU mean reversion");
      sub->add_option("--fou-convention", convention, "as_printed or mild_solution")
          ->check(CLI::IsMember({"as_printed", "mild_solution"}));
      add_common(sub, common);
    };
    auto* unit = app.add_subcommand("aw-unit", "Continuous-time distance, unit multiplicity");
    add_process_flags(unit);
    auto* multi = app.add_subcommand("aw-multi", "Continuous-time distance, finite multiplicity");
    add_process_flags(multi);

    // mart-approx
    double h = 0.7;
    auto* mart = app.add_subcommand("mart-approx", "Best martingale approximation of fBM");
    mart->add_option("--H", h, "Hurst index");
    mart->add_option("--T", horizon, "Horizon");
    add_common(mart, common);

    // simulate
    std::string scenario_path, paths_csv;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo coupling costs for a pair of fractional SDEs");
    sim->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    sim->add_option("--paths-csv", paths_csv, "Write the first 10 paths under the first control");
    add_common(sim, common);

    // check-assumptions
    std::string drift = "zero", diffusion = "constant(1)", kernel = "mg(0.75)", integrator = "euler";
    double x0 = 0.0;
    std::vector<double> range;
    auto* chk = app.add_subcommand("check-assumptions", "Report the coefficient and kernel assumptions");
    chk->add_option("--drift", drift, "zero, constant(c), linear(a), tanh, identity, two_plus_sin, tabulated(path)");
    chk->add_option("--diffusion", diffusion, "Diffusion coefficient, same registry");
    chk->add_option("--kernel", kernel, "Kernel specification");
    chk->add_option("--x0", x0, "Initial state");
    chk->add_option("--T", horizon, "Horizon");
    chk->add_option("--lambda", lambda, "Default fOU mean reversion");
    chk->add_option("--range", range, "State range lo hi")->expected(2)->delimiter(';');
    add_common(chk, common);

    // regen-goldens
    std::string derived_at;
    auto* regen = app.add_subcommand("regen-goldens", "Re-derive all golden values from their oracles");
    regen->add_option("--derived-at", derived_at, "Timestamp to record (default: now, UTC)");
    add_common(regen, common);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      out << app.help();
      return ok;
    } catch (const CLI::ParseError& e) {
      std::ostringstream msg;
      app.exit(e, msg, msg);
      err << msg.str();
      return e.get_exit_code() == 0 ? ok : validation_failure;
    }
    for (auto* sub : app.get_subcommands()) {
      if (sub->get_help_ptr() && sub->get_help_ptr()->count() > 0) {
        out << sub->help();
        return ok;
      }
    }

    const auto qgrid = common.quadrature();
    KernelOptions ko;
    ko.horizon = horizon;
    ko.lambda = lambda;
    ko.convention = fou_convention_from_string(convention);

    if (*fbm) {
      if (!sweep) {
        emit(common, render(common, continuous_aw_fbm(h1, h2, horizon, qgrid)), out);
        return ok;
      }
      if (!(h_min < h_max)) throw ValidationError("--h-min must be below --h-max");
      std::vector<double> hs(h_steps);
      for (std::size_t i = 0; i < h_steps; ++i) {
        hs[i] = h_min + (h_max - h_min) * static_cast<double>(i) / static_cast<double>(h_steps - 1);
      }
      std::string text = "H1,H2,aw_squared\n";
      for (double a : hs) {
        for (double b : hs) {
          text += csv_row({a, b, continuous_aw_fbm(a, b, horizon, qgrid).distance_squared});
        }
      }
      emit(common, text, out);
      return ok;
    }
    if (*disc) {
      emit(common, render(common, discrete_aw(CovMatrix::load_csv(cov1), CovMatrix::load_csv(cov2))), out);
      return ok;
    }
    if (*unit) {
      const auto p1 = parse_process(k1, mu1, ko);
      const auto p2 = parse_process(k2, mu2, ko);
      if (p1.multiplicity() != 1 || p2.multiplicity() != 1) {
        throw ValidationError("aw-unit takes one kernel per process; use aw-multi");
      }
      emit(common, render(common, continuous_aw_unit(p1, p2, qgrid)), out);
      return ok;
    }
    if (*multi) {
      emit(common, render(common, continuous_aw_multi(parse_process(k1, mu1, ko), parse_process(k2, mu2, ko), qgrid)),
           out);
      return ok;
    }
    if (*mart) {
      const auto r = mart_approx_distance(h, horizon, qgrid);
      if (common.format == "csv") {
        std::string text = "r,rho\n";
        for (std::size_t i = 0; i < r.r.size(); ++i) text += csv_row({r.r[i], r.rho[i]});
        emit(common, text, out);
      } else {
        emit(common, io::dump(io::to_json(r)), out);
      }
      return ok;
    }
    if (*sim) {
      const json sc = load_json(scenario_path);
      if (!sc.is_object()) throw ValidationError("scenario must be a JSON object");
      const double T = get_or<double>(sc, "T", 1.0);
      const auto M = get_or<std::size_t>(sc, "M", 256);
      const auto n_paths = get_or<std::size_t>(sc, "n_paths", 10000);
      const auto seed = common.seed_given ? common.seed : get_or<std::uint64_t>(sc, "seed", 1);
      if (n_paths < 2) throw ValidationError("n_paths must be at least 2");
      const TimeGrid grid(T, M);
      const FsdeSpec s1 = scenario_spec(sc, 1, T);
      const FsdeSpec s2 = scenario_spec(sc, 2, T);
      std::vector<CouplingControl> controls;
      const json clist = sc.contains("controls") ? sc.at("controls") : json::array({"synchronous"});
      if (!clist.is_array() || clist.empty()) throw ValidationError("scenario 'controls' must be a non-empty array");
      for (const auto& c : clist) append_controls(c, T, controls);
      NoiseOptions nopt;
      nopt.threads = common.threads;
      if (sc.contains("noise_weights")) nopt.weights = noise_weights_from_string(sc.at("noise_weights"));

      std::vector<CostEstimate> results;
      for (const auto& c : controls) results.push_back(estimate_coupling_cost(s1, s2, c, grid, n_paths, seed, nopt));
      if (!paths_csv.empty()) {
        const auto [z1, z2] =
            simulate_coupled_noise(s1.kernel, s2.kernel, controls.front(), grid, std::min<std::size_t>(10, n_paths),
                                   seed, nopt);
        write_path_dump(paths_csv, euler_fsde(s1, z1), euler_fsde(s2, z2));
      }
      if (common.format == "csv") {
        std::string text = "control,mean,std_error,n_paths\n";
        for (const auto& r : results) {
          text += r.control + "," + io::format_double(r.mean) + "," + io::format_double(r.std_error) + "," +
                  std::to_string(r.n_paths) + "\n";
        }
        emit(common, text, out);
      } else {
        json arr = json::array();
        for (const auto& r : results) arr.push_back(io::to_json(r));
        emit(common, io::dump(arr), out);
      }
      return ok;
    }
    if (*chk) {
      FsdeSpec s;
      s.drift = ScalarFunction::parse(drift);
      s.diffusion = ScalarFunction::parse(diffusion);
      s.kernel = parse_kernel(kernel, ko);
      s.x0 = x0;
      std::optional<std::pair<double, double>> r;
      if (!range.empty()) {
        if (range.size() != 2 || !(range[0] < range[1])) throw ValidationError("--range needs lo < hi");
        r = std::make_pair(range[0], range[1]);
      }
      const auto rep = assumption_checker(s, r);
      if (common.format == "csv") {
        std::string text = "name,passed,worst,witness_x,witness_t,witness_s\n";
        for (const auto& c : rep.checks) {
          text += c.name + "," + (c.passed ? "1" : "0") + "," + io::format_double(c.worst) + "," +
                  io::format_double(c.witness_x) + "," + io::format_double(c.witness_t) + "," +
                  io::format_double(c.witness_s) + "\n";
        }
        emit(common, text, out);
      } else {
        emit(common, io::dump(io::to_json(rep)), out);
      }
      return ok;
    }
    if (*regen) {
      if (common.out_path.empty()) throw ValidationError("regen-goldens needs --out");
      const auto g = regenerate_goldens(derived_at.empty() ? utc_timestamp() : derived_at, common.threads, err);
      g.save(common.out_path);
      return ok;
    }
    throw ValidationError("unknown command");
  } catch (const std::exception& e) {
    return classify(e, err);
  }
}

}  // namespace awgp::cli
