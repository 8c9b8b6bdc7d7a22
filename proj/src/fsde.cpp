#include "awgp/fsde.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "awgp/errors.hpp"
#include "awgp/parallel.hpp"
#include "awgp/quadrature.hpp"

namespace awgp {

// ---------------------------------------------------------------------------
// scalar functions

ScalarFunction::ScalarFunction(std::string name, Fn fn)
    : name_(std::move(name)), fn_(std::make_shared<const Fn>(std::move(fn))) {
  if (!*fn_) throw ValidationError("scalar function '" + name_ + "' is empty");
}

ScalarFunction ScalarFunction::zero() {
  return ScalarFunction("zero", [](double) { return 0.0; });
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

ScalarFunction ScalarFunction::constant(double c) {
  return ScalarFunction("constant(" + fmt(c) + ")", [c](double) { return c; });
}

ScalarFunction ScalarFunction::linear(double a) {
  return ScalarFunction("linear(" + fmt(a) + ")", [a](double x) { return a * x; });
}

ScalarFunction ScalarFunction::tanh() {
  return ScalarFunction("tanh", [](double x) { return std::tanh(x); });
}

ScalarFunction ScalarFunction::identity() {
  return ScalarFunction("identity", [](double x) { return x; });
}

ScalarFunction ScalarFunction::two_plus_sin() {
  return ScalarFunction("two_plus_sin", [](double x) { return 2.0 + std::sin(x); });
}

ScalarFunction ScalarFunction::tabulated(std::vector<double> xs, std::vector<double> ys, std::string name) {
  if (xs.size() < 2 || xs.size() != ys.size()) throw ValidationError("tabulated function needs >= 2 matching points");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw ValidationError("tabulated function: x must be strictly increasing");
  }
  auto data = std::make_shared<const std::pair<std::vector<double>, std::vector<double>>>(std::move(xs), std::move(ys));
  return ScalarFunction(std::move(name), [data](double x) {
    const auto& [gx, gy] = *data;
    if (x <= gx.front()) return gy.front();
    if (x >= gx.back()) return gy.back();
    const auto it = std::upper_bound(gx.begin(), gx.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - gx.begin()) - 1;
    const double u = (x - gx[j]) / (gx[j + 1] - gx[j]);
    return (1.0 - u) * gy[j] + u * gy[j + 1];
  });
}

ScalarFunction ScalarFunction::load_tabulated(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open function table '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("x,value", 0) != 0) throw ValidationError("function table: expected header 'x,value'");
  std::vector<double> xs, ys;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b)) throw ValidationError("function table: malformed row");
    try {
      xs.push_back(std::stod(a));
      ys.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw ValidationError("function table: non-numeric row");
    }
  }
  return tabulated(std::move(xs), std::move(ys), "tabulated(" + path + ")");
}

ScalarFunction ScalarFunction::parse(const std::string& text) {
  auto arg = [&](const std::string& head) -> std::optional<std::string> {
    if (text.rfind(head + "(", 0) == 0 && text.back() == ')') {
      return text.substr(head.size() + 1, text.size() - head.size() - 2);
    }
    return std::nullopt;
  };
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("bad numeric argument in '" + text + "'");
    }
  };
  if (text == "zero") return zero();
  if (text == "tanh") return tanh();
  if (text == "identity") return identity();
  if (text == "two_plus_sin") return two_plus_sin();
  if (auto a = arg("constant")) return constant(number(*a));
  if (auto a = arg("linear")) return linear(number(*a));
  if (auto a = arg("tabulated")) return load_tabulated(*a);
  throw ValidationError("unknown function '" + text + "'");
}

// ---------------------------------------------------------------------------
// grid and controls

TimeGrid::TimeGrid(double T, std::size_t M) : horizon(T), steps(M) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("time grid: horizon must be positive");
  if (M < 8) throw ValidationError("time grid too coarse: need at least 8 steps");
}

std::string to_string(ControlKind k) {
  switch (k) {
    case ControlKind::synchronous:
      return "synchronous";
    case ControlKind::antithetic:
      return "antithetic";
    case ControlKind::independent:
      return "independent";
    case ControlKind::piecewise_constant:
      return "piecewise_constant";
    case ControlKind::tabulated:
      return "tabulated";
  }
  return "unknown";
}

CouplingControl::CouplingControl(ControlKind kind, std::vector<double> times, std::vector<double> values)
    : kind_(kind), times_(std::move(times)), values_(std::move(values)) {
  if (values_.empty() || times_.size() != values_.size()) throw ValidationError("control: malformed schedule");
  for (double v : values_) {
    if (!(std::abs(v) <= 1.0)) throw DomainError("control correlation must lie in [-1, 1], got " + fmt(v));
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw ValidationError("control: cell times must be increasing");
  }
}

CouplingControl CouplingControl::synchronous() { return CouplingControl(ControlKind::synchronous, {0.0}, {1.0}); }
CouplingControl CouplingControl::antithetic() { return CouplingControl(ControlKind::antithetic, {0.0}, {-1.0}); }
CouplingControl CouplingControl::independent() { return CouplingControl(ControlKind::independent, {0.0}, {0.0}); }

CouplingControl CouplingControl::piecewise_constant(std::vector<double> values, double horizon) {
  if (values.empty()) throw ValidationError("piecewise control needs at least one cell");
  if (!(horizon > 0.0)) throw DomainError("piecewise control: horizon must be positive");
  std::vector<double> times(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    times[i] = horizon * static_cast<double>(i) / static_cast<double>(values.size());
  }
  return CouplingControl(ControlKind::piecewise_constant, std::move(times), std::move(values));
}

CouplingControl CouplingControl::tabulated(std::vector<double> times, std::vector<double> values) {
  return CouplingControl(ControlKind::tabulated, std::move(times), std::move(values));
}

double CouplingControl::at(double t) const {
  if (values_.size() == 1 || t < times_.front()) return values_.front();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

std::string CouplingControl::describe() const {
  std::string s = to_string(kind_);
  if (kind_ == ControlKind::piecewise_constant || kind_ == ControlKind::tabulated) {
    s += "[" + std::to_string(values_.size()) + " cells]";
  }
  return s;
}

std::vector<CouplingControl> control_battery(double horizon, std::size_t n_random, std::size_t cells,
                                            std::uint64_t seed) {
  if (cells == 0) throw ValidationError("random controls need at least one cell");
  std::vector<CouplingControl> out{CouplingControl::antithetic(), CouplingControl::independent()};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (std::size_t i = 0; i < n_random; ++i) {
    std::vector<double> v(cells);
    for (auto& x : v) x = unif(rng);
    out.push_back(CouplingControl::piecewise_constant(std::move(v), horizon));
  }
  return out;
}

std::string to_string(NoiseWeights w) { return w == NoiseWeights::midpoint ? "midpoint" : "variance_matched"; }

NoiseWeights noise_weights_from_string(const std::string& s) {
  if (s == "midpoint") return NoiseWeights::midpoint;
  if (s == "variance_matched") return NoiseWeights::variance_matched;
  throw ValidationError("unknown noise weighting '" + s + "'");
}

// ---------------------------------------------------------------------------
// random numbers

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t path, std::uint64_t stream)
    : state_(mix64(mix64(seed) + kGolden * (path + 1)) ^ mix64(stream + 0xD1B54A32D192ED03ULL)) {}

CounterRng::result_type CounterRng::operator()() {
  state_ += kGolden;
  return mix64(state_);
}

// ---------------------------------------------------------------------------
// coupled noise

CoupledNoiseGenerator::CoupledNoiseGenerator(const VolterraKernel& k1, const VolterraKernel& k2,
                                             const CouplingControl& control, TimeGrid grid, std::uint64_t seed,
                                             NoiseOptions opts)
    : grid_(grid), seed_(seed), opts_(opts) {
  if (grid_.steps < 8) throw ValidationError("time grid too coarse: need at least 8 steps");
  const double T = grid_.horizon;
  for (const auto* k : {&k1, &k2}) {
    if (std::abs(k->horizon() - T) > 1e-12 * T) throw ValidationError("noise kernel horizon differs from the grid");
  }
  if (opts_.cell_nodes == 0) throw DomainError("cell_nodes must be positive");
  if (!(opts_.origin_ratio > 0.0 && opts_.origin_ratio < 1.0)) throw DomainError("origin_ratio must lie in (0, 1)");
  const double dt = grid_.dt();
  const std::size_t levels =
      opts_.weights == NoiseWeights::variance_matched ? std::max<std::size_t>(opts_.origin_levels, 1) : 1;
  // first cell, split geometrically towards 0
  std::vector<double> cuts{0.0};
  for (std::size_t l = levels - 1; l >= 1; --l) cuts.push_back(dt * std::pow(opts_.origin_ratio, static_cast<double>(l)));
  cuts.push_back(dt);
  const double rho0 = control.at(0.0);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    lo_.push_back(cuts[i]);
    hi_.push_back(cuts[i + 1]);
    rho_.push_back(rho0);
  }
  for (std::size_t j = 1; j < grid_.steps; ++j) {
    lo_.push_back(grid_.time(j));
    hi_.push_back(grid_.time(j + 1));
    rho_.push_back(control.at(grid_.time(j)));
  }
  // cells ending at or before t_m
  first_cell_.assign(grid_.steps + 1, 0);
  for (std::size_t m = 1; m <= grid_.steps; ++m) first_cell_[m] = levels + (m - 1);
  w1_ = build_weights(k1);
  w2_ = build_weights(k2);
}

std::vector<double> CoupledNoiseGenerator::build_weights(const VolterraKernel& k) const {
  const std::size_t M = grid_.steps, B = lo_.size();
  std::vector<double> w((M + 1) * B, 0.0);
  const double g = quad::grading_exponent(k.hurst(), k.hurst());
  parallel_for(M, opts_.threads, [&](std::size_t mi) {
    const std::size_t m = mi + 1;
    const double t = grid_.time(m);
    double* row = w.data() + m * B;
    for (std::size_t b = 0; b < first_cell_[m]; ++b) {
      if (opts_.weights == NoiseWeights::midpoint) {
        row[b] = k(t, 0.5 * (lo_[b] + hi_[b]));
        continue;
      }
      const bool at_origin = lo_[b] == 0.0;
      const bool at_diag = b + 1 == first_cell_[m];
      const quad::Cluster c = at_origin && at_diag ? quad::Cluster::both
                              : at_origin          ? quad::Cluster::left
                              : at_diag            ? quad::Cluster::right
                                                   : quad::Cluster::none;
      const quad::Rule rule =
          quad::graded_rule(quad::Scheme::graded_gauss_legendre, lo_[b], hi_[b], opts_.cell_nodes, g, c);
      double m1 = 0.0, m2 = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double v = k(t, rule.nodes[i]);
        m1 += rule.weights[i] * v;
        m2 += rule.weights[i] * v * v;
      }
      const double len = hi_[b] - lo_[b];
      row[b] = std::copysign(std::sqrt(m2 / len), m1);
    }
  });
  return w;
}

void CoupledNoiseGenerator::generate(std::size_t path, std::span<double> z1, std::span<double> z2) const {
  const std::size_t M = grid_.steps, B = lo_.size();
  if (z1.size() != M + 1 || z2.size() != M + 1) throw DimensionMismatch("noise buffers must hold steps + 1 values");
  CounterRng r1(seed_, path, 0), r2(seed_, path, 1);
  std::normal_distribution<double> n1, n2;
  std::vector<double> x1(B), x2(B);
  for (std::size_t b = 0; b < B; ++b) {
    const double sd = std::sqrt(hi_[b] - lo_[b]);
    const double a = sd * n1(r1);
    const double e = sd * n2(r2);
    x1[b] = a;
    x2[b] = rho_[b] * a + std::sqrt(1.0 - rho_[b] * rho_[b]) * e;
  }
  z1[0] = 0.0;
  z2[0] = 0.0;
  for (std::size_t m = 1; m <= M; ++m) {
    const double* a = w1_.data() + m * B;
    const double* c = w2_.data() + m * B;
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t b = 0; b < first_cell_[m]; ++b) {
      s1 += a[b] * x1[b];
      s2 += c[b] * x2[b];
    }
    z1[m] = s1;
    z2[m] = s2;
  }
}

std::pair<PathEnsemble, PathEnsemble> simulate_coupled_noise(const VolterraKernel& k1, const VolterraKernel& k2,
                                                             const CouplingControl& control, TimeGrid grid,
                                                             std::size_t n_paths, std::uint64_t seed,
                                                             NoiseOptions opts) {
  if (n_paths == 0) throw DomainError("n_paths must be positive");
  const CoupledNoiseGenerator gen(k1, k2, control, grid, seed, opts);
  PathEnsemble e1, e2;
  for (auto* e : {&e1, &e2}) {
    e->grid = grid;
    e->n_paths = n_paths;
    e->seed = seed;
    e->substream_policy = "splitmix64(seed, path, stream); stream 0 drives process 1, stream 1 the independent part";
    e->values.assign(n_paths * (grid.steps + 1), 0.0);
  }
  const std::size_t w = grid.steps + 1;
  parallel_for(n_paths, opts.threads, [&](std::size_t p) {
    gen.generate(p, std::span<double>(e1.values.data() + p * w, w), std::span<double>(e2.values.data() + p * w, w));
  });
  return {std::move(e1), std::move(e2)};
}

// ---------------------------------------------------------------------------
// Lamperti transform

namespace {

double adaptive_inv_sigma(const ScalarFunction& sigma, const quad::Rule& ref, double a, double b, double whole,
                          int depth) {
  auto panel = [&](double lo, double hi) {
    const double h = 0.5 * (hi - lo), c = 0.5 * (hi + lo);
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double x = c + h * ref.nodes[i];
      const double s = sigma(x);
      if (!(s > 0.0)) throw DomainError("Lamperti transform: sigma(" + fmt(x) + ") = " + fmt(s) + " is not positive");
      acc += ref.weights[i] / s;
    }
    return acc * h;
  };
  const double mid = 0.5 * (a + b);
  const double left = panel(a, mid), right = panel(mid, b);
  const double sum = left + right;
  if (std::abs(sum - whole) <= 1e-14 * std::max(1.0, std::abs(sum)) || depth >= 40) return sum;
  return adaptive_inv_sigma(sigma, ref, a, mid, left, depth + 1) + adaptive_inv_sigma(sigma, ref, mid, b, right, depth + 1);
}

}  // namespace

double lamperti_transform(const ScalarFunction& sigma, double x0, double x, std::size_t quad_nodes) {
  if (!std::isfinite(x) || !std::isfinite(x0)) throw DomainError("Lamperti transform: non-finite argument");
  if (x == x0) return 0.0;
  const quad::Rule ref = quad::gauss_legendre(std::max<std::size_t>(quad_nodes, 2));
  const double a = std::min(x0, x), b = std::max(x0, x);
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  double whole = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double s = sigma(c + h * ref.nodes[i]);
    if (!(s > 0.0)) throw DomainError("Lamperti transform: sigma is not positive on the range");
    whole += ref.weights[i] / s;
  }
  whole *= h;
  const double v = adaptive_inv_sigma(sigma, ref, a, b, whole, 0);
  return x >= x0 ? v : -v;
}

double lamperti_inverse(const ScalarFunction& sigma, double x0, double y, double tol) {
  auto g = [&](double x) { return lamperti_transform(sigma, x0, x); };
  const double s0 = sigma(x0);
  if (!(s0 > 0.0)) throw DomainError("Lamperti inverse: sigma(x0) is not positive");
  // bracket the root of g(x) - y; g is increasing
  double lo = x0, hi = x0;
  double step = std::max(1.0, std::abs(y) * s0);
  if (y > 0.0) {
    while (g(hi) < y) {
      lo = hi;
      hi += step;
      step *= 2.0;
      if (!std::isfinite(hi)) throw NonConvergenceError("Lamperti inverse: cannot bracket the root");
    }
  } else if (y < 0.0) {
    while (g(lo) > y) {
      hi = lo;
      lo -= step;
      step *= 2.0;
      if (!std::isfinite(lo)) throw NonConvergenceError("Lamperti inverse: cannot bracket the root");
    }
  } else {
    return x0;
  }
  double x = std::clamp(x0 + y * s0, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double f = g(x) - y;
    if (std::abs(f) <= tol) return x;
    if (f > 0.0) hi = x; else lo = x;
    double next = x - f * sigma(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  throw NonConvergenceError("Lamperti inverse did not converge");
}

LampertiMap::LampertiMap(ScalarFunction sigma, double x0, double lo, double hi, std::size_t nodes)
    : sigma_(std::move(sigma)), x0_(x0), lo_(lo), hi_(hi) {
  if (!(hi > lo) || nodes < 2) throw DomainError("Lamperti map: empty range");
  h_ = (hi - lo) / static_cast<double>(nodes - 1);
  g_.resize(nodes);
  dg_.resize(nodes);
  const quad::Rule ref = quad::gauss_legendre(8);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double x = lo + h_ * static_cast<double>(i);
    const double s = sigma_(x);
    if (!(s > 0.0)) throw DomainError("Lamperti map: sigma(" + fmt(x) + ") is not positive");
    dg_[i] = 1.0 / s;
    if (i > 0) {
      const double c = x - 0.5 * h_;
      double p = 0.0;
      for (std::size_t k = 0; k < ref.size(); ++k) p += ref.weights[k] / sigma_(c + 0.5 * h_ * ref.nodes[k]);
      acc += 0.5 * h_ * p;
    }
    g_[i] = acc;
  }
  const double offset = lamperti_transform(sigma_, lo, x0);
  for (auto& v : g_) v -= offset;
}

double LampertiMap::hermite(std::size_t i, double x) const {
  const double u = (x - (lo_ + h_ * static_cast<double>(i))) / h_;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * g_[i] + (u3 - 2 * u2 + u) * h_ * dg_[i] + (-2 * u3 + 3 * u2) * g_[i + 1] +
         (u3 - u2) * h_ * dg_[i + 1];
}

double LampertiMap::forward(double x) const {
  if (!(x >= lo_ && x <= hi_)) return lamperti_transform(sigma_, x0_, x);
  const std::size_t i = std::min(static_cast<std::size_t>((x - lo_) / h_), g_.size() - 2);
  return hermite(i, x);
}

double LampertiMap::inverse(double y) const {
  if (!(y >= g_.front() && y <= g_.back())) return lamperti_inverse(sigma_, x0_, y);
  const auto it = std::upper_bound(g_.begin(), g_.end(), y);
  std::size_t i = it == g_.begin() ? 0 : static_cast<std::size_t>(it - g_.begin()) - 1;
  i = std::min(i, g_.size() - 2);
  double a = lo_ + h_ * static_cast<double>(i), b = a + h_;
  double x = a + h_ * (y - g_[i]) / (g_[i + 1] - g_[i]);
  for (int it2 = 0; it2 < 60; ++it2) {
    const double f = hermite(i, x) - y;
    if (std::abs(f) <= 1e-14 * std::max(1.0, std::abs(y))) break;
    if (f > 0.0) b = x; else a = x;
    const double u = (x - (lo_ + h_ * static_cast<double>(i))) / h_;
    const double d = ((6 * u * u - 6 * u) * g_[i] + (3 * u * u - 4 * u + 1) * h_ * dg_[i] +
                      (-6 * u * u + 6 * u) * g_[i + 1] + (3 * u * u - 2 * u) * h_ * dg_[i + 1]) /
                     h_;
    double next = d > 0.0 ? x - f / d : 0.5 * (a + b);
    if (!(next >= a && next <= b)) next = 0.5 * (a + b);
    if (next == x) break;
    x = next;
  }
  return x;
}

// ---------------------------------------------------------------------------
// SDE paths

namespace {

constexpr double kExplosion = 1e12;

void check_young(const FsdeSpec& spec) {
  if (spec.kernel.hurst() < 0.5) {
    throw DomainError("fractional SDE simulation needs H >= 1/2 (Young regime), got H = " + fmt(spec.kernel.hurst()));
  }
}

std::unique_ptr<LampertiMap> make_lamperti(const FsdeSpec& spec) {
  if (spec.integrator != Integrator::lamperti) return nullptr;
  const double T = spec.horizon();
  double smax = std::abs(spec.diffusion(spec.x0));
  for (int pass = 0; pass < 2; ++pass) {
    const double half = 10.0 * std::max(smax, 1.0) * std::sqrt(T);
    for (int i = 0; i <= 400; ++i) {
      smax = std::max(smax, std::abs(spec.diffusion(spec.x0 - half + 2.0 * half * i / 400.0)));
    }
  }
  const double half = 10.0 * std::max(smax, 1.0) * std::sqrt(T) + 1.0;
  return std::make_unique<LampertiMap>(spec.diffusion, spec.x0, spec.x0 - half, spec.x0 + half);
}

}  // namespace

void simulate_path(const FsdeSpec& spec, const TimeGrid& grid, std::span<const double> z, std::span<double> x,
                   std::size_t path_index, const LampertiMap* lamperti) {
  const std::size_t M = grid.steps;
  if (z.size() != M + 1 || x.size() != M + 1) throw DimensionMismatch("path buffers must hold steps + 1 values");
  const double dt = grid.dt();
  x[0] = spec.x0;
  if (spec.integrator == Integrator::lamperti) {
    if (!lamperti) throw ValidationError("Lamperti integration needs a transform table");
    double y = 0.0;  // g(x0)
    for (std::size_t m = 0; m < M; ++m) {
      const double xm = x[m];
      y += spec.drift(xm) / spec.diffusion(xm) * dt + (z[m + 1] - z[m]);
      const double xn = lamperti->inverse(y);
      if (!std::isfinite(xn) || std::abs(xn) > kExplosion) throw PathExplosion(path_index, m + 1, std::abs(xn));
      x[m + 1] = xn;
    }
    return;
  }
  for (std::size_t m = 0; m < M; ++m) {
    const double xm = x[m];
    const double xn = xm + spec.drift(xm) * dt + spec.diffusion(xm) * (z[m + 1] - z[m]);
    if (!std::isfinite(xn) || std::abs(xn) > kExplosion) throw PathExplosion(path_index, m + 1, std::abs(xn));
    x[m + 1] = xn;
  }
}

PathEnsemble euler_fsde(const FsdeSpec& spec, const PathEnsemble& noise) {
  check_young(spec);
  if (std::abs(noise.grid.horizon - spec.horizon()) > 1e-12 * spec.horizon()) {
    throw ValidationError("noise grid horizon differs from the SDE horizon");
  }
  const auto lam = make_lamperti(spec);
  PathEnsemble out;
  out.grid = noise.grid;
  out.n_paths = noise.n_paths;
  out.seed = noise.seed;
  out.substream_policy = noise.substream_policy;
  const std::size_t w = noise.grid.steps + 1;
  out.values.assign(noise.n_paths * w, 0.0);
  parallel_for(noise.n_paths, 0, [&](std::size_t p) {
    simulate_path(spec, noise.grid, noise.path(p), std::span<double>(out.values.data() + p * w, w), p, lam.get());
  });
  return out;
}

std::pair<double, double> mean_and_se(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) throw DomainError("mean of an empty sample");
  const double mean = pairwise_sum(xs) / static_cast<double>(n);
  if (n == 1) return {mean, 0.0};
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = (xs[i] - mean) * (xs[i] - mean);
  const double var = pairwise_sum(dev) / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

namespace {

void check_pair(const FsdeSpec& s1, const FsdeSpec& s2, const TimeGrid& grid, std::size_t n_paths) {
  if (n_paths == 0) throw DomainError("n_paths must be positive");
  if (std::abs(s1.horizon() - s2.horizon()) > 1e-12 * s1.horizon()) throw ValidationError("SDE horizons differ");
  if (std::abs(grid.horizon - s1.horizon()) > 1e-12 * s1.horizon()) throw ValidationError("grid horizon differs");
  check_young(s1);
  check_young(s2);
}

}  // namespace

CostEstimate estimate_coupling_cost(const FsdeSpec& spec1, const FsdeSpec& spec2, const CouplingControl& control,
                                    TimeGrid grid, std::size_t n_paths, std::uint64_t seed, NoiseOptions opts) {
  check_pair(spec1, spec2, grid, n_paths);
  const CoupledNoiseGenerator gen(spec1.kernel, spec2.kernel, control, grid, seed, opts);
  const auto lam1 = make_lamperti(spec1);
  const auto lam2 = make_lamperti(spec2);
  const std::size_t w = grid.steps + 1;
  const double dt = grid.dt();
  std::vector<double> cost(n_paths);
  parallel_for(n_paths, opts.threads, [&](std::size_t p) {
    std::vector<double> z1(w), z2(w), x1(w), x2(w);
    gen.generate(p, z1, z2);
    simulate_path(spec1, grid, z1, x1, p, lam1.get());
    simulate_path(spec2, grid, z2, x2, p, lam2.get());
    double c = 0.0;
    for (std::size_t m = 0; m < grid.steps; ++m) c += (x1[m] - x2[m]) * (x1[m] - x2[m]);
    cost[p] = c * dt;
  });
  const auto [mean, se] = mean_and_se(cost);
  return {mean, se, n_paths, control.describe()};
}

std::pair<std::vector<double>, std::vector<double>> terminal_samples(const FsdeSpec& spec1, const FsdeSpec& spec2,
                                                                     const CouplingControl& control, TimeGrid grid,
                                                                     std::size_t n_paths, std::uint64_t seed,
                                                                     NoiseOptions opts) {
  check_pair(spec1, spec2, grid, n_paths);
  const CoupledNoiseGenerator gen(spec1.kernel, spec2.kernel, control, grid, seed, opts);
  const auto lam1 = make_lamperti(spec1);
  const auto lam2 = make_lamperti(spec2);
  const std::size_t w = grid.steps + 1;
  std::vector<double> a(n_paths), b(n_paths);
  parallel_for(n_paths, opts.threads, [&](std::size_t p) {
    std::vector<double> z1(w), z2(w), x1(w), x2(w);
    gen.generate(p, z1, z2);
    simulate_path(spec1, grid, z1, x1, p, lam1.get());
    simulate_path(spec2, grid, z2, x2, p, lam2.get());
    a[p] = x1[grid.steps];
    b[p] = x2[grid.steps];
  });
  return {std::move(a), std::move(b)};
}

// ---------------------------------------------------------------------------
// assumption checks

const AssumptionCheck& AssumptionReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw ValidationError("no assumption check named '" + name + "'");
}

AssumptionReport assumption_checker(const FsdeSpec& spec, std::optional<std::pair<double, double>> state_range,
                                    const AssumptionOptions& opts) {
  AssumptionReport rep;
  const double T = spec.horizon();
  if (state_range) {
    rep.range_lo = state_range->first;
    rep.range_hi = state_range->second;
  } else {
    double smax = std::abs(spec.diffusion(spec.x0));
    double half = 5.0 * std::sqrt(T);
    for (int i = 0; i <= 200; ++i) smax = std::max(smax, std::abs(spec.diffusion(spec.x0 - half + 2.0 * half * i / 200.0)));
    half = 5.0 * smax * std::sqrt(T);
    if (!(half > 0.0)) half = 5.0 * std::sqrt(T);
    rep.range_lo = spec.x0 - half;
    rep.range_hi = spec.x0 + half;
  }
  if (!(rep.range_hi > rep.range_lo)) throw ValidationError("assumption checker: empty state range");
  const std::size_t n = std::max<std::size_t>(opts.state_points, 3);
  std::vector<double> xs(n), b(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = rep.range_lo + (rep.range_hi - rep.range_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    b[i] = spec.drift(xs[i]);
    s[i] = spec.diffusion(xs[i]);
  }
  auto argmin = [&](const std::vector<double>& v) {
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  };
  auto argmax_abs = [&](const std::vector<double>& v) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(std::abs(v[i]) <= std::abs(v[k]))) k = i;
    return k;
  };
  {
    const std::size_t k = argmin(s);
    rep.checks.push_back({"sigma_positive", s[k] > 0.0, s[k], xs[k], 0, 0, "min sigma on the state range"});
    rep.checks.push_back(
        {"sigma_bounded_away", s[k] >= opts.sigma_floor, s[k], xs[k], 0, 0, "min sigma against the floor"});
    const std::size_t j = argmax_abs(s);
    rep.checks.push_back({"sigma_bounded", std::abs(s[j]) <= opts.sigma_ceiling && std::isfinite(s[j]),
                          std::abs(s[j]), xs[j], 0, 0, "max |sigma|"});
  }
  auto derivative_check = [&](const std::string& name, const std::vector<double>& v) {
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i]) / (xs[i + 1] - xs[i]);
    const std::size_t k = argmax_abs(d);
    rep.checks.push_back({name, std::isfinite(d[k]) && std::abs(d[k]) <= opts.derivative_bound, std::abs(d[k]),
                          0.5 * (xs[k] + xs[k + 1]), 0, 0, "max finite-difference slope"});
  };
  derivative_check("drift_derivative", b);
  derivative_check("sigma_derivative", s);
  {
    double worst = std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double inc = b[i + 1] / s[i + 1] - b[i] / s[i];
      if (!(inc >= worst)) {
        worst = inc;
        k = i;
      }
    }
    rep.checks.push_back({"drift_over_sigma_monotone", worst >= -opts.tol, worst, xs[k], 0, 0,
                          "smallest increment of b / sigma"});
  }

  // kernel checks on (t, s) with 0 < s < t <= T
  const std::size_t nk = std::max<std::size_t>(opts.kernel_points, 2);
  const double H = spec.kernel.hurst();
  double min_k = std::numeric_limits<double>::infinity(), max_ratio = 0.0, min_inc = std::numeric_limits<double>::infinity();
  double wk_t = 0, wk_s = 0, wr_t = 0, wr_s = 0, wm_t = 0, wm_s = 0;
  for (std::size_t j = 0; j < nk; ++j) {
    const double sv = T * (static_cast<double>(j) + 0.5) / static_cast<double>(nk);
    double prev = 0.0;
    bool have_prev = false;
    for (std::size_t i = 1; i <= nk; ++i) {
      const double tv = T * static_cast<double>(i) / static_cast<double>(nk);
      if (tv <= sv) continue;
      const double kv = spec.kernel(tv, sv);
      if (!(kv >= min_k)) {
        min_k = kv;
        wk_t = tv;
        wk_s = sv;
      }
      const double ratio = std::abs(kv) / (std::pow(sv, 0.5 - H) * std::pow(tv - sv, H - 0.5));
      if (!(ratio <= max_ratio)) {
        max_ratio = ratio;
        wr_t = tv;
        wr_s = sv;
      }
      if (have_prev && !(kv - prev >= min_inc)) {
        min_inc = kv - prev;
        wm_t = tv;
        wm_s = sv;
      }
      prev = kv;
      have_prev = true;
    }
  }
  rep.checks.push_back({"kernel_nonnegative", min_k >= -opts.tol, min_k, 0, wk_t, wk_s, "min k(t, s)"});
  rep.checks.push_back({"kernel_growth", std::isfinite(max_ratio) && max_ratio <= opts.growth_bound, max_ratio, 0, wr_t,
                        wr_s, "max |k| / (s^(1/2-H) (t-s)^(H-1/2))"});
  rep.checks.push_back({"kernel_t_monotone", !(min_inc < -opts.tol), std::isfinite(min_inc) ? min_inc : 0.0, 0, wm_t,
                        wm_s, "smallest increment of t -> k(t, s)"});
  rep.checks.push_back({"young_regime", H >= 0.5, H, 0, 0, 0, "Hurst index of the noise kernel"});

  auto ok = [&](const char* name) { return rep.check(name).passed; };
  rep.coefficients_ok = ok("sigma_positive") && ok("sigma_bounded_away") && ok("sigma_bounded") &&
                        ok("drift_derivative") && ok("sigma_derivative");
  rep.kernel_ok = ok("kernel_nonnegative") && ok("kernel_growth");
  rep.monotone_ratio = ok("drift_over_sigma_monotone");
  rep.monotone_kernel = ok("kernel_t_monotone");
  rep.young_regime = ok("young_regime");
  return rep;
}

}  // namespace awgp
