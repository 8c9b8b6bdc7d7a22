#include "awgp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "awgp/errors.hpp"
#include "awgp/specfun.hpp"

namespace awgp {

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::molchan_golosov:
      return "molchan_golosov";
    case KernelKind::riemann_liouville:
      return "riemann_liouville";
    case KernelKind::fou:
      return "fou";
    case KernelKind::brownian:
      return "brownian";
    case KernelKind::constant_volatility:
      return "constant_volatility";
    case KernelKind::tabulated:
      return "tabulated";
    case KernelKind::custom:
      return "custom";
  }
  return "unknown";
}

std::string to_string(FouConvention c) {
  return c == FouConvention::as_printed ? "as_printed" : "mild_solution";
}

FouConvention fou_convention_from_string(const std::string& s) {
  if (s == "as_printed") return FouConvention::as_printed;
  if (s == "mild_solution" || s == "mild") return FouConvention::mild_solution;
  throw ValidationError("unknown fOU convention '" + s + "'");
}

namespace {

void check_hurst(double h) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("Hurst index must lie in (0, 1), got " + std::to_string(h));
}

void check_horizon(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("horizon must be positive and finite");
}

// Molchan-Golosov kernel with the hypergeometric evaluator prepared once.
class MgEval {
 public:
  explicit MgEval(double h)
      : h_(h), inv_gamma_(specfun::reciprocal_gamma(h + 0.5)), f_({h - 0.5, 0.5 - h, h + 0.5}) {}

  // k(t, s) / (t - s)^(H - 1/2): smooth in t on [s, T].
  double regular(double t, double s) const {
    if (!(s > 0.0)) throw SingularityError("Molchan-Golosov kernel is singular at s = 0");
    return inv_gamma_ * f_(1.0 - t / s);
  }

  double operator()(double t, double s) const {
    if (s > t) return 0.0;
    if (!(s > 0.0)) throw SingularityError("Molchan-Golosov kernel is singular at s = 0");
    if (h_ == 0.5) return 1.0;
    if (t == s) return 0.0;
    return std::pow(t - s, h_ - 0.5) * regular(t, s);
  }

  double hurst() const { return h_; }

 private:
  double h_;
  double inv_gamma_;
  specfun::Hyp2f1 f_;
};

double rl_value(double h, double inv_gamma, double t, double s) {
  if (s > t) return 0.0;
  if (h == 0.5) return 1.0;
  if (t == s) return 0.0;
  return inv_gamma * std::pow(t - s, h - 0.5);
}

// k_OU evaluator. The inner integral over r in [s, t] carries the factor
// (r - s)^(H - 1/2) exactly through a Gauss-Jacobi rule; the remaining
// integrand is smooth.
class FouEval {
 public:
  FouEval(double h, double lambda, std::size_t nodes, FouConvention conv, FouBase base)
      : h_(h), lambda_(lambda), conv_(conv), base_(base), mg_(h), inv_gamma_(specfun::reciprocal_gamma(h + 0.5)) {
    if (nodes == 0) throw DomainError("fOU kernel needs at least one quadrature node");
    ref_ = quad::gauss_jacobi(nodes, 0.0, h - 0.5);
  }

  double operator()(double t, double s) const {
    if (s > t) return 0.0;
    const double base = base_value(t, s);
    if (t == s) return base;
    const double half = 0.5 * (t - s);
    const double scale = std::pow(half, h_ - 0.5) * half;
    double acc = 0.0;
    for (std::size_t i = 0; i < ref_.size(); ++i) {
      const double r = s + half * (1.0 + ref_.nodes[i]);
      const double reg = base_ == FouBase::molchan_golosov ? mg_.regular(r, s) : inv_gamma_;
      const double w = conv_ == FouConvention::as_printed ? std::exp(lambda_ * (t - r)) : std::exp(-lambda_ * (t - r));
      acc += ref_.weights[i] * w * reg;
    }
    acc *= scale;
    return conv_ == FouConvention::as_printed ? base + acc : base - lambda_ * acc;
  }

 private:
  double base_value(double t, double s) const {
    if (base_ == FouBase::molchan_golosov) return mg_(t, s);
    return rl_value(h_, inv_gamma_, t, s);
  }

  double h_;
  double lambda_;
  FouConvention conv_;
  FouBase base_;
  MgEval mg_;
  double inv_gamma_;
  quad::Rule ref_;
};

}  // namespace

double eval_mg_kernel(double hurst, double t, double s) {
  check_hurst(hurst);
  if (s > t) return 0.0;
  return MgEval(hurst)(t, s);
}

double eval_rl_kernel(double hurst, double t, double s) {
  check_hurst(hurst);
  return rl_value(hurst, specfun::reciprocal_gamma(hurst + 0.5), t, s);
}

double eval_fou_kernel(double hurst, double lambda, double t, double s, std::size_t quad_nodes,
                       FouConvention convention, FouBase base) {
  check_hurst(hurst);
  if (s > t) return 0.0;
  return FouEval(hurst, lambda, quad_nodes, convention, base)(t, s);
}

double cantor_function(double t) {
  if (std::isnan(t)) throw DomainError("cantor_function: NaN argument");
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double x = t;
  double value = 0.0;
  double bit = 0.5;
  for (int k = 0; k < 52; ++k) {
    x *= 3.0;
    const double d = std::floor(x);
    x -= d;
    if (d >= 2.0) {
      value += bit;
    } else if (d >= 1.0) {
      return value + bit;
    }
    bit *= 0.5;
  }
  return value;
}

// ---------------------------------------------------------------------------
// tabulated kernels

KernelTable read_kernel_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("kernel table: empty input");
  {
    std::string header;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) header += c;
    if (header != "t,s,value") throw ValidationError("kernel table: expected header 't,s,value'");
  }
  std::map<std::pair<double, double>, double> cells;
  std::vector<double> ts, ss;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
      throw ValidationError("kernel table: line " + std::to_string(lineno) + " needs three fields");
    }
    double t, s, v;
    try {
      t = std::stod(a);
      s = std::stod(b);
      v = std::stod(c);
    } catch (const std::exception&) {
      throw ValidationError("kernel table: line " + std::to_string(lineno) + " is not numeric");
    }
    if (!std::isfinite(t) || !std::isfinite(s) || !std::isfinite(v)) {
      throw ValidationError("kernel table: non-finite entry on line " + std::to_string(lineno));
    }
    if (s > t && v != 0.0) {
      throw ValidationError("kernel table: nonzero value at s > t on line " + std::to_string(lineno));
    }
    if (!cells.emplace(std::make_pair(t, s), v).second) {
      throw ValidationError("kernel table: duplicate point on line " + std::to_string(lineno));
    }
    ts.push_back(t);
    ss.push_back(s);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::sort(ss.begin(), ss.end());
  ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
  if (ts.size() < 2 || ss.size() < 2) throw ValidationError("kernel table: need at least a 2x2 grid");
  if (cells.size() != ts.size() * ss.size()) throw ValidationError("kernel table: grid is not rectangular");
  KernelTable table;
  table.t = ts;
  table.s = ss;
  table.values.reserve(cells.size());
  for (double t : ts)
    for (double s : ss) table.values.push_back(cells.at({t, s}));
  return table;
}

KernelTable load_kernel_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open kernel table '" + path + "'");
  return read_kernel_table(in);
}

namespace {

// Locate x in a sorted grid: index of the left node and the weight of the right one.
std::pair<std::size_t, double> bracket(const std::vector<double>& g, double x) {
  if (x <= g.front()) return {0, 0.0};
  if (x >= g.back()) return {g.size() - 2, 1.0};
  const auto it = std::upper_bound(g.begin(), g.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - g.begin()) - 1;
  return {j, (x - g[j]) / (g[j + 1] - g[j])};
}

}  // namespace

// ---------------------------------------------------------------------------
// VolterraKernel

VolterraKernel::VolterraKernel(KernelKind kind, std::string name, Fn fn, double horizon, double hurst, double lambda)
    : kind_(kind),
      name_(std::move(name)),
      fn_(std::make_shared<const Fn>(std::move(fn))),
      horizon_(horizon),
      hurst_(hurst),
      lambda_(lambda) {
  check_horizon(horizon);
}

double VolterraKernel::operator()(double t, double s) const {
  if (s > t) return 0.0;
  return (*fn_)(t, s);
}

VolterraKernel VolterraKernel::molchan_golosov(double hurst, double horizon) {
  check_hurst(hurst);
  auto eval = std::make_shared<const MgEval>(hurst);
  std::ostringstream name;
  name << "mg(" << hurst << ")";
  return VolterraKernel(KernelKind::molchan_golosov, name.str(), [eval](double t, double s) { return (*eval)(t, s); },
                        horizon, hurst);
}

VolterraKernel VolterraKernel::riemann_liouville(double hurst, double horizon) {
  check_hurst(hurst);
  const double ig = specfun::reciprocal_gamma(hurst + 0.5);
  std::ostringstream name;
  name << "rl(" << hurst << ")";
  return VolterraKernel(KernelKind::riemann_liouville, name.str(),
                        [hurst, ig](double t, double s) { return rl_value(hurst, ig, t, s); }, horizon, hurst);
}

VolterraKernel VolterraKernel::fou(double hurst, double lambda, double horizon, std::size_t quad_nodes,
                                   FouConvention convention, FouBase base) {
  check_hurst(hurst);
  if (!std::isfinite(lambda)) throw DomainError("fOU: lambda must be finite");
  auto eval = std::make_shared<const FouEval>(hurst, lambda, quad_nodes, convention, base);
  std::ostringstream name;
  name << "fou(" << hurst << "," << lambda << "," << to_string(convention) << ","
       << (base == FouBase::molchan_golosov ? "mg" : "rl") << ")";
  return VolterraKernel(KernelKind::fou, name.str(), [eval](double t, double s) { return (*eval)(t, s); }, horizon,
                        hurst, lambda);
}

VolterraKernel VolterraKernel::brownian(double horizon) {
  return VolterraKernel(KernelKind::brownian, "brownian", [](double, double) { return 1.0; }, horizon, 0.5);
}

VolterraKernel VolterraKernel::constant_volatility(std::function<double(double)> vol, double horizon) {
  if (!vol) throw ValidationError("constant_volatility: empty volatility function");
  return VolterraKernel(KernelKind::constant_volatility, "constant_volatility",
                        [vol = std::move(vol)](double, double s) { return vol(s); }, horizon, 0.5);
}

VolterraKernel VolterraKernel::tabulated(KernelTable table, double horizon) {
  if (table.t.size() < 2 || table.s.size() < 2 || table.values.size() != table.t.size() * table.s.size()) {
    throw ValidationError("tabulated kernel: malformed table");
  }
  auto tab = std::make_shared<const KernelTable>(std::move(table));
  return VolterraKernel(
      KernelKind::tabulated, "tabulated",
      [tab](double t, double s) {
        const auto [i, u] = bracket(tab->t, t);
        const auto [j, v] = bracket(tab->s, s);
        return (1.0 - u) * (1.0 - v) * tab->at(i, j) + u * (1.0 - v) * tab->at(i + 1, j) +
               (1.0 - u) * v * tab->at(i, j + 1) + u * v * tab->at(i + 1, j + 1);
      },
      horizon, 0.5);
}

VolterraKernel VolterraKernel::custom(std::string name, Fn fn, double horizon, double hurst) {
  if (!fn) throw ValidationError("custom kernel: empty function");
  check_hurst(hurst);
  return VolterraKernel(KernelKind::custom, std::move(name), std::move(fn), horizon, hurst);
}

VolterraKernel levy_noncanonical_kernel(double horizon) {
  return VolterraKernel::custom(
      "levy_noncanonical",
      [](double t, double s) {
        const double q = s / t;
        return 3.0 - 12.0 * q + 10.0 * q * q;
      },
      horizon);
}

// ---------------------------------------------------------------------------
// measures

IntensityMeasure IntensityMeasure::lebesgue() {
  IntensityMeasure m;
  m.name_ = "lebesgue";
  return m;
}

IntensityMeasure IntensityMeasure::with_density(std::function<double(double)> density, std::string name) {
  if (!density) throw ValidationError("intensity measure: empty density");
  IntensityMeasure m;
  m.density_ = std::make_shared<const std::function<double(double)>>(std::move(density));
  m.name_ = std::move(name);
  return m;
}

IntensityMeasure IntensityMeasure::cantor() {
  IntensityMeasure m;
  m.tag_ = SingularTag::cantor;
  m.name_ = "cantor";
  return m;
}

double IntensityMeasure::density(double s) const {
  if (tag_) return 0.0;
  if (!density_) return 1.0;
  const double d = (*density_)(s);
  if (!(d >= 0.0)) throw ValidationError("intensity measure '" + name_ + "' has a negative density");
  return d;
}

double IntensityMeasure::cdf(double s) const {
  if (!tag_) throw ValidationError("cdf is only provided for singular measures");
  return cantor_function(s);
}

double geometric_mean_density(const IntensityMeasure& m1, const IntensityMeasure& m2, double s) {
  if (m1.singular() || m2.singular()) return 0.0;
  return std::sqrt(m1.density(s) * m2.density(s));
}

// ---------------------------------------------------------------------------
// process specs

GaussianProcessSpec::GaussianProcessSpec(std::vector<ProcessComponent> components, double horizon)
    : components_(std::move(components)), horizon_(horizon) {
  check_horizon(horizon);
  if (components_.empty()) throw ValidationError("process spec needs at least one component");
  for (const auto& c : components_) {
    if (std::abs(c.kernel.horizon() - horizon) > 1e-12 * horizon) {
      throw ValidationError("process spec: component horizon differs from the spec horizon");
    }
  }
}

GaussianProcessSpec GaussianProcessSpec::single(VolterraKernel kernel, IntensityMeasure measure) {
  const double T = kernel.horizon();
  return GaussianProcessSpec({ProcessComponent{std::move(kernel), std::move(measure)}}, T);
}

double GaussianProcessSpec::min_hurst() const {
  double h = 1.0;
  for (const auto& c : components_) h = std::min(h, c.kernel.hurst());
  return h;
}

void GaussianProcessSpec::check_measure_ordering(const std::vector<double>& nodes) const {
  for (std::size_t n = 0; n + 1 < components_.size(); ++n) {
    const auto& hi = components_[n].measure;
    const auto& lo = components_[n + 1].measure;
    if (hi.singular() || lo.singular()) {
      throw ValidationError("measure ordering: singular components are not supported in multiplicity > 1");
    }
    for (double s : nodes) {
      if (hi.density(s) == 0.0 && lo.density(s) > 0.0) {
        std::ostringstream msg;
        msg << "measure ordering violated: component " << n + 2 << " charges s = " << s << " where component "
            << n + 1 << " does not";
        throw ValidationError(msg.str());
      }
    }
  }
}

double covariance(const VolterraKernel& kernel, const IntensityMeasure& measure, double t, double s,
                  const quad::QuadratureGrid& grid) {
  if (measure.singular()) throw ValidationError("covariance: singular intensity measures are not supported");
  if (t < 0.0 || s < 0.0) throw DomainError("covariance: negative time");
  const double m = std::min(t, s);
  if (m == 0.0) return 0.0;
  const double g = grid.grading > 0.0 ? grid.grading : quad::grading_exponent(kernel.hurst());
  const quad::Rule rule = quad::graded_rule(grid.scheme, 0.0, m, grid.s_nodes, g, quad::Cluster::both);
  // t and s enter symmetrically; order them so the result is exactly symmetric.
  const double a = std::max(t, s), b = m;
  return rule.integrate([&](double r) { return kernel(a, r) * kernel(b, r) * measure.density(r); });
}

}  // namespace awgp
