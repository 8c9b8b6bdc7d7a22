#include "awgp/gauss_aw.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "awgp/errors.hpp"
#include "awgp/parallel.hpp"

namespace awgp {

// ---------------------------------------------------------------------------
// matrices

CovMatrix::CovMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols()) throw DimensionMismatch("covariance matrix must be square");
  if (m_.rows() == 0) throw ValidationError("covariance matrix is empty");
  if (!m_.allFinite()) throw ValidationError("covariance matrix has non-finite entries");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "covariance matrix is not symmetric (max |S - S^T| = " << asym << ")";
    throw ValidationError(msg.str());
  }
}

CovMatrix CovMatrix::read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
        if (field.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw ValidationError("covariance CSV: non-numeric field on line " + std::to_string(lineno));
      }
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (n == 0) throw ValidationError("covariance CSV: no rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw DimensionMismatch("covariance CSV: row " + std::to_string(i + 1) + " has " +
                              std::to_string(rows[i].size()) + " entries, expected " + std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return CovMatrix(std::move(m));
}

CovMatrix CovMatrix::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open covariance file '" + path + "'");
  return read_csv(in);
}

void CovMatrix::write_csv(std::ostream& out) const {
  const auto old = out.precision(17);
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
      if (j) out << ',';
      out << m_(i, j);
    }
    out << '\n';
  }
  out.precision(old);
}

TriangularFactor::TriangularFactor(Eigen::MatrixXd lower) : l_(std::move(lower)) {
  if (l_.rows() != l_.cols()) throw DimensionMismatch("triangular factor must be square");
  for (Eigen::Index i = 0; i < l_.rows(); ++i) {
    if (!(l_(i, i) > 0.0)) throw ValidationError("triangular factor needs a positive diagonal");
    for (Eigen::Index j = i + 1; j < l_.cols(); ++j) {
      if (l_(i, j) != 0.0) throw ValidationError("triangular factor has entries above the diagonal");
    }
  }
}

TriangularFactor cholesky_causal_factor(const CovMatrix& sigma, double pivot_rel_tol) {
  const Eigen::MatrixXd& a = sigma.matrix();
  const Eigen::Index n = a.rows();
  const double tol = pivot_rel_tol * a.diagonal().cwiseAbs().maxCoeff();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > tol)) throw NotPositiveDefinite(static_cast<std::size_t>(j), d);
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return TriangularFactor(std::move(l));
}

DistanceReport discrete_aw_factors(const Eigen::MatrixXd& k1, const Eigen::MatrixXd& k2) {
  if (k1.rows() != k2.rows() || k1.cols() != k2.cols() || k1.rows() != k1.cols()) {
    throw DimensionMismatch("discrete_aw: factors must be square and of equal size");
  }
  const Eigen::Index n = k1.rows();
  DistanceReport r;
  r.trace_term = k1.squaredNorm() + k2.squaredNorm();
  std::vector<double> absd(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    // (K1^T K2)_ii = <column i of K1, column i of K2>
    const double d = k1.col(i).dot(k2.col(i));
    absd[static_cast<std::size_t>(i)] = std::abs(d);
    r.optimal_correlation.push_back(d < 0.0 ? -1.0 : 1.0);
    r.nodes.push_back(static_cast<double>(i + 1));
  }
  r.cross_term = pairwise_sum(absd);
  r.distance_squared = r.trace_term - 2.0 * r.cross_term;
  r.grid.scheme = "discrete";
  r.grid.s_nodes = static_cast<std::size_t>(n);
  return r;
}

DistanceReport discrete_aw(const CovMatrix& sigma1, const CovMatrix& sigma2) {
  if (sigma1.size() != sigma2.size()) {
    throw DimensionMismatch("discrete_aw: matrices have sizes " + std::to_string(sigma1.size()) + " and " +
                            std::to_string(sigma2.size()));
  }
  const auto f1 = cholesky_causal_factor(sigma1);
  const auto f2 = cholesky_causal_factor(sigma2);
  DistanceReport r = discrete_aw_factors(f1.matrix(), f2.matrix());
  // tr(K K^T) equals tr(Sigma) up to rounding; report the exact traces.
  r.trace_term = sigma1.trace() + sigma2.trace();
  r.distance_squared = r.trace_term - 2.0 * r.cross_term;
  return r;
}

// ---------------------------------------------------------------------------
// continuous time

namespace {

struct Gradings {
  double s = 1.0;
  double t = 1.0;
};

Gradings gradings_for(const std::vector<const VolterraKernel*>& ks, const quad::QuadratureGrid& grid) {
  if (grid.grading > 0.0) return {grid.grading, grid.grading};
  double hmin = 1.0, hmax = 0.0;
  for (const auto* k : ks) {
    hmin = std::min(hmin, k->hurst());
    hmax = std::max(hmax, k->hurst());
  }
  return {quad::grading_exponent(hmin, hmax), std::max(1.0, 2.0 / (hmin + 0.5))};
}

void check_horizons(const GaussianProcessSpec& a, const GaussianProcessSpec& b) {
  if (std::abs(a.horizon() - b.horizon()) > 1e-12 * std::max(a.horizon(), b.horizon())) {
    throw ValidationError("horizon mismatch between the two processes");
  }
}

// Values of several kernels at the t-nodes of [s, T] plus the weights.
struct TSamples {
  std::vector<double> weights;
  std::vector<std::vector<double>> values;  // per kernel
};

TSamples sample_t(const std::vector<const VolterraKernel*>& ks, double s, double T, quad::Scheme scheme,
                  std::size_t t_nodes, double t_grading) {
  TSamples out;
  out.values.resize(ks.size());
  if (!(T > s)) return out;
  const quad::Rule rule = quad::graded_rule(scheme, s, T, t_nodes, t_grading, quad::Cluster::left);
  out.weights = rule.weights;
  for (std::size_t k = 0; k < ks.size(); ++k) {
    auto& v = out.values[k];
    v.resize(rule.size());
    for (std::size_t j = 0; j < rule.size(); ++j) v[j] = (*ks[k])(rule.nodes[j], s);
  }
  return out;
}

double weighted_dot(const TSamples& ts, std::size_t a, std::size_t b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < ts.weights.size(); ++j) acc += ts.weights[j] * ts.values[a][j] * ts.values[b][j];
  return acc;
}

// s-nodes carrying a measure: a graded rule times the density for absolutely
// continuous measures, Stieltjes sums against the distribution function for
// singular ones.
struct SNodes {
  std::vector<double> nodes;
  std::vector<double> weights;
};

SNodes stieltjes_nodes(const IntensityMeasure& m, double T, std::size_t cells) {
  if (cells == 0) throw DomainError("singular_nodes must be positive");
  SNodes out;
  const double h = T / static_cast<double>(cells);
  double f_lo = m.cdf(0.0);
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = h * static_cast<double>(i);
    const double b = i + 1 == cells ? T : h * static_cast<double>(i + 1);
    const double f_hi = m.cdf(b);
    const double df = f_hi - f_lo;
    f_lo = f_hi;
    if (df <= 0.0) continue;
    out.nodes.push_back(0.5 * (a + b));
    out.weights.push_back(df);
  }
  return out;
}

// One evaluation of the unit-multiplicity formula with a fixed scheme.
struct UnitPass {
  double trace = 0.0;
  double cross = 0.0;
  std::vector<double> nodes;
  std::vector<double> correlation;
};

UnitPass unit_pass(const ProcessComponent& c1, const ProcessComponent& c2, double T, quad::Scheme scheme,
                   const quad::QuadratureGrid& grid, Gradings g) {
  UnitPass out;
  const std::vector<const VolterraKernel*> both{&c1.kernel, &c2.kernel};
  const bool sing1 = c1.measure.singular(), sing2 = c2.measure.singular();

  // Contribution of a single component's self norm against a singular measure.
  auto singular_trace = [&](const ProcessComponent& c) {
    const SNodes sn = stieltjes_nodes(c.measure, T, grid.singular_nodes);
    std::vector<double> terms(sn.nodes.size());
    const std::vector<const VolterraKernel*> one{&c.kernel};
    parallel_for(sn.nodes.size(), grid.threads, [&](std::size_t i) {
      const TSamples ts = sample_t(one, sn.nodes[i], T, scheme, grid.t_nodes, g.t);
      terms[i] = sn.weights[i] * weighted_dot(ts, 0, 0);
    });
    return pairwise_sum(terms);
  };

  if (!sing1 || !sing2) {
    const quad::Rule rule = quad::graded_rule(scheme, 0.0, T, grid.s_nodes, g.s, quad::Cluster::left);
    const std::size_t n = rule.size();
    std::vector<double> tr(n), cr(n), corr(n);
    parallel_for(n, grid.threads, [&](std::size_t i) {
      const double s = rule.nodes[i];
      const TSamples ts = sample_t(both, s, T, scheme, grid.t_nodes, g.t);
      const double d1 = c1.measure.density(s), d2 = c2.measure.density(s);
      const double n1 = sing1 ? 0.0 : weighted_dot(ts, 0, 0);
      const double n2 = sing2 ? 0.0 : weighted_dot(ts, 1, 1);
      const double in = weighted_dot(ts, 0, 1);
      tr[i] = rule.weights[i] * (n1 * d1 + n2 * d2);
      cr[i] = rule.weights[i] * std::abs(in) * geometric_mean_density(c1.measure, c2.measure, s);
      corr[i] = in < 0.0 ? -1.0 : 1.0;
    });
    out.trace = pairwise_sum(tr);
    out.cross = pairwise_sum(cr);
    out.nodes = rule.nodes;
    out.correlation = std::move(corr);
    if (sing1) out.trace += singular_trace(c1);
    if (sing2) out.trace += singular_trace(c2);
    return out;
  }

  // Both singular.
  if (c1.measure.singular_tag() != c2.measure.singular_tag()) {
    throw ValidationError("distinct singular measures are not supported");
  }
  const SNodes sn = stieltjes_nodes(c1.measure, T, grid.singular_nodes);
  const std::size_t n = sn.nodes.size();
  std::vector<double> tr(n), cr(n), corr(n);
  parallel_for(n, grid.threads, [&](std::size_t i) {
    const TSamples ts = sample_t(both, sn.nodes[i], T, scheme, grid.t_nodes, g.t);
    const double in = weighted_dot(ts, 0, 1);
    tr[i] = sn.weights[i] * (weighted_dot(ts, 0, 0) + weighted_dot(ts, 1, 1));
    cr[i] = sn.weights[i] * std::abs(in);
    corr[i] = in < 0.0 ? -1.0 : 1.0;
  });
  out.trace = pairwise_sum(tr);
  out.cross = pairwise_sum(cr);
  out.nodes = sn.nodes;
  out.correlation = std::move(corr);
  return out;
}

void fill_meta(GridMeta& meta, const quad::QuadratureGrid& grid, Gradings g) {
  meta.scheme = quad::to_string(grid.scheme);
  meta.s_nodes = grid.s_nodes;
  meta.t_nodes = grid.t_nodes;
  meta.s_grading = g.s;
  meta.t_grading = g.t;
  meta.crosschecked = grid.crosscheck;
  meta.crosscheck_scheme = grid.crosscheck ? quad::to_string(grid.crosscheck_scheme) : "none";
  meta.crosscheck_tol = grid.crosscheck ? grid.crosscheck_tol : 0.0;
}

void enforce_crosscheck(const char* what, double primary, double secondary, double scale, double tol) {
  if (std::abs(primary - secondary) > tol * std::max(scale, 1e-300)) {
    std::ostringstream msg;
    msg << std::setprecision(10) << what << ": quadrature schemes disagree (" << primary << " vs " << secondary
        << ", tolerance " << tol << " relative to " << scale << ")";
    throw NonConvergenceError(msg.str());
  }
}

}  // namespace

NodeProducts node_products(const VolterraKernel& k1, const VolterraKernel& k2, double s,
                           const quad::QuadratureGrid& grid) {
  const std::vector<const VolterraKernel*> both{&k1, &k2};
  const Gradings g = gradings_for(both, grid);
  const double T = std::min(k1.horizon(), k2.horizon());
  const TSamples ts = sample_t(both, s, T, grid.scheme, grid.t_nodes, g.t);
  if (ts.weights.empty()) return {};
  return {weighted_dot(ts, 0, 0), weighted_dot(ts, 1, 1), weighted_dot(ts, 0, 1)};
}

double optimal_correlation_at(const VolterraKernel& k1, const VolterraKernel& k2, double s,
                              const quad::QuadratureGrid& grid) {
  return node_products(k1, k2, s, grid).inner < 0.0 ? -1.0 : 1.0;
}

DistanceReport continuous_aw_unit(const GaussianProcessSpec& spec1, const GaussianProcessSpec& spec2,
                                  const quad::QuadratureGrid& grid) {
  if (spec1.multiplicity() != 1 || spec2.multiplicity() != 1) {
    throw ValidationError("continuous_aw_unit needs unit multiplicity on both sides");
  }
  check_horizons(spec1, spec2);
  const auto& c1 = spec1.component(0);
  const auto& c2 = spec2.component(0);
  const double T = spec1.horizon();
  const Gradings g = gradings_for({&c1.kernel, &c2.kernel}, grid);

  UnitPass p = unit_pass(c1, c2, T, grid.scheme, grid, g);
  DistanceReport r;
  r.trace_term = p.trace;
  r.cross_term = p.cross;
  r.distance_squared = p.trace - 2.0 * p.cross;
  r.nodes = std::move(p.nodes);
  r.optimal_correlation = std::move(p.correlation);
  fill_meta(r.grid, grid, g);
  if (grid.crosscheck) {
    const UnitPass q = unit_pass(c1, c2, T, grid.crosscheck_scheme, grid, g);
    r.grid.crosscheck_value = q.trace - 2.0 * q.cross;
    enforce_crosscheck("continuous_aw_unit", r.distance_squared, r.grid.crosscheck_value, r.trace_term,
                       grid.crosscheck_tol);
  }
  return r;
}

namespace {

struct FbmPass {
  double diff = 0.0;
  double trace = 0.0;
  double cross = 0.0;
  std::vector<double> nodes;
};

FbmPass fbm_pass(const VolterraKernel& k1, const VolterraKernel& k2, double T, quad::Scheme scheme,
                 const quad::QuadratureGrid& grid, Gradings g) {
  const std::vector<const VolterraKernel*> both{&k1, &k2};
  const quad::Rule rule = quad::graded_rule(scheme, 0.0, T, grid.s_nodes, g.s, quad::Cluster::left);
  const std::size_t n = rule.size();
  std::vector<double> df(n), tr(n), cr(n);
  parallel_for(n, grid.threads, [&](std::size_t i) {
    const TSamples ts = sample_t(both, rule.nodes[i], T, scheme, grid.t_nodes, g.t);
    double d = 0.0, a = 0.0, b = 0.0, c = 0.0;
    for (std::size_t j = 0; j < ts.weights.size(); ++j) {
      const double x = ts.values[0][j], y = ts.values[1][j], w = ts.weights[j];
      d += w * (x - y) * (x - y);
      a += w * x * x;
      b += w * y * y;
      c += w * x * y;
    }
    df[i] = rule.weights[i] * d;
    tr[i] = rule.weights[i] * (a + b);
    cr[i] = rule.weights[i] * std::abs(c);
  });
  return {pairwise_sum(df), pairwise_sum(tr), pairwise_sum(cr), rule.nodes};
}

}  // namespace

DistanceReport continuous_aw_fbm(double h1, double h2, double horizon, const quad::QuadratureGrid& grid) {
  const auto k1 = VolterraKernel::molchan_golosov(h1, horizon);
  const auto k2 = VolterraKernel::molchan_golosov(h2, horizon);
  const Gradings g = gradings_for({&k1, &k2}, grid);
  FbmPass p = fbm_pass(k1, k2, horizon, grid.scheme, grid, g);
  DistanceReport r;
  r.distance_squared = p.diff;
  r.trace_term = p.trace;
  r.cross_term = p.cross;
  r.nodes = std::move(p.nodes);
  // Both kernels are nonnegative, so the synchronous coupling is optimal everywhere.
  r.optimal_correlation.assign(r.nodes.size(), 1.0);
  fill_meta(r.grid, grid, g);
  if (grid.crosscheck) {
    r.grid.crosscheck_value = fbm_pass(k1, k2, horizon, grid.crosscheck_scheme, grid, g).diff;
    enforce_crosscheck("continuous_aw_fbm", r.distance_squared, r.grid.crosscheck_value, r.trace_term,
                       grid.crosscheck_tol);
  }
  return r;
}

// ---------------------------------------------------------------------------
// triangular integral

namespace {

// Gauss-Legendre rule on [a, b] through u -> u^gamma (gamma = 1: plain).
quad::Rule mapped_gl(const quad::Rule& ref, double a, double b, double gamma) {
  quad::Rule r;
  r.nodes.resize(ref.size());
  r.weights.resize(ref.size());
  const double len = b - a;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double u = 0.5 * (ref.nodes[i] + 1.0);
    const double wu = 0.5 * ref.weights[i];
    r.nodes[i] = a + len * std::pow(u, gamma);
    r.weights[i] = len * gamma * std::pow(u, gamma - 1.0) * wu;
  }
  return r;
}

}  // namespace

double triangular_integral(const GaussianProcessSpec& spec1, const GaussianProcessSpec& spec2,
                           std::size_t partition_count, const quad::QuadratureGrid& grid) {
  if (spec1.multiplicity() != 1 || spec2.multiplicity() != 1) {
    throw ValidationError("triangular_integral needs unit multiplicity on both sides");
  }
  if (partition_count == 0) throw DomainError("triangular_integral: partition_count must be positive");
  check_horizons(spec1, spec2);
  const auto& c1 = spec1.component(0);
  const auto& c2 = spec2.component(0);
  if (c1.measure.singular() || c2.measure.singular()) {
    throw ValidationError("triangular_integral: singular measures are not supported");
  }
  const double T = spec1.horizon();
  const Gradings g = gradings_for({&c1.kernel, &c2.kernel}, grid);
  const std::size_t q = std::max<std::size_t>(4, (256 + partition_count - 1) / partition_count);
  const quad::Rule ref = quad::gauss_legendre(q);
  const double h = T / static_cast<double>(partition_count);

  // <k1(., r1), k2(., r2)> on [max(r1, r2), T], weighted by both densities.
  auto gfun = [&](double r1, double r2) {
    const double m = std::max(r1, r2);
    if (!(T > m)) return 0.0;
    const quad::Rule tr = quad::graded_rule(grid.scheme, m, T, grid.t_nodes, g.t, quad::Cluster::left);
    double acc = tr.integrate([&](double t) { return c1.kernel(t, r1) * c2.kernel(t, r2); });
    return acc * std::sqrt(c1.measure.density(r1) * c2.measure.density(r2));
  };

  std::vector<double> cell(partition_count);
  parallel_for(partition_count, grid.threads, [&](std::size_t p) {
    const double a = h * static_cast<double>(p);
    const double b = p + 1 == partition_count ? T : h * static_cast<double>(p + 1);
    const double gamma = p == 0 ? g.s : 1.0;
    const quad::Rule outer = mapped_gl(ref, a, b, gamma);
    double acc = 0.0;
    // split the square along the diagonal, where G has a kink
    for (std::size_t i = 0; i < outer.size(); ++i) {
      const double x = outer.nodes[i];
      const quad::Rule inner = mapped_gl(ref, a, x, gamma);
      for (std::size_t j = 0; j < inner.size(); ++j) {
        const double y = inner.nodes[j];
        const double g1 = gfun(y, x);
        const double g2 = gfun(x, y);
        acc += outer.weights[i] * inner.weights[j] * (g1 * g1 + g2 * g2);
      }
    }
    cell[p] = std::sqrt(acc);
  });
  return pairwise_sum(cell);
}

// ---------------------------------------------------------------------------
// higher multiplicity

namespace {

struct MultiPass {
  double trace = 0.0;
  double cross = 0.0;
  std::vector<double> nodes;
  std::vector<Eigen::MatrixXd> gamma;
};

MultiPass multi_pass(const GaussianProcessSpec& s1, const GaussianProcessSpec& s2, quad::Scheme scheme,
                     const quad::QuadratureGrid& grid, Gradings g, bool keep_gamma) {
  const double T = s1.horizon();
  const std::size_t m = s1.multiplicity(), n = s2.multiplicity();
  std::vector<const VolterraKernel*> ks;
  for (const auto& c : s1.components()) ks.push_back(&c.kernel);
  for (const auto& c : s2.components()) ks.push_back(&c.kernel);
  const quad::Rule rule = quad::graded_rule(scheme, 0.0, T, grid.s_nodes, g.s, quad::Cluster::left);
  const std::size_t ns = rule.size();
  std::vector<double> tr(ns), cr(ns);
  std::vector<Eigen::MatrixXd> gam(keep_gamma ? ns : 0);
  parallel_for(ns, grid.threads, [&](std::size_t i) {
    const double s = rule.nodes[i];
    const TSamples ts = sample_t(ks, s, T, scheme, grid.t_nodes, g.t);
    std::vector<double> d1(m), d2(n);
    for (std::size_t a = 0; a < m; ++a) d1[a] = s1.component(a).measure.density(s);
    for (std::size_t b = 0; b < n; ++b) d2[b] = s2.component(b).measure.density(s);
    auto ratio = [](double num, double den) { return num == 0.0 ? 0.0 : num / den; };
    double trace = 0.0;
    for (std::size_t a = 0; a < m; ++a) trace += d1[a] * weighted_dot(ts, a, a);
    for (std::size_t b = 0; b < n; ++b) trace += d2[b] * weighted_dot(ts, m + b, m + b);
    Eigen::MatrixXd mm(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const double scale = std::sqrt(ratio(d1[a], d1[0]) * ratio(d2[b], d2[0]));
        mm(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = scale * weighted_dot(ts, a, m + b);
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(mm, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double tn = svd.singularValues().sum();
    if (!std::isfinite(tn)) {
      std::ostringstream msg;
      msg << "continuous_aw_multi: SVD failed at node s = " << s;
      throw NumericalError(msg.str());
    }
    tr[i] = rule.weights[i] * trace;
    cr[i] = rule.weights[i] * tn * std::sqrt(d1[0] * d2[0]);
    if (keep_gamma) gam[i] = svd.matrixU() * svd.matrixV().transpose();
  });
  return {pairwise_sum(tr), pairwise_sum(cr), rule.nodes, std::move(gam)};
}

}  // namespace

DistanceReport continuous_aw_multi(const GaussianProcessSpec& spec1, const GaussianProcessSpec& spec2,
                                   const quad::QuadratureGrid& grid) {
  check_horizons(spec1, spec2);
  bool singular = false;
  for (const auto* sp : {&spec1, &spec2})
    for (const auto& c : sp->components()) singular = singular || c.measure.singular();
  if (singular) {
    if (spec1.multiplicity() == 1 && spec2.multiplicity() == 1) return continuous_aw_unit(spec1, spec2, grid);
    throw ValidationError("continuous_aw_multi: singular measures need unit multiplicity");
  }
  std::vector<const VolterraKernel*> ks;
  for (const auto& c : spec1.components()) ks.push_back(&c.kernel);
  for (const auto& c : spec2.components()) ks.push_back(&c.kernel);
  const Gradings g = gradings_for(ks, grid);
  {
    const quad::Rule probe = quad::graded_rule(grid.scheme, 0.0, spec1.horizon(), grid.s_nodes, g.s,
                                               quad::Cluster::left);
    spec1.check_measure_ordering(probe.nodes);
    spec2.check_measure_ordering(probe.nodes);
  }
  MultiPass p = multi_pass(spec1, spec2, grid.scheme, grid, g, true);
  DistanceReport r;
  r.trace_term = p.trace;
  r.cross_term = p.cross;
  r.distance_squared = p.trace - 2.0 * p.cross;
  r.nodes = std::move(p.nodes);
  r.optimal_gamma = std::move(p.gamma);
  if (spec1.multiplicity() == 1 && spec2.multiplicity() == 1) {
    for (const auto& gm : r.optimal_gamma) r.optimal_correlation.push_back(gm(0, 0) < 0.0 ? -1.0 : 1.0);
  }
  fill_meta(r.grid, grid, g);
  if (grid.crosscheck) {
    const MultiPass q = multi_pass(spec1, spec2, grid.crosscheck_scheme, grid, g, false);
    r.grid.crosscheck_value = q.trace - 2.0 * q.cross;
    enforce_crosscheck("continuous_aw_multi", r.distance_squared, r.grid.crosscheck_value, r.trace_term,
                       grid.crosscheck_tol);
  }
  return r;
}

// ---------------------------------------------------------------------------
// trace bound

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a, double tol) {
  if (a.rows() != a.cols()) throw DimensionMismatch("psd_sqrt: matrix must be square");
  if (a.rows() == 0) return a;
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericalError("psd_sqrt: eigen decomposition failed");
  const Eigen::VectorXd lam = eig.eigenvalues();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  if (lam.minCoeff() < -tol * scale) {
    std::ostringstream msg;
    msg << "matrix is not positive semidefinite (eigenvalue " << lam.minCoeff() << ")";
    throw DomainError(msg.str());
  }
  const Eigen::VectorXd root = lam.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

TraceBound trace_bound_optimal_gamma(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c,
                                     double tol) {
  if (c.rows() != a.rows() || c.cols() != b.rows()) {
    throw DimensionMismatch("trace bound: C must be m x n for A m x m and B n x n");
  }
  const Eigen::MatrixXd ra = psd_sqrt(a, tol);
  const Eigen::MatrixXd rb = psd_sqrt(b, tol);
  const Eigen::MatrixXd m = ra * c * rb;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TraceBound out;
  out.bound = svd.singularValues().sum();
  out.gamma = ra * svd.matrixU() * svd.matrixV().transpose() * rb;
  return out;
}

// ---------------------------------------------------------------------------
// non-canonical representation

LevyCheckReport levy_noncanonical_check(const quad::QuadratureGrid& grid) {
  const double T = 1.0;
  const auto levy = levy_noncanonical_kernel(T);
  const auto bm = VolterraKernel::brownian(T);
  const auto leb = IntensityMeasure::lebesgue();
  LevyCheckReport r;
  r.tolerance = 1e-4;
  for (int i = 1; i <= 10; ++i) {
    for (int j = 1; j <= 10; ++j) {
      const double t = 0.1 * i, s = 0.1 * j;
      r.max_covariance_error = std::max(r.max_covariance_error, std::abs(covariance(levy, leb, t, s, grid) - std::min(t, s)));
    }
  }
  r.covariance_at_half = covariance(levy, leb, 0.5, 0.5, grid);
  r.covariance_ok = r.max_covariance_error <= r.tolerance;
  const auto spec_bm = GaussianProcessSpec::single(bm);
  r.naive_distance = continuous_aw_unit(spec_bm, GaussianProcessSpec::single(levy), grid).distance_squared;
  r.self_distance = continuous_aw_unit(spec_bm, spec_bm, grid).distance_squared;
  return r;
}

}  // namespace awgp
