#include "awgp/oracles.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "awgp/errors.hpp"
#include "awgp/parallel.hpp"

namespace awgp::oracles {

double bruteforce_discrete_cross_term(const Eigen::MatrixXd& k1, const Eigen::MatrixXd& k2, double step) {
  if (k1.rows() != k2.rows() || k1.cols() != k2.cols()) throw DimensionMismatch("brute force: factor sizes differ");
  if (!(step > 0.0 && step <= 1.0)) throw DomainError("brute force: step must lie in (0, 1]");
  const long points = static_cast<long>(std::llround(2.0 / step));
  const Eigen::MatrixXd prod = k1.transpose() * k2;
  double total = 0.0;
  for (Eigen::Index n = 0; n < prod.rows(); ++n) {
    const double d = prod(n, n);
    double best = -std::numeric_limits<double>::infinity();
    for (long i = 0; i <= points; ++i) {
      const double rho = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(points);
      best = std::max(best, rho * d);
    }
    total += best;
  }
  return total;
}

OracleVerdict mc_formula_check(const GaussianProcessSpec& spec1, const GaussianProcessSpec& spec2, TimeGrid grid,
                               std::size_t n_paths, std::uint64_t seed, double allowance,
                               const quad::QuadratureGrid& qgrid, NoiseOptions opts) {
  if (spec1.multiplicity() != 1 || spec2.multiplicity() != 1) {
    throw ValidationError("mc_formula_check needs unit multiplicity");
  }
  const auto& c1 = spec1.component(0);
  const auto& c2 = spec2.component(0);
  for (const auto* c : {&c1, &c2}) {
    if (c->measure.singular() || c->measure.name() != "lebesgue") {
      throw ValidationError("mc_formula_check simulates Lebesgue intensities only");
    }
  }
  const DistanceReport formula = continuous_aw_unit(spec1, spec2, qgrid);

  // control: sign of the optimal correlation at each cell midpoint
  std::vector<double> signs(grid.steps);
  parallel_for(grid.steps, qgrid.threads, [&](std::size_t j) {
    signs[j] = optimal_correlation_at(c1.kernel, c2.kernel, grid.time(j) + 0.5 * grid.dt(), qgrid);
  });
  const auto control = CouplingControl::piecewise_constant(signs, grid.horizon);
  const CoupledNoiseGenerator gen(c1.kernel, c2.kernel, control, grid, seed, opts);
  const std::size_t w = grid.steps + 1;
  std::vector<double> cost(n_paths);
  parallel_for(n_paths, opts.threads, [&](std::size_t p) {
    std::vector<double> z1(w), z2(w);
    gen.generate(p, z1, z2);
    double c = 0.0;
    for (std::size_t m = 0; m < grid.steps; ++m) c += (z1[m] - z2[m]) * (z1[m] - z2[m]);
    cost[p] = c * grid.dt();
  });
  const auto [mean, se] = mean_and_se(cost);

  OracleVerdict v;
  v.target = formula.distance_squared;
  v.oracle = mean;
  v.statistical_allowance = 3.0 * se;
  v.discretization_allowance = allowance * std::abs(formula.distance_squared);
  v.tolerance = v.statistical_allowance + v.discretization_allowance;
  v.pass = std::abs(v.target - v.oracle) <= v.tolerance;
  std::ostringstream d;
  d.precision(10);
  d << "formula " << v.target << ", monte carlo " << mean << " +- " << se << " (n = " << n_paths
    << ", M = " << grid.steps << "); |diff| = " << std::abs(v.target - v.oracle) << " vs 3 SE " << 3.0 * se
    << " + bias budget " << v.discretization_allowance;
  v.diagnostics = d.str();
  return v;
}

std::vector<Eigen::MatrixXd> psd_feasibility_sampler(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                     std::size_t n_samples, std::uint64_t seed) {
  const Eigen::MatrixXd ra = psd_sqrt(a, 1e-10);
  const Eigen::MatrixXd rb = psd_sqrt(b, 1e-10);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    Eigen::MatrixXd q(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < q.rows(); ++i)
      for (Eigen::Index j = 0; j < q.cols(); ++j) q(i, j) = normal(rng);
    const double top = Eigen::JacobiSVD<Eigen::MatrixXd>(q).singularValues()(0);
    const double u = unif(rng);
    q *= top > 0.0 ? u / top : 0.0;
    out.push_back(ra * q * rb);
  }
  return out;
}

OracleVerdict quadrature_crosscheck(const std::function<double(double)>& f, double a, double b, quad::Scheme first,
                                    quad::Scheme second, std::size_t nodes, double grading, quad::Cluster cluster,
                                    double tol) {
  const double x = quad::graded_rule(first, a, b, nodes, grading, cluster).integrate(f);
  const double y = quad::graded_rule(second, a, b, nodes, grading, cluster).integrate(f);
  OracleVerdict v;
  v.target = x;
  v.oracle = y;
  v.tolerance = tol * std::max(std::abs(x), std::abs(y));
  v.pass = std::abs(x - y) <= v.tolerance;
  std::ostringstream d;
  d.precision(15);
  d << quad::to_string(first) << " " << x << " vs " << quad::to_string(second) << " " << y;
  v.diagnostics = d.str();
  return v;
}

long double hyp2f1_reference(double a, double b, double c, double z) {
  if (z > 0.0) throw DomainError("hyp2f1_reference: z must be <= 0");
  if (z < -1e5) throw DomainError("hyp2f1_reference: |z| above 1e5 is out of range");
  if (z == 0.0) return 1.0L;
  // F(a, b; c; z) = (1 - z)^(-a) F(a, c - b; c; w), w = z / (z - 1) in [0, 1)
  const long double la = a, lb = static_cast<long double>(c) - b, lc = c;
  const long double w = static_cast<long double>(z) / (static_cast<long double>(z) - 1.0L);
  long double sum = 1.0L, term = 1.0L;
  for (long n = 0; n < 100000000L; ++n) {
    const long double dn = static_cast<long double>(n);
    const long double ratio = (la + dn) * (lb + dn) / ((lc + dn) * (dn + 1.0L)) * w;
    term *= ratio;
    sum += term;
    if (term == 0.0L) return std::pow(1.0L - static_cast<long double>(z), -la) * sum;
    // geometric bound on the remaining tail once the term ratio is below 1
    const long double q = std::max(std::fabs(ratio), w);
    if (q < 1.0L && std::fabs(term) * q / (1.0L - q) <= 1e-16L * std::fabs(sum)) {
      return std::pow(1.0L - static_cast<long double>(z), -la) * sum;
    }
  }
  throw NonConvergenceError("hyp2f1_reference: series did not converge");
}

double mg_kernel_reference(double hurst, double t, double s) {
  if (s > t) return 0.0;
  if (!(s > 0.0)) throw SingularityError("reference kernel needs s > 0");
  const long double f = hyp2f1_reference(hurst - 0.5, 0.5 - hurst, hurst + 0.5, 1.0 - t / s);
  return static_cast<double>(std::pow(static_cast<long double>(t - s), static_cast<long double>(hurst) - 0.5L) * f /
                             std::tgamma(static_cast<long double>(hurst) + 0.5L));
}

double fbm_variance_constant(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("Hurst index must lie in (0, 1)");
  if (std::abs(hurst - 0.5) < 1e-12) return 1.0;
  return std::tgamma(2.0 - 2.0 * hurst) * std::cos(std::numbers::pi * hurst) /
         (std::numbers::pi * hurst * (1.0 - 2.0 * hurst));
}

double fbm_covariance(double hurst, double t, double s) {
  const double e = 2.0 * hurst;
  return 0.5 * fbm_variance_constant(hurst) * (std::pow(t, e) + std::pow(s, e) - std::pow(std::abs(t - s), e));
}

CovMatrix fbm_discretized_covariance(double hurst, double horizon, std::size_t n) {
  if (n == 0) throw DomainError("discretized covariance needs n >= 1");
  const double dt = horizon / static_cast<double>(n);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = dt * fbm_covariance(hurst, (static_cast<double>(i) + 0.5) * dt, (static_cast<double>(j) + 0.5) * dt);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return CovMatrix(std::move(m));
}

double optimal_volatility_jacobi(double hurst, double r, double horizon, std::size_t nodes) {
  if (!(r > 0.0)) throw SingularityError("optimal volatility is singular at r = 0");
  if (!(r < horizon)) throw DomainError("optimal volatility needs r < T");
  const quad::Rule rule = quad::gauss_jacobi_interval(r, horizon, nodes, hurst - 0.5, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double s = rule.nodes[i];
    const long double f = hyp2f1_reference(hurst - 0.5, 0.5 - hurst, hurst + 0.5, 1.0 - s / r);
    acc += rule.weights[i] * static_cast<double>(f / std::tgamma(static_cast<long double>(hurst) + 0.5L));
  }
  return acc / (horizon - r);
}

SampleCovariance mc_covariance(const VolterraKernel& kernel, TimeGrid grid, const std::vector<std::size_t>& indices,
                               std::size_t n_paths, std::uint64_t seed, NoiseOptions opts) {
  if (n_paths < 2) throw DomainError("mc_covariance needs at least two paths");
  for (auto i : indices)
    if (i > grid.steps) throw DomainError("mc_covariance: grid index out of range");
  const CoupledNoiseGenerator gen(kernel, kernel, CouplingControl::synchronous(), grid, seed, opts);
  const std::size_t k = indices.size(), w = grid.steps + 1;
  std::vector<double> samples(n_paths * k);
  parallel_for(n_paths, opts.threads, [&](std::size_t p) {
    std::vector<double> z1(w), z2(w);
    gen.generate(p, z1, z2);
    for (std::size_t a = 0; a < k; ++a) samples[p * k + a] = z1[indices[a]];
  });
  SampleCovariance out;
  const auto ki = static_cast<Eigen::Index>(k);
  out.cov.resize(ki, ki);
  out.se.resize(ki, ki);
  std::vector<double> prod(n_paths);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      // centred paths: the noise has mean zero
      for (std::size_t p = 0; p < n_paths; ++p) prod[p] = samples[p * k + a] * samples[p * k + b];
      const auto [m, se] = mean_and_se(prod);
      out.cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = m;
      out.cov(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = m;
      out.se(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = se;
      out.se(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = se;
    }
  }
  return out;
}

PathEnsemble exact_cholesky_paths(const VolterraKernel& kernel, TimeGrid grid, std::size_t n_paths,
                                  std::uint64_t seed, const quad::QuadratureGrid& qgrid) {
  const std::size_t M = grid.steps;
  const auto leb = IntensityMeasure::lebesgue();
  Eigen::MatrixXd cov(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = covariance(kernel, leb, grid.time(i + 1), grid.time(j + 1), qgrid);
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  const Eigen::MatrixXd l = cholesky_causal_factor(CovMatrix(cov)).matrix();
  PathEnsemble e;
  e.grid = grid;
  e.n_paths = n_paths;
  e.seed = seed;
  e.substream_policy = "splitmix64(seed, path, stream 2); exact Cholesky of the grid covariance";
  e.values.assign(n_paths * (M + 1), 0.0);
  parallel_for(n_paths, qgrid.threads, [&](std::size_t p) {
    CounterRng rng(seed, p, 2);
    std::normal_distribution<double> normal;
    Eigen::VectorXd xi(static_cast<Eigen::Index>(M));
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = normal(rng);
    const Eigen::VectorXd z = l * xi;
    for (std::size_t m = 0; m < M; ++m) e.values[p * (M + 1) + m + 1] = z(static_cast<Eigen::Index>(m));
  });
  return e;
}

VarianceEstimate fou_terminal_variance(double hurst, double lambda, TimeGrid grid, std::size_t n_paths,
                                       std::uint64_t seed, NoiseOptions opts) {
  FsdeSpec spec;
  spec.kernel = VolterraKernel::molchan_golosov(hurst, grid.horizon);
  spec.drift = ScalarFunction::linear(-lambda);
  spec.diffusion = ScalarFunction::constant(1.0);
  spec.x0 = 0.0;
  auto [x1, x2] = terminal_samples(spec, spec, CouplingControl::synchronous(), grid, n_paths, seed, opts);
  std::vector<double> sq(x1.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = x1[i] * x1[i];
  const auto [m, se] = mean_and_se(sq);
  return {m, se};
}

}  // namespace awgp::oracles
