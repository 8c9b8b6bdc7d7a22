#include <cmath>
#include <random>

#include "awgp/errors.hpp"
#include "awgp/gauss_aw.hpp"
#include "awgp/oracles.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace awgp;
using namespace awgp::oracles;

namespace {

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  Eigen::MatrixXd s = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  return 0.5 * (s + s.transpose());
}

double min_block_eigenvalue(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& g) {
  const auto m = a.rows(), n = b.rows();
  Eigen::MatrixXd block(m + n, m + n);
  block << a, g, g.transpose(), b;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(block).eigenvalues().minCoeff();
}

GaussianProcessSpec fbm(double h) { return GaussianProcessSpec::single(VolterraKernel::molchan_golosov(h, 1.0)); }

}  // namespace

TEST_CASE("brute-force cross term") {
  CHECK(bruteforce_discrete_cross_term(Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd::Identity(4, 4)) == 4.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -3.0;
  CHECK(bruteforce_discrete_cross_term(d, Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(5.0).epsilon(1e-14));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::MatrixXd k1 = Eigen::MatrixXd::Zero(8, 8), k2 = Eigen::MatrixXd::Zero(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j <= i; ++j) {
        k1(i, j) = g(rng);
        k2(i, j) = g(rng);
      }
    const double direct = (k1.transpose() * k2).diagonal().cwiseAbs().sum();
    CHECK(std::abs(bruteforce_discrete_cross_term(k1, k2) - direct) <= 1e-9);
    CHECK(std::abs(discrete_aw_factors(k1, k2).cross_term - direct) <= 1e-9);
  }
}

TEST_CASE("feasibility sampler") {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd a = random_spd(rng, 3), b = random_spd(rng, 4);
  // the two extreme contractions
  CHECK(min_block_eigenvalue(a, b, Eigen::MatrixXd::Zero(3, 4)) >= -1e-10);
  const Eigen::MatrixXd a2 = random_spd(rng, 3), b2 = random_spd(rng, 3);
  CHECK(min_block_eigenvalue(a2, b2, psd_sqrt(a2) * psd_sqrt(b2)) >= -1e-10);

  const auto samples = psd_feasibility_sampler(a, b, 1000, 3);
  CHECK(samples.size() == 1000);
  for (const auto& gam : samples) CHECK(min_block_eigenvalue(a, b, gam) >= -1e-10);
  std::normal_distribution<double> g;
  for (int k = 0; k < 10; ++k) {
    Eigen::MatrixXd c(3, 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) c(i, j) = g(rng);
    const double bound = trace_bound_optimal_gamma(a, b, c).bound;
    double best = -1e300;
    for (const auto& gam : samples) best = std::max(best, (c * gam.transpose()).trace());
    CHECK(best <= bound + 1e-9);
  }
  CHECK(psd_feasibility_sampler(a, b, 5, 9)[2] == psd_feasibility_sampler(a, b, 5, 9)[2]);
}

TEST_CASE("quadrature crosscheck") {
  const auto lin = quadrature_crosscheck([](double t) { return t; }, 0.0, 1.0, quad::Scheme::graded_midpoint,
                                         quad::Scheme::graded_gauss_legendre);
  CHECK(lin.pass);
  CHECK(lin.target == doctest::Approx(0.5).epsilon(1e-5));
  const auto sing = quadrature_crosscheck([](double s) { return std::pow(1.0 - s, 0.25); }, 0.0, 1.0,
                                          quad::Scheme::graded_midpoint, quad::Scheme::graded_gauss_legendre, 256, 2.0,
                                          quad::Cluster::right, 1e-3);
  CHECK(sing.pass);
  CHECK(sing.oracle == doctest::Approx(0.8).epsilon(1e-6));
  const auto k1 = VolterraKernel::molchan_golosov(0.5, 1.0), k2 = VolterraKernel::molchan_golosov(0.75, 1.0);
  const auto cross = quadrature_crosscheck([&](double s) { return node_products(k1, k2, s).inner; }, 0.0, 1.0,
                                           quad::Scheme::graded_midpoint, quad::Scheme::graded_gauss_legendre, 128,
                                           quad::grading_exponent(0.5, 0.75), quad::Cluster::both, 1e-3);
  CHECK(cross.pass);
  CHECK(test::rel_err(cross.oracle, continuous_aw_fbm(0.5, 0.75, 1.0).cross_term) <= 1e-3);
  const auto fail = quadrature_crosscheck([](double s) { return 1.0 / std::sqrt(s); }, 0.0, 1.0,
                                          quad::Scheme::graded_midpoint, quad::Scheme::graded_gauss_legendre, 8, 1.0,
                                          quad::Cluster::none, 1e-8);
  CHECK_FALSE(fail.pass);
}

TEST_CASE("fBM reference formulas") {
  CHECK(fbm_variance_constant(0.5) == 1.0);
  CHECK(fbm_variance_constant(0.75) == doctest::Approx(1.0638460810704871).epsilon(1e-14));
  CHECK(fbm_covariance(0.5, 0.7, 0.4) == doctest::Approx(0.4));
  const auto c = fbm_discretized_covariance(0.75, 1.0, 16);
  CHECK(c.size() == 16);
  CHECK(c.matrix()(0, 0) == doctest::Approx(fbm_covariance(0.75, 1.0 / 32, 1.0 / 32) / 16.0));
}

TEST_CASE("optimal volatility oracle") {
  CHECK(optimal_volatility_jacobi(0.5, 0.3, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(test::rel_err(optimal_volatility_jacobi(0.7, 0.5, 1.0, 32), optimal_volatility_jacobi(0.7, 0.5, 1.0, 64)) <=
        1e-10);
}

TEST_CASE("sample covariance and exact Cholesky paths") {
  const auto k = VolterraKernel::brownian(1.0);
  const TimeGrid g(1.0, 16);
  const auto sc = mc_covariance(k, g, {8, 16}, 20000, 4);
  CHECK(std::abs(sc.cov(0, 0) - 0.5) <= 4.0 * sc.se(0, 0));
  CHECK(std::abs(sc.cov(1, 0) - 0.5) <= 4.0 * sc.se(1, 0));
  CHECK(std::abs(sc.cov(1, 1) - 1.0) <= 4.0 * sc.se(1, 1));
  const auto mg = VolterraKernel::molchan_golosov(0.75, 1.0);
  const auto paths = exact_cholesky_paths(mg, g, 20000, 5);
  std::vector<double> sq(paths.n_paths);
  for (std::size_t p = 0; p < paths.n_paths; ++p) sq[p] = paths.at(p, 16) * paths.at(p, 16);
  const auto [v, se] = mean_and_se(sq);
  CHECK(std::abs(v - fbm_covariance(0.75, 1.0, 1.0)) <= 4.0 * se);
  const auto again = exact_cholesky_paths(mg, g, 20, 5);
  CHECK(again.at(3, 7) == paths.at(3, 7));
}

TEST_CASE("Monte Carlo formula check") {
  const auto same = mc_formula_check(fbm(0.7), fbm(0.7), TimeGrid(1.0, 64), 500, 1);
  CHECK(same.pass);
  CHECK(std::abs(same.target) <= 1e-12);
  CHECK(same.oracle == 0.0);

  const auto v = mc_formula_check(fbm(0.5), fbm(0.75), TimeGrid(1.0, 256), 10000, 7);
  CHECK(v.pass);
  CHECK(v.discretization_allowance == doctest::Approx(0.02 * v.target));
  CHECK(v.statistical_allowance > 0.0);
  CHECK(v.tolerance == doctest::Approx(v.statistical_allowance + v.discretization_allowance));
  const auto w = mc_formula_check(fbm(0.5), fbm(0.75), TimeGrid(1.0, 256), 10000, 7);
  CHECK(w.oracle == v.oracle);

  const auto ou = GaussianProcessSpec::single(VolterraKernel::fou(0.6, 1.0, 1.0, 64, FouConvention::mild_solution));
  CHECK(mc_formula_check(fbm(0.6), ou, TimeGrid(1.0, 256), 10000, 8).pass);
  CHECK_THROWS_AS(mc_formula_check(fbm(0.6), GaussianProcessSpec::single(VolterraKernel::brownian(1.0),
                                                                          IntensityMeasure::cantor()),
                                   TimeGrid(1.0, 64), 10, 1),
                  ValidationError);
}

TEST_CASE("fOU terminal variance estimate is reproducible") {
  const auto a = fou_terminal_variance(0.7, 1.0, TimeGrid(1.0, 32), 1000, 3);
  const auto b = fou_terminal_variance(0.7, 1.0, TimeGrid(1.0, 32), 1000, 3);
  CHECK(a.variance == b.variance);
  CHECK(a.std_error > 0.0);
}
