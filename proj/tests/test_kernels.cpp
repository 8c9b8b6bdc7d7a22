#include <cmath>
#include <random>
#include <sstream>

#include "awgp/errors.hpp"
#include "awgp/kernels.hpp"
#include "awgp/oracles.hpp"
#include "awgp/specfun.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace awgp;

TEST_CASE("Molchan-Golosov kernel examples") {
  CHECK(eval_mg_kernel(0.5, 1.0, 0.3) == 1.0);
  CHECK(eval_mg_kernel(0.7, 0.4, 0.9) == 0.0);
  const double v = eval_mg_kernel(0.7, 1.0, 0.5);
  CHECK(test::rel_err(v, test::goldens().value("kernels.mg.h0.7_t1_s0.5")) <= 1e-12);
  CHECK_THROWS_AS(eval_mg_kernel(0.7, 1.0, 0.0), SingularityError);
  CHECK_THROWS_AS(eval_mg_kernel(1.0, 1.0, 0.5), DomainError);
}

TEST_CASE("Molchan-Golosov kernel matches the reference over the whole triangle") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double h = 0.05 + 0.9 * u(rng);
    const double t = 1e-3 + u(rng);
    const double s = t * std::max(std::pow(u(rng), 4.0), 1e-5);
    CHECK(test::rel_err(eval_mg_kernel(h, t, s), oracles::mg_kernel_reference(h, t, s)) <= 1e-10);
  }
}

TEST_CASE("H = 1/2 degeneracy") {
  double worst = 0.0;
  for (int i = 1; i <= 200; ++i) {
    for (int j = 1; j < i; ++j) worst = std::max(worst, std::abs(eval_mg_kernel(0.5, i / 200.0, j / 200.0) - 1.0));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("Riemann-Liouville kernel examples") {
  CHECK(eval_rl_kernel(0.5, 2.0, 1.0) == 1.0);
  CHECK(eval_rl_kernel(0.75, 1.0, 1.0) == 0.0);
  CHECK(eval_rl_kernel(0.75, 0.5, 1.0) == 0.0);
  const double v = eval_rl_kernel(0.75, 1.0, 0.5);
  CHECK(test::rel_err(v, std::pow(0.5, 0.25) / specfun::gamma_fn(1.25)) <= 1e-14);
  // Gamma(1.25) = 0.9064024770554771 from tables
  CHECK(test::rel_err(v, std::pow(0.5, 0.25) / 0.9064024770554771) <= 1e-14);
  CHECK(test::rel_err(v, test::goldens().value("kernels.rl.h0.75_t1_s0.5")) <= 1e-14);
}

TEST_CASE("fOU kernel examples") {
  CHECK(eval_fou_kernel(0.5, 0.0, 1.0, 0.4) == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(eval_fou_kernel(0.5, -1.0, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(eval_fou_kernel(0.5, 0.0, 1.0, 0.4, 64, FouConvention::mild_solution) == doctest::Approx(1.0));
  const double v = eval_fou_kernel(0.7, 0.0, 1.0, 0.5, 256);
  CHECK(test::rel_err(v, test::goldens().value("kernels.fou.h0.7_l0_t1_s0.5")) <= 1e-6);
  CHECK(test::rel_err(eval_fou_kernel(0.7, 0.0, 1.0, 0.5, 1024), v) <= 1e-6);
  // Brownian base: mild solution is the OU kernel exp(-lambda (t - s))
  CHECK(eval_fou_kernel(0.5, 1.3, 1.0, 0.25, 64, FouConvention::mild_solution) ==
        doctest::Approx(std::exp(-1.3 * 0.75)).epsilon(1e-10));
  CHECK(eval_fou_kernel(0.7, 1.0, 0.3, 0.6) == 0.0);
}

TEST_CASE("fOU convention names") {
  CHECK(fou_convention_from_string("as_printed") == FouConvention::as_printed);
  CHECK(fou_convention_from_string("mild_solution") == FouConvention::mild_solution);
  CHECK_THROWS_AS(fou_convention_from_string("other"), ValidationError);
}

TEST_CASE("causality for every kernel kind") {
  std::istringstream table("t,s,value\n0,0,1\n0,1,0\n1,0,1\n1,1,1\n");
  const std::vector<VolterraKernel> ks{
      VolterraKernel::molchan_golosov(0.7, 1.0), VolterraKernel::riemann_liouville(0.3, 1.0),
      VolterraKernel::fou(0.6, 1.0, 1.0),        VolterraKernel::brownian(1.0),
      VolterraKernel::constant_volatility([](double) { return 2.0; }, 1.0),
      VolterraKernel::tabulated(read_kernel_table(table), 1.0),
      VolterraKernel::custom("one", [](double, double) { return 1.0; }, 1.0),
      levy_noncanonical_kernel(1.0)};
  for (const auto& k : ks) {
    for (double t : {0.1, 0.4, 0.9}) {
      for (double s : {0.2, 0.5, 1.0}) {
        if (s > t) CHECK(k(t, s) == 0.0);
      }
    }
  }
}

TEST_CASE("nonnegativity and t-monotonicity for H > 1/2") {
  for (double h : {0.55, 0.75, 0.95}) {
    for (int i = 1; i <= 200; ++i) {
      const double t = i / 200.0;
      for (int j = 1; j <= 200; ++j) {
        const double s = j / 200.0;
        CHECK(eval_mg_kernel(h, t, s) >= 0.0);
        CHECK(eval_rl_kernel(h, t, s) >= 0.0);
        if (i > 1 && s < t) CHECK(eval_rl_kernel(h, t, s) >= eval_rl_kernel(h, t - 1.0 / 200.0, s));
      }
    }
  }
}

TEST_CASE("growth bound of the Molchan-Golosov kernel") {
  for (double h : {0.6, 0.8}) {
    double worst = 0.0;
    for (int i = 1; i <= 100; ++i) {
      for (int j = 1; j < i; ++j) {
        const double t = i / 100.0, s = j / 100.0;
        worst = std::max(worst, eval_mg_kernel(h, t, s) / (std::pow(s, 0.5 - h) * std::pow(t - s, h - 0.5)));
      }
    }
    CHECK(std::isfinite(worst));
    CHECK(worst < 10.0);
  }
}

TEST_CASE("covariance examples") {
  const auto leb = IntensityMeasure::lebesgue();
  CHECK(covariance(VolterraKernel::brownian(1.0), leb, 0.7, 0.4) == doctest::Approx(0.4).epsilon(1e-12));
  for (auto [t, s] : {std::pair{1.0, 0.5}, std::pair{0.3, 0.8}}) {
    CHECK(std::abs(covariance(VolterraKernel::molchan_golosov(0.5, 1.0), leb, t, s) - std::min(t, s)) <= 1e-10);
  }
  const double r = covariance(VolterraKernel::molchan_golosov(0.75, 1.0), leb, 1.0, 0.5);
  CHECK(test::rel_err(r, test::goldens().value("kernels.cov.mg0.75_t1_s0.5")) <= 1e-4);
  CHECK_THROWS_AS(covariance(VolterraKernel::brownian(1.0), IntensityMeasure::cantor(), 0.5, 0.5), ValidationError);
}

TEST_CASE("covariance symmetry") {
  const auto k = VolterraKernel::molchan_golosov(0.65, 1.0);
  const auto leb = IntensityMeasure::lebesgue();
  for (auto [t, s] : {std::pair{1.0, 0.5}, std::pair{0.2, 0.9}, std::pair{0.6, 0.61}}) {
    CHECK(std::abs(covariance(k, leb, t, s) - covariance(k, leb, s, t)) <= 1e-12);
  }
}

TEST_CASE("covariance with a density") {
  const auto mu = IntensityMeasure::with_density([](double s) { return 2.0 * s; }, "2s");
  CHECK(covariance(VolterraKernel::brownian(1.0), mu, 0.9, 0.5) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("Cantor function") {
  CHECK(cantor_function(0.0) == 0.0);
  CHECK(cantor_function(1.0 / 3.0) == 0.5);
  CHECK(cantor_function(1.0 / 9.0) == 0.25);
  // dyadic points keep 1 - t exact; F is only Hoelder continuous
  double prev = 0.0;
  for (int i = 0; i <= 16384; ++i) {
    const double t = i / 16384.0;
    const double f = cantor_function(t);
    CHECK(f >= prev);
    prev = f;
    CHECK(std::abs(cantor_function(1.0 - t) - (1.0 - f)) <= 1e-12);
  }
}

TEST_CASE("intensity measures") {
  const auto c = IntensityMeasure::cantor();
  CHECK(c.singular());
  CHECK(c.density(0.3) == 0.0);
  CHECK(c.cdf(0.5) == 0.5);
  const auto leb = IntensityMeasure::lebesgue();
  CHECK_FALSE(leb.singular());
  CHECK(leb.density(0.3) == 1.0);
  CHECK(geometric_mean_density(leb, c, 0.3) == 0.0);
  const auto d = IntensityMeasure::with_density([](double s) { return 4.0 * s; }, "4s");
  CHECK(geometric_mean_density(leb, d, 0.25) == doctest::Approx(1.0));
}

TEST_CASE("process spec and measure ordering") {
  const auto spec = GaussianProcessSpec::single(VolterraKernel::molchan_golosov(0.6, 1.0));
  CHECK(spec.multiplicity() == 1);
  CHECK(spec.min_hurst() == 0.6);
  const auto half = IntensityMeasure::with_density([](double s) { return s < 0.5 ? 1.0 : 0.0; }, "half");
  const GaussianProcessSpec ok({{VolterraKernel::brownian(1.0), IntensityMeasure::lebesgue()},
                                {VolterraKernel::brownian(1.0), half}},
                               1.0);
  CHECK_NOTHROW(ok.check_measure_ordering({0.25, 0.75}));
  const GaussianProcessSpec bad({{VolterraKernel::brownian(1.0), half},
                                 {VolterraKernel::brownian(1.0), IntensityMeasure::lebesgue()}},
                                1.0);
  CHECK_THROWS_AS(bad.check_measure_ordering({0.25, 0.75}), ValidationError);
  CHECK_THROWS_AS(GaussianProcessSpec({{VolterraKernel::brownian(2.0), IntensityMeasure::lebesgue()}}, 1.0),
                  ValidationError);
  CHECK_THROWS_AS(GaussianProcessSpec({}, 1.0), ValidationError);
}

TEST_CASE("tabulated kernels") {
  const auto k = VolterraKernel::tabulated(load_kernel_table(test::data_path("linear_kernel.csv")), 1.0);
  CHECK(k(0.8, 0.3) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(k(0.3, 0.8) == 0.0);
  CHECK_THROWS_AS(load_kernel_table(test::data_path("bad_kernel.csv")), ValidationError);
  CHECK_THROWS_AS(load_kernel_table(test::data_path("missing.csv")), ValidationError);
  std::istringstream holes("t,s,value\n0,0,1\n1,0,1\n1,1,1\n");
  CHECK_THROWS_AS(read_kernel_table(holes), ValidationError);
}

TEST_CASE("Levy non-canonical kernel") {
  const auto k = levy_noncanonical_kernel(1.0);
  CHECK(k(1.0, 0.5) == doctest::Approx(3.0 - 6.0 + 2.5));
  CHECK(k(0.5, 0.0) == 3.0);
}
