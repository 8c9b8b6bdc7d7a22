#include <cmath>
#include <random>

#include "awgp/errors.hpp"
#include "awgp/oracles.hpp"
#include "awgp/specfun.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace awgp;
using namespace awgp::specfun;

TEST_CASE("gamma_fn examples") {
  CHECK(gamma_fn(1.0) == 1.0);
  CHECK(gamma_fn(5.0) == 24.0);
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
  CHECK_THROWS_AS(gamma_fn(-1.5), DomainError);
}

TEST_CASE("gamma_fn accuracy against std::tgamma on [0.1, 50]") {
  for (int i = 0; i <= 1000; ++i) {
    const double x = 0.1 + 49.9 * i / 1000.0;
    CHECK(test::rel_err(gamma_fn(x), std::tgamma(x)) <= 1e-13);
  }
}

TEST_CASE("gamma_fn recurrence on [0.1, 49]") {
  for (int i = 0; i < 1000; ++i) {
    const double x = 0.1 + 48.9 * i / 999.0;
    CHECK(test::rel_err(gamma_fn(x + 1.0), x * gamma_fn(x)) <= 1e-12);
  }
}

TEST_CASE("reciprocal_gamma vanishes at poles") {
  CHECK(reciprocal_gamma(0.0) == 0.0);
  CHECK(reciprocal_gamma(-3.0) == 0.0);
  CHECK(reciprocal_gamma(2.0) == doctest::Approx(1.0));
  CHECK(reciprocal_gamma(-0.5) == doctest::Approx(1.0 / std::tgamma(-0.5)).epsilon(1e-13));
}

TEST_CASE("pochhammer examples") {
  CHECK(pochhammer(3.7, 0) == 1.0);
  CHECK(pochhammer(2.0, 3) == 24.0);
  CHECK(pochhammer(0.5, 2) == 0.75);
}

TEST_CASE("hyp2f1 examples") {
  CHECK(hyp2f1({0.3, -0.2, 0.8}, 0.0) == 1.0);
  CHECK(hyp2f1({0.0, 2.5, 1.0}, -5.0) == 1.0);
  const double ln2 = hyp2f1({1.0, 1.0, 2.0}, -1.0);
  CHECK(test::rel_err(ln2, std::log(2.0)) <= 1e-11);
  CHECK(test::rel_err(ln2, test::goldens().value("specfun.hyp2f1.a1_b1_c2_z-1")) <= 1e-11);
}

TEST_CASE("hyp2f1 closed forms for z <= 0") {
  // F(1, 1; 2; z) = -ln(1 - z) / z
  for (double z : {-1e-3, -0.5, -3.0, -50.0}) {
    CHECK(test::rel_err(hyp2f1({1.0, 1.0, 2.0}, z), -std::log1p(-z) / z) <= 1e-11);
  }
  // F(a, b; b; z) = (1 - z)^(-a)
  for (double z : {-0.2, -7.0, -1e6}) {
    CHECK(test::rel_err(hyp2f1({0.3, 1.7, 1.7}, z), std::pow(1.0 - z, -0.3)) <= 1e-11);
  }
}

TEST_CASE("hyp2f1 agrees with the long double oracle over kernel parameters") {
  for (double h : {0.05, 0.2, 0.4, 0.6, 0.7, 0.85, 0.95}) {
    const HypergeometricParams p{h - 0.5, 0.5 - h, h + 0.5};
    for (double z : {-1e-6, -0.3, -0.99, -1.0, -4.0, -99.0, -1e3, -1e5}) {
      const double ref = static_cast<double>(oracles::hyp2f1_reference(p.a, p.b, p.c, z));
      CHECK(test::rel_err(hyp2f1(p, z), ref) <= 1e-11);
    }
  }
}

TEST_CASE("hyp2f1 at huge arguments") {
  // mpmath, 40 digits
  CHECK(test::rel_err(hyp2f1({0.2, -0.2, 1.2}, -1e12), 125.5966593606143) <= 1e-12);
  CHECK(test::rel_err(hyp2f1({-0.45, 0.45, 0.55}, -1e12), 220417.66274478248) <= 1e-12);
  // c - a - b integer: no connection formula, the plain series runs out of terms
  CHECK_THROWS_AS(hyp2f1({1.0, 1.0, 2.0}, -1e9), NonConvergenceError);
}

TEST_CASE("hyp2f1 parameter symmetry") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ab(-0.49, 0.49), zz(-100.0, 0.0);
  for (int i = 0; i < 200; ++i) {
    const double a = ab(rng), b = ab(rng), z = zz(rng);
    const double c = 1.0 + std::abs(ab(rng));
    CHECK(test::rel_err(hyp2f1({a, b, c}, z), hyp2f1({b, a, c}, z)) <= 1e-12);
  }
}

TEST_CASE("Pfaff consistency on (-1, 0] against the direct series") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ab(-0.49, 0.49), zz(-0.999, 0.0);
  for (int i = 0; i < 200; ++i) {
    const double a = ab(rng), b = ab(rng), z = zz(rng);
    const double c = a + 1.0;
    const double direct = hyp2f1_series({a, b, c}, z);
    const double pfaff = std::pow(1.0 - z, -a) * hyp2f1_series({a, c - b, c}, z / (z - 1.0));
    CHECK(test::rel_err(direct, pfaff) <= 1e-10);
    CHECK(test::rel_err(hyp2f1({a, b, c}, z), direct) <= 1e-10);
  }
}

TEST_CASE("Pfaff identity holds for the library on [-100, 0]") {
  for (int i = 0; i <= 100; ++i) {
    const double z = -static_cast<double>(i);
    const double a = 0.2, b = -0.2, c = 1.2;
    const double lhs = hyp2f1({a, b, c}, z);
    const double rhs = std::pow(1.0 - z, -a) * hyp2f1_series({a, c - b, c}, z / (z - 1.0), {100000, 1e-15});
    CHECK(test::rel_err(lhs, rhs) <= 1e-10);
  }
}

TEST_CASE("series reports non-convergence") {
  CHECK_THROWS_AS(hyp2f1_series({0.5, 0.5, 1.5}, 0.999999, {10, 1e-14}), NonConvergenceError);
}
