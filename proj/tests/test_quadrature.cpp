#include <cmath>
#include <vector>

#include "awgp/errors.hpp"
#include "awgp/parallel.hpp"
#include "awgp/quadrature.hpp"
#include "doctest.h"

using namespace awgp;
using namespace awgp::quad;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const Rule r = gauss_legendre(8);
  CHECK(r.integrate([](double) { return 1.0; }) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r.integrate([](double x) { return std::pow(x, 14); }) == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
}

TEST_CASE("Gauss-Jacobi carries the weight") {
  // int_0^1 (1 - s)^(H - 1/2) ds = 1 / (H + 1/2)
  const Rule r = gauss_jacobi_interval(0.0, 1.0, 10, 0.0, 0.25);
  CHECK(r.integrate([](double) { return 1.0; }) == doctest::Approx(0.8).epsilon(1e-14));
  const Rule j = gauss_jacobi(12, -0.3, 0.4);
  const double mass = std::pow(2.0, 1.1) * std::tgamma(0.7) * std::tgamma(1.4) / std::tgamma(2.1);
  CHECK(j.integrate([](double) { return 1.0; }) == doctest::Approx(mass).epsilon(1e-13));
}

TEST_CASE("graded rules avoid endpoints and integrate singular powers") {
  for (auto scheme : {Scheme::graded_midpoint, Scheme::graded_gauss_legendre}) {
    for (auto cl : {Cluster::none, Cluster::left, Cluster::right, Cluster::both}) {
      const Rule r = graded_rule(scheme, 0.0, 1.0, 64, 3.0, cl);
      for (double x : r.nodes) {
        CHECK(x > 0.0);
        CHECK(x < 1.0);
      }
      CHECK(r.integrate([](double x) { return x; }) == doctest::Approx(0.5).epsilon(1e-3));
    }
    const Rule left = graded_rule(scheme, 0.0, 1.0, 256, 4.0, Cluster::left);
    CHECK(left.integrate([](double x) { return std::pow(x, -0.4); }) == doctest::Approx(1.0 / 0.6).epsilon(1e-4));
  }
}

TEST_CASE("grading exponent") {
  CHECK(grading_exponent(0.5) == doctest::Approx(2.0));
  CHECK(grading_exponent(0.25) == doctest::Approx(2.0 / 0.75));
  CHECK(grading_exponent(0.5, 0.75) == doctest::Approx(4.0));
  CHECK(grading_exponent(0.99) <= 12.0);
}

TEST_CASE("scheme names round-trip") {
  for (auto s : {Scheme::graded_midpoint, Scheme::graded_gauss_legendre}) CHECK(scheme_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(scheme_from_string("trapezoid"), ValidationError);
}

TEST_CASE("parallel_for results do not depend on worker count") {
  std::vector<double> a(1000), b(1000);
  parallel_for(a.size(), 1, [&](std::size_t i) { a[i] = std::sin(static_cast<double>(i)); });
  parallel_for(b.size(), 4, [&](std::size_t i) { b[i] = std::sin(static_cast<double>(i)); });
  CHECK(pairwise_sum(a) == pairwise_sum(b));
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i >= 4) throw DomainError("index " + std::to_string(i));
                  }),
                  DomainError);
}
