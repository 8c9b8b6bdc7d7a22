#pragma once

#include <cstddef>

namespace awgp::specfun {

/// Parameters of the Gauss hypergeometric function F(a, b; c; z).
struct HypergeometricParams {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
};

/// Truncation control for the hypergeometric series. Summation stops once
/// three consecutive terms are each below `tail_tol * |partial sum|`.
struct SeriesOptions {
  std::size_t max_terms = 10000;
  double tail_tol = 1e-14;
};

/// Gamma function for x > 0 (Lanczos, g = 7, n = 9). Exact for small
/// positive integers. Throws DomainError for x <= 0 or NaN.
double gamma_fn(double x);

/// 1 / Gamma(x) on the whole real line; zero at the non-positive integers.
double reciprocal_gamma(double x);

/// Rising factorial (x)_n = x (x + 1) ... (x + n - 1), with (x)_0 = 1.
double pochhammer(double x, std::size_t n);

/// Direct power series of F(a, b; c; x) for |x| < 1.
/// Throws NonConvergenceError when the tail criterion is not met within
/// `opts.max_terms` terms.
double hyp2f1_series(const HypergeometricParams& p, double x, const SeriesOptions& opts = {});

/// F(a, b; c; z) for z <= 0.
///
/// The argument is first mapped into [0, 1) by the Pfaff transformation
///   F(a, b; c; z) = (1 - z)^(-a) F(a, c - b; c; z / (z - 1)).
/// For transformed arguments close to 1 the series is re-expanded around 1
/// with the standard connection formula, which keeps the number of terms
/// small even when |z| is huge (the Molchan-Golosov kernel near s = 0).
class Hyp2f1 {
 public:
  explicit Hyp2f1(const HypergeometricParams& p, const SeriesOptions& opts = {});

  double operator()(double z) const;

  const HypergeometricParams& params() const noexcept { return params_; }

 private:
  double transformed(double w, double v) const;  // v = 1 - w

  HypergeometricParams params_;
  SeriesOptions opts_;
  // Parameters after the Pfaff step: F(a, c - b; c; w).
  double ta_ = 0.0, tb_ = 0.0, tc_ = 0.0;
  bool terminating_ = false;
  bool connection_ok_ = false;
  double d_ = 0.0;        // tc - ta - tb
  double coef1_ = 0.0;    // Gamma(c) Gamma(d) / (Gamma(c - a) Gamma(c - b))
  double coef2_ = 0.0;    // Gamma(c) Gamma(-d) / (Gamma(a) Gamma(b))
};

/// Convenience wrapper around Hyp2f1 for one-off evaluations.
double hyp2f1(const HypergeometricParams& p, double z, const SeriesOptions& opts = {});

}  // namespace awgp::specfun
