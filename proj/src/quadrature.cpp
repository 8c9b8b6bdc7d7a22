#include "awgp/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "awgp/errors.hpp"
#include "awgp/specfun.hpp"

namespace awgp::quad {

Rule gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("gauss_legendre: need at least one node");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const std::size_t m = (n + 1) / 2;
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = dn * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double dk = static_cast<double>(k);
      const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = dn * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

Rule gauss_jacobi(std::size_t n, double alpha, double beta) {
  if (n == 0) throw DomainError("gauss_jacobi: need at least one node");
  if (!(alpha > -1.0 && beta > -1.0)) throw DomainError("gauss_jacobi: exponents must exceed -1");
  const double ab = alpha + beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  for (std::size_t k = 0; k < n; ++k) {
    const double dk = static_cast<double>(k);
    if (k == 0) {
      diag(0) = (beta - alpha) / (ab + 2.0);
    } else {
      diag(k) = (beta * beta - alpha * alpha) / ((2.0 * dk + ab) * (2.0 * dk + ab + 2.0));
    }
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double dk = static_cast<double>(k);
    double bk;
    if (k == 1) {
      bk = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      const double s = 2.0 * dk + ab;
      bk = 4.0 * dk * (dk + alpha) * (dk + beta) * (dk + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    sub(k - 1) = std::sqrt(bk);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw NumericalError("gauss_jacobi: eigen solver failed");
  const double mu0 = std::pow(2.0, ab + 1.0) * specfun::gamma_fn(alpha + 1.0) *
                     specfun::gamma_fn(beta + 1.0) / specfun::gamma_fn(ab + 2.0);
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    r.nodes[i] = eig.eigenvalues()(idx);
    const double v0 = eig.eigenvectors()(0, idx);
    r.weights[i] = mu0 * v0 * v0;
  }
  return r;
}

Rule gauss_jacobi_interval(double a, double b, std::size_t n, double left_exponent, double right_exponent) {
  // (x - a) = h (1 + xi), (b - x) = h (1 - xi), h = (b - a) / 2
  Rule ref = gauss_jacobi(n, right_exponent, left_exponent);
  const double h = 0.5 * (b - a);
  const double scale = std::pow(h, left_exponent + right_exponent + 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    ref.nodes[i] = a + h * (1.0 + ref.nodes[i]);
    ref.weights[i] *= scale;
  }
  return ref;
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::graded_midpoint:
      return "graded_midpoint";
    case Scheme::graded_gauss_legendre:
      return "graded_gauss_legendre";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "graded_midpoint" || s == "midpoint") return Scheme::graded_midpoint;
  if (s == "graded_gauss_legendre" || s == "gauss_legendre") return Scheme::graded_gauss_legendre;
  throw ValidationError("unknown quadrature scheme '" + s + "'");
}

namespace {

// Map u in [0, 1] to [0, 1] clustering towards the requested end(s).
// Returns (phi(u), phi'(u)).
std::pair<double, double> grade(double u, double g, Cluster c) {
  switch (c) {
    case Cluster::none:
      return {u, 1.0};
    case Cluster::left:
      return {std::pow(u, g), g * std::pow(u, g - 1.0)};
    case Cluster::right: {
      const double v = 1.0 - u;
      return {1.0 - std::pow(v, g), g * std::pow(v, g - 1.0)};
    }
    case Cluster::both:
      if (u <= 0.5) {
        const double v = 2.0 * u;
        return {0.5 * std::pow(v, g), g * std::pow(v, g - 1.0)};
      } else {
        const double v = 2.0 * (1.0 - u);
        return {1.0 - 0.5 * std::pow(v, g), g * std::pow(v, g - 1.0)};
      }
  }
  return {u, 1.0};
}

const Rule& gl8() {
  static const Rule r = gauss_legendre(8);
  return r;
}

}  // namespace

Rule graded_rule(Scheme scheme, double a, double b, std::size_t n, double grading, Cluster cluster) {
  if (n == 0) throw DomainError("graded_rule: need at least one node");
  if (!(b > a)) throw DomainError("graded_rule: empty interval");
  if (!(grading >= 1.0)) grading = 1.0;
  const double len = b - a;
  Rule r;
  if (scheme == Scheme::graded_midpoint) {
    r.nodes.resize(n);
    r.weights.resize(n);
    const double du = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double u = (static_cast<double>(j) + 0.5) * du;
      const auto [phi, dphi] = grade(u, grading, cluster);
      r.nodes[j] = a + len * phi;
      r.weights[j] = len * dphi * du;
    }
    return r;
  }
  const Rule& base = gl8();
  const std::size_t panels = (n + 7) / 8;
  const double du = 1.0 / static_cast<double>(panels);
  r.nodes.reserve(panels * 8);
  r.weights.reserve(panels * 8);
  for (std::size_t p = 0; p < panels; ++p) {
    const double u0 = static_cast<double>(p) * du;
    for (std::size_t i = 0; i < base.size(); ++i) {
      const double u = u0 + 0.5 * du * (base.nodes[i] + 1.0);
      const auto [phi, dphi] = grade(u, grading, cluster);
      r.nodes.push_back(a + len * phi);
      r.weights.push_back(len * dphi * 0.5 * du * base.weights[i]);
    }
  }
  return r;
}

double grading_exponent(double h_min, double h_max) {
  double g = 2.0 / (h_min + 0.5);
  if (h_max > 0.5) g = std::max(g, 1.0 / (1.0 - h_max));
  return std::min(g, 12.0);
}

}  // namespace awgp::quad
