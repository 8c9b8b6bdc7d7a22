#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "awgp/quadrature.hpp"

namespace awgp {

struct MartingaleApproxResult {
  double hurst = 0.5;
  double horizon = 1.0;
  /// rho tabulated at the r-nodes of the quadrature.
  std::vector<double> r;
  std::vector<double> rho;
  double distance_squared = 0.0;

  /// Linear interpolation of the table; constant extension beyond the
  /// first and last node.
  double rho_at(double x) const;
};

/// (1 / (T - r)) int_r^T k_H(s, r) ds by graded quadrature clustered at s = r.
/// Throws SingularityError for r <= 0 and DomainError for r >= T.
double optimal_volatility(double hurst, double r, double horizon, std::size_t quad_nodes = 128,
                          quad::Scheme scheme = quad::Scheme::graded_gauss_legendre);

/// int_r^T (k_H(s, r) - c)^2 ds with the inner rule of mart_approx_distance.
double pointwise_cost(double hurst, double r, double horizon, double c, const quad::QuadratureGrid& grid = {});

/// The optimal constant c for pointwise_cost, i.e. the rule's weighted mean of
/// k_H(., r) on [r, T].
double pointwise_optimal_volatility(double hurst, double r, double horizon, const quad::QuadratureGrid& grid = {});

/// int_0^T int_r^T (k_H(s, r) - rho(r))^2 ds dr for an arbitrary volatility rho.
double martingale_cost(double hurst, double horizon, const std::function<double(double)>& rho,
                       const quad::QuadratureGrid& grid = {});

/// Best martingale approximation of fBM(H) on [0, T].
MartingaleApproxResult mart_approx_distance(double hurst, double horizon, const quad::QuadratureGrid& grid = {});

}  // namespace awgp
