#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "awgp/fsde.hpp"
#include "awgp/gauss_aw.hpp"
#include "awgp/kernels.hpp"
#include "awgp/quadrature.hpp"

namespace awgp::oracles {

struct OracleVerdict {
  double target = 0.0;
  double oracle = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// Statistical part of the tolerance (MC checks), zero otherwise.
  double statistical_allowance = 0.0;
  /// Fixed bias budget (MC checks), zero otherwise.
  double discretization_allowance = 0.0;
  std::string diagnostics;
};

/// Maximum of sum_n rho_n (K1^T K2)_nn over rho in [-1, 1]^N by a per-coordinate
/// grid of step `step`.
double bruteforce_discrete_cross_term(const Eigen::MatrixXd& k1, const Eigen::MatrixXd& k2, double step = 1e-4);

/// Simulates the coupling that uses, on each time cell, the sign of
/// <k1(., s), k2(., s)> at the cell midpoint, and compares the Monte Carlo cost
/// with continuous_aw_unit within 3 SE + `allowance` relative.
OracleVerdict mc_formula_check(const GaussianProcessSpec& spec1, const GaussianProcessSpec& spec2, TimeGrid grid,
                               std::size_t n_paths, std::uint64_t seed, double allowance = 0.02,
                               const quad::QuadratureGrid& qgrid = {}, NoiseOptions opts = {});

/// Feasible cross-covariances Gamma = A^(1/2) Q B^(1/2), ||Q|| <= 1.
std::vector<Eigen::MatrixXd> psd_feasibility_sampler(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                     std::size_t n_samples, std::uint64_t seed);

/// Integrates f over [a, b] with two schemes and compares them.
OracleVerdict quadrature_crosscheck(const std::function<double(double)>& f, double a, double b, quad::Scheme first,
                                    quad::Scheme second, std::size_t nodes = 256, double grading = 1.0,
                                    quad::Cluster cluster = quad::Cluster::none, double tol = 1e-5);

/// Direct series of F(a, b; c; z), -1e5 <= z <= 0, summed in long double at
/// the Pfaff argument until a geometric bound on the tail is below 1e-16.
long double hyp2f1_reference(double a, double b, double c, double z);

/// Molchan-Golosov kernel through hyp2f1_reference and std::tgamma;
/// requires t / s <= 1e5 + 1.
double mg_kernel_reference(double hurst, double t, double s);

/// Variance of the Molchan-Golosov fBM at t = 1:
/// Gamma(2 - 2H) cos(pi H) / (pi H (1 - 2H)), and 1 at H = 1/2.
double fbm_variance_constant(double hurst);

/// V_H / 2 (t^2H + s^2H - |t - s|^2H).
double fbm_covariance(double hurst, double t, double s);

/// n x n matrix dt R(t_i, t_j) at the cell midpoints t_i = (i - 1/2) dt.
CovMatrix fbm_discretized_covariance(double hurst, double horizon, std::size_t n);

/// Optimal martingale volatility by a Gauss-Jacobi rule carrying the factor
/// (s - r)^(H - 1/2) exactly.
double optimal_volatility_jacobi(double hurst, double r, double horizon, std::size_t nodes = 64);

struct SampleCovariance {
  Eigen::MatrixXd cov;
  /// Standard error of each entry.
  Eigen::MatrixXd se;
};

/// Sample covariance of Z at the given grid indices from the noise generator.
SampleCovariance mc_covariance(const VolterraKernel& kernel, TimeGrid grid, const std::vector<std::size_t>& indices,
                               std::size_t n_paths, std::uint64_t seed, NoiseOptions opts = {});

/// Paths sampled from the exact Gaussian law at the grid times (Cholesky of
/// the quadrature covariance); marginal-law oracle for the noise generator.
PathEnsemble exact_cholesky_paths(const VolterraKernel& kernel, TimeGrid grid, std::size_t n_paths,
                                  std::uint64_t seed, const quad::QuadratureGrid& qgrid = {});

/// Monte Carlo terminal variance of the Euler-simulated fOU dX = -lambda X dt + dZ.
struct VarianceEstimate {
  double variance = 0.0;
  double std_error = 0.0;
};

VarianceEstimate fou_terminal_variance(double hurst, double lambda, TimeGrid grid, std::size_t n_paths,
                                       std::uint64_t seed, NoiseOptions opts = {});

}  // namespace awgp::oracles
