#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "awgp/kernels.hpp"
#include "awgp/quadrature.hpp"

namespace awgp {

/// Symmetric positive definite covariance matrix of an N-step process.
class CovMatrix {
 public:
  /// Validates symmetry (relative 1e-12) and finiteness; positive
  /// definiteness is checked by the factorization.
  explicit CovMatrix(Eigen::MatrixXd entries);

  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double trace() const { return m_.trace(); }

  /// CSV: N rows of N comma-separated reals.
  static CovMatrix read_csv(std::istream& in);
  static CovMatrix load_csv(const std::string& path);
  void write_csv(std::ostream& out) const;

 private:
  Eigen::MatrixXd m_;
};

/// Lower-triangular matrix with positive diagonal.
class TriangularFactor {
 public:
  explicit TriangularFactor(Eigen::MatrixXd lower);

  std::size_t size() const noexcept { return static_cast<std::size_t>(l_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return l_; }

 private:
  Eigen::MatrixXd l_;
};

/// Cholesky factor K with K K^T = sigma. A pivot below
/// `pivot_rel_tol * max diagonal` raises NotPositiveDefinite.
TriangularFactor cholesky_causal_factor(const CovMatrix& sigma, double pivot_rel_tol = 1e-10);

struct GridMeta {
  std::string scheme = "none";
  std::size_t s_nodes = 0;
  std::size_t t_nodes = 0;
  double s_grading = 1.0;
  double t_grading = 1.0;
  bool crosschecked = false;
  std::string crosscheck_scheme = "none";
  double crosscheck_value = 0.0;
  double crosscheck_tol = 0.0;
};

struct DistanceReport {
  double distance_squared = 0.0;
  double trace_term = 0.0;
  double cross_term = 0.0;
  /// Step indices (discrete) or s-nodes (continuous).
  std::vector<double> nodes;
  /// Optimal correlation sign per node (unit multiplicity).
  std::vector<double> optimal_correlation;
  /// Optimal orthogonal coupling factor per node (higher multiplicity).
  std::vector<Eigen::MatrixXd> optimal_gamma;
  GridMeta grid;
};

/// Adapted distance between N(0, sigma1) and N(0, sigma2):
/// tr sigma1 + tr sigma2 - 2 sum_n |(K1^T K2)_nn|.
DistanceReport discrete_aw(const CovMatrix& sigma1, const CovMatrix& sigma2);

/// Same formula with explicitly supplied causal factors (any sign pattern on
/// the diagonals).
DistanceReport discrete_aw_factors(const Eigen::MatrixXd& k1, const Eigen::MatrixXd& k2);

/// Continuous-time distance for unit multiplicity.
DistanceReport continuous_aw_unit(const GaussianProcessSpec& spec1, const GaussianProcessSpec& spec2,
                                  const quad::QuadratureGrid& grid = {});

/// Distance between two fractional Brownian motions in their Molchan-Golosov
/// representation, as the double integral of the squared kernel difference.
DistanceReport continuous_aw_fbm(double h1, double h2, double horizon, const quad::QuadratureGrid& grid = {});

/// Partition sum of Hilbert-Schmidt norms over `partition_count` uniform cells.
double triangular_integral(const GaussianProcessSpec& spec1, const GaussianProcessSpec& spec2,
                           std::size_t partition_count, const quad::QuadratureGrid& grid = {});

/// Distance for finite multiplicities via per-node trace norms.
DistanceReport continuous_aw_multi(const GaussianProcessSpec& spec1, const GaussianProcessSpec& spec2,
                                   const quad::QuadratureGrid& grid = {});

/// Symmetric square root of a PSD matrix; eigenvalues below -tol * max(1, |lambda_max|)
/// raise DomainError, smaller negatives are clamped.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a, double tol = 1e-9);

struct TraceBound {
  double bound = 0.0;
  Eigen::MatrixXd gamma;
};

/// Maximiser of tr(C Gamma^T) over cross-covariances Gamma compatible with
/// marginal covariances A and B.
TraceBound trace_bound_optimal_gamma(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c,
                                     double tol = 1e-9);

struct LevyCheckReport {
  /// Largest |R(t, s) - min(t, s)| over the covariance test points.
  double max_covariance_error = 0.0;
  double covariance_at_half = 0.0;
  /// The formula evaluated with the non-canonical kernel against the Brownian kernel.
  double naive_distance = 0.0;
  double self_distance = 0.0;
  double tolerance = 0.0;
  bool covariance_ok = false;
};

LevyCheckReport levy_noncanonical_check(const quad::QuadratureGrid& grid = {});

/// sign <k1(., s), k2(., s)> with ties resolved to +1.
double optimal_correlation_at(const VolterraKernel& k1, const VolterraKernel& k2, double s,
                              const quad::QuadratureGrid& grid = {});

/// Per-node pieces of the unit-multiplicity formula at a single s:
/// squared norms of k1(., s), k2(., s) on [s, T] and their inner product.
struct NodeProducts {
  double norm1 = 0.0;
  double norm2 = 0.0;
  double inner = 0.0;
};

NodeProducts node_products(const VolterraKernel& k1, const VolterraKernel& k2, double s,
                           const quad::QuadratureGrid& grid = {});

}  // namespace awgp
