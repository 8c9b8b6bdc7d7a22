#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "awgp/quadrature.hpp"

namespace awgp {

enum class KernelKind { molchan_golosov, riemann_liouville, fou, brownian, constant_volatility, tabulated, custom };

std::string to_string(KernelKind k);

/// Base kernel of the fractional Ornstein-Uhlenbeck kernel.
enum class FouBase { molchan_golosov, riemann_liouville };

/// How the exponential weight enters the fOU kernel.
///   as_printed     k(t,s) + int_s^t exp(lambda (t - r)) k(r,s) dr
///   mild_solution  k(t,s) - lambda int_s^t exp(-lambda (t - r)) k(r,s) dr,
///                  the kernel of int_0^t exp(-lambda (t - u)) dB_H(u),
///                  i.e. of the solution of dX = -lambda X dt + dB_H.
enum class FouConvention { as_printed, mild_solution };

std::string to_string(FouConvention c);
FouConvention fou_convention_from_string(const std::string& s);

/// Molchan-Golosov kernel
///   k_H(t,s) = Gamma(H + 1/2)^-1 (t - s)^(H - 1/2) F(H - 1/2, 1/2 - H, H + 1/2, 1 - t/s)
/// for 0 < s <= t, and 0 for s > t. Throws SingularityError for s <= 0.
double eval_mg_kernel(double hurst, double t, double s);

/// Riemann-Liouville kernel Gamma(H + 1/2)^-1 (t - s)^(H - 1/2) for s < t.
/// Zero on the diagonal unless H = 1/2.
double eval_rl_kernel(double hurst, double t, double s);

double eval_fou_kernel(double hurst, double lambda, double t, double s, std::size_t quad_nodes = 64,
                       FouConvention convention = FouConvention::as_printed,
                       FouBase base = FouBase::molchan_golosov);

/// Cantor function (Devil's staircase) from the first 52 ternary digits.
double cantor_function(double t);

/// Kernel sampled on a rectangular (t, s) grid; values row-major in t.
struct KernelTable {
  std::vector<double> t;
  std::vector<double> s;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * s.size() + j]; }
};

/// Reads the `t,s,value` CSV format. Grid coordinates must form a full
/// rectangle; values with s > t must be zero.
KernelTable read_kernel_table(std::istream& in);
KernelTable load_kernel_table(const std::string& path);

/// Immutable Volterra kernel k(t, s) on [0, T]^2 with k(t, s) = 0 for s > t.
class VolterraKernel {
 public:
  using Fn = std::function<double(double, double)>;

  static VolterraKernel molchan_golosov(double hurst, double horizon);
  static VolterraKernel riemann_liouville(double hurst, double horizon);
  static VolterraKernel fou(double hurst, double lambda, double horizon, std::size_t quad_nodes = 64,
                            FouConvention convention = FouConvention::as_printed,
                            FouBase base = FouBase::molchan_golosov);
  static VolterraKernel brownian(double horizon);
  /// k(t, s) = vol(s): the martingale int_0^t vol(s) dM(s).
  static VolterraKernel constant_volatility(std::function<double(double)> vol, double horizon);
  static VolterraKernel tabulated(KernelTable table, double horizon);
  /// Arbitrary kernel; evaluation at s > t is forced to 0.
  static VolterraKernel custom(std::string name, Fn fn, double horizon, double hurst = 0.5);

  double operator()(double t, double s) const;

  KernelKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  double horizon() const noexcept { return horizon_; }
  /// Hurst index controlling the singular behaviour; 1/2 for regular kernels.
  double hurst() const noexcept { return hurst_; }
  double lambda() const noexcept { return lambda_; }
  /// True for kernels of the form (t - s)^(H - 1/2) times a smooth factor.
  bool fractional() const noexcept {
    return kind_ == KernelKind::molchan_golosov || kind_ == KernelKind::riemann_liouville ||
           kind_ == KernelKind::fou;
  }

 private:
  VolterraKernel(KernelKind kind, std::string name, Fn fn, double horizon, double hurst, double lambda = 0.0);

  KernelKind kind_;
  std::string name_;
  std::shared_ptr<const Fn> fn_;
  double horizon_;
  double hurst_;
  double lambda_;
};

/// Lévy's non-canonical representation of Brownian motion:
/// k(t, s) = 3 - 12 (s/t) + 10 (s/t)^2 for s <= t.
VolterraKernel levy_noncanonical_kernel(double horizon);

enum class SingularTag { cantor };

/// Intensity measure of a driving Gaussian martingale: either absolutely
/// continuous with a density, or a tagged singular measure.
class IntensityMeasure {
 public:
  static IntensityMeasure lebesgue();
  static IntensityMeasure with_density(std::function<double(double)> density, std::string name);
  /// The Cantor measure dF on [0, 1] (F extended by 1 beyond t = 1).
  static IntensityMeasure cantor();

  bool singular() const noexcept { return tag_.has_value(); }
  std::optional<SingularTag> singular_tag() const noexcept { return tag_; }
  const std::string& name() const noexcept { return name_; }
  /// Density w.r.t. Lebesgue measure; 0 for singular measures.
  double density(double s) const;
  /// Distribution function mu([0, s]); only provided for singular measures.
  double cdf(double s) const;

 private:
  IntensityMeasure() = default;
  std::shared_ptr<const std::function<double(double)>> density_;
  std::optional<SingularTag> tag_;
  std::string name_;
};

/// Density of the geometric mean sqrt(mu1 mu2); 0 whenever one side is singular
/// and the other is not.
double geometric_mean_density(const IntensityMeasure& m1, const IntensityMeasure& m2, double s);

struct ProcessComponent {
  VolterraKernel kernel;
  IntensityMeasure measure;
};

/// Canonical representation X(t) = sum_n int_0^t k^n(t, s) dM^n(s).
class GaussianProcessSpec {
 public:
  GaussianProcessSpec(std::vector<ProcessComponent> components, double horizon);
  static GaussianProcessSpec single(VolterraKernel kernel, IntensityMeasure measure = IntensityMeasure::lebesgue());

  std::size_t multiplicity() const noexcept { return components_.size(); }
  double horizon() const noexcept { return horizon_; }
  const std::vector<ProcessComponent>& components() const noexcept { return components_; }
  const ProcessComponent& component(std::size_t i) const { return components_.at(i); }
  /// Smallest Hurst index among the kernels.
  double min_hurst() const;

  /// Checks mu^1 >> mu^2 >> ... on the given nodes: the density of mu^(n+1)
  /// must vanish wherever the density of mu^n does. Throws ValidationError.
  void check_measure_ordering(const std::vector<double>& nodes) const;

 private:
  std::vector<ProcessComponent> components_;
  double horizon_;
};

/// R(t, s) = int_0^(t ^ s) k(t, r) k(s, r) mu(dr) for an absolutely continuous
/// measure, by a graded rule clustered at both ends of [0, t ^ s].
double covariance(const VolterraKernel& kernel, const IntensityMeasure& measure, double t, double s,
                  const quad::QuadratureGrid& grid = {});

}  // namespace awgp
