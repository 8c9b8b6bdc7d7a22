#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "awgp/kernels.hpp"

namespace awgp {

/// Named real function of the state, used for drifts and diffusions.
class ScalarFunction {
 public:
  using Fn = std::function<double(double)>;

  ScalarFunction(std::string name, Fn fn);

  static ScalarFunction zero();
  static ScalarFunction constant(double c);
  /// x -> a x
  static ScalarFunction linear(double a);
  static ScalarFunction tanh();
  static ScalarFunction identity();
  /// x -> 2 + sin x
  static ScalarFunction two_plus_sin();
  /// Piecewise linear through (x, value) pairs, constant beyond the ends.
  static ScalarFunction tabulated(std::vector<double> xs, std::vector<double> ys, std::string name = "tabulated");
  /// CSV with header `x,value`.
  static ScalarFunction load_tabulated(const std::string& path);

  /// Parses registry names: zero, constant(c), linear(a), tanh, identity,
  /// two_plus_sin, tabulated(path).
  static ScalarFunction parse(const std::string& text);

  double operator()(double x) const { return (*fn_)(x); }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
  std::shared_ptr<const Fn> fn_;
};

/// Uniform time grid 0 = t_0 < ... < t_M = T.
struct TimeGrid {
  double horizon = 1.0;
  std::size_t steps = 256;

  TimeGrid() = default;
  TimeGrid(double T, std::size_t M);

  double dt() const noexcept { return horizon / static_cast<double>(steps); }
  double time(std::size_t m) const noexcept { return horizon * static_cast<double>(m) / static_cast<double>(steps); }
};

enum class ControlKind { synchronous, antithetic, independent, piecewise_constant, tabulated };

std::string to_string(ControlKind k);

/// Deterministic correlation schedule rho(t) in [-1, 1] for the noise
/// increments; right-continuous on its cells.
class CouplingControl {
 public:
  static CouplingControl synchronous();
  static CouplingControl antithetic();
  static CouplingControl independent();
  /// Values on uniform cells of [0, T].
  static CouplingControl piecewise_constant(std::vector<double> values, double horizon);
  /// Step function taking values[i] on [times[i], times[i+1]).
  static CouplingControl tabulated(std::vector<double> times, std::vector<double> values);

  double at(double t) const;
  ControlKind kind() const noexcept { return kind_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& times() const noexcept { return times_; }
  std::string describe() const;

 private:
  CouplingControl(ControlKind kind, std::vector<double> times, std::vector<double> values);

  ControlKind kind_;
  std::vector<double> times_;  // cell left ends
  std::vector<double> values_;
};

/// Alternative controls for dominance tests: antithetic, independent, then
/// `n_random` piecewise-constant controls with values uniform on [-1, 1].
std::vector<CouplingControl> control_battery(double horizon, std::size_t n_random = 8, std::size_t cells = 16,
                                            std::uint64_t seed = 1);

enum class NoiseWeights { midpoint, variance_matched };

std::string to_string(NoiseWeights w);
NoiseWeights noise_weights_from_string(const std::string& s);

/// Discretisation of Z(t_m) = sum_j w_mj dW_j.
///   midpoint          w_mj = k(t_m, midpoint of cell j)
///   variance_matched  w_mj = sign(cell mean of k) sqrt(cell mean of k^2),
///                     so that Var Z(t_m) reproduces int k(t_m, r)^2 dr;
///                     the first cell is further split geometrically into
///                     `origin_levels` sub-cells of ratio `origin_ratio`.
struct NoiseOptions {
  NoiseWeights weights = NoiseWeights::variance_matched;
  std::size_t origin_levels = 6;
  double origin_ratio = 0.25;
  std::size_t cell_nodes = 16;
  unsigned threads = 0;
};

/// SplitMix64 stream keyed on (seed, path, stream); a standard uniform random
/// bit generator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t path, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

 private:
  std::uint64_t state_;
};

/// Precomputed weights for a pair of kernels driven by correlated increments.
/// generate() is const and may be called concurrently.
class CoupledNoiseGenerator {
 public:
  CoupledNoiseGenerator(const VolterraKernel& k1, const VolterraKernel& k2, const CouplingControl& control,
                        TimeGrid grid, std::uint64_t seed, NoiseOptions opts = {});

  /// Fills z1, z2 (size steps + 1) for one path; z(t_0) = 0.
  void generate(std::size_t path, std::span<double> z1, std::span<double> z2) const;

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t cells() const noexcept { return lo_.size(); }

 private:
  std::vector<double> build_weights(const VolterraKernel& k) const;

  TimeGrid grid_;
  std::uint64_t seed_;
  NoiseOptions opts_;
  std::vector<double> lo_, hi_;        // elementary cells in time order
  std::vector<std::size_t> first_cell_;  // first cell ending after t_m, per m
  std::vector<double> rho_;            // control value per elementary cell
  std::vector<double> w1_, w2_;        // row m holds weights for cells ending <= t_m
  bool identical_ = false;
};

/// Paths on a time grid, row-major (path, m).
struct PathEnsemble {
  TimeGrid grid;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  std::string substream_policy;
  std::vector<double> values;

  double at(std::size_t path, std::size_t m) const { return values[path * (grid.steps + 1) + m]; }
  std::span<const double> path(std::size_t p) const {
    return {values.data() + p * (grid.steps + 1), grid.steps + 1};
  }
};

std::pair<PathEnsemble, PathEnsemble> simulate_coupled_noise(const VolterraKernel& k1, const VolterraKernel& k2,
                                                             const CouplingControl& control, TimeGrid grid,
                                                             std::size_t n_paths, std::uint64_t seed,
                                                             NoiseOptions opts = {});

enum class Integrator { euler, lamperti };

struct FsdeSpec {
  ScalarFunction drift = ScalarFunction::zero();
  ScalarFunction diffusion = ScalarFunction::constant(1.0);
  double x0 = 0.0;
  VolterraKernel kernel = VolterraKernel::brownian(1.0);
  /// lamperti: simulate Y = g(X) with unit diffusion and map back.
  Integrator integrator = Integrator::euler;

  double horizon() const noexcept { return kernel.horizon(); }
};

/// Lamperti transform g(x) = int_{x0}^x dxi / sigma(xi) by adaptive
/// Gauss-Legendre panels of `quad_nodes` points. Throws DomainError if
/// sigma <= 0 is met.
double lamperti_transform(const ScalarFunction& sigma, double x0, double x, std::size_t quad_nodes = 16);

/// Inverse of lamperti_transform by safeguarded Newton; |g(x) - y| <= tol.
double lamperti_inverse(const ScalarFunction& sigma, double x0, double y, double tol = 1e-10);

/// g tabulated on [lo, hi] with cubic Hermite interpolation (g' = 1/sigma);
/// values outside the table fall back to the direct transform.
class LampertiMap {
 public:
  LampertiMap(ScalarFunction sigma, double x0, double lo, double hi, std::size_t nodes = 4097);

  double forward(double x) const;
  double inverse(double y) const;

 private:
  double hermite(std::size_t i, double x) const;

  ScalarFunction sigma_;
  double x0_, lo_, hi_, h_;
  std::vector<double> g_, dg_;
};

/// Explicit Euler scheme X_{m+1} = X_m + b(X_m) dt + sigma(X_m) (Z_{m+1} - Z_m).
/// Throws PathExplosion when |X| exceeds 1e12 or becomes non-finite.
PathEnsemble euler_fsde(const FsdeSpec& spec, const PathEnsemble& noise);

/// Simulates one path given its noise; used by the streaming estimators.
void simulate_path(const FsdeSpec& spec, const TimeGrid& grid, std::span<const double> z, std::span<double> x,
                   std::size_t path_index, const LampertiMap* lamperti = nullptr);

struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::string control;
};

/// Monte Carlo estimate of E sum_m |X1(t_m) - X2(t_m)|^2 dt (left endpoints).
CostEstimate estimate_coupling_cost(const FsdeSpec& spec1, const FsdeSpec& spec2, const CouplingControl& control,
                                    TimeGrid grid, std::size_t n_paths, std::uint64_t seed, NoiseOptions opts = {});

/// Terminal values X1(T), X2(T) of every path without storing the ensembles.
std::pair<std::vector<double>, std::vector<double>> terminal_samples(const FsdeSpec& spec1, const FsdeSpec& spec2,
                                                                     const CouplingControl& control, TimeGrid grid,
                                                                     std::size_t n_paths, std::uint64_t seed,
                                                                     NoiseOptions opts = {});

/// Mean and standard error of a sample with pairwise reductions.
std::pair<double, double> mean_and_se(std::span<const double> xs);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  /// Witness point (state x, or times t and s for kernel checks).
  double witness_x = 0.0;
  double witness_t = 0.0;
  double witness_s = 0.0;
  std::string detail;
};

struct AssumptionReport {
  double range_lo = 0.0, range_hi = 0.0;
  std::vector<AssumptionCheck> checks;
  bool coefficients_ok = false;      // diffusion bounds and derivative bounds
  bool kernel_ok = false;            // nonnegativity and growth bound
  bool monotone_ratio = false;       // branch (i): b / sigma non-decreasing
  bool monotone_kernel = false;      // branch (ii): k(., s) non-decreasing
  bool young_regime = false;         // H >= 1/2
  bool all_ok() const { return coefficients_ok && kernel_ok && (monotone_ratio || monotone_kernel) && young_regime; }
  const AssumptionCheck& check(const std::string& name) const;
};

struct AssumptionOptions {
  std::size_t state_points = 2001;
  std::size_t kernel_points = 200;
  double sigma_floor = 1e-6;
  double sigma_ceiling = 1e6;
  double derivative_bound = 1e6;
  double growth_bound = 1e6;
  double tol = 1e-12;
};

/// Report-only checks of the coefficient and kernel assumptions on a state
/// range (default x0 +- 5 sigma_max sqrt(T)).
AssumptionReport assumption_checker(const FsdeSpec& spec, std::optional<std::pair<double, double>> state_range = {},
                                    const AssumptionOptions& opts = {});

}  // namespace awgp
