#include "awgp/mart_approx.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "awgp/errors.hpp"
#include "awgp/kernels.hpp"
#include "awgp/parallel.hpp"

namespace awgp {

namespace {

void check_args(double hurst, double horizon) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("Hurst index must lie in (0, 1)");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon must be positive and finite");
}

double t_grading(double hurst, const quad::QuadratureGrid& grid) {
  return grid.grading > 0.0 ? grid.grading : std::max(1.0, 2.0 / (hurst + 0.5));
}

double r_grading(double hurst, const quad::QuadratureGrid& grid) {
  return grid.grading > 0.0 ? grid.grading : quad::grading_exponent(hurst, hurst);
}

// Samples of k_H(., r) on [r, T] and the matching weights.
struct Inner {
  std::vector<double> w;
  std::vector<double> k;

  double mean() const {
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      a += w[i] * k[i];
      b += w[i];
    }
    return a / b;
  }

  double cost(double c) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * (k[i] - c) * (k[i] - c);
    return acc;
  }
};

Inner sample_inner(const VolterraKernel& kernel, double r, double T, const quad::QuadratureGrid& grid) {
  const quad::Rule rule =
      quad::graded_rule(grid.scheme, r, T, grid.t_nodes, t_grading(kernel.hurst(), grid), quad::Cluster::left);
  Inner in;
  in.w = rule.weights;
  in.k.resize(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) in.k[i] = kernel(rule.nodes[i], r);
  return in;
}

void check_r(double r, double T) {
  if (!(r > 0.0)) throw SingularityError("optimal volatility is singular at r = 0");
  if (!(r < T)) throw DomainError("optimal volatility needs r < T");
}

}  // namespace

double MartingaleApproxResult::rho_at(double x) const {
  if (r.empty()) throw ValidationError("empty volatility table");
  if (x <= r.front()) return rho.front();
  if (x >= r.back()) return rho.back();
  const auto it = std::upper_bound(r.begin(), r.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - r.begin()) - 1;
  const double u = (x - r[j]) / (r[j + 1] - r[j]);
  return (1.0 - u) * rho[j] + u * rho[j + 1];
}

double optimal_volatility(double hurst, double r, double horizon, std::size_t quad_nodes, quad::Scheme scheme) {
  check_args(hurst, horizon);
  check_r(r, horizon);
  const auto kernel = VolterraKernel::molchan_golosov(hurst, horizon);
  const quad::Rule rule =
      quad::graded_rule(scheme, r, horizon, quad_nodes, std::max(1.0, 2.0 / (hurst + 0.5)), quad::Cluster::left);
  return rule.integrate([&](double s) { return kernel(s, r); }) / (horizon - r);
}

double pointwise_cost(double hurst, double r, double horizon, double c, const quad::QuadratureGrid& grid) {
  check_args(hurst, horizon);
  check_r(r, horizon);
  return sample_inner(VolterraKernel::molchan_golosov(hurst, horizon), r, horizon, grid).cost(c);
}

double pointwise_optimal_volatility(double hurst, double r, double horizon, const quad::QuadratureGrid& grid) {
  check_args(hurst, horizon);
  check_r(r, horizon);
  return sample_inner(VolterraKernel::molchan_golosov(hurst, horizon), r, horizon, grid).mean();
}

double martingale_cost(double hurst, double horizon, const std::function<double(double)>& rho,
                       const quad::QuadratureGrid& grid) {
  check_args(hurst, horizon);
  const auto kernel = VolterraKernel::molchan_golosov(hurst, horizon);
  const quad::Rule rr =
      quad::graded_rule(grid.scheme, 0.0, horizon, grid.s_nodes, r_grading(hurst, grid), quad::Cluster::left);
  std::vector<double> terms(rr.size());
  parallel_for(rr.size(), grid.threads, [&](std::size_t i) {
    terms[i] = rr.weights[i] * sample_inner(kernel, rr.nodes[i], horizon, grid).cost(rho(rr.nodes[i]));
  });
  return pairwise_sum(terms);
}

MartingaleApproxResult mart_approx_distance(double hurst, double horizon, const quad::QuadratureGrid& grid) {
  check_args(hurst, horizon);
  const auto kernel = VolterraKernel::molchan_golosov(hurst, horizon);
  const quad::Rule rr =
      quad::graded_rule(grid.scheme, 0.0, horizon, grid.s_nodes, r_grading(hurst, grid), quad::Cluster::left);
  MartingaleApproxResult res;
  res.hurst = hurst;
  res.horizon = horizon;
  res.r = rr.nodes;
  res.rho.resize(rr.size());
  std::vector<double> terms(rr.size());
  parallel_for(rr.size(), grid.threads, [&](std::size_t i) {
    const Inner in = sample_inner(kernel, rr.nodes[i], horizon, grid);
    res.rho[i] = in.mean();
    terms[i] = rr.weights[i] * in.cost(res.rho[i]);
  });
  res.distance_squared = pairwise_sum(terms);
  return res;
}

}  // namespace awgp
