#include "awgp/io.hpp"

#include <charconv>

#include "awgp/errors.hpp"

namespace awgp::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("JSON: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("JSON: bad field '") + key + "': " + e.what());
  }
}

}  // namespace

json to_json(const GridMeta& m) {
  json j;
  j["scheme"] = m.scheme;
  j["s_nodes"] = m.s_nodes;
  j["t_nodes"] = m.t_nodes;
  j["s_grading"] = m.s_grading;
  j["t_grading"] = m.t_grading;
  j["crosschecked"] = m.crosschecked;
  j["crosscheck_scheme"] = m.crosscheck_scheme;
  j["crosscheck_value"] = m.crosscheck_value;
  j["crosscheck_tol"] = m.crosscheck_tol;
  return j;
}

GridMeta grid_meta_from_json(const json& j) {
  GridMeta m;
  m.scheme = field<std::string>(j, "scheme");
  m.s_nodes = field<std::size_t>(j, "s_nodes");
  m.t_nodes = field<std::size_t>(j, "t_nodes");
  m.s_grading = field<double>(j, "s_grading");
  m.t_grading = field<double>(j, "t_grading");
  m.crosschecked = field<bool>(j, "crosschecked");
  m.crosscheck_scheme = field<std::string>(j, "crosscheck_scheme");
  m.crosscheck_value = field<double>(j, "crosscheck_value");
  m.crosscheck_tol = field<double>(j, "crosscheck_tol");
  return m;
}

json to_json(const DistanceReport& r, bool with_nodes) {
  json j;
  j["distance_squared"] = r.distance_squared;
  j["trace_term"] = r.trace_term;
  j["cross_term"] = r.cross_term;
  j["grid"] = to_json(r.grid);
  if (with_nodes) {
    j["nodes"] = r.nodes;
    j["optimal_correlation"] = r.optimal_correlation;
    if (!r.optimal_gamma.empty()) {
      json gam = json::array();
      for (const auto& g : r.optimal_gamma) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
          std::vector<double> row(static_cast<std::size_t>(g.cols()));
          for (Eigen::Index k = 0; k < g.cols(); ++k) row[static_cast<std::size_t>(k)] = g(i, k);
          rows.push_back(row);
        }
        gam.push_back(rows);
      }
      j["optimal_gamma"] = gam;
    }
  }
  return j;
}

DistanceReport distance_report_from_json(const json& j) {
  DistanceReport r;
  r.distance_squared = field<double>(j, "distance_squared");
  r.trace_term = field<double>(j, "trace_term");
  r.cross_term = field<double>(j, "cross_term");
  r.grid = grid_meta_from_json(field<json>(j, "grid"));
  if (j.contains("nodes")) r.nodes = field<std::vector<double>>(j, "nodes");
  if (j.contains("optimal_correlation")) r.optimal_correlation = field<std::vector<double>>(j, "optimal_correlation");
  if (j.contains("optimal_gamma")) {
    for (const auto& g : field<json>(j, "optimal_gamma")) {
      std::vector<std::vector<double>> rows;
      try {
        rows = g.get<std::vector<std::vector<double>>>();
      } catch (const json::exception& e) {
        throw ValidationError(std::string("JSON: bad coupling factor: ") + e.what());
      }
      const auto nr = static_cast<Eigen::Index>(rows.size());
      const auto nc = static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size());
      Eigen::MatrixXd m(nr, nc);
      for (Eigen::Index a = 0; a < nr; ++a) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(a)].size()) != nc) {
          throw ValidationError("JSON: ragged coupling factor");
        }
        for (Eigen::Index b = 0; b < nc; ++b) m(a, b) = rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      }
      r.optimal_gamma.push_back(std::move(m));
    }
  }
  return r;
}

json to_json(const MartingaleApproxResult& r) {
  json j;
  j["H"] = r.hurst;
  j["T"] = r.horizon;
  j["distance_squared"] = r.distance_squared;
  j["r"] = r.r;
  j["rho"] = r.rho;
  return j;
}

MartingaleApproxResult mart_result_from_json(const json& j) {
  MartingaleApproxResult r;
  r.hurst = field<double>(j, "H");
  r.horizon = field<double>(j, "T");
  r.distance_squared = field<double>(j, "distance_squared");
  r.r = field<std::vector<double>>(j, "r");
  r.rho = field<std::vector<double>>(j, "rho");
  if (r.r.size() != r.rho.size()) throw ValidationError("JSON: r and rho differ in length");
  return r;
}

json to_json(const CostEstimate& c) {
  json j;
  j["control"] = c.control;
  j["mean"] = c.mean;
  j["std_error"] = c.std_error;
  j["n_paths"] = c.n_paths;
  return j;
}

CostEstimate cost_estimate_from_json(const json& j) {
  CostEstimate c;
  c.control = field<std::string>(j, "control");
  c.mean = field<double>(j, "mean");
  c.std_error = field<double>(j, "std_error");
  c.n_paths = field<std::size_t>(j, "n_paths");
  return c;
}

json to_json(const AssumptionReport& r) {
  json j;
  j["range"] = {r.range_lo, r.range_hi};
  json checks = json::array();
  for (const auto& c : r.checks) {
    json e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["worst"] = c.worst;
    e["witness_x"] = c.witness_x;
    e["witness_t"] = c.witness_t;
    e["witness_s"] = c.witness_s;
    e["detail"] = c.detail;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["coefficients_ok"] = r.coefficients_ok;
  j["kernel_ok"] = r.kernel_ok;
  j["branch_i_monotone_ratio"] = r.monotone_ratio;
  j["branch_ii_monotone_kernel"] = r.monotone_kernel;
  j["young_regime"] = r.young_regime;
  j["all_ok"] = r.all_ok();
  return j;
}

AssumptionReport assumption_report_from_json(const json& j) {
  AssumptionReport r;
  const auto range = field<std::vector<double>>(j, "range");
  if (range.size() != 2) throw ValidationError("JSON: range needs two entries");
  r.range_lo = range[0];
  r.range_hi = range[1];
  for (const auto& e : field<json>(j, "checks")) {
    AssumptionCheck c;
    c.name = field<std::string>(e, "name");
    c.passed = field<bool>(e, "passed");
    c.worst = field<double>(e, "worst");
    c.witness_x = field<double>(e, "witness_x");
    c.witness_t = field<double>(e, "witness_t");
    c.witness_s = field<double>(e, "witness_s");
    c.detail = field<std::string>(e, "detail");
    r.checks.push_back(std::move(c));
  }
  r.coefficients_ok = field<bool>(j, "coefficients_ok");
  r.kernel_ok = field<bool>(j, "kernel_ok");
  r.monotone_ratio = field<bool>(j, "branch_i_monotone_ratio");
  r.monotone_kernel = field<bool>(j, "branch_ii_monotone_kernel");
  r.young_regime = field<bool>(j, "young_regime");
  return r;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace awgp::io
