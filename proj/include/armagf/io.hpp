#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "armagf/chebyshev.hpp"
#include "armagf/common.hpp"
#include "armagf/design_grid.hpp"
#include "armagf/designer.hpp"
#include "armagf/graph.hpp"

namespace armagf {

/// Everything a CLI run needs: the design spec plus output and solver knobs.
struct RunConfig {
  DesignSpec spec;
  std::string output_dir = ".";
  int response_grid_l = 1000;     // response.csv gets response_grid_l + 1 rows
  int stability_refinement = 10;  // verification grid densification factor
  double solver_tol = 1e-9;
  int solver_max_iter = 100;
  std::optional<std::string> graph_file;
  std::optional<std::string> signal_file;
};

namespace detail {

inline void check_known_keys(const nlohmann::json& j) {
  static const char* known[] = {
      "lambda_p",        "lambda_s",      "order_p",         "order_q",
      "grid_l",          "epsilon",       "gamma",           "delta_t",
      "k_max",           "passband_weight", "stopband_weight", "solver_tol",
      "output_dir",      "response_grid_l", "stability_refinement",
      "solver_max_iter", "graph_file",    "signal_file"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw Error("config: unknown key '" + it.key() + "'");
  }
}

template <typename T>
void fetch(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

/// Parse a JSON run configuration. lambda_p and lambda_s are required, every
/// other key has the documented default. Unknown keys are rejected.
inline RunConfig parse_run_config(const nlohmann::json& j) {
  detail::check_known_keys(j);
  if (!j.contains("lambda_p") || !j.contains("lambda_s"))
    throw Error("config: lambda_p and lambda_s are required");
  RunConfig cfg;
  cfg.spec.lambda_p = j.at("lambda_p").get<double>();
  cfg.spec.lambda_s = j.at("lambda_s").get<double>();
  detail::fetch(j, "order_p", cfg.spec.order_p);
  detail::fetch(j, "order_q", cfg.spec.order_q);
  detail::fetch(j, "grid_l", cfg.spec.grid_l);
  detail::fetch(j, "epsilon", cfg.spec.epsilon);
  detail::fetch(j, "gamma", cfg.spec.gamma);
  detail::fetch(j, "delta_t", cfg.spec.delta_t);
  detail::fetch(j, "k_max", cfg.spec.k_max);
  detail::fetch(j, "passband_weight", cfg.spec.passband_weight);
  detail::fetch(j, "stopband_weight", cfg.spec.stopband_weight);
  detail::fetch(j, "solver_tol", cfg.solver_tol);
  detail::fetch(j, "output_dir", cfg.output_dir);
  detail::fetch(j, "response_grid_l", cfg.response_grid_l);
  detail::fetch(j, "stability_refinement", cfg.stability_refinement);
  detail::fetch(j, "solver_max_iter", cfg.solver_max_iter);
  std::string path;
  detail::fetch(j, "graph_file", path);
  if (!path.empty()) cfg.graph_file = path;
  path.clear();
  detail::fetch(j, "signal_file", path);
  if (!path.empty()) cfg.signal_file = path;
  cfg.spec.validate();
  if (cfg.response_grid_l < 1) throw Error("config: response_grid_l must be >= 1");
  if (cfg.stability_refinement < 1) throw Error("config: stability_refinement must be >= 1");
  if (!(cfg.solver_tol > 0.0)) throw Error("config: solver_tol must be positive");
  if (cfg.solver_max_iter < 1) throw Error("config: solver_max_iter must be >= 1");
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("config: parse failure in '" + path + "': " + e.what());
  }
  return parse_run_config(j);
}

/// Shortest-round-trip-safe decimal text, 17 significant digits, locale-free.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF line endings everywhere
  if (!out) throw Error("cannot open output file '" + path + "'");
  return out;
}

}  // namespace detail

/// response.csv: lambda, h, mag_db over a uniform export grid on [0, 2].
inline void write_response_csv(const std::string& path, const ArmaChebFilter& filter,
                               int grid_l) {
  auto out = detail::open_output(path);
  out << "lambda,h,mag_db\n";
  for (int i = 0; i <= grid_l; ++i) {
    const double lambda = 2.0 * i / grid_l;
    const double h = freq_response(filter, lambda);
    out << format_double(lambda) << ',' << format_double(h) << ','
        << format_double(amplitude_db(h)) << '\n';
  }
}

/// trace.csv: k, J, step_inf_norm, eta, status.
inline void write_trace_csv(const std::string& path, const IterationTrace& trace) {
  auto out = detail::open_output(path);
  out << "k,J,step_inf_norm,eta,status\n";
  for (const auto& e : trace.entries) {
    out << e.k << ',' << format_double(e.j_true) << ',' << format_double(e.step_inf)
        << ',' << format_double(e.eta) << ',' << solve_status_name(e.status) << '\n';
  }
}

inline nlohmann::json coefficients_to_json(const ArmaChebFilter& filter) {
  nlohmann::json j;
  j["order_p"] = filter.order_p();
  j["order_q"] = filter.order_q();
  j["epsilon"] = filter.epsilon;
  j["beta"] = std::vector<double>(filter.beta.begin(), filter.beta.end());
  j["alpha"] = std::vector<double>(filter.alpha.begin(), filter.alpha.end());
  if (filter.order_p() <= 8 && filter.order_q() <= 8) {
    const ArmaMonomialFilter mono = to_monomial(filter);
    j["monomial"]["b"] = std::vector<double>(mono.b.begin(), mono.b.end());
    j["monomial"]["a"] = std::vector<double>(mono.a.begin(), mono.a.end());
  }
  return j;
}

inline void write_coefficients_json(const std::string& path, const ArmaChebFilter& filter) {
  auto out = detail::open_output(path);
  out << coefficients_to_json(filter).dump(2) << '\n';
}

inline ArmaChebFilter load_coefficients_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("coefficients: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("coefficients: parse failure in '" + path + "': " + e.what());
  }
  ArmaChebFilter f;
  const auto beta = j.at("beta").get<std::vector<double>>();
  const auto alpha = j.at("alpha").get<std::vector<double>>();
  f.beta = Eigen::Map<const Vector>(beta.data(), static_cast<Index>(beta.size()));
  f.alpha = Eigen::Map<const Vector>(alpha.data(), static_cast<Index>(alpha.size()));
  if (j.contains("epsilon")) f.epsilon = j.at("epsilon").get<double>();
  if (f.beta.size() < 1) throw Error("coefficients: beta must have at least one entry");
  return f;
}

inline void write_report_json(const std::string& path, const DesignResult& result,
                              const StabilityReport& stability) {
  nlohmann::json j;
  j["delta_p_db"] = result.metrics.delta_p_db;
  j["delta_s_db"] = result.metrics.delta_s_db;
  j["sse_db"] = result.metrics.sse_db;
  j["true_objective"] = result.metrics.true_objective;
  j["converged"] = result.converged;
  j["iterations"] = result.trace.iterations();
  j["stability_margin"] = stability.margin;
  j["stable"] = stability.stable;
  auto out = detail::open_output(path);
  out << j.dump(2) << '\n';
}

struct ComparisonRow {
  std::string method;
  DesignMetrics metrics;
};

/// comparison.csv: method, delta_p_db, delta_s_db, sse_db, j.
inline void write_comparison_csv(const std::string& path,
                                 const std::vector<ComparisonRow>& rows) {
  auto out = detail::open_output(path);
  out << "method,delta_p_db,delta_s_db,sse_db,j\n";
  for (const auto& r : rows) {
    out << r.method << ',' << format_double(r.metrics.delta_p_db) << ','
        << format_double(r.metrics.delta_s_db) << ',' << format_double(r.metrics.sse_db)
        << ',' << format_double(r.metrics.true_objective) << '\n';
  }
}

/// Edge list: one "i j weight" triple per line, 0-indexed. Node count is set
/// by the caller (usually the signal length). Blank lines are skipped.
inline Graph load_edge_list(const std::string& path, int num_nodes) {
  std::ifstream in(path);
  if (!in) throw Error("graph: cannot open '" + path + "'");
  Graph g;
  g.num_nodes = num_nodes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ss(line);
    GraphEdge e;
    if (!(ss >> e.u >> e.v >> e.weight))
      throw Error("graph: malformed line " + std::to_string(line_no) + " in '" + path + "'");
    g.edges.push_back(e);
  }
  g.validate();
  return g;
}

/// Signal: one value per line.
inline Vector load_signal(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("signal: cannot open '" + path + "'");
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      values.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw Error("signal: malformed line " + std::to_string(line_no) + " in '" + path + "'");
    }
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

inline void save_signal(const std::string& path, const Vector& signal) {
  auto out = detail::open_output(path);
  for (Index i = 0; i < signal.size(); ++i) out << format_double(signal[i]) << '\n';
}

}  // namespace armagf
