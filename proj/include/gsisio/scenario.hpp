#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsisio/expression.hpp"
#include "gsisio/interval.hpp"
#include "gsisio/matrix.hpp"
#include "gsisio/observer.hpp"

namespace gsisio {

struct JacobianSpec {
  // Explicit bounds, or sampled over `estimate_box` when `estimate` is set.
  bool estimate = false;
  Matrix lower, upper;
  std::optional<IntervalVector> estimate_box;
  std::size_t grid = 41;
  double margin = 0.05;
};

struct ScenarioConfig {
  std::string name;
  std::size_t n = 0, m = 0, p = 0, l = 0;
  Matrix B, D, G, H;
  std::vector<std::string> f_src, g_src;
  std::vector<std::string> d_src, u_src;  // expressions in k
  std::map<std::string, double> constants;
  JacobianSpec jac_f, jac_g;
  std::optional<double> lipschitz_f, lipschitz_g;  // nullopt: derived from the Jacobian bounds
  std::optional<double> reported_lipschitz_f, reported_lipschitz_g;
  IntervalVector w_bounds, v_bounds, x0_bounds;
  std::size_t horizon = 200;
  std::uint64_t seed = 1;
  BoundingOptions bounding;
  std::string csv_path;
  std::string svg_prefix;
};

/// Parses the JSON scenario document (// and /* */ comments allowed).
/// Throws ConfigError with the offending key on any problem.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

/// The built-in reference scenario as JSON text.
const std::string& reference_scenario_text();

/// Compiled scenario: the model plus the signal generators.
struct Scenario {
  ScenarioConfig config;
  SystemModel model;
  std::vector<Expression> d_expr, u_expr;

  Vector input_at(std::size_t k) const;    // d_k
  Vector control_at(std::size_t k) const;  // u_k
};

Scenario build_scenario(const ScenarioConfig& cfg);

}  // namespace gsisio
