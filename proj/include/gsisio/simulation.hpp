#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gsisio/observer.hpp"
#include "gsisio/scenario.hpp"
#include "gsisio/stability.hpp"

namespace gsisio {

/// x_0..x_K, and d, u, w, v, y for k = 0..K.
struct Trajectory {
  std::vector<Vector> x, d, u, w, v, y;
  std::size_t horizon() const { return x.empty() ? 0 : x.size() - 1; }
};

/// Deterministic in (scenario, seed): x_0 and the noise are uniform in their boxes.
Trajectory simulate_ground_truth(const Scenario& scenario, std::uint64_t seed, std::size_t horizon);

struct StepRecord {
  std::size_t k = 0;
  Vector x;  // x_k
  IntervalVector x_box;
  Vector d;  // d_{k-1}
  IntervalVector d_box;
  std::optional<IntervalVector> partial_box;  // V1^T d_k
  Vector partial_true;
  double width_x = 0, width_d = 0;
  double delta_x = 0, delta_d = 0;
  double error_x = 0, error_d = 0;
};

/// Constants shared by every run of one scenario.
struct ObserverSetup {
  ObserverGains gains;
  FeedthroughSvd feedthrough;
  double L_fd = 0, L_gd = 0;
  double contraction = 0;
  WidthBounds widths;  // horizon of the setup
};

ObserverSetup prepare_observer(const Scenario& scenario, std::size_t horizon);

struct RunTrace {
  std::size_t n = 0, p = 0;
  std::vector<StepRecord> steps;
};

/// Runs the observer over a recorded trajectory. Throws ExistenceError when the
/// gains fail the existence test.
RunTrace run_observer(const Scenario& scenario, const ObserverSetup& setup, const Trajectory& traj);

struct TraceCheck {
  std::size_t state_violations = 0;
  std::size_t input_violations = 0;
  std::size_t partial_violations = 0;
  std::size_t domination_failures = 0;  // error <= width <= delta, states and inputs
  double max_width_x = 0, max_width_d = 0;
};

TraceCheck check_trace(const RunTrace& trace, double tol = 1e-9);

/// Header plus one row per step: k, (x, x_up, x_lo) per state, (d, d_up, d_lo)
/// per input, width_x, width_d, delta_x, delta_d, error_x, error_d.
std::string format_csv(const RunTrace& trace);
void emit_csv(const RunTrace& trace, const std::string& path);

struct SvgDocuments {
  std::string states;
  std::string inputs;
  std::string widths;
};

SvgDocuments render_svg_plots(const RunTrace& trace);
/// Writes <prefix>_states.svg, <prefix>_inputs.svg, <prefix>_widths.svg.
void emit_svg_plots(const RunTrace& trace, const std::string& prefix);

struct MonteCarloSummary {
  std::size_t trials = 0;
  std::size_t steps = 0;
  TraceCheck totals;
  bool condition_i = false, condition_ii = false, condition_iii = false;
  double contraction = 0;
};

/// Trials use seeds base_seed, base_seed + 1, ...; the summary does not depend
/// on thread count or completion order.
MonteCarloSummary monte_carlo(const Scenario& scenario, std::size_t trials, std::uint64_t base_seed,
                              std::size_t horizon, std::size_t threads = 0);

/// Same aggregation over an explicit seed list.
MonteCarloSummary monte_carlo_seeds(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                                    std::size_t horizon, std::size_t threads = 0);

}  // namespace gsisio
