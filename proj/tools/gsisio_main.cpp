#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gsisio/errors.hpp"
#include "gsisio/linalg.hpp"
#include "gsisio/scenario.hpp"
#include "gsisio/simulation.hpp"
#include "gsisio/stability.hpp"

using namespace gsisio;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kExistence = 3, kNumeric = 4 };

Scenario load(const std::string& path) {
  try {
    return build_scenario(load_scenario(path));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(e.what());
  }
}

void print_matrix(const char* name, const Matrix& m) { std::printf("%s =\n%s\n", name, to_string(m, 6).c_str()); }

int cmd_gains(const std::string& path) {
  const Scenario s = load(path);
  const SystemModel& m = s.model;
  const ObserverSetup setup = prepare_observer(s, 0);
  const ObserverGains& g = setup.gains;
  print_matrix("J", g.J);
  print_matrix("K", g.K);
  print_matrix("L", g.L);
  std::printf("rank(H) = %d\n", numeric_rank(m.H));
  std::printf("rank(I-K1-L1) = %d, rank(I-K1+L1) = %d, n = %zu\n", g.rank_minus, g.rank_plus, m.n);
  std::printf("existence: %s\n", g.exists ? "yes" : "no");
  std::printf("non-negative framer inverse: %s\n", g.inverse_nonnegative ? "yes" : "no");
  const DecompositionFunction df = build_decomposition(m.f), dg = build_decomposition(m.g);
  print_matrix("C_f", df.correction());
  print_matrix("C_g", dg.correction());
  std::printf("L_f = %.6g, L_g = %.6g", m.f.lipschitz, m.g.lipschitz);
  if (s.config.reported_lipschitz_f && s.config.reported_lipschitz_g)
    std::printf(" (configured for comparison: %.6g, %.6g)", *s.config.reported_lipschitz_f,
                *s.config.reported_lipschitz_g);
  std::printf("\nL_fd = %.6g, L_gd = %.6g\n", setup.L_fd, setup.L_gd);
  const StabilityReport r = assess_stability(g, m.n, setup.L_fd, setup.L_gd);
  print_matrix("T_f", r.T_f);
  print_matrix("T_g", r.T_g);
  std::printf("contraction = %.6g\n", r.cond_i.contraction);
  std::printf("condition (i): %s\n", r.cond_i.ok ? "holds" : "fails");
  std::printf("condition (ii): %s (lambda_max = %.6g, Q = %.6g)\n", r.cond_ii.ok ? "holds" : "fails",
              r.cond_ii.lambda_max, r.cond_ii.Q);
  std::printf("condition (iii): %s on a %zu-point grid\n", r.cond_iii.ok ? "witness found" : "no witness",
              r.cond_iii.points_checked);
  if (setup.widths.steady_x)
    std::printf("steady-state width bounds: state %.6g, input %.6g\n", *setup.widths.steady_x, *setup.widths.steady_d);
  return kOk;
}

int cmd_run(const std::string& path, std::optional<std::size_t> steps, std::optional<std::uint64_t> seed,
            std::string csv, std::string svg) {
  const Scenario s = load(path);
  const std::size_t K = steps.value_or(s.config.horizon);
  const std::uint64_t sd = seed.value_or(s.config.seed);
  if (csv.empty()) csv = s.config.csv_path;
  if (svg.empty()) svg = s.config.svg_prefix;
  const ObserverSetup setup = prepare_observer(s, K);
  const Trajectory traj = simulate_ground_truth(s, sd, K);
  const RunTrace trace = run_observer(s, setup, traj);
  const TraceCheck c = check_trace(trace);
  if (!csv.empty()) emit_csv(trace, csv);
  if (!svg.empty()) emit_svg_plots(trace, svg);
  std::printf("steps %zu, seed %llu\n", K, static_cast<unsigned long long>(sd));
  std::printf("state violations %zu, input violations %zu, partial-input violations %zu\n", c.state_violations,
              c.input_violations, c.partial_violations);
  std::printf("domination failures %zu, max state width %.6g, max input width %.6g\n", c.domination_failures,
              c.max_width_x, c.max_width_d);
  std::printf("contraction %.6g\n", setup.contraction);
  return kOk;
}

int cmd_montecarlo(const std::string& path, std::size_t trials, std::uint64_t seed, std::optional<std::size_t> steps,
                   std::size_t threads) {
  const Scenario s = load(path);
  const MonteCarloSummary r = monte_carlo(s, trials, seed, steps.value_or(s.config.horizon), threads);
  std::printf("trials %zu x %zu steps\n", r.trials, r.steps);
  std::printf("state violations %zu, input violations %zu, partial-input violations %zu\n", r.totals.state_violations,
              r.totals.input_violations, r.totals.partial_violations);
  std::printf("domination failures %zu\n", r.totals.domination_failures);
  std::printf("max state width %.6g, max input width %.6g\n", r.totals.max_width_x, r.totals.max_width_d);
  std::printf("contraction %.6g; conditions (i) %s, (ii) %s, (iii) %s\n", r.contraction,
              r.condition_i ? "holds" : "fails", r.condition_ii ? "holds" : "fails",
              r.condition_iii ? "witness found" : "no witness");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interval observer for nonlinear systems with unknown inputs"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::size_t> steps;
  std::optional<std::uint64_t> seed;
  std::string csv, svg;
  auto* run = app.add_subcommand("run", "simulate a scenario and run the observer");
  run->add_option("config", config, "scenario file")->required();
  run->add_option("--steps", steps, "number of steps (default: config horizon)");
  run->add_option("--seed", seed, "random seed (default: config seed)");
  run->add_option("--csv", csv, "write the trace as CSV");
  run->add_option("--svg", svg, "write SVG plots with this path prefix");

  auto* gains = app.add_subcommand("gains", "print gains, existence ranks and stability verdicts");
  gains->add_option("config", config, "scenario file")->required();

  std::size_t trials = 100, threads = 0;
  std::uint64_t mc_seed = 1;
  auto* mc = app.add_subcommand("montecarlo", "run seeded trials and summarise violations");
  mc->add_option("config", config, "scenario file")->required();
  mc->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
  mc->add_option("--seed", mc_seed, "seed of the first trial");
  mc->add_option("--steps", steps, "steps per trial (default: config horizon)");
  mc->add_option("--threads", threads, "worker threads (0: hardware concurrency)");

  app.add_subcommand("example", "print the built-in reference scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(config, steps, seed, csv, svg);
    if (*gains) return cmd_gains(config);
    if (*mc) return cmd_montecarlo(config, trials, mc_seed, steps, threads);
    std::fputs(reference_scenario_text().c_str(), stdout);
    return kOk;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const ExistenceError& e) {
    std::fprintf(stderr, "existence failure: %s\n", e.what());
    return kExistence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumeric;
  }
}
