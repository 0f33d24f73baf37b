#include "gsisio/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <thread>

#include "gsisio/errors.hpp"
#include "gsisio/linalg.hpp"

namespace gsisio {

namespace {

Vector uniform_in(const IntervalVector& box, std::mt19937_64& rng) {
  Vector x(box.size());
  for (std::size_t i = 0; i < box.size(); ++i)
    x[i] = std::uniform_real_distribution<double>(box.lower()[i], box.upper()[i])(rng);
  return x;
}

double framer_error(const Vector& truth, const IntervalVector& box) {
  return std::max(norm(truth - box.lower()), norm(box.upper() - truth));
}

}  // namespace

Trajectory simulate_ground_truth(const Scenario& scenario, std::uint64_t seed, std::size_t horizon) {
  const SystemModel& m = scenario.model;
  std::mt19937_64 rng(seed);
  Trajectory t;
  Vector x = uniform_in(m.x0_bounds, rng);
  for (std::size_t k = 0; k <= horizon; ++k) {
    const Vector d = scenario.input_at(k);
    const Vector u = scenario.control_at(k);
    const Vector w = uniform_in(m.w_bounds, rng);
    const Vector v = uniform_in(m.v_bounds, rng);
    t.x.push_back(x);
    t.d.push_back(d);
    t.u.push_back(u);
    t.w.push_back(w);
    t.v.push_back(v);
    t.y.push_back(m.g(x) + m.D * u + m.H * d + v);
    x = m.f(x) + m.B * u + m.G * d + w;
  }
  return t;
}

ObserverSetup prepare_observer(const Scenario& scenario, std::size_t horizon) {
  const SystemModel& m = scenario.model;
  ObserverSetup s;
  s.gains = synthesize_gains(m);
  s.feedthrough = decompose_feedthrough(m.H);
  s.L_fd = lipschitz_like_constant(build_decomposition(m.f));
  s.L_gd = lipschitz_like_constant(build_decomposition(m.g));
  const TMatrices t = compute_T_matrices(s.gains);
  s.contraction = condition_i(t.T_f, t.T_g, s.L_fd, s.L_gd).contraction;
  s.widths = width_bound_sequences(s.contraction, s.gains, s.L_fd, s.L_gd, m.w_bounds.width(), m.v_bounds.width(),
                                   width_norm(m.x0_bounds), horizon);
  return s;
}

RunTrace run_observer(const Scenario& scenario, const ObserverSetup& setup, const Trajectory& traj) {
  const SystemModel& m = scenario.model;
  const std::size_t K = traj.horizon();
  if (setup.widths.delta_x.size() < K + 1) throw DimensionError("run_observer: setup horizon shorter than trajectory");
  RunTrace trace;
  trace.n = m.n;
  trace.p = m.p;
  FramerState state = initial_state(m);
  for (std::size_t k = 1; k <= K; ++k) {
    state = observer_step(m, setup.gains, state, traj.y[k - 1], traj.u[k - 1]);
    StepRecord r;
    r.k = k;
    r.x = traj.x[k];
    r.x_box = state.x_box;
    r.d = traj.d[k - 1];
    r.d_box = *state.d_box;
    r.partial_box = estimate_current_input_component(m, setup.feedthrough, traj.y[k], traj.u[k], state.x_box);
    if (r.partial_box) r.partial_true = setup.feedthrough.V1.transpose() * traj.d[k];
    r.width_x = width_norm(r.x_box);
    r.width_d = width_norm(r.d_box);
    r.delta_x = setup.widths.delta_x[k];
    r.delta_d = setup.widths.delta_d[k - 1];
    r.error_x = framer_error(r.x, r.x_box);
    r.error_d = framer_error(r.d, r.d_box);
    trace.steps.push_back(std::move(r));
  }
  return trace;
}

TraceCheck check_trace(const RunTrace& trace, double tol) {
  TraceCheck c;
  for (const StepRecord& r : trace.steps) {
    if (!contains(r.x_box, r.x, tol)) ++c.state_violations;
    if (!contains(r.d_box, r.d, tol)) ++c.input_violations;
    if (r.partial_box && !contains(*r.partial_box, r.partial_true, tol)) ++c.partial_violations;
    const bool ok = r.error_x <= r.width_x + tol && r.width_x <= r.delta_x + tol && r.error_d <= r.width_d + tol &&
                    r.width_d <= r.delta_d + tol;
    if (!ok) ++c.domination_failures;
    c.max_width_x = std::max(c.max_width_x, r.width_x);
    c.max_width_d = std::max(c.max_width_d, r.width_d);
  }
  return c;
}

std::string format_csv(const RunTrace& trace) {
  std::string out = "k";
  for (std::size_t i = 1; i <= trace.n; ++i) {
    const std::string s = std::to_string(i);
    out += ",x" + s + ",x" + s + "_upper,x" + s + "_lower";
  }
  for (std::size_t j = 1; j <= trace.p; ++j) {
    const std::string s = std::to_string(j);
    out += ",d" + s + ",d" + s + "_upper,d" + s + "_lower";
  }
  out += ",width_x,width_d,delta_x,delta_d,error_x,error_d\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.12g", v);
    out += buf;
  };
  for (const StepRecord& r : trace.steps) {
    out += std::to_string(r.k);
    for (std::size_t i = 0; i < trace.n; ++i) {
      num(r.x[i]);
      num(r.x_box.upper()[i]);
      num(r.x_box.lower()[i]);
    }
    for (std::size_t j = 0; j < trace.p; ++j) {
      num(r.d[j]);
      num(r.d_box.upper()[j]);
      num(r.d_box.lower()[j]);
    }
    for (double v : {r.width_x, r.width_d, r.delta_x, r.delta_d, r.error_x, r.error_d}) num(v);
    out += '\n';
  }
  return out;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

struct Series {
  std::string label;
  std::string color;
  std::vector<double> values;
  bool dashed = false;
};

constexpr double kPanelW = 720, kPanelH = 220, kLeft = 70, kRight = 20, kTop = 30, kBottom = 30;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// One panel; non-finite values are pinned to the top edge so every polyline
// keeps one vertex per step.
std::string panel(const std::string& title, const std::vector<Series>& series, std::size_t steps, double y0) {
  double lo = INFINITY, hi = -INFINITY;
  for (const Series& s : series)
    for (double v : s.values)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double pw = kPanelW - kLeft - kRight, ph = kPanelH - kTop - kBottom;
  auto px = [&](std::size_t i) { return kLeft + (steps <= 1 ? 0.0 : pw * double(i) / double(steps - 1)); };
  auto py = [&](double v) {
    if (!std::isfinite(v)) v = hi;
    return y0 + kTop + ph * (hi - std::clamp(v, lo, hi)) / (hi - lo);
  };

  std::string out = "<g>\n";
  out += "<text x=\"" + fmt(kLeft) + "\" y=\"" + fmt(y0 + 18) + "\" font-size=\"13\">" + title + "</text>\n";
  out += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(y0 + kTop) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
         "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (double t : {lo + pad, hi - pad}) {
    out += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(py(t) + 4) + "\" font-size=\"10\" text-anchor=\"end\">" +
           fmt_tick(t) + "</text>\n";
  }
  out += "<text x=\"" + fmt(kLeft + pw) + "\" y=\"" + fmt(y0 + kPanelH - 10) +
         "\" font-size=\"10\" text-anchor=\"end\">k = " + std::to_string(steps) + "</text>\n";
  double legend_x = kLeft + 180;
  for (const Series& s : series) {
    out += "<polyline class=\"series\" data-label=\"" + s.label + "\" fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"1.2\"";
    if (s.dashed) out += " stroke-dasharray=\"4 3\"";
    out += " points=\"";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (i) out += ' ';
      out += fmt(px(i)) + "," + fmt(py(s.values[i]));
    }
    out += "\"/>\n";
    out += "<text x=\"" + fmt(legend_x) + "\" y=\"" + fmt(y0 + 18) + "\" font-size=\"11\" fill=\"" + s.color + "\">" +
           s.label + "</text>\n";
    legend_x += 90;
  }
  out += "</g>\n";
  return out;
}

std::string document(const std::vector<std::string>& panels) {
  const double h = kPanelH * double(panels.size());
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(kPanelW) + "\" height=\"" + fmt(h) +
         "\" viewBox=\"0 0 " + fmt(kPanelW) + " " + fmt(h) + "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const std::string& p : panels) out += p;
  out += "</svg>\n";
  return out;
}

template <typename F>
std::vector<double> column(const RunTrace& t, F f) {
  std::vector<double> v;
  v.reserve(t.steps.size());
  for (const StepRecord& r : t.steps) v.push_back(f(r));
  return v;
}

}  // namespace

void emit_csv(const RunTrace& trace, const std::string& path) { write_file(path, format_csv(trace)); }

SvgDocuments render_svg_plots(const RunTrace& trace) {
  const std::size_t K = trace.steps.size();
  SvgDocuments docs;
  std::vector<std::string> panels;
  for (std::size_t i = 0; i < trace.n; ++i) {
    const std::string s = std::to_string(i + 1);
    panels.push_back(panel("state x" + s,
                           {{"x" + s, "#000000", column(trace, [i](const StepRecord& r) { return r.x[i]; })},
                            {"upper", "#c0392b", column(trace, [i](const StepRecord& r) { return r.x_box.upper()[i]; })},
                            {"lower", "#2471a3", column(trace, [i](const StepRecord& r) { return r.x_box.lower()[i]; })}},
                           K, kPanelH * double(panels.size())));
  }
  docs.states = document(panels);
  panels.clear();
  for (std::size_t j = 0; j < trace.p; ++j) {
    const std::string s = std::to_string(j + 1);
    panels.push_back(panel("input d" + s + " (one step delayed)",
                           {{"d" + s, "#000000", column(trace, [j](const StepRecord& r) { return r.d[j]; })},
                            {"upper", "#c0392b", column(trace, [j](const StepRecord& r) { return r.d_box.upper()[j]; })},
                            {"lower", "#2471a3", column(trace, [j](const StepRecord& r) { return r.d_box.lower()[j]; })}},
                           K, kPanelH * double(panels.size())));
  }
  docs.inputs = document(panels);
  panels.clear();
  panels.push_back(panel("state: error, width, bound",
                         {{"error", "#000000", column(trace, [](const StepRecord& r) { return r.error_x; })},
                          {"width", "#c0392b", column(trace, [](const StepRecord& r) { return r.width_x; })},
                          {"bound", "#2471a3", column(trace, [](const StepRecord& r) { return r.delta_x; }), true}},
                         K, 0));
  panels.push_back(panel("input: error, width, bound",
                         {{"error", "#000000", column(trace, [](const StepRecord& r) { return r.error_d; })},
                          {"width", "#c0392b", column(trace, [](const StepRecord& r) { return r.width_d; })},
                          {"bound", "#2471a3", column(trace, [](const StepRecord& r) { return r.delta_d; }), true}},
                         K, kPanelH));
  docs.widths = document(panels);
  return docs;
}

void emit_svg_plots(const RunTrace& trace, const std::string& prefix) {
  const SvgDocuments d = render_svg_plots(trace);
  write_file(prefix + "_states.svg", d.states);
  write_file(prefix + "_inputs.svg", d.inputs);
  write_file(prefix + "_widths.svg", d.widths);
}

MonteCarloSummary monte_carlo_seeds(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                                    std::size_t horizon, std::size_t threads) {
  if (seeds.empty()) throw DomainError("monte_carlo: need at least one trial");
  const ObserverSetup setup = prepare_observer(scenario, horizon);
  const TMatrices t = compute_T_matrices(setup.gains);

  MonteCarloSummary s;
  s.trials = seeds.size();
  s.steps = horizon;
  s.contraction = setup.contraction;
  s.condition_i = setup.contraction <= 1.0;
  s.condition_ii = condition_ii(t.T_f, t.T_g, setup.L_fd, setup.L_gd).ok;
  s.condition_iii = condition_iii(setup.contraction, scenario.model.n).ok;

  std::vector<TraceCheck> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < seeds.size();) {
      try {
        const Trajectory traj = simulate_ground_truth(scenario, seeds[i], horizon);
        results[i] = check_trace(run_observer(scenario, setup, traj));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (const TraceCheck& c : results) {
    s.totals.state_violations += c.state_violations;
    s.totals.input_violations += c.input_violations;
    s.totals.partial_violations += c.partial_violations;
    s.totals.domination_failures += c.domination_failures;
    s.totals.max_width_x = std::max(s.totals.max_width_x, c.max_width_x);
    s.totals.max_width_d = std::max(s.totals.max_width_d, c.max_width_d);
  }
  return s;
}

MonteCarloSummary monte_carlo(const Scenario& scenario, std::size_t trials, std::uint64_t base_seed,
                              std::size_t horizon, std::size_t threads) {
  std::vector<std::uint64_t> seeds(trials);
  for (std::size_t i = 0; i < trials; ++i) seeds[i] = base_seed + i;
  return monte_carlo_seeds(scenario, seeds, horizon, threads);
}

}  // namespace gsisio
