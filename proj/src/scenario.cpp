#include "opgg/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace opgg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// JSON field access with path-qualified error messages.

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& known) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) {
      throw ConfigError((path.empty() ? key : path + "." + key) + ": unknown field");
    }
  }
}

const json& require_object(const json& doc, const std::string& path) {
  if (!doc.is_object()) throw ConfigError(path + ": expected an object");
  return doc;
}

double read_number(const json& value, const std::string& path) {
  if (!value.is_number()) throw ConfigError(path + ": expected a number");
  const double out = value.get<double>();
  if (!std::isfinite(out)) throw ConfigError(path + ": expected a finite number");
  return out;
}

int read_integer(const json& value, const std::string& path) {
  if (!value.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return value.get<int>();
}

std::string read_string(const json& value, const std::string& path) {
  if (!value.is_string()) throw ConfigError(path + ": expected a string");
  return value.get<std::string>();
}

SimplexState read_simplex(const json& value, const std::string& path) {
  if (!value.is_array() || value.size() != 3) {
    throw ConfigError(path + ": expected an array of 3 numbers");
  }
  SimplexState w;
  for (int i = 0; i < 3; ++i) w(i) = read_number(value[i], path + "[" + std::to_string(i) + "]");
  try {
    validate_simplex(w);
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return w;
}

template <typename Fn>
void with_field(const json& obj, const char* key, Fn&& fn) {
  if (auto it = obj.find(key); it != obj.end()) fn(*it);
}

json simplex_json(const SimplexState& w) { return json::array({w(0), w(1), w(2)}); }

// ---------------------------------------------------------------------------
// Output helpers.

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
}

json breakdown_json(const CostBreakdown& b) {
  return {{"terminal", b.terminal}, {"tracking", b.tracking}, {"effort", b.effort},
          {"punished", b.punished}, {"total", b.total}};
}

void write_summary(RunSummary& summary, const fs::path& out_dir) {
  const fs::path path = out_dir / "summary.json";
  summary.files.push_back(path);
  json& doc = summary.summary;
  doc["mode"] = to_string(summary.config.mode);
  doc["config"] = to_json(summary.config);
  doc["breakdown"] = breakdown_json(summary.breakdown);
  doc["punished_integral"] = summary.punished_integral;
  doc["converged"] = summary.converged;
  doc["iterations"] = summary.iterations;
  json files = json::array();
  for (const auto& f : summary.files) files.push_back(f.string());
  doc["files"] = files;

  std::ofstream out = open_output(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

void write_run_files(const StateTrajectory& states, const ControlTrajectory& control,
                     const fs::path& out_dir, const std::string& prefix,
                     std::vector<fs::path>& files) {
  const fs::path traj = out_dir / (prefix + "trajectory.csv");
  const fs::path ctrl = out_dir / (prefix + "control.csv");
  const fs::path tern = out_dir / (prefix + "ternary.csv");
  write_trajectory_csv(states, traj);
  write_control_csv(states, control, ctrl);
  export_ternary(states, tern);
  files.insert(files.end(), {traj, ctrl, tern});
}

void write_sweep_csv(const SweepResult& sweep, const fs::path& path) {
  std::ofstream out = open_output(path);
  out << "v,J\n";
  for (const auto& e : sweep.entries) {
    out << format_double(e.v) << ',' << format_double(e.breakdown.total) << '\n';
  }
  finish(out, path);
}

json sweep_argmin_json(const SweepResult& sweep) {
  const SweepEntry& best = sweep.best();
  return {{"v", best.v}, {"J", best.breakdown.total},
          {"punished_integral", best.breakdown.punished_integral}};
}

SolveReport solve(const ScenarioConfig& config) {
  return config.method == SolverMethod::Fbsm
             ? fbsm_solve(config.w0, config.grid, config.weights, config.params, config.solver)
             : projected_gradient_solve(config.w0, config.grid, config.weights, config.params,
                                        config.solver);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Mean control over the final `window` time units.
double late_control_mean(const ControlTrajectory& control, double window) {
  const TimeGrid& g = control.grid;
  double sum = 0.0;
  int count = 0;
  for (int k = 0; k < g.nodes(); ++k) {
    if (g.time(k) >= g.tf - window - 1e-12) {
      sum += control.values(k);
      ++count;
    }
  }
  return count > 0 ? sum / count : 0.0;
}

void expect_mode(const ScenarioConfig& config, Mode mode) {
  if (config.mode != mode) {
    throw ConfigError("mode: expected \"" + to_string(mode) + "\", got \"" +
                      to_string(config.mode) + "\"");
  }
  config.validate();
}

}  // namespace

// ---------------------------------------------------------------------------
// Config.

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Simulate:
      return "simulate";
    case Mode::Optimize:
      return "optimize";
    case Mode::Sweep:
      return "sweep";
    case Mode::Compare:
      return "compare";
  }
  return "unknown";
}

Mode parse_mode(const std::string& text) {
  if (text == "simulate") return Mode::Simulate;
  if (text == "optimize") return Mode::Optimize;
  if (text == "sweep") return Mode::Sweep;
  if (text == "compare") return Mode::Compare;
  throw ConfigError("mode: expected one of simulate, optimize, sweep, compare; got \"" + text +
                    "\"");
}

std::string to_string(SolverMethod method) {
  return method == SolverMethod::Fbsm ? "fbsm" : "pgd";
}

SolverMethod parse_solver_method(const std::string& text) {
  if (text == "fbsm") return SolverMethod::Fbsm;
  if (text == "pgd") return SolverMethod::ProjectedGradient;
  throw ConfigError("solver.method: expected fbsm or pgd; got \"" + text + "\"");
}

void ScenarioConfig::validate() const {
  auto wrap = [](const std::string& field, auto&& check) {
    try {
      check();
    } catch (const DomainError& e) {
      throw ConfigError(field + ": " + e.what());
    }
  };
  wrap("params", [&] { params.validate(); });
  wrap("w0", [&] { validate_simplex(w0); });
  wrap("grid", [&] { grid.validate(); });
  wrap("weights", [&] { weights.validate(); });
  wrap("solver", [&] { solver.validate(); });

  if (mode == Mode::Simulate) {
    if (!constant_v) throw ConfigError("constant_v: required in simulate mode");
    if (!(*constant_v >= 0.0 && *constant_v <= weights.v_max)) {
      throw ConfigError("constant_v: must lie in [0, weights.v_max]");
    }
  }
  if (mode == Mode::Sweep || mode == Mode::Compare) {
    if (sweep_values.empty() && sweep_points < 1) {
      throw ConfigError("sweep_points: must be >= 1");
    }
    for (double v : sweep_values) {
      if (!(v >= 0.0 && v <= weights.v_max)) {
        throw ConfigError("sweep_values: entries must lie in [0, weights.v_max]");
      }
    }
  }
}

std::vector<double> ScenarioConfig::resolved_sweep_values() const {
  return sweep_values.empty() ? opgg::sweep_values(sweep_points, weights.v_max) : sweep_values;
}

json to_json(const ScenarioConfig& c) {
  json doc;
  doc["name"] = c.name;
  doc["mode"] = to_string(c.mode);
  doc["params"] = {{"n", c.params.n}, {"r", c.params.r}, {"sigma", c.params.sigma}};
  doc["w0"] = simplex_json(c.w0);
  doc["grid"] = {{"t0", c.grid.t0}, {"tf", c.grid.tf}, {"steps", c.grid.steps}};
  doc["weights"] = {{"alpha1", c.weights.alpha1}, {"alpha2", c.weights.alpha2},
                    {"alpha3", c.weights.alpha3}, {"alpha4", c.weights.alpha4},
                    {"w_star", simplex_json(c.weights.w_star)}, {"v_max", c.weights.v_max}};
  doc["solver"] = {{"method", to_string(c.method)},
                   {"max_iters", c.solver.max_iters},
                   {"theta", c.solver.theta},
                   {"tol_cost", c.solver.tol_cost},
                   {"tol_control", c.solver.tol_control},
                   {"bang_bang_epsilon", c.solver.bang_bang_epsilon},
                   {"initial_control", c.solver.initial_control},
                   {"max_backtracks", c.solver.max_backtracks}};
  doc["constant_v"] = c.constant_v ? json(*c.constant_v) : json(nullptr);
  doc["sweep_points"] = c.sweep_points;
  doc["sweep_values"] = c.sweep_values;
  return doc;
}

ScenarioConfig config_from_json(const json& doc) {
  require_object(doc, "config");
  reject_unknown(doc, "", {"name", "mode", "params", "w0", "grid", "weights", "solver",
                           "constant_v", "sweep_points", "sweep_values"});
  ScenarioConfig c;
  with_field(doc, "name", [&](const json& v) { c.name = read_string(v, "name"); });
  with_field(doc, "mode", [&](const json& v) { c.mode = parse_mode(read_string(v, "mode")); });

  with_field(doc, "params", [&](const json& p) {
    require_object(p, "params");
    reject_unknown(p, "params", {"n", "r", "sigma"});
    with_field(p, "n", [&](const json& v) { c.params.n = read_integer(v, "params.n"); });
    with_field(p, "r", [&](const json& v) { c.params.r = read_number(v, "params.r"); });
    with_field(p, "sigma", [&](const json& v) { c.params.sigma = read_number(v, "params.sigma"); });
  });

  with_field(doc, "w0", [&](const json& v) { c.w0 = read_simplex(v, "w0"); });

  with_field(doc, "grid", [&](const json& g) {
    require_object(g, "grid");
    reject_unknown(g, "grid", {"t0", "tf", "steps"});
    with_field(g, "t0", [&](const json& v) { c.grid.t0 = read_number(v, "grid.t0"); });
    with_field(g, "tf", [&](const json& v) { c.grid.tf = read_number(v, "grid.tf"); });
    with_field(g, "steps", [&](const json& v) { c.grid.steps = read_integer(v, "grid.steps"); });
  });

  with_field(doc, "weights", [&](const json& w) {
    require_object(w, "weights");
    reject_unknown(w, "weights", {"alpha1", "alpha2", "alpha3", "alpha4", "w_star", "v_max"});
    with_field(w, "alpha1", [&](const json& v) { c.weights.alpha1 = read_number(v, "weights.alpha1"); });
    with_field(w, "alpha2", [&](const json& v) { c.weights.alpha2 = read_number(v, "weights.alpha2"); });
    with_field(w, "alpha3", [&](const json& v) { c.weights.alpha3 = read_number(v, "weights.alpha3"); });
    with_field(w, "alpha4", [&](const json& v) { c.weights.alpha4 = read_number(v, "weights.alpha4"); });
    with_field(w, "w_star", [&](const json& v) { c.weights.w_star = read_simplex(v, "weights.w_star"); });
    with_field(w, "v_max", [&](const json& v) { c.weights.v_max = read_number(v, "weights.v_max"); });
  });

  with_field(doc, "solver", [&](const json& s) {
    require_object(s, "solver");
    reject_unknown(s, "solver", {"method", "max_iters", "theta", "tol_cost", "tol_control",
                                 "bang_bang_epsilon", "initial_control", "max_backtracks"});
    with_field(s, "method", [&](const json& v) {
      c.method = parse_solver_method(read_string(v, "solver.method"));
    });
    with_field(s, "max_iters", [&](const json& v) { c.solver.max_iters = read_integer(v, "solver.max_iters"); });
    with_field(s, "theta", [&](const json& v) { c.solver.theta = read_number(v, "solver.theta"); });
    with_field(s, "tol_cost", [&](const json& v) { c.solver.tol_cost = read_number(v, "solver.tol_cost"); });
    with_field(s, "tol_control", [&](const json& v) { c.solver.tol_control = read_number(v, "solver.tol_control"); });
    with_field(s, "bang_bang_epsilon", [&](const json& v) {
      c.solver.bang_bang_epsilon = read_number(v, "solver.bang_bang_epsilon");
    });
    with_field(s, "initial_control", [&](const json& v) {
      c.solver.initial_control = read_number(v, "solver.initial_control");
    });
    with_field(s, "max_backtracks", [&](const json& v) {
      c.solver.max_backtracks = read_integer(v, "solver.max_backtracks");
    });
  });

  with_field(doc, "constant_v", [&](const json& v) {
    if (!v.is_null()) c.constant_v = read_number(v, "constant_v");
  });
  with_field(doc, "sweep_points", [&](const json& v) { c.sweep_points = read_integer(v, "sweep_points"); });
  with_field(doc, "sweep_values", [&](const json& v) {
    if (!v.is_array()) throw ConfigError("sweep_values: expected an array of numbers");
    c.sweep_values.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      c.sweep_values.push_back(read_number(v[i], "sweep_values[" + std::to_string(i) + "]"));
    }
  });

  c.validate();
  return c;
}

ScenarioConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
  return config_from_json(doc);
}

// ---------------------------------------------------------------------------
// Presets. Common setting: n = 5, r = 3, sigma = 1, w0 = (0.2, 0.7, 0.1),
// target full cooperation, v_max = 1.

namespace {

json base_preset(const std::string& name, const std::string& mode, double tf, int steps) {
  return {{"name", name},
          {"mode", mode},
          {"params", {{"n", 5}, {"r", 3.0}, {"sigma", 1.0}}},
          {"w0", {0.2, 0.7, 0.1}},
          {"grid", {{"t0", 0.0}, {"tf", tf}, {"steps", steps}}},
          {"weights", {{"w_star", {1.0, 0.0, 0.0}}, {"v_max", 1.0}}}};
}

json with_alphas(json doc, double a1, double a2, double a3, double a4) {
  doc["weights"]["alpha1"] = a1;
  doc["weights"]["alpha2"] = a2;
  doc["weights"]["alpha3"] = a3;
  doc["weights"]["alpha4"] = a4;
  return doc;
}

const std::map<std::string, json>& preset_table() {
  static const std::map<std::string, json> table = [] {
    std::map<std::string, json> t;
    auto add = [&](const json& doc) { t.emplace(doc["name"].get<std::string>(), doc); };

    add(with_alphas(base_preset("fig1", "optimize", 70.0, 250), 1, 0, 0, 0));

    json fig2 = with_alphas(base_preset("fig2", "simulate", 4.0, 600), 1, 0, 0, 0);
    fig2["w0"] = {0.998, 0.001, 0.001};
    fig2["constant_v"] = 0.0;
    add(fig2);

    add(with_alphas(base_preset("fig3", "optimize", 70.0, 250), 0, 1, 0, 0));

    json fig4 = with_alphas(base_preset("fig4", "simulate", 70.0, 600), 0, 1, 0, 0);
    fig4["constant_v"] = 0.0;
    add(fig4);
    add(with_alphas(base_preset("fig4-alpha3", "optimize", 70.0, 600), 0, 0, 1, 0));
    add(with_alphas(base_preset("fig4-alpha4", "optimize", 70.0, 600), 0, 0, 0, 1));

    auto family = [&](const std::string& fig, double tf, const std::vector<double>& alpha2,
                      auto&& weights_for) {
      for (std::size_t i = 0; i < alpha2.size(); ++i) {
        const auto [a3, a4] = weights_for(alpha2[i]);
        add(with_alphas(base_preset(fig + "-" + std::to_string(i + 1), "optimize", tf, 400), 0,
                        alpha2[i], a3, a4));
      }
    };
    // alpha2 + alpha3 = 1
    auto pair23 = [](double a2) { return std::pair{1.0 - a2, 0.0}; };
    family("fig5", 70.0, {0.999, 0.97, 0.94, 0.91}, pair23);
    family("fig6", 70.0, {0.9, 0.4, 0.2, 0.1}, pair23);
    // alpha2 + alpha4 = 1
    auto pair24 = [](double a2) { return std::pair{0.0, 1.0 - a2}; };
    family("fig7", 70.0, {0.2, 0.05, 0.03, 0.02, 0.01}, pair24);
    family("fig8", 70.0, {0.009, 0.005, 0.003, 0.001}, pair24);
    // alpha3 = 1e-4, alpha2 + alpha3 + alpha4 = 1
    family("fig9", 90.0, {0.02, 0.03, 0.04, 0.05, 0.06},
           [](double a2) { return std::pair{0.0001, 1.0 - a2 - 0.0001}; });

    json fig10 = with_alphas(base_preset("fig10", "sweep", 20.0, 400), 0, 0.04, 0.001, 0.959);
    fig10["sweep_points"] = 101;
    add(fig10);

    json table1 = with_alphas(base_preset("table1", "compare", 20.0, 1200), 0, 0.04, 0.001, 0.959);
    table1["sweep_points"] = 101;
    add(table1);
    json fig11 = table1;
    fig11["name"] = "fig11";
    add(fig11);
    json optimal = table1;
    optimal["name"] = "table1-optimal";
    optimal["mode"] = "optimize";
    add(optimal);
    return t;
  }();
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : preset_table()) names.push_back(name);
  return names;
}

json preset_json(const std::string& name) {
  const auto& table = preset_table();
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("preset: unknown preset \"" + name + "\"");
  return it->second;
}

ScenarioConfig preset(const std::string& name) { return config_from_json(preset_json(name)); }

// ---------------------------------------------------------------------------
// Files.

Eigen::Vector2d ternary_coordinates(const SimplexState& w) {
  return {w(1) + 0.5 * w(2), 0.5 * std::sqrt(3.0) * w(2)};
}

void export_ternary(const StateTrajectory& traj, const fs::path& path) {
  std::ofstream out = open_output(path);
  out << "X=y+z/2,Y=sqrt(3)/2*z\n";
  for (const auto& w : traj.states) {
    const Eigen::Vector2d p = ternary_coordinates(w);
    out << format_double(p.x()) << ',' << format_double(p.y()) << '\n';
  }
  finish(out, path);
}

void write_trajectory_csv(const StateTrajectory& traj, const fs::path& path) {
  std::ofstream out = open_output(path);
  out << "t,x,y,z\n";
  for (int k = 0; k < traj.grid.nodes(); ++k) {
    const auto& w = traj.states[k];
    out << format_double(traj.grid.time(k)) << ',' << format_double(w(0)) << ','
        << format_double(w(1)) << ',' << format_double(w(2)) << '\n';
  }
  finish(out, path);
}

void write_control_csv(const StateTrajectory& traj, const ControlTrajectory& control,
                       const fs::path& path) {
  if (!(traj.grid == control.grid)) throw GridMismatchError("state and control grids differ");
  std::ofstream out = open_output(path);
  out << "t,v,yv\n";
  for (int k = 0; k < control.grid.nodes(); ++k) {
    const double v = control.values(k);
    out << format_double(control.grid.time(k)) << ',' << format_double(v) << ','
        << format_double(v * traj.states[k](1)) << '\n';
  }
  finish(out, path);
}

// ---------------------------------------------------------------------------
// Runs.

RunSummary run_simulate(const ScenarioConfig& config, const fs::path& out_dir) {
  expect_mode(config, Mode::Simulate);
  const ControlTrajectory control = ControlTrajectory::constant(config.grid, *config.constant_v);
  StepDiagnostics diag;
  const StateTrajectory states = integrate_forward(config.w0, control, config.params, &diag);

  RunSummary summary;
  summary.config = config;
  summary.breakdown = evaluate_cost(states, control, config.weights);
  summary.punished_integral = summary.breakdown.punished_integral;

  prepare_dir(out_dir);
  write_run_files(states, control, out_dir, "", summary.files);
  const SimplexState& target = config.weights.w_star;
  summary.summary["initial_state_error"] = (states.front() - target).norm();
  summary.summary["final_state_error"] = (states.back() - target).norm();
  summary.summary["final_state"] = simplex_json(states.back());
  summary.summary["max_simplex_drift"] = diag.max_sum_error;
  write_summary(summary, out_dir);
  return summary;
}

RunSummary run_optimize(const ScenarioConfig& config, const fs::path& out_dir) {
  expect_mode(config, Mode::Optimize);
  const SolveReport report = solve(config);

  RunSummary summary;
  summary.config = config;
  summary.breakdown = report.breakdown;
  summary.punished_integral = report.breakdown.punished_integral;
  summary.converged = report.converged;
  summary.iterations = report.iterations;

  prepare_dir(out_dir);
  write_run_files(report.states, report.control, out_dir, "", summary.files);
  const KktResidual kkt = kkt_residual(report.states, report.control, report.costate,
                                       config.weights, config.params);
  summary.summary["solver"] = to_string(config.method);
  summary.summary["cost_history"] = report.cost_history;
  summary.summary["kkt"] = {{"interior", kkt.interior}, {"lower", kkt.lower},
                            {"upper", kkt.upper}, {"interior_nodes", kkt.interior_nodes},
                            {"lower_nodes", kkt.lower_nodes}, {"upper_nodes", kkt.upper_nodes}};
  summary.summary["critical_punishment"] = critical_punishment(config.params);
  summary.summary["late_control_mean"] = late_control_mean(report.control, 10.0);
  summary.summary["final_state_error"] = (report.states.back() - config.weights.w_star).norm();
  write_summary(summary, out_dir);
  return summary;
}

RunSummary run_sweep(const ScenarioConfig& config, const fs::path& out_dir) {
  expect_mode(config, Mode::Sweep);
  SweepResult sweep = constant_sweep(config.w0, config.grid, config.weights, config.params,
                                     config.resolved_sweep_values());

  RunSummary summary;
  summary.config = config;
  summary.breakdown = sweep.best().breakdown;
  summary.punished_integral = sweep.best().breakdown.punished_integral;

  prepare_dir(out_dir);
  const fs::path csv = out_dir / "sweep.csv";
  write_sweep_csv(sweep, csv);
  summary.files.push_back(csv);
  summary.summary["argmin"] = sweep_argmin_json(sweep);
  summary.sweep = std::move(sweep);
  write_summary(summary, out_dir);
  return summary;
}

RunSummary run_compare(const ScenarioConfig& config, const fs::path& out_dir) {
  expect_mode(config, Mode::Compare);
  const double v_max = config.weights.v_max;

  auto start = std::chrono::steady_clock::now();
  const ControlTrajectory saturated = ControlTrajectory::constant(config.grid, v_max);
  const StateTrajectory saturated_states = integrate_forward(config.w0, saturated, config.params);
  const CostBreakdown saturated_cost = evaluate_cost(saturated_states, saturated, config.weights);
  const double saturated_time = seconds_since(start);

  start = std::chrono::steady_clock::now();
  SweepResult sweep = constant_sweep(config.w0, config.grid, config.weights, config.params,
                                     config.resolved_sweep_values());
  const ControlTrajectory best =
      ControlTrajectory::constant(config.grid, sweep.best().v);
  const StateTrajectory best_states = integrate_forward(config.w0, best, config.params);
  const double best_time = seconds_since(start);

  start = std::chrono::steady_clock::now();
  const SolveReport optimal = solve(config);
  const double optimal_time = seconds_since(start);

  RunSummary summary;
  summary.config = config;
  summary.breakdown = optimal.breakdown;
  summary.punished_integral = optimal.breakdown.punished_integral;
  summary.converged = optimal.converged;
  summary.iterations = optimal.iterations;
  summary.comparison = {
      {"constant_v_max", saturated_cost.total, saturated_cost.punished_integral, saturated_time,
       true},
      {"best_constant", sweep.best().breakdown.total, sweep.best().breakdown.punished_integral,
       best_time, true},
      {"optimal", optimal.breakdown.total, optimal.breakdown.punished_integral, optimal_time,
       optimal.converged}};

  prepare_dir(out_dir);
  write_run_files(optimal.states, optimal.control, out_dir, "", summary.files);
  write_run_files(saturated_states, saturated, out_dir, "constant_v_max_", summary.files);
  write_run_files(best_states, best, out_dir, "best_constant_", summary.files);
  const fs::path sweep_csv = out_dir / "sweep.csv";
  write_sweep_csv(sweep, sweep_csv);
  summary.files.push_back(sweep_csv);

  const fs::path table_csv = out_dir / "comparison.csv";
  {
    std::ofstream out = open_output(table_csv);
    out << "strategy,J,punished_integral,wall_time_s\n";
    for (const auto& row : summary.comparison) {
      out << row.strategy << ',' << format_double(row.cost) << ','
          << format_double(row.punished_integral) << ',' << format_double(row.wall_time_s)
          << '\n';
    }
    finish(out, table_csv);
  }
  summary.files.push_back(table_csv);

  json rows = json::array();
  for (const auto& row : summary.comparison) {
    rows.push_back({{"strategy", row.strategy},
                    {"J", row.cost},
                    {"punished_integral", row.punished_integral},
                    {"wall_time_s", row.wall_time_s},
                    {"converged", row.converged}});
  }
  summary.summary["comparison"] = rows;
  summary.summary["argmin"] = sweep_argmin_json(sweep);
  summary.summary["solver"] = to_string(config.method);
  summary.sweep = std::move(sweep);
  write_summary(summary, out_dir);
  return summary;
}

RunSummary run_scenario(const ScenarioConfig& config, const fs::path& out_dir) {
  switch (config.mode) {
    case Mode::Simulate:
      return run_simulate(config, out_dir);
    case Mode::Optimize:
      return run_optimize(config, out_dir);
    case Mode::Sweep:
      return run_sweep(config, out_dir);
    case Mode::Compare:
      return run_compare(config, out_dir);
  }
  throw ConfigError("mode: unsupported");
}

}  // namespace opgg
