#pragma once

// Configuration-driven experiment runner: JSON scenario in, CSV + JSON out.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opgg/solver.hpp"

namespace opgg {

enum class Mode { Simulate, Optimize, Sweep, Compare };
enum class SolverMethod { Fbsm, ProjectedGradient };

struct ScenarioConfig {
  std::string name = "custom";
  Mode mode = Mode::Optimize;
  GameParams params;
  SimplexState w0 = SimplexState(0.2, 0.7, 0.1);
  TimeGrid grid{0.0, 70.0, 400};
  CostWeights weights;
  SolverConfig solver;
  SolverMethod method = SolverMethod::Fbsm;
  std::optional<double> constant_v;        // simulate mode
  int sweep_points = 101;                  // sweep and compare modes
  std::vector<double> sweep_values;        // explicit sweep; overrides sweep_points

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Values the constant sweep will visit.
  std::vector<double> resolved_sweep_values() const;
};

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);
std::string to_string(SolverMethod method);
SolverMethod parse_solver_method(const std::string& text);

nlohmann::json to_json(const ScenarioConfig& config);
/// Missing fields keep their defaults. Throws ConfigError on bad fields.
ScenarioConfig config_from_json(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Built-in scenarios for the published experiments.
std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
nlohmann::json preset_json(const std::string& name);
ScenarioConfig preset(const std::string& name);

struct ComparisonRow {
  std::string strategy;
  double cost = 0.0;
  double punished_integral = 0.0;
  double wall_time_s = 0.0;
  bool converged = true;
};

struct RunSummary {
  ScenarioConfig config;
  CostBreakdown breakdown;
  double punished_integral = 0.0;
  bool converged = true;
  int iterations = 0;
  std::vector<std::filesystem::path> files;
  std::optional<SweepResult> sweep;
  std::vector<ComparisonRow> comparison;
  nlohmann::json summary;  // contents of summary.json
};

RunSummary run_simulate(const ScenarioConfig& config, const std::filesystem::path& out_dir);
RunSummary run_optimize(const ScenarioConfig& config, const std::filesystem::path& out_dir);
RunSummary run_sweep(const ScenarioConfig& config, const std::filesystem::path& out_dir);
RunSummary run_compare(const ScenarioConfig& config, const std::filesystem::path& out_dir);
/// Dispatches on config.mode.
RunSummary run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

/// Barycentric to planar: X = y + z/2, Y = (√3/2) z.
Eigen::Vector2d ternary_coordinates(const SimplexState& w);
/// Writes one (X, Y) row per node after a header naming the mapping.
void export_ternary(const StateTrajectory& traj, const std::filesystem::path& path);

void write_trajectory_csv(const StateTrajectory& traj, const std::filesystem::path& path);
void write_control_csv(const StateTrajectory& traj, const ControlTrajectory& control,
                       const std::filesystem::path& path);

}  // namespace opgg
