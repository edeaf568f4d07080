// opgg: run punishment-control experiments from a JSON scenario or a preset.
//
// Usage:
//   opgg simulate|optimize|sweep|compare [--config <path>] [--preset <name>]
//        --out <dir> [--solver fbsm|pgd]
//   opgg presets
//
// With both --preset and --config, the config document is merged over the
// preset. The subcommand always decides the mode.
//
// Exit codes: 0 success, 1 optimizer did not converge (outputs kept),
// 2 invalid configuration, 3 runtime or I/O failure.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "opgg/scenario.hpp"

namespace {

constexpr int kNotConverged = 1;
constexpr int kBadConfig = 2;
constexpr int kFailure = 3;

struct RunOptions {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::string solver;
};

opgg::ScenarioConfig resolve_config(const RunOptions& opts, opgg::Mode mode) {
  nlohmann::json doc = nlohmann::json::object();
  if (!opts.preset.empty()) doc = opgg::preset_json(opts.preset);
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw opgg::ConfigError("--config: cannot open " + opts.config_path);
    nlohmann::json patch;
    try {
      patch = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw opgg::ConfigError(opts.config_path + ": invalid JSON: " + e.what());
    }
    if (!patch.is_object()) throw opgg::ConfigError(opts.config_path + ": expected an object");
    doc.merge_patch(patch);
  }
  doc["mode"] = opgg::to_string(mode);
  if (!opts.solver.empty()) doc["solver"]["method"] = opts.solver;
  return opgg::config_from_json(doc);
}

void print_summary(const opgg::RunSummary& summary) {
  const auto& b = summary.breakdown;
  std::cout << "scenario " << summary.config.name << " (" << opgg::to_string(summary.config.mode)
            << ")\n";
  std::cout << "  J = " << b.total << "  [terminal " << b.terminal << ", tracking " << b.tracking
            << ", effort " << b.effort << ", punished " << b.punished << "]\n";
  std::cout << "  punished integral = " << summary.punished_integral << '\n';
  if (summary.sweep) {
    std::cout << "  best constant v = " << summary.sweep->best().v
              << " (J = " << summary.sweep->best().breakdown.total << ")\n";
  }
  for (const auto& row : summary.comparison) {
    std::cout << "  " << row.strategy << ": J = " << row.cost
              << ", punished = " << row.punished_integral << ", " << row.wall_time_s << " s\n";
  }
  if (summary.config.mode == opgg::Mode::Optimize || summary.config.mode == opgg::Mode::Compare) {
    std::cout << "  converged = " << (summary.converged ? "yes" : "no") << " after "
              << summary.iterations << " iterations\n";
  }
  for (const auto& f : summary.files) std::cout << "  wrote " << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal fractional punishment in the optional public goods game"};
  app.require_subcommand(1);

  RunOptions opts;
  const std::pair<const char*, opgg::Mode> modes[] = {
      {"simulate", opgg::Mode::Simulate},
      {"optimize", opgg::Mode::Optimize},
      {"sweep", opgg::Mode::Sweep},
      {"compare", opgg::Mode::Compare}};
  std::vector<std::pair<CLI::App*, opgg::Mode>> run_commands;
  for (const auto& [name, mode] : modes) {
    CLI::App* sub = app.add_subcommand(name, "Run a scenario in " + std::string(name) + " mode");
    sub->add_option("--config", opts.config_path, "Scenario JSON file")->check(CLI::ExistingFile);
    sub->add_option("--preset", opts.preset, "Built-in scenario name (see `presets`)");
    sub->add_option("--out", opts.out_dir, "Output directory")->required();
    sub->add_option("--solver", opts.solver, "Optimizer")->check(CLI::IsMember({"fbsm", "pgd"}));
    run_commands.emplace_back(sub, mode);
  }
  CLI::App* list = app.add_subcommand("presets", "List built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    for (const auto& name : opgg::preset_names()) {
      const auto doc = opgg::preset_json(name);
      std::cout << name << '\t' << doc["mode"].get<std::string>() << '\n';
    }
    return 0;
  }

  for (const auto& [sub, mode] : run_commands) {
    if (!sub->parsed()) continue;
    if (opts.config_path.empty() && opts.preset.empty()) {
      std::cerr << "error: one of --config or --preset is required\n";
      return kBadConfig;
    }
    try {
      const opgg::ScenarioConfig config = resolve_config(opts, mode);
      const opgg::RunSummary summary = opgg::run_scenario(config, opts.out_dir);
      print_summary(summary);
      return summary.converged ? 0 : kNotConverged;
    } catch (const opgg::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kBadConfig;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kFailure;
    }
  }
  return kFailure;
}
