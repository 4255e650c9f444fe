#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "duopose/duopose.hpp"

namespace {

duopose::Json load_config(const std::string& config_path, const std::string& preset_name) {
  if (!config_path.empty() && !preset_name.empty()) {
    throw duopose::ConfigError("<cli>", "pass either --config or --preset, not both");
  }
  if (!preset_name.empty()) {
    return duopose::preset_config(preset_name);
  }
  if (config_path.empty()) {
    throw duopose::ConfigError("<cli>", "one of --config or --preset is required");
  }
  std::ifstream f(config_path);
  if (!f) throw duopose::IoError("cannot read config file " + config_path);
  std::stringstream buffer;
  buffer << f.rdbuf();
  try {
    return duopose::Json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw duopose::ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw duopose::ConfigError("<cli>.values", "'" + token + "' is not a number");
    }
  }
  return values;
}

void print_headline(const duopose::RunReport& report, const std::filesystem::path& out_dir) {
  const duopose::Json summary = duopose::summarize(report);
  std::cout << report.config.name << ": " << report.config.steps() << " steps in "
            << report.wall_seconds << " s -> " << out_dir.string() << "\n";
  for (const auto& [agent, points] : summary["depth"].items()) {
    for (const auto& [id, entry] : points.items()) {
      std::cout << "  depth " << agent << "/" << id << ": final error "
                << entry["final_error_m"].dump() << " m, converged(abs) at "
                << entry["convergence_time_abs_s"].dump() << " s\n";
    }
  }
  for (const auto& [agent, entry] : summary["pose"].items()) {
    std::cout << "  pose " << agent << ": final error " << entry["final_error"].dump()
              << ", converged(all) at " << entry["convergence_time_s"]["all"].dump() << " s\n";
  }
}

int run_command(const std::string& config_path, const std::string& preset_name,
                const std::string& out_dir, long long seed_override,
                const std::string& transport_kind, int port_a, int port_b) {
  duopose::Json raw = load_config(config_path, preset_name);
  if (seed_override >= 0) raw["seed"] = static_cast<std::uint64_t>(seed_override);
  if (!transport_kind.empty()) raw["transport"]["kind"] = transport_kind;
  if (port_a > 0) raw["transport"]["port_a"] = port_a;
  if (port_b > 0) raw["transport"]["port_b"] = port_b;
  const duopose::ScenarioConfig cfg = duopose::parse_scenario(raw);
  const duopose::RunReport report = duopose::run(cfg);
  const std::filesystem::path dir =
      out_dir.empty() ? std::filesystem::path("out") / cfg.name : std::filesystem::path(out_dir);
  duopose::report_emit(report, dir);
  print_headline(report, dir);
  return 0;
}

int sweep_command(const std::string& config_path, const std::string& preset_name,
                  const std::string& param, const std::string& values_csv,
                  const std::string& out_dir) {
  const duopose::Json base = load_config(config_path, preset_name);
  const std::vector<double> values = parse_values(values_csv);
  const std::vector<duopose::RunReport> reports = duopose::sweep(base, param, values);

  std::string param_slug = param;
  for (auto& c : param_slug) {
    if (c == '.' || c == '/') c = '_';
  }
  const std::filesystem::path root =
      out_dir.empty() ? std::filesystem::path("out") / ("sweep-" + param_slug)
                      : std::filesystem::path(out_dir);

  duopose::Json sweep_summary;
  sweep_summary["param"] = param;
  sweep_summary["runs"] = duopose::Json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const std::filesystem::path dir =
        root / (param_slug + "=" + duopose::format_double(values[i]));
    duopose::report_emit(reports[i], dir);
    duopose::Json entry;
    entry["value"] = values[i];
    entry["out_dir"] = dir.string();
    entry["depth"] = duopose::summarize(reports[i])["depth"];
    sweep_summary["runs"].push_back(entry);
    std::cout << param << " = " << values[i] << " -> " << dir.string() << "\n";
  }
  std::ofstream f(root / "sweep_summary.json", std::ios::binary);
  if (!f) throw duopose::IoError("cannot write " + (root / "sweep_summary.json").string());
  f << sweep_summary.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-robot depth and relative-pose estimation harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  long long seed_override = -1;
  std::string param;
  std::string values_csv;
  std::string transport_kind;
  int port_a = 0;
  int port_b = 0;

  CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario and emit reports");
  run_cmd->add_option("--config", config_path, "Scenario config file (JSON)");
  run_cmd->add_option("--preset", preset_name, "Built-in scenario name");
  run_cmd->add_option("--out", out_dir, "Output directory (default out/<name>)");
  run_cmd->add_option("--seed", seed_override, "Override the config seed");
  run_cmd->add_option("--transport", transport_kind, "Override the transport: inproc or udp");
  run_cmd->add_option("--port-a", port_a, "UDP port for robot A (loopback)");
  run_cmd->add_option("--port-b", port_b, "UDP port for robot B (loopback)");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a scenario once per parameter value");
  sweep_cmd->add_option("--config", config_path, "Scenario config file (JSON)");
  sweep_cmd->add_option("--preset", preset_name, "Built-in scenario name");
  sweep_cmd->add_option("--param", param, "Dotted config path, e.g. observer.lambda")->required();
  sweep_cmd->add_option("--values", values_csv, "Comma-separated values")->required();
  sweep_cmd->add_option("--out", out_dir, "Output directory root");

  CLI::App* presets_cmd = app.add_subcommand("presets", "Inspect built-in scenarios");
  CLI::App* presets_list = presets_cmd->add_subcommand("list", "List preset names");
  std::string show_name;
  CLI::App* presets_show = presets_cmd->add_subcommand("show", "Print a preset config");
  presets_show->add_option("name", show_name, "Preset name")->required();
  presets_cmd->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return run_command(config_path, preset_name, out_dir, seed_override, transport_kind, port_a,
                         port_b);
    }
    if (sweep_cmd->parsed()) {
      return sweep_command(config_path, preset_name, param, values_csv, out_dir);
    }
    if (presets_list->parsed()) {
      for (const auto& p : duopose::presets()) {
        std::cout << p.name << "  -  " << p.description << "\n";
      }
      return 0;
    }
    if (presets_show->parsed()) {
      std::cout << duopose::preset_config(show_name).dump(2) << "\n";
      return 0;
    }
  } catch (const duopose::ConfigError& e) {
    duopose::Json err = {{"error", "ConfigError"}, {"path", e.path}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const duopose::IoError& e) {
    duopose::Json err = {{"error", "IoError"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const duopose::Error& e) {
    duopose::Json err = {{"error", "Error"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
