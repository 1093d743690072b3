// Command-line front end: spectrum tables, frequency sweeps, linear
// forecasts, and the demo experiments, all driven by TOML/JSON configs
// with flag overrides. Exit codes: 0 success, 1 configuration error,
// 2 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specbias/config.hpp"
#include "specbias/demos.hpp"
#include "specbias/errors.hpp"
#include "specbias/report.hpp"
#include "specbias/sweep.hpp"

namespace {

using namespace specbias;
using experiments::ConfigMap;
using nlohmann::json;

struct GlobalOptions {
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::string out_dir = ".";
  std::string format = "csv";
};

void emit_summary(const GlobalOptions& globals, const json& summary) {
  if (globals.format == "json") {
    std::cout << summary.dump(2) << "\n";
    return;
  }
  for (const auto& [key, value] : summary.items())
    std::cout << key << ": "
              << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
}

ConfigMap load_config(const std::optional<std::string>& path,
                      const std::vector<std::string>& overrides,
                      const GlobalOptions& globals, const std::string& expected_kind) {
  ConfigMap config;
  if (path) config = ConfigMap::load(*path);
  const std::string kind = config.get_string("kind", expected_kind);
  if (kind != expected_kind)
    throw config_error("config kind '" + kind + "' does not match subcommand '" +
                       expected_kind + "'");
  for (const auto& assignment : overrides) config.set_override(assignment);
  if (globals.seed_set) config.set_override("seed=" + std::to_string(globals.seed));
  return config;
}

void reject_unread(const ConfigMap& config) {
  const auto unread = config.unread_keys();
  if (unread.empty()) return;
  std::string msg = "unknown config keys:";
  for (const auto& key : unread) msg += " " + key;
  throw config_error(msg);
}

int run_spectrum(const GlobalOptions& globals, const std::vector<int>& dims, int k_max,
                 const std::string& variant, int grid_n) {
  experiments::SpectrumReportOptions options;
  options.dims = dims;
  options.k_max = k_max;
  options.grid_n = grid_n;
  options.out_dir = globals.out_dir;
  if (variant == "bias_free") {
    options.variants = {kernels::KernelVariant::BiasFree};
  } else if (variant == "with_bias") {
    options.variants = {kernels::KernelVariant::WithBias};
  } else if (variant == "both") {
    options.variants = {kernels::KernelVariant::BiasFree,
                        kernels::KernelVariant::WithBias};
  } else {
    throw config_error("--variant must be bias_free, with_bias or both");
  }
  const std::size_t rows = experiments::emit_spectrum_report(options);
  json summary;
  summary["rows"] = rows;
  summary["out_dir"] = globals.out_dir;
  summary["files"] = {"spectrum.csv", "spectrum.json"};
  emit_summary(globals, summary);
  return 0;
}

int run_sweep_command(const GlobalOptions& globals,
                      const std::optional<std::string>& config_path,
                      const std::vector<std::string>& overrides, int workers) {
  ConfigMap config = load_config(config_path, overrides, globals, "sweep");
  if (workers > 0) config.set_override("workers=" + std::to_string(workers));
  const experiments::SweepSpec spec = experiments::sweep_spec_from_config(config);
  reject_unread(config);
  const experiments::SweepResult result = experiments::run_sweep(spec);
  experiments::write_sweep_outputs(spec, result, globals.out_dir,
                                   experiments::config_hash(config));
  json summary;
  summary["cells"] = result.cells.size();
  summary["fit_valid"] = result.fit_valid;
  if (result.fit_valid) {
    summary["exponent"] = result.fit.exponent;
    summary["exponent_stderr"] = result.fit.stderr_exponent;
    summary["prediction_scale"] = result.prediction_scale;
  }
  int not_converged = 0;
  for (const auto& cell : result.cells)
    if (cell.verdict != nets::TrainVerdict::Converged) ++not_converged;
  summary["unconverged_cells"] = not_converged;
  summary["out_dir"] = globals.out_dir;
  emit_summary(globals, summary);
  return 0;
}

int run_forecast(const GlobalOptions& globals,
                 const std::optional<std::string>& config_path,
                 const std::vector<std::string>& overrides) {
  ConfigMap config = load_config(config_path, overrides, globals, "forecast");
  experiments::ForecastOptions options = experiments::forecast_options(config);
  reject_unread(config);
  options.out_dir = globals.out_dir;
  experiments::emit_forecast_report(options);
  json summary;
  summary["out_dir"] = globals.out_dir;
  summary["files"] = {"forecast_curve.csv", "thresholds.csv", "forecast.json",
                      "forecast.svg"};
  emit_summary(globals, summary);
  return 0;
}

int run_demo_two_sines(const GlobalOptions& globals,
                       const std::optional<std::string>& config_path,
                       const std::vector<std::string>& overrides) {
  ConfigMap config = load_config(config_path, overrides, globals, "demo_two_sines");
  const auto demo_config = experiments::two_sines_config(config);
  reject_unread(config);
  const auto report = experiments::demo_two_sines(demo_config);
  experiments::write_two_sines_outputs(report, globals.out_dir);
  json summary;
  summary["low_epoch"] = report.low_epoch;
  summary["high_epoch"] = report.high_epoch;
  summary["epoch_ratio"] = report.low_epoch > 0
                               ? static_cast<double>(report.high_epoch) /
                                     static_cast<double>(report.low_epoch)
                               : 0.0;
  summary["max_dc_fraction"] = report.max_dc_fraction;
  summary["out_dir"] = globals.out_dir;
  emit_summary(globals, summary);
  return 0;
}

int run_demo_odd(const GlobalOptions& globals,
                 const std::optional<std::string>& config_path,
                 const std::vector<std::string>& overrides) {
  ConfigMap config = load_config(config_path, overrides, globals, "demo_odd");
  const auto demo_config = experiments::odd_demo_config(config);
  reject_unread(config);
  const auto report = experiments::demo_odd_interpolation(demo_config);
  experiments::write_odd_demo_outputs(report, globals.out_dir);
  json summary = json::array();
  for (const auto& c : report.cases)
    summary.push_back({{"freq", c.freq},
                       {"train_residual_fraction", c.train_residual_fraction},
                       {"dense_relative_error", c.dense_relative_error},
                       {"odd_energy_fraction", c.odd_energy_fraction}});
  emit_summary(globals, json{{"cases", summary}, {"out_dir", globals.out_dir}});
  return 0;
}

int run_demo_cross_entropy(const GlobalOptions& globals,
                           const std::optional<std::string>& config_path,
                           const std::vector<std::string>& overrides) {
  ConfigMap config = load_config(config_path, overrides, globals, "demo_cross_entropy");
  const auto demo_config = experiments::cross_entropy_config(config);
  reject_unread(config);
  const auto report = experiments::demo_cross_entropy(demo_config);
  experiments::write_cross_entropy_outputs(report, globals.out_dir);
  json summary;
  summary["fit_valid"] = report.fit_valid;
  if (report.fit_valid) summary["exponent"] = report.fit.exponent;
  summary["out_dir"] = globals.out_dir;
  emit_summary(globals, summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral bias toolkit: kernel spectra and training-speed forecasts "
               "for wide two-layer ReLU networks"};
  app.require_subcommand(1);

  GlobalOptions globals;
  app.add_option("--seed", globals.seed, "base random seed (overrides config)")
      ->each([&](const std::string&) { globals.seed_set = true; });
  app.add_option("--out-dir", globals.out_dir, "output directory")
      ->default_val(".");
  app.add_option("--format", globals.format, "stdout summary format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->default_val("csv");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "three-source eigenvalue tables");
  spectrum->fallthrough();
  std::vector<int> dims{1};
  int k_max = 10;
  std::string variant = "both";
  int grid_n = 1001;
  spectrum->add_option("--d", dims, "sphere dimensions")->default_val(std::vector<int>{1});
  spectrum->add_option("--kmax", k_max, "largest frequency")->default_val(10);
  spectrum->add_option("--variant", variant, "bias_free | with_bias | both")
      ->default_val("both");
  spectrum->add_option("--grid-n", grid_n, "circle grid size for the matrix route")
      ->default_val(1001);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "frequency sweep of trained networks");
  sweep->fallthrough();
  std::optional<std::string> sweep_config;
  std::vector<std::string> sweep_sets;
  int workers = 0;
  sweep->add_option("--config", sweep_config, "TOML or JSON sweep spec")->required();
  sweep->add_option("--set", sweep_sets, "config override key=value");
  sweep->add_option("--workers", workers, "worker pool size (0 = hardware)");

  // forecast
  auto* forecast = app.add_subcommand("forecast", "linear training-dynamics forecast");
  forecast->fallthrough();
  std::optional<std::string> forecast_config;
  std::vector<std::string> forecast_sets;
  forecast->add_option("--config", forecast_config, "TOML or JSON forecast spec");
  forecast->add_option("--set", forecast_sets, "config override key=value");

  // demo
  auto* demo = app.add_subcommand("demo", "paper-figure demonstrations");
  demo->require_subcommand(1);
  auto* two_sines = demo->add_subcommand("two-sines", "superposed sines, per-mode timing");
  auto* odd = demo->add_subcommand("odd", "bias-free odd-frequency interpolation failure");
  auto* cross_entropy = demo->add_subcommand("cross-entropy",
                                             "thresholded-cosine classification sweep");
  std::optional<std::string> demo_config;
  std::vector<std::string> demo_sets;
  for (auto* sub : {two_sines, odd, cross_entropy}) {
    sub->fallthrough();
    sub->add_option("--config", demo_config, "TOML or JSON demo config");
    sub->add_option("--set", demo_sets, "config override key=value");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    std::filesystem::create_directories(globals.out_dir);
    if (*spectrum) return run_spectrum(globals, dims, k_max, variant, grid_n);
    if (*sweep) return run_sweep_command(globals, sweep_config, sweep_sets, workers);
    if (*forecast) return run_forecast(globals, forecast_config, forecast_sets);
    if (*two_sines) return run_demo_two_sines(globals, demo_config, demo_sets);
    if (*odd) return run_demo_odd(globals, demo_config, demo_sets);
    if (*cross_entropy) return run_demo_cross_entropy(globals, demo_config, demo_sets);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
