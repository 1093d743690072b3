#ifndef SPECBIAS_REPORT_HPP
#define SPECBIAS_REPORT_HPP

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "specbias/demos.hpp"
#include "specbias/spectra.hpp"
#include "specbias/sweep.hpp"

namespace specbias::experiments {

/// Deterministic text output: fixed float formatting, no timestamps, so
/// reruns with the same config produce byte-identical files.
void write_text_file(const std::filesystem::path& file, const std::string& content);
std::string format_double(double v);

/// Minimal standalone SVG line/scatter chart.
struct SvgSeries {
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f77b4";
  bool line = true;
  bool markers = false;
  std::string label;
};
struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 720;
  int height = 480;
  std::vector<SvgSeries> series;
};
std::string render_svg_chart(const SvgChart& chart);

/// Small-multiples panel strip (one polyline per panel), for the
/// eigenvector figures.
std::string render_svg_panels(const std::string& title,
                              const std::vector<std::pair<std::string, Eigen::VectorXd>>& panels,
                              int per_row = 3);

/// Three-source spectrum table: closed form and quadrature for every
/// requested (d, variant, k), plus the circle-grid circulant eigenvalues
/// rescaled to coefficient units ((2 pi / n) lambda(k) / z_k) for d = 1.
std::vector<spectra::SpectrumEntry> spectrum_table_with_matrix(
    const std::vector<int>& dims, int k_max,
    const std::vector<kernels::KernelVariant>& variants, int grid_n);

struct SpectrumReportOptions {
  std::vector<int> dims = {1};
  int k_max = 10;
  std::vector<kernels::KernelVariant> variants = {kernels::KernelVariant::BiasFree,
                                                  kernels::KernelVariant::WithBias};
  int grid_n = 1001;
  std::filesystem::path out_dir = ".";
};

/// Writes spectrum.csv (+ spectrum.json) and the eigenvector panels of
/// the circle-grid Gram per variant (top 6 + bottom 3 without bias, top
/// 9 with bias). Returns the number of CSV data rows.
std::size_t emit_spectrum_report(const SpectrumReportOptions& options);

/// Linear-forecast report: residual curve and per-frequency threshold
/// table from the exact kernel Gram.
struct ForecastOptions {
  int d = 1;
  kernels::KernelVariant variant = kernels::KernelVariant::WithBias;
  int n = 256;
  double eta = 0.01;
  int label_freq = 4;
  double phase = 0.0;
  long t_max = 2000;
  double stop_fraction = 0.05;
  double slack = 0.0;
  int k_max = 16;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = ".";
};
ForecastOptions forecast_options(const ConfigMap& config);
void emit_forecast_report(const ForecastOptions& options);

/// Sweep outputs: per-cell CSV, per-frequency CSV with predictions, JSON
/// summary, and a log-log SVG overlay.
void write_sweep_outputs(const SweepSpec& spec, const SweepResult& result,
                         const std::filesystem::path& out_dir,
                         const std::string& config_digest);

void write_two_sines_outputs(const TwoSinesReport& report,
                             const std::filesystem::path& out_dir);
void write_odd_demo_outputs(const OddDemoReport& report,
                            const std::filesystem::path& out_dir);
void write_cross_entropy_outputs(const CrossEntropyDemoReport& report,
                                 const std::filesystem::path& out_dir);

/// TrainRun as (epoch, residual) CSV plus a JSON summary carrying the
/// config hash, epochs_to_stop and verdict.
void write_train_run(const nets::TrainRun& run, const std::string& config_digest,
                     const std::filesystem::path& out_dir, const std::string& name);

}  // namespace specbias::experiments

#endif  // SPECBIAS_REPORT_HPP
