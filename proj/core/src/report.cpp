#include "specbias/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "specbias/dynamics.hpp"
#include "specbias/errors.hpp"
#include "specbias/harmonics.hpp"
#include "specbias/rng.hpp"

namespace specbias::experiments {

using nlohmann::json;

void write_text_file(const std::filesystem::path& file, const std::string& content) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("short write to " + file.string());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string format_compact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string iterations_to_string(std::int64_t iters) {
  return iters == dynamics::kNeverConverges ? "inf" : std::to_string(iters);
}

}  // namespace

std::string render_svg_chart(const SvgChart& chart) {
  const double margin_l = 72, margin_r = 24, margin_t = 40, margin_b = 56;
  const double plot_w = chart.width - margin_l - margin_r;
  const double plot_h = chart.height - margin_t - margin_b;

  const auto tx = [&](double v) { return chart.log_x ? std::log10(v) : v; };
  const auto ty = [&](double v) { return chart.log_y ? std::log10(v) : v; };

  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const auto& s : chart.series)
    for (const auto& [px, py] : s.points) {
      if (chart.log_x && px <= 0) continue;
      if (chart.log_y && py <= 0) continue;
      x_min = std::min(x_min, tx(px));
      x_max = std::max(x_max, tx(px));
      y_min = std::min(y_min, ty(py));
      y_max = std::max(y_max, ty(py));
    }
  if (x_min > x_max) {
    x_min = 0;
    x_max = 1;
  }
  if (y_min > y_max) {
    y_min = 0;
    y_max = 1;
  }
  if (x_max - x_min < 1e-12) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (y_max - y_min < 1e-12) {
    y_min -= 0.5;
    y_max += 0.5;
  }

  const auto px_of = [&](double v) {
    return margin_l + (tx(v) - x_min) / (x_max - x_min) * plot_w;
  };
  const auto py_of = [&](double v) {
    return margin_t + plot_h - (ty(v) - y_min) / (y_max - y_min) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width
      << "\" height=\"" << chart.height << "\" viewBox=\"0 0 " << chart.width << ' '
      << chart.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << chart.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << chart.title << "</text>\n";

  // Axes with 5 ticks per side.
  svg << "<g stroke=\"#444\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"10\">\n";
  svg << "<line x1=\"" << margin_l << "\" y1=\"" << margin_t + plot_h << "\" x2=\""
      << margin_l + plot_w << "\" y2=\"" << margin_t + plot_h << "\"/>\n";
  svg << "<line x1=\"" << margin_l << "\" y1=\"" << margin_t << "\" x2=\"" << margin_l
      << "\" y2=\"" << margin_t + plot_h << "\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = x_min + (x_max - x_min) * t / 4.0;
    const double fy = y_min + (y_max - y_min) * t / 4.0;
    const double sx = margin_l + plot_w * t / 4.0;
    const double sy = margin_t + plot_h - plot_h * t / 4.0;
    const double label_x = chart.log_x ? std::pow(10.0, fx) : fx;
    const double label_y = chart.log_y ? std::pow(10.0, fy) : fy;
    svg << "<line x1=\"" << sx << "\" y1=\"" << margin_t + plot_h << "\" x2=\"" << sx
        << "\" y2=\"" << margin_t + plot_h + 4 << "\"/>\n";
    svg << "<text x=\"" << sx << "\" y=\"" << margin_t + plot_h + 16
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">"
        << format_compact(label_x) << "</text>\n";
    svg << "<line x1=\"" << margin_l - 4 << "\" y1=\"" << sy << "\" x2=\"" << margin_l
        << "\" y2=\"" << sy << "\"/>\n";
    svg << "<text x=\"" << margin_l - 8 << "\" y=\"" << sy + 3
        << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#222\">"
        << format_compact(label_y) << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << margin_l + plot_w / 2 << "\" y=\"" << chart.height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << chart.x_label << "</text>\n";
  svg << "<text x=\"16\" y=\"" << margin_t + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << margin_t + plot_h / 2 << ")\">"
      << chart.y_label << "</text>\n";

  int legend_row = 0;
  for (const auto& s : chart.series) {
    if (s.line && s.points.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [px, py] : s.points) {
        if ((chart.log_x && px <= 0) || (chart.log_y && py <= 0)) continue;
        svg << format_compact(px_of(px)) << ',' << format_compact(py_of(py)) << ' ';
      }
      svg << "\"/>\n";
    }
    if (s.markers) {
      for (const auto& [px, py] : s.points) {
        if ((chart.log_x && px <= 0) || (chart.log_y && py <= 0)) continue;
        svg << "<circle cx=\"" << format_compact(px_of(px)) << "\" cy=\""
            << format_compact(py_of(py)) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
      }
    }
    if (!s.label.empty()) {
      const double ly = margin_t + 14 + 14 * legend_row++;
      svg << "<rect x=\"" << margin_l + plot_w - 150 << "\" y=\"" << ly - 8
          << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>\n";
      svg << "<text x=\"" << margin_l + plot_w - 136 << "\" y=\"" << ly
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_svg_panels(const std::string& title,
                              const std::vector<std::pair<std::string, Eigen::VectorXd>>& panels,
                              int per_row) {
  const int panel_w = 200, panel_h = 140, pad = 12;
  const int rows = (static_cast<int>(panels.size()) + per_row - 1) / per_row;
  const int width = per_row * (panel_w + pad) + pad;
  const int height = rows * (panel_h + pad) + pad + 28;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const int row = static_cast<int>(p) / per_row;
    const int col = static_cast<int>(p) % per_row;
    const double x0 = pad + col * (panel_w + pad);
    const double y0 = 28 + pad + row * (panel_h + pad);
    const Eigen::VectorXd& v = panels[p].second;
    const double vmax = std::max(v.cwiseAbs().maxCoeff(), 1e-12);
    svg << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << panel_w
        << "\" height=\"" << panel_h << "\" fill=\"none\" stroke=\"#999\"/>\n";
    svg << "<text x=\"" << x0 + panel_w / 2.0 << "\" y=\"" << y0 + 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << panels[p].first << "</text>\n";
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\"";
    const Eigen::Index n = v.size();
    const Eigen::Index stride = std::max<Eigen::Index>(1, n / 400);
    for (Eigen::Index i = 0; i < n; i += stride) {
      const double px = x0 + 4 + (panel_w - 8) * static_cast<double>(i) / std::max<Eigen::Index>(n - 1, 1);
      const double py = y0 + panel_h / 2.0 - (panel_h / 2.0 - 20) * v[i] / vmax;
      svg << format_compact(px) << ',' << format_compact(py) << ' ';
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<spectra::SpectrumEntry> spectrum_table_with_matrix(
    const std::vector<int>& dims, int k_max,
    const std::vector<kernels::KernelVariant>& variants, int grid_n) {
  std::vector<spectra::SpectrumEntry> table =
      spectra::coefficient_table(dims, k_max, variants);
  if (std::find(dims.begin(), dims.end(), 1) != dims.end()) {
    const auto grid = harmonics::uniform_circle_grid(grid_n);
    for (kernels::KernelVariant v : variants) {
      const kernels::GramMatrix gram = kernels::gram_matrix(grid, v);
      for (int k = 0; k <= k_max; ++k) {
        const double zk = k == 0 ? 2.0 * M_PI : M_PI;
        const double lambda = spectra::circulant_eigenvalue(gram, k);
        table.push_back({k, 1, v, spectra::SpectrumSource::Matrix,
                         2.0 * M_PI / grid_n * lambda / zk});
      }
    }
  }
  return table;
}

std::size_t emit_spectrum_report(const SpectrumReportOptions& options) {
  const auto table = spectrum_table_with_matrix(options.dims, options.k_max,
                                                options.variants, options.grid_n);
  std::ostringstream csv;
  csv << "variant,d,k,source,value\n";
  for (const auto& entry : table)
    csv << kernels::variant_name(entry.variant) << ',' << entry.d << ',' << entry.k << ','
        << spectra::source_name(entry.source) << ',' << format_double(entry.value)
        << '\n';
  write_text_file(options.out_dir / "spectrum.csv", csv.str());

  json j;
  j["rows"] = json::array();
  for (const auto& entry : table)
    j["rows"].push_back({{"variant", kernels::variant_name(entry.variant)},
                         {"d", entry.d},
                         {"k", entry.k},
                         {"source", spectra::source_name(entry.source)},
                         {"value", entry.value}});
  write_text_file(options.out_dir / "spectrum.json", j.dump(2) + "\n");

  // Eigenvector panels of the circle-grid Gram, one file per variant.
  const auto grid = harmonics::uniform_circle_grid(options.grid_n);
  for (kernels::KernelVariant v : options.variants) {
    const auto eig = spectra::matrix_spectrum(kernels::gram_matrix(grid, v));
    std::vector<std::pair<std::string, Eigen::VectorXd>> panels;
    const bool bias = v == kernels::KernelVariant::WithBias;
    const int top = bias ? 9 : 6;
    for (int i = 0; i < top; ++i)
      panels.emplace_back("eigenvector " + std::to_string(i + 1) +
                              " (lambda=" + format_compact(eig.values[i]) + ")",
                          eig.vectors.col(i));
    if (!bias) {
      const Eigen::Index n = eig.values.size();
      for (int i = 2; i >= 0; --i)
        panels.emplace_back("eigenvector " + std::to_string(n - i) +
                                " (lambda=" + format_compact(eig.values[n - 1 - i]) + ")",
                            eig.vectors.col(n - 1 - i));
    }
    const std::string name = std::string("eigenvectors_") + kernels::variant_name(v) + ".svg";
    write_text_file(options.out_dir / name,
                    render_svg_panels(std::string("grid Gram eigenvectors, ") +
                                          kernels::variant_name(v),
                                      panels));
  }
  return table.size();
}

ForecastOptions forecast_options(const ConfigMap& config) {
  ForecastOptions o;
  o.d = static_cast<int>(config.get_int("d", o.d));
  const std::string variant = config.get_string("variant", "with_bias");
  if (variant == "bias_free") {
    o.variant = kernels::KernelVariant::BiasFree;
  } else if (variant == "with_bias") {
    o.variant = kernels::KernelVariant::WithBias;
  } else {
    throw config_error("forecast: variant must be bias_free or with_bias");
  }
  o.n = static_cast<int>(config.get_int("n", o.n));
  o.eta = config.get_double("eta", o.eta);
  o.label_freq = static_cast<int>(config.get_int("label_freq", o.label_freq));
  o.phase = config.get_double("phase", o.phase);
  o.t_max = config.get_int("t_max", o.t_max);
  o.stop_fraction = config.get_double("stop_fraction", o.stop_fraction);
  o.slack = config.get_double("slack", o.slack);
  o.k_max = static_cast<int>(config.get_int("k_max", o.k_max));
  o.seed = static_cast<std::uint64_t>(config.get_int("seed", 1));
  return o;
}

void emit_forecast_report(const ForecastOptions& options) {
  std::vector<harmonics::UnitPoint> points =
      options.d == 1
          ? harmonics::uniform_circle_grid(options.n)
          : harmonics::sample_uniform_sphere(options.n, options.d,
                                             derive_seed(options.seed, 0x64617461));
  harmonics::HarmonicLabelSpec label_spec;
  label_spec.frequency = options.label_freq;
  label_spec.sphere_dim = options.d;
  label_spec.phase = options.phase;
  if (options.d >= 2)
    label_spec.pole = harmonics::sample_uniform_sphere(
        1, options.d, derive_seed(options.seed, 0x706f6c65))[0];
  const Eigen::VectorXd y = harmonics::harmonic_labels(points, label_spec);
  const kernels::GramMatrix gram = kernels::gram_matrix(points, options.variant);
  const dynamics::LinearForecast forecast =
      dynamics::build_forecast(gram, y, options.eta);

  std::ostringstream curve;
  curve << "t,predicted_residual\n";
  for (long t = 0; t <= options.t_max; ++t)
    curve << t << ',' << format_double(dynamics::residual_at(forecast, t)) << '\n';
  write_text_file(options.out_dir / "forecast_curve.csv", curve.str());

  std::ostringstream thresholds;
  thresholds << "k,lambda,predicted_iterations\n";
  for (int k = 0; k <= options.k_max; ++k) {
    const double lambda =
        predicted_mode_eigenvalue(options.variant, options.d, options.n, k);
    std::int64_t iters;
    if (lambda <= 1e-12) {
      iters = dynamics::kNeverConverges;
    } else {
      iters = dynamics::iterations_to_fraction(lambda, options.eta,
                                               {options.stop_fraction, options.slack});
    }
    thresholds << k << ',' << format_double(lambda) << ','
               << iterations_to_string(iters) << '\n';
  }
  write_text_file(options.out_dir / "thresholds.csv", thresholds.str());

  json j;
  j["d"] = options.d;
  j["variant"] = kernels::variant_name(options.variant);
  j["n"] = options.n;
  j["eta"] = options.eta;
  j["label_freq"] = options.label_freq;
  j["t_max"] = options.t_max;
  j["initial_residual"] = forecast.initial_residual_norm;
  j["final_predicted_residual"] = dynamics::residual_at(forecast, options.t_max);
  write_text_file(options.out_dir / "forecast.json", j.dump(2) + "\n");

  SvgChart chart;
  chart.title = "forecast residual";
  chart.x_label = "epoch";
  chart.y_label = "residual";
  chart.log_y = true;
  SvgSeries series;
  series.label = "prediction";
  const long stride = std::max(1L, options.t_max / 400);
  for (long t = 0; t <= options.t_max; t += stride)
    series.points.emplace_back(static_cast<double>(t),
                               dynamics::residual_at(forecast, t));
  chart.series.push_back(std::move(series));
  write_text_file(options.out_dir / "forecast.svg", render_svg_chart(chart));
}

void write_sweep_outputs(const SweepSpec& spec, const SweepResult& result,
                         const std::filesystem::path& out_dir,
                         const std::string& config_digest) {
  std::ostringstream cells;
  cells << "k,seed_index,epochs,verdict,final_fraction\n";
  for (const auto& cell : result.cells)
    cells << cell.k << ',' << cell.seed_index << ',' << cell.epochs << ','
          << nets::verdict_name(cell.verdict) << ','
          << format_double(cell.final_fraction) << '\n';
  write_text_file(out_dir / "sweep_cells.csv", cells.str());

  std::ostringstream summary;
  summary << "k,median_epochs,converged_cells,total_cells,predicted_iterations,"
             "scaled_prediction\n";
  for (const auto& f : result.per_frequency)
    summary << f.k << ',' << format_double(f.median_epochs) << ',' << f.converged_cells
            << ',' << f.total_cells << ',' << iterations_to_string(f.predicted_iterations)
            << ',' << format_double(f.scaled_prediction) << '\n';
  write_text_file(out_dir / "sweep_summary.csv", summary.str());

  json j;
  j["config_hash"] = config_digest;
  j["model"] = spec.model == SweepSpec::Model::Shallow ? "shallow" : "deep";
  j["d"] = spec.d;
  if (spec.model == SweepSpec::Model::Shallow)
    j["variant"] = kernels::variant_name(spec.variant);
  j["n"] = spec.n;
  j["m"] = spec.m;
  j["eta"] = spec.eta;
  j["kappa"] = spec.kappa;
  j["seeds"] = spec.seeds;
  j["fit_valid"] = result.fit_valid;
  if (result.fit_valid) {
    j["exponent"] = result.fit.exponent;
    j["exponent_stderr"] = result.fit.stderr_exponent;
    j["prediction_scale"] = result.prediction_scale;
  }
  j["cells"] = json::array();
  for (const auto& cell : result.cells)
    j["cells"].push_back({{"k", cell.k},
                          {"seed_index", cell.seed_index},
                          {"epochs", cell.epochs},
                          {"verdict", nets::verdict_name(cell.verdict)},
                          {"final_fraction", cell.final_fraction}});
  write_text_file(out_dir / "sweep_summary.json", j.dump(2) + "\n");

  SvgChart chart;
  chart.title = "epochs to threshold vs frequency";
  chart.x_label = "frequency k";
  chart.y_label = "epochs";
  chart.log_x = true;
  chart.log_y = true;
  SvgSeries measured;
  measured.label = "measured (median)";
  measured.line = false;
  measured.markers = true;
  SvgSeries predicted;
  predicted.label = "scaled prediction";
  predicted.color = "#ff7f0e";
  for (const auto& f : result.per_frequency) {
    if (f.converged_cells > 0 && f.k >= 1)
      measured.points.emplace_back(f.k, f.median_epochs);
    if (f.scaled_prediction > 0 && f.k >= 1)
      predicted.points.emplace_back(f.k, f.scaled_prediction);
  }
  chart.series.push_back(std::move(measured));
  chart.series.push_back(std::move(predicted));
  write_text_file(out_dir / "sweep.svg", render_svg_chart(chart));
}

void write_two_sines_outputs(const TwoSinesReport& report,
                             const std::filesystem::path& out_dir) {
  std::ostringstream csv;
  csv << "epoch,low_energy,high_energy,dc_fraction,residual\n";
  for (const auto& row : report.trace)
    csv << row.epoch << ',' << format_double(row.low_energy) << ','
        << format_double(row.high_energy) << ',' << format_double(row.dc_fraction)
        << ',' << format_double(row.residual) << '\n';
  write_text_file(out_dir / "two_sines_modes.csv", csv.str());

  json j;
  j["low_freq"] = report.config.low_freq;
  j["high_freq"] = report.config.high_freq;
  j["low_epoch"] = report.low_epoch;
  j["high_epoch"] = report.high_epoch;
  j["initial_low_energy"] = report.initial_low_energy;
  j["initial_high_energy"] = report.initial_high_energy;
  j["max_dc_fraction"] = report.max_dc_fraction;
  write_text_file(out_dir / "two_sines.json", j.dump(2) + "\n");

  SvgChart chart;
  chart.title = "target vs prediction";
  chart.x_label = "theta";
  chart.y_label = "value";
  SvgSeries target;
  target.label = "target";
  target.color = "#999999";
  for (int i = 0; i < report.target.size(); ++i)
    target.points.emplace_back(2.0 * M_PI * i / report.target.size(), report.target[i]);
  chart.series.push_back(std::move(target));
  const char* colors[] = {"#1f77b4", "#2ca02c", "#d62728"};
  for (std::size_t s = 0; s < report.snapshots.size() && s < 3; ++s) {
    SvgSeries snap;
    snap.label = "epoch " + std::to_string(report.snapshot_epochs[s]);
    snap.color = colors[s];
    for (int i = 0; i < report.snapshots[s].size(); ++i)
      snap.points.emplace_back(2.0 * M_PI * i / report.snapshots[s].size(),
                               report.snapshots[s][i]);
    chart.series.push_back(std::move(snap));
  }
  write_text_file(out_dir / "two_sines.svg", render_svg_chart(chart));
}

void write_odd_demo_outputs(const OddDemoReport& report,
                            const std::filesystem::path& out_dir) {
  std::ostringstream csv;
  csv << "freq,verdict,epochs,train_residual_fraction,dense_relative_error,"
         "odd_energy_fraction\n";
  for (const auto& c : report.cases)
    csv << c.freq << ',' << nets::verdict_name(c.verdict) << ',' << c.epochs << ','
        << format_double(c.train_residual_fraction) << ','
        << format_double(c.dense_relative_error) << ','
        << format_double(c.odd_energy_fraction) << '\n';
  write_text_file(out_dir / "odd_demo.csv", csv.str());

  json j = json::array();
  for (const auto& c : report.cases)
    j.push_back({{"freq", c.freq},
                 {"verdict", nets::verdict_name(c.verdict)},
                 {"epochs", c.epochs},
                 {"train_residual_fraction", c.train_residual_fraction},
                 {"dense_relative_error", c.dense_relative_error},
                 {"odd_energy_fraction", c.odd_energy_fraction}});
  write_text_file(out_dir / "odd_demo.json", j.dump(2) + "\n");

  for (const auto& c : report.cases) {
    SvgChart chart;
    chart.title = "learned curve, target cos(" + std::to_string(c.freq) + " theta)";
    chart.x_label = "theta";
    chart.y_label = "value";
    SvgSeries target;
    target.label = "target";
    target.color = "#999999";
    SvgSeries learned;
    learned.label = "network";
    const Eigen::Index n = c.learned_dense.size();
    const Eigen::Index stride = std::max<Eigen::Index>(1, n / 1000);
    for (Eigen::Index i = 0; i < n; i += stride) {
      const double th = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
      target.points.emplace_back(th, std::cos(c.freq * th));
      learned.points.emplace_back(th, c.learned_dense[i]);
    }
    chart.series.push_back(std::move(target));
    chart.series.push_back(std::move(learned));
    write_text_file(out_dir / ("odd_fit_k" + std::to_string(c.freq) + ".svg"),
                    render_svg_chart(chart));
  }
}

void write_cross_entropy_outputs(const CrossEntropyDemoReport& report,
                                 const std::filesystem::path& out_dir) {
  std::ostringstream csv;
  csv << "k,seed_index,epochs,verdict,final_fraction\n";
  for (const auto& cell : report.cells)
    csv << cell.k << ',' << cell.seed_index << ',' << cell.epochs << ','
        << nets::verdict_name(cell.verdict) << ',' << format_double(cell.final_fraction)
        << '\n';
  write_text_file(out_dir / "cross_entropy_cells.csv", csv.str());

  json j;
  j["fit_valid"] = report.fit_valid;
  if (report.fit_valid) {
    j["exponent"] = report.fit.exponent;
    j["exponent_stderr"] = report.fit.stderr_exponent;
  }
  j["kept_fraction"] = report.kept_fraction;
  write_text_file(out_dir / "cross_entropy.json", j.dump(2) + "\n");

  SvgChart chart;
  chart.title = "cross-entropy epochs vs frequency";
  chart.x_label = "frequency k";
  chart.y_label = "epochs";
  chart.log_x = true;
  chart.log_y = true;
  SvgSeries measured;
  measured.line = false;
  measured.markers = true;
  for (const auto& cell : report.cells)
    if (cell.verdict == nets::TrainVerdict::Converged)
      measured.points.emplace_back(cell.k, static_cast<double>(cell.epochs));
  chart.series.push_back(std::move(measured));
  write_text_file(out_dir / "cross_entropy.svg", render_svg_chart(chart));
}

void write_train_run(const nets::TrainRun& run, const std::string& config_digest,
                     const std::filesystem::path& out_dir, const std::string& name) {
  std::ostringstream csv;
  csv << "epoch,residual\n";
  for (std::size_t t = 0; t < run.residual_trace.size(); ++t)
    csv << t << ',' << format_double(run.residual_trace[t]) << '\n';
  write_text_file(out_dir / (name + "_trace.csv"), csv.str());

  json j;
  j["config_hash"] = config_digest;
  j["epochs_to_stop"] = run.epochs_to_stop;
  j["verdict"] = nets::verdict_name(run.verdict);
  write_text_file(out_dir / (name + "_summary.json"), j.dump(2) + "\n");
}

}  // namespace specbias::experiments
