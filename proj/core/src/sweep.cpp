#include "specbias/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "specbias/errors.hpp"
#include "specbias/harmonics.hpp"
#include "specbias/rng.hpp"
#include "specbias/spectra.hpp"

namespace specbias::experiments {

namespace {

constexpr std::uint64_t kDataTag = 0x64617461;  // "data"
constexpr std::uint64_t kPoleTag = 0x706f6c65;  // "pole"

kernels::KernelVariant variant_from_string(const std::string& s) {
  if (s == "bias_free") return kernels::KernelVariant::BiasFree;
  if (s == "with_bias") return kernels::KernelVariant::WithBias;
  throw config_error("variant must be bias_free or with_bias, got: " + s);
}

nets::LossKind loss_from_string(const std::string& s) {
  if (s == "squared_error") return nets::LossKind::SquaredError;
  if (s == "cross_entropy") return nets::LossKind::CrossEntropy;
  throw config_error("loss must be squared_error or cross_entropy, got: " + s);
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return std::nan("");
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

void SweepSpec::validate() const {
  if (d < 1) throw config_error("sweep: d must be >= 1");
  if (freqs.empty()) throw config_error("sweep: frequency list is empty");
  for (std::size_t i = 1; i < freqs.size(); ++i)
    if (freqs[i] <= freqs[i - 1])
      throw config_error("sweep: frequencies must be strictly increasing");
  if (freqs.front() < 0) throw config_error("sweep: frequencies must be >= 0");
  if (seeds < 1) throw config_error("sweep: seeds must be >= 1");
  if (n < 2 || m < 1) throw config_error("sweep: bad n or m");
  if (!(eta > 0) || !(stop_fraction > 0 && stop_fraction < 1))
    throw config_error("sweep: bad eta or stop_fraction");
  if (max_epochs < 1) throw config_error("sweep: max_epochs must be >= 1");
  if (ambient_dim && *ambient_dim < d + 1)
    throw config_error("sweep: ambient_dim must be >= d+1");
  if (model == Model::Deep && deep.hidden_layers < 1)
    throw config_error("sweep: deep model needs hidden_layers >= 1");
}

SweepSpec sweep_spec_from_config(const ConfigMap& config) {
  SweepSpec spec;
  spec.d = static_cast<int>(config.get_int("d", 1));
  const std::string model = config.get_string("model", "shallow");
  if (model == "shallow") {
    spec.model = SweepSpec::Model::Shallow;
    spec.variant = variant_from_string(config.get_string("variant", "with_bias"));
  } else if (model == "deep") {
    spec.model = SweepSpec::Model::Deep;
    spec.deep.hidden_layers = static_cast<int>(config.get_int("hidden_layers", 5));
    spec.deep.skip_connections = config.get_bool("skip_connections", false);
    spec.deep.bias = config.get_bool("deep_bias", true);
    const std::string init = config.get_string("init", "he");
    if (init == "he") {
      spec.deep.init = nets::DeepNetSpec::Init::HeStyle;
    } else if (init == "gaussian") {
      spec.deep.init = nets::DeepNetSpec::Init::Gaussian;
      spec.deep.kappa = config.get_double("kappa", 1.0);
    } else {
      throw config_error("init must be he or gaussian, got: " + init);
    }
  } else {
    throw config_error("model must be shallow or deep, got: " + model);
  }
  for (long k : config.get_int_list("freqs")) spec.freqs.push_back(static_cast<int>(k));
  spec.n = static_cast<int>(config.get_int("n"));
  spec.m = static_cast<int>(config.get_int("m"));
  spec.kappa = config.get_double("kappa", 1.0);
  spec.eta = config.get_double("eta");
  spec.stop_fraction = config.get_double("stop_fraction", 0.05);
  spec.max_epochs = config.get_int("max_epochs");
  spec.seeds = static_cast<int>(config.get_int("seeds", 1));
  if (config.has("ambient_dim"))
    spec.ambient_dim = static_cast<int>(config.get_int("ambient_dim"));
  spec.loss = loss_from_string(config.get_string("loss", "squared_error"));
  spec.base_seed = static_cast<std::uint64_t>(config.get_int("seed", 1));
  spec.workers = static_cast<int>(config.get_int("workers", 0));
  spec.deep.width = spec.m;
  spec.validate();
  return spec;
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> pairs) {
  std::vector<std::pair<double, double>> usable;
  for (const auto& [k, epochs] : pairs)
    if (k >= 2.0 && epochs > 0) usable.emplace_back(std::log(k), std::log(epochs));
  if (usable.size() < 3)
    throw numerical_error("fit_power_law: need >= 3 converged pairs with k >= 2");
  const double n = static_cast<double>(usable.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : usable) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  PowerLawFit fit;
  const double denom = n * sxx - sx * sx;
  fit.exponent = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.exponent * sx) / n;
  fit.scale = std::exp(intercept);
  double ss_res = 0;
  for (const auto& [x, y] : usable) {
    const double r = y - (intercept + fit.exponent * x);
    ss_res += r * r;
  }
  if (usable.size() > 2) {
    const double var = ss_res / (n - 2.0) / (sxx - sx * sx / n);
    fit.stderr_exponent = std::sqrt(std::max(var, 0.0));
  }
  return fit;
}

double predicted_mode_eigenvalue(kernels::KernelVariant variant, int d, int n, int k) {
  if (d == 1) {
    const auto grid = harmonics::uniform_circle_grid(n);
    const auto gram = kernels::gram_matrix(grid, variant);
    return spectra::circulant_eigenvalue(gram, k);
  }
  const double coeff = d % 2 == 0 ? spectra::sphere_coefficient(variant, k, d)
                                  : spectra::eigen_quadrature(variant, k, d);
  return static_cast<double>(n) * coeff / spectra::sphere_surface(d);
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  result.data_seed = derive_seed(spec.base_seed, kDataTag);
  result.pole_seed = derive_seed(spec.base_seed, kPoleTag);

  // Shared dataset: the circle uses the deterministic uniform grid, higher
  // dimensions a seeded uniform sample and a seeded zonal pole.
  std::vector<harmonics::UnitPoint> points =
      spec.d == 1 ? harmonics::uniform_circle_grid(spec.n)
                  : harmonics::sample_uniform_sphere(spec.n, spec.d, result.data_seed);
  harmonics::HarmonicLabelSpec label_spec;
  label_spec.sphere_dim = spec.d;
  if (spec.d >= 2)
    label_spec.pole = harmonics::sample_uniform_sphere(1, spec.d, result.pole_seed)[0];

  std::vector<Eigen::VectorXd> labels;
  labels.reserve(spec.freqs.size());
  for (int k : spec.freqs) {
    label_spec.frequency = k;
    labels.push_back(harmonics::harmonic_labels(points, label_spec));
  }

  if (spec.ambient_dim)
    points = harmonics::embed_random_rotation(points, *spec.ambient_dim,
                                              derive_seed(spec.base_seed, 0x616d62));
  const Eigen::MatrixXd x = harmonics::coords_matrix(points);

  const int cells_total = static_cast<int>(spec.freqs.size()) * spec.seeds;
  result.cells.assign(static_cast<std::size_t>(cells_total), SweepCell{});

  nets::TrainConfig train_config;
  train_config.eta = spec.eta;
  train_config.max_epochs = spec.max_epochs;
  train_config.stop_fraction = spec.stop_fraction;
  train_config.loss = spec.loss;

  const auto run_cell = [&](int cell_index) {
    const int freq_index = cell_index / spec.seeds;
    const int seed_index = cell_index % spec.seeds;
    const int k = spec.freqs[static_cast<std::size_t>(freq_index)];
    const std::uint64_t net_seed =
        derive_seed(spec.base_seed, static_cast<std::uint64_t>(k),
                    static_cast<std::uint64_t>(seed_index) + 1);
    nets::TrainRun run;
    if (spec.model == SweepSpec::Model::Shallow) {
      nets::TwoLayerNet net = nets::init_two_layer(
          spec.m, static_cast<int>(x.cols()), spec.kappa,
          spec.variant == kernels::KernelVariant::WithBias, net_seed);
      run = nets::train_full_batch(net, x, labels[static_cast<std::size_t>(freq_index)],
                                   train_config);
    } else {
      nets::DeepNet net = nets::init_deep(spec.deep, static_cast<int>(x.cols()), net_seed);
      run = nets::train_deep(net, x, labels[static_cast<std::size_t>(freq_index)],
                             train_config);
    }
    SweepCell& cell = result.cells[static_cast<std::size_t>(cell_index)];
    cell.k = k;
    cell.seed_index = seed_index;
    cell.verdict = run.verdict;
    cell.epochs = run.verdict == nets::TrainVerdict::Converged ? run.epochs_to_stop : -1;
    cell.final_fraction = run.residual_trace.empty() || run.residual_trace[0] <= 0
                              ? 0.0
                              : run.residual_trace.back() / run.residual_trace[0];
  };

  int workers = spec.workers > 0 ? spec.workers
                                 : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, cells_total));
  if (workers == 1) {
    for (int i = 0; i < cells_total; ++i) run_cell(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < cells_total; i = next.fetch_add(1))
          run_cell(i);
      });
    for (auto& t : pool) t.join();
  }

  // Aggregate per frequency; non-converged cells are flagged and kept out
  // of medians and fits.
  std::vector<std::pair<double, double>> fit_pairs;
  for (std::size_t fi = 0; fi < spec.freqs.size(); ++fi) {
    FrequencySummary summary;
    summary.k = spec.freqs[fi];
    summary.total_cells = spec.seeds;
    std::vector<double> epochs;
    for (int s = 0; s < spec.seeds; ++s) {
      const SweepCell& cell = result.cells[fi * static_cast<std::size_t>(spec.seeds) +
                                           static_cast<std::size_t>(s)];
      if (cell.verdict == nets::TrainVerdict::Converged)
        epochs.push_back(static_cast<double>(cell.epochs));
    }
    summary.converged_cells = static_cast<int>(epochs.size());
    summary.median_epochs = median_of(std::move(epochs));
    if (spec.model == SweepSpec::Model::Shallow) {
      const double lambda =
          predicted_mode_eigenvalue(spec.variant, spec.d, spec.n, summary.k);
      summary.predicted_iterations = dynamics::iterations_to_fraction(
          lambda, spec.eta, {spec.stop_fraction, 0.0});
    }
    if (summary.converged_cells == spec.seeds && summary.k >= 2)
      fit_pairs.emplace_back(static_cast<double>(summary.k), summary.median_epochs);
    result.per_frequency.push_back(summary);
  }

  try {
    result.fit = fit_power_law(fit_pairs);
    result.fit_valid = true;
  } catch (const numerical_error&) {
    result.fit_valid = false;
  }

  // Overlay constant: least squares in log space between measured medians
  // and predicted iterations, never per-point.
  if (spec.model == SweepSpec::Model::Shallow) {
    double acc = 0.0;
    int count = 0;
    for (const auto& summary : result.per_frequency) {
      if (summary.k < 2 || summary.converged_cells < spec.seeds) continue;
      if (summary.predicted_iterations <= 0) continue;
      acc += std::log(summary.median_epochs) -
             std::log(static_cast<double>(summary.predicted_iterations));
      ++count;
    }
    result.prediction_scale = count > 0 ? std::exp(acc / count) : 0.0;
    for (auto& summary : result.per_frequency)
      if (summary.predicted_iterations > 0)
        summary.scaled_prediction =
            result.prediction_scale * static_cast<double>(summary.predicted_iterations);
  }
  return result;
}

}  // namespace specbias::experiments
