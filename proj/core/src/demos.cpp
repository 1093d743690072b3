#include "specbias/demos.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "specbias/errors.hpp"
#include "specbias/harmonics.hpp"
#include "specbias/rng.hpp"

namespace specbias::experiments {

namespace {

// Unit-norm cos/sin sample vectors for frequency k on an n-grid.
struct ModeBasis {
  Eigen::VectorXd c;
  Eigen::VectorXd s;
};

ModeBasis mode_basis(int n, int k) {
  ModeBasis basis;
  basis.c.resize(n);
  basis.s.resize(n);
  for (int j = 0; j < n; ++j) {
    const double th = 2.0 * M_PI * j / n;
    basis.c[j] = std::cos(k * th);
    basis.s[j] = std::sin(k * th);
  }
  const double cn = basis.c.norm();
  const double sn = basis.s.norm();
  if (cn > 0) basis.c /= cn;
  if (sn > 0) basis.s /= sn;
  return basis;
}

double mode_energy(const Eigen::VectorXd& r, const ModeBasis& basis) {
  const double pc = r.dot(basis.c);
  const double ps = r.dot(basis.s);
  return pc * pc + ps * ps;
}

}  // namespace

TwoSinesConfig two_sines_config(const ConfigMap& config) {
  TwoSinesConfig c;
  c.n = static_cast<int>(config.get_int("n", c.n));
  c.m = static_cast<int>(config.get_int("m", c.m));
  c.kappa = config.get_double("kappa", c.kappa);
  c.eta = config.get_double("eta", c.eta);
  c.max_epochs = config.get_int("max_epochs", c.max_epochs);
  c.low_freq = static_cast<int>(config.get_int("low_freq", c.low_freq));
  c.high_freq = static_cast<int>(config.get_int("high_freq", c.high_freq));
  c.mode_stop_fraction = config.get_double("mode_stop_fraction", c.mode_stop_fraction);
  c.paired_init = config.get_bool("paired_init", c.paired_init);
  c.seed = static_cast<std::uint64_t>(config.get_int("seed", 1));
  c.trace_stride = static_cast<int>(config.get_int("trace_stride", c.trace_stride));
  if (c.low_freq >= c.high_freq)
    throw config_error("two-sines: low_freq must be below high_freq");
  return c;
}

TwoSinesReport demo_two_sines(const TwoSinesConfig& config) {
  TwoSinesReport report;
  report.config = config;

  const auto points = harmonics::uniform_circle_grid(config.n);
  const Eigen::MatrixXd x = harmonics::coords_matrix(points);
  Eigen::VectorXd y(config.n);
  for (int j = 0; j < config.n; ++j) {
    const double th = 2.0 * M_PI * j / config.n;
    y[j] = std::sin(config.low_freq * th) + std::sin(config.high_freq * th);
  }
  report.target = y;

  const ModeBasis low = mode_basis(config.n, config.low_freq);
  const ModeBasis high = mode_basis(config.n, config.high_freq);
  Eigen::VectorXd dc = Eigen::VectorXd::Constant(config.n, 1.0 / std::sqrt(config.n));

  nets::TwoLayerNet net =
      config.paired_init
          ? nets::init_two_layer_paired(config.m, 2, config.kappa, /*with_bias=*/true,
                                        config.seed)
          : nets::init_two_layer(config.m, 2, config.kappa, /*with_bias=*/true,
                                 config.seed);

  double low0 = 0.0, high0 = 0.0;
  bool want_low_snapshot = true;
  const auto observer = [&](long epoch, const Eigen::VectorXd& u) {
    const Eigen::VectorXd r = y - u;
    const double le = mode_energy(r, low);
    const double he = mode_energy(r, high);
    const double pdc = r.dot(dc);
    const double dc_fraction = r.squaredNorm() > 0 ? pdc * pdc / r.squaredNorm() : 0.0;
    if (epoch == 0) {
      low0 = le;
      high0 = he;
      report.initial_low_energy = le;
      report.initial_high_energy = he;
      report.snapshots.push_back(u);
      report.snapshot_epochs.push_back(0);
    }
    if (report.low_epoch < 0 && le <= config.mode_stop_fraction * low0) {
      report.low_epoch = epoch;
      if (want_low_snapshot) {
        report.snapshots.push_back(u);
        report.snapshot_epochs.push_back(epoch);
        want_low_snapshot = false;
      }
    }
    if (report.high_epoch < 0 && he <= config.mode_stop_fraction * high0)
      report.high_epoch = epoch;
    report.max_dc_fraction = std::max(report.max_dc_fraction, dc_fraction);
    if (epoch % config.trace_stride == 0)
      report.trace.push_back({epoch, le, he, dc_fraction, r.norm()});
  };

  nets::TrainConfig train_config;
  train_config.eta = config.eta;
  train_config.max_epochs = config.max_epochs;
  // The run is mode-driven; the global 5% rule is not the stopping
  // criterion here, so let the epoch budget be the only stop.
  train_config.stop_fraction = 1e-12;
  nets::train_full_batch(net, x, y, train_config, observer);

  report.snapshots.push_back(nets::forward_batch(net, x));
  report.snapshot_epochs.push_back(
      report.trace.empty() ? 0 : report.trace.back().epoch);
  return report;
}

OddDemoConfig odd_demo_config(const ConfigMap& config) {
  OddDemoConfig c;
  c.n_train = static_cast<int>(config.get_int("n_train", c.n_train));
  c.m = static_cast<int>(config.get_int("m", c.m));
  c.kappa = config.get_double("kappa", c.kappa);
  c.eta = config.get_double("eta", c.eta);
  c.max_epochs = config.get_int("max_epochs", c.max_epochs);
  c.stop_fraction = config.get_double("stop_fraction", c.stop_fraction);
  c.dense_n = static_cast<int>(config.get_int("dense_n", c.dense_n));
  c.second_layer_only = config.get_bool("second_layer_only", c.second_layer_only);
  c.fit_mode = config.get_string("fit_mode", c.fit_mode);
  if (c.fit_mode != "solve" && c.fit_mode != "gd")
    throw config_error("odd demo: fit_mode must be solve or gd");
  if (config.has("freqs")) {
    c.freqs.clear();
    for (long k : config.get_int_list("freqs")) c.freqs.push_back(static_cast<int>(k));
  }
  c.seed = static_cast<std::uint64_t>(config.get_int("seed", 1));
  if (c.dense_n % 2 != 0)
    throw config_error("odd demo: dense_n must be even (antipodal splitting)");
  return c;
}

OddDemoReport demo_odd_interpolation(const OddDemoConfig& config) {
  OddDemoReport report;
  report.config = config;

  const auto train_points = harmonics::uniform_circle_grid(config.n_train);
  const Eigen::MatrixXd x_train = harmonics::coords_matrix(train_points);
  const auto dense_points = harmonics::uniform_circle_grid(config.dense_n);
  const Eigen::MatrixXd x_dense = harmonics::coords_matrix(dense_points);

  const ModeBasis k1 = mode_basis(config.dense_n, 1);

  for (int freq : config.freqs) {
    harmonics::HarmonicLabelSpec label_spec;
    label_spec.frequency = freq;
    label_spec.sphere_dim = 1;
    const Eigen::VectorXd y_train = harmonics::harmonic_labels(train_points, label_spec);
    const Eigen::VectorXd y_dense = harmonics::harmonic_labels(dense_points, label_spec);

    nets::TwoLayerNet net = nets::init_two_layer(config.m, 2, config.kappa,
                                                 /*with_bias=*/false, config.seed);
    OddCaseReport item;
    item.freq = freq;
    if (config.second_layer_only && config.fit_mode == "solve") {
      // Minimum-norm least squares on the frozen random features: the
      // fixed point of zero-start GD, without its ~1e7-epoch tail along
      // the aliased near-null directions.
      const double scale = 1.0 / std::sqrt(static_cast<double>(config.m));
      const Eigen::MatrixXd features =
          scale * (x_train * net.weights.transpose()).cwiseMax(0.0);
      Eigen::BDCSVD<Eigen::MatrixXd> svd(features,
                                         Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(1e-12);
      net.out_weights = svd.solve(y_train);
      item.train_residual_fraction =
          (y_train - features * net.out_weights).norm() / y_train.norm();
      item.verdict = item.train_residual_fraction <= config.stop_fraction
                         ? nets::TrainVerdict::Converged
                         : nets::TrainVerdict::DidNotConverge;
      item.epochs = 0;
    } else {
      nets::TrainConfig train_config;
      train_config.eta = config.eta;
      train_config.max_epochs = config.max_epochs;
      train_config.stop_fraction = config.stop_fraction;
      const nets::TrainRun run =
          config.second_layer_only
              ? nets::train_second_layer_only(net, x_train, y_train, train_config)
              : nets::train_full_batch(net, x_train, y_train, train_config);
      item.verdict = run.verdict;
      item.epochs = run.epochs_to_stop;
      item.train_residual_fraction =
          run.residual_trace.front() > 0
              ? run.residual_trace.back() / run.residual_trace.front()
              : 0.0;
    }
    item.learned_dense = nets::forward_batch(net, x_dense);
    item.dense_relative_error = (item.learned_dense - y_dense).norm() / y_dense.norm();

    // Odd-frequency content via the antipodal split: f_odd(th) =
    // (f(th) - f(th+pi))/2 holds exactly the odd-k modes; remove k=1 and
    // what is left is the odd k >= 3 band.
    const int half = config.dense_n / 2;
    Eigen::VectorXd f_odd(config.dense_n);
    for (int j = 0; j < config.dense_n; ++j)
      f_odd[j] = 0.5 * (item.learned_dense[j] -
                        item.learned_dense[(j + half) % config.dense_n]);
    const double odd_energy = f_odd.squaredNorm() - mode_energy(f_odd, k1);
    const double total_energy = item.learned_dense.squaredNorm();
    item.odd_energy_fraction = total_energy > 0 ? odd_energy / total_energy : 0.0;

    report.cases.push_back(std::move(item));
  }
  return report;
}

CrossEntropyDemoConfig cross_entropy_config(const ConfigMap& config) {
  CrossEntropyDemoConfig c;
  if (config.has("freqs")) {
    c.freqs.clear();
    for (long k : config.get_int_list("freqs")) c.freqs.push_back(static_cast<int>(k));
  }
  c.n = static_cast<int>(config.get_int("n", c.n));
  c.arch.hidden_layers = static_cast<int>(config.get_int("hidden_layers", c.arch.hidden_layers));
  c.arch.width = static_cast<int>(config.get_int("m", c.arch.width));
  c.arch.skip_connections = config.get_bool("skip_connections", c.arch.skip_connections);
  c.arch.bias = config.get_bool("deep_bias", c.arch.bias);
  c.eta = config.get_double("eta", c.eta);
  c.max_epochs = config.get_int("max_epochs", c.max_epochs);
  c.stop_fraction = config.get_double("stop_fraction", c.stop_fraction);
  c.cutoff = config.get_double("cutoff", c.cutoff);
  c.seeds = static_cast<int>(config.get_int("seeds", c.seeds));
  c.base_seed = static_cast<std::uint64_t>(config.get_int("seed", 1));
  return c;
}

CrossEntropyDemoReport demo_cross_entropy(const CrossEntropyDemoConfig& config) {
  CrossEntropyDemoReport report;
  report.config = config;

  const auto grid = harmonics::uniform_circle_grid(config.n);
  std::vector<std::pair<double, double>> fit_pairs;
  for (int freq : config.freqs) {
    auto [kept, labels] = nets::threshold_class_labels(grid, freq, config.cutoff);
    report.kept_fraction.push_back(static_cast<double>(kept.size()) / config.n);
    if (kept.empty()) throw numerical_error("cross-entropy demo: empty class set");
    const Eigen::MatrixXd x = harmonics::coords_matrix(kept);

    std::vector<double> epochs;
    for (int s = 0; s < config.seeds; ++s) {
      nets::DeepNet net = nets::init_deep(
          config.arch, 2, derive_seed(config.base_seed, static_cast<std::uint64_t>(freq),
                                      static_cast<std::uint64_t>(s) + 1));
      nets::TrainConfig train_config;
      train_config.eta = config.eta;
      train_config.max_epochs = config.max_epochs;
      train_config.stop_fraction = config.stop_fraction;
      train_config.loss = nets::LossKind::CrossEntropy;
      const nets::TrainRun run = nets::train_deep(net, x, labels, train_config);

      SweepCell cell;
      cell.k = freq;
      cell.seed_index = s;
      cell.verdict = run.verdict;
      cell.epochs = run.verdict == nets::TrainVerdict::Converged ? run.epochs_to_stop : -1;
      cell.final_fraction = run.residual_trace.front() > 0
                                ? run.residual_trace.back() / run.residual_trace.front()
                                : 0.0;
      report.cells.push_back(cell);
      if (cell.verdict == nets::TrainVerdict::Converged)
        epochs.push_back(static_cast<double>(cell.epochs));
    }
    if (static_cast<int>(epochs.size()) == config.seeds) {
      std::sort(epochs.begin(), epochs.end());
      const std::size_t mid = epochs.size() / 2;
      const double median = epochs.size() % 2 == 1
                                ? epochs[mid]
                                : 0.5 * (epochs[mid - 1] + epochs[mid]);
      fit_pairs.emplace_back(static_cast<double>(freq), median);
    }
  }

  try {
    report.fit = fit_power_law(fit_pairs);
    report.fit_valid = true;
  } catch (const numerical_error&) {
    report.fit_valid = false;
  }
  return report;
}

}  // namespace specbias::experiments
