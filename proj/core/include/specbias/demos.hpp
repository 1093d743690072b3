#ifndef SPECBIAS_DEMOS_HPP
#define SPECBIAS_DEMOS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "specbias/config.hpp"
#include "specbias/nets.hpp"
#include "specbias/sweep.hpp"

namespace specbias::experiments {

/// Two-sines demo: train on y(th) = sin(k_low th) + sin(k_high th) and
/// track when each mode's share of the residual energy falls below
/// mode_stop_fraction of its initial value.
struct TwoSinesConfig {
  int n = 256;
  int m = 16000;
  double kappa = 2.5;
  double eta = 0.01;
  long max_epochs = 8000;
  int low_freq = 4;
  int high_freq = 14;
  double mode_stop_fraction = 0.1;
  /// Antithetic unit pairs: the initial function is exactly zero, so the
  /// epoch-0 residual is the target itself and kappa can sit deep in the
  /// lazy regime (small kappa lets the high mode's kernel eigenvalue
  /// collapse under training, stalling it far above threshold).
  bool paired_init = true;
  std::uint64_t seed = 1;
  int trace_stride = 10;  // epochs between stored trace rows
};
TwoSinesConfig two_sines_config(const ConfigMap& config);

struct TwoSinesTraceRow {
  long epoch;
  double low_energy;
  double high_energy;
  double dc_fraction;  // DC share of total residual energy
  double residual;
};

struct TwoSinesReport {
  TwoSinesConfig config;
  long low_epoch = -1;   // first epoch with low-mode energy <= fraction * initial
  long high_epoch = -1;
  double initial_low_energy = 0.0;
  double initial_high_energy = 0.0;
  double max_dc_fraction = 0.0;
  std::vector<TwoSinesTraceRow> trace;
  Eigen::VectorXd target;                  // labels on the grid
  std::vector<Eigen::VectorXd> snapshots;  // predictions at 0, low_epoch, end
  std::vector<long> snapshot_epochs;
};
TwoSinesReport demo_two_sines(const TwoSinesConfig& config);

/// Odd-interpolation demo: bias-free net fit to a handful of cos(k th)
/// samples, evaluated off-sample on a dense grid. Second-layer-only mode
/// freezes the random first layer and trains the output weights.
struct OddDemoConfig {
  int n_train = 51;
  int m = 2000;
  double kappa = 1.0;
  double eta = 0.05;
  long max_epochs = 200000;
  double stop_fraction = 0.05;
  int dense_n = 10000;
  bool second_layer_only = true;
  /// "solve" computes the minimum-norm least-squares output weights
  /// directly -- the exact fixed point of zero-start gradient descent on
  /// the frozen features, whose smallest usable eigenvalue (an aliased
  /// even frequency) would otherwise demand ~1e7 epochs. "gd" runs
  /// train_second_layer_only for max_epochs.
  std::string fit_mode = "solve";
  std::vector<int> freqs = {3, 4};
  std::uint64_t seed = 1;
};
OddDemoConfig odd_demo_config(const ConfigMap& config);

struct OddCaseReport {
  int freq = 0;
  nets::TrainVerdict verdict = nets::TrainVerdict::DidNotConverge;
  long epochs = -1;
  double train_residual_fraction = 1.0;  // final / initial on the training set
  double dense_relative_error = 0.0;     // ||f - y|| / ||y|| on the dense grid
  double odd_energy_fraction = 0.0;      // odd k >= 3 share of ||f||^2, dense grid
  Eigen::VectorXd learned_dense;         // f on the dense grid (for plots)
};

struct OddDemoReport {
  OddDemoConfig config;
  std::vector<OddCaseReport> cases;  // one per frequency
};
OddDemoReport demo_odd_interpolation(const OddDemoConfig& config);

/// Cross-entropy demo: thresholded-cosine binary classes per frequency,
/// trained with the logistic loss on a deep residual net; reports the
/// fitted epoch exponent without asserting a particular value.
struct CrossEntropyDemoConfig {
  std::vector<int> freqs = {1, 2, 3, 4, 5, 6, 7, 8};
  int n = 1001;
  nets::DeepNetSpec arch{/*hidden_layers=*/10, /*width=*/256,
                         /*skip_connections=*/true, /*bias=*/true,
                         nets::DeepNetSpec::Init::HeStyle, 1.0};
  double eta = 0.05;
  long max_epochs = 40000;
  double stop_fraction = 0.05;
  double cutoff = 2.0 / 3.0;
  int seeds = 1;
  std::uint64_t base_seed = 1;
};
CrossEntropyDemoConfig cross_entropy_config(const ConfigMap& config);

struct CrossEntropyDemoReport {
  CrossEntropyDemoConfig config;
  std::vector<SweepCell> cells;
  std::vector<double> kept_fraction;  // per frequency
  PowerLawFit fit;
  bool fit_valid = false;
};
CrossEntropyDemoReport demo_cross_entropy(const CrossEntropyDemoConfig& config);

}  // namespace specbias::experiments

#endif  // SPECBIAS_DEMOS_HPP
