#ifndef SPECBIAS_SWEEP_HPP
#define SPECBIAS_SWEEP_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "specbias/config.hpp"
#include "specbias/dynamics.hpp"
#include "specbias/kernels.hpp"
#include "specbias/nets.hpp"

namespace specbias::experiments {

/// One frequency sweep: train a fresh net per (frequency, seed) cell and
/// compare measured epochs-to-threshold against the kernel forecast.
struct SweepSpec {
  enum class Model { Shallow, Deep };

  int d = 1;
  Model model = Model::Shallow;
  kernels::KernelVariant variant = kernels::KernelVariant::WithBias;  // shallow
  nets::DeepNetSpec deep;                                             // deep
  std::vector<int> freqs;
  int n = 512;
  int m = 2000;
  double kappa = 2.5;
  double eta = 0.01;
  double stop_fraction = 0.05;
  long max_epochs = 100000;
  int seeds = 1;
  std::optional<int> ambient_dim;
  nets::LossKind loss = nets::LossKind::SquaredError;
  std::uint64_t base_seed = 1;
  int workers = 0;  // 0 = hardware concurrency

  void validate() const;  // throws config_error
};

SweepSpec sweep_spec_from_config(const ConfigMap& config);

struct SweepCell {
  int k = 0;
  int seed_index = 0;
  long epochs = -1;  // -1 when not converged
  nets::TrainVerdict verdict = nets::TrainVerdict::DidNotConverge;
  double final_fraction = 1.0;  // last residual / initial residual
};

struct FrequencySummary {
  int k = 0;
  double median_epochs = 0.0;  // over converged cells
  int converged_cells = 0;
  int total_cells = 0;
  std::int64_t predicted_iterations = dynamics::kNeverConverges;  // shallow only
  double scaled_prediction = 0.0;
};

struct PowerLawFit {
  double exponent = 0.0;
  double stderr_exponent = 0.0;
  double scale = 0.0;  // exp(intercept)
};

/// OLS on (log k, log epochs) over pairs with k >= 2 (k = 1 is
/// initialization-dominated and excluded). Throws numerical_error with
/// fewer than 3 usable pairs.
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> pairs);

struct SweepResult {
  std::vector<SweepCell> cells;          // one per (k, seed), k-major order
  std::vector<FrequencySummary> per_frequency;
  PowerLawFit fit;                       // over converged k >= 2
  bool fit_valid = false;
  double prediction_scale = 0.0;         // log-space least squares constant
  std::uint64_t data_seed = 0;
  std::uint64_t pole_seed = 0;
};

/// Runs every (k, seed) cell on a bounded worker pool. Cell results are
/// keyed, so scheduling order cannot change the output. Per-cell
/// divergence is recorded, not fatal.
SweepResult run_sweep(const SweepSpec& spec);

/// Kernel-forecast eigenvalue for frequency k at sample size n: the
/// circulant value on S^1 grids, (n / Vol(S^d)) * coefficient above.
double predicted_mode_eigenvalue(kernels::KernelVariant variant, int d, int n, int k);

}  // namespace specbias::experiments

#endif  // SPECBIAS_SWEEP_HPP
