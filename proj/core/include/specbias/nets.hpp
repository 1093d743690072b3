#ifndef SPECBIAS_NETS_HPP
#define SPECBIAS_NETS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "specbias/harmonics.hpp"

namespace specbias::nets {

using harmonics::UnitPoint;

/// Two-layer ReLU network f(x) = (1/sqrt(m)) sum_r a_r relu(w_r . x~),
/// where x~ is the raw input (bias-free) or the homogeneous lift
/// (x,1)/sqrt(2) (with bias). Training the lifted weight column is
/// exactly the bias term: it starts at zero and the exposed
/// (w, b) = (lifted weights)/sqrt(2) satisfy f = (1/sqrt(m)) sum a_r
/// relu(w_r . x + b_r). The output signs a_r are +-1 and stay frozen
/// under full-batch training; the second-layer-only mode trains them
/// instead (first layer frozen).
struct TwoLayerNet {
  Eigen::MatrixXd weights;     // m x D_eff, D_eff = input_dim (+1 with bias)
  Eigen::VectorXd out_weights; // a_r; +-1 at init
  bool with_bias = false;
  double kappa = 1.0;
  int input_dim = 2;  // coordinate length of raw inputs

  int width() const { return static_cast<int>(weights.rows()); }
};

/// W entries i.i.d. N(0, kappa^2) (bias column zero when present),
/// a_r i.i.d. uniform {-1, +1}. Deterministic per seed.
TwoLayerNet init_two_layer(int m, int input_dim, double kappa, bool with_bias,
                           std::uint64_t seed);

/// Antithetically paired variant: m/2 i.i.d. units, each duplicated with
/// the opposite output sign, so the initial function is exactly zero
/// while the init-time kernel keeps its law (at the effective width
/// m/2). Lets experiments use a large, safely lazy kappa without the
/// initialization noise polluting residual projections. m must be even.
TwoLayerNet init_two_layer_paired(int m, int input_dim, double kappa, bool with_bias,
                                  std::uint64_t seed);

double forward(const TwoLayerNet& net, const UnitPoint& x);

/// X holds one raw point per row (n x input_dim).
Eigen::VectorXd forward_batch(const TwoLayerNet& net, const Eigen::MatrixXd& x);

enum class LossKind { SquaredError, CrossEntropy };

struct TrainConfig {
  double eta = 0.01;
  long max_epochs = 1000;
  double stop_fraction = 0.05;
  LossKind loss = LossKind::SquaredError;
  std::uint64_t seed = 0;  // reserved for stochastic extensions; full-batch GD ignores it
};

enum class TrainVerdict { Converged, DidNotConverge, Diverged };

const char* verdict_name(TrainVerdict v);

/// residual_trace[t] is the error measure after t epochs (t = 0 is the
/// freshly initialized net): ||y - u||_2 for the squared loss, the mean
/// cross-entropy value otherwise. epochs_to_stop is the first index at
/// or below stop_fraction * residual_trace[0], or -1 if never reached.
struct TrainRun {
  std::vector<double> residual_trace;
  long epochs_to_stop = -1;
  TrainVerdict verdict = TrainVerdict::DidNotConverge;
};

/// Per-epoch hook, called with the epoch index and the network outputs
/// before that epoch's update. Used by the demos to project residuals.
using EpochObserver = std::function<void(long, const Eigen::VectorXd&)>;

/// Full-batch gradient descent on Phi = 1/2 sum_i (y_i - f(x_i))^2 (or
/// the mean cross-entropy), exact hand-derived gradients with
/// relu'(z) = 1[z >= 0]. Only the first layer (and bias) moves. Aborts
/// with a Diverged verdict if the residual exceeds 1e3 x its initial value.
TrainRun train_full_batch(TwoLayerNet& net, const Eigen::MatrixXd& x,
                          const Eigen::VectorXd& y, const TrainConfig& config,
                          const EpochObserver& observer = {});

/// Interpolation-mode variant: freeze the first layer at its random init
/// and run GD on the output weights, restarted from zero. The zero start
/// makes the converged function the minimum-norm interpolant of the
/// frozen random features, with no leftover initialization noise off the
/// training set.
TrainRun train_second_layer_only(TwoLayerNet& net, const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& y, const TrainConfig& config);

/// Loss value under the config's loss kind (used by the gradient checks).
double two_layer_loss(const TwoLayerNet& net, const Eigen::MatrixXd& x,
                      const Eigen::VectorXd& y, LossKind loss);

/// Deep fully-connected ReLU stack, optionally with identity shortcuts
/// around every hidden layer of matching width. hidden_layers >= 1.
struct DeepNetSpec {
  int hidden_layers = 1;
  int width = 64;
  bool skip_connections = false;
  bool bias = true;
  enum class Init { Gaussian, HeStyle } init = Init::HeStyle;
  double kappa = 1.0;  // Gaussian init scale
};

struct DeepNet {
  // weights[0]: width x input_dim, weights[1..L-1]: width x width,
  // weights[L]: 1 x width. biases match rows (empty when bias = false).
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  bool skip = false;
};

/// HeStyle: weight N(0, 2/fan_in), bias uniform [-1/sqrt(fan_in),
/// 1/sqrt(fan_in)]. Gaussian: weight N(0, kappa^2), bias 0.
DeepNet init_deep(const DeepNetSpec& spec, int input_dim, std::uint64_t seed);

Eigen::VectorXd deep_forward(const DeepNet& net, const Eigen::MatrixXd& x);

double deep_loss(const DeepNet& net, const Eigen::MatrixXd& x,
                 const Eigen::VectorXd& y, LossKind loss);

/// Full-batch GD with backpropagation through every layer; same trace,
/// stopping and divergence rules as train_full_batch.
TrainRun train_deep(DeepNet& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const TrainConfig& config);

/// Thresholded-cosine binary classes on the circle: keep points with
/// |cos(k theta)| > cutoff, label +1 above, -1 below. Throws
/// std::invalid_argument if cutoff >= 1 would keep nothing.
std::pair<std::vector<UnitPoint>, Eigen::VectorXd> threshold_class_labels(
    std::span<const UnitPoint> points, int k, double cutoff = 2.0 / 3.0);

}  // namespace specbias::nets

#endif  // SPECBIAS_NETS_HPP
