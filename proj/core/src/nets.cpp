#include "specbias/nets.hpp"

#include <cmath>
#include <stdexcept>

#include "specbias/rng.hpp"

namespace specbias::nets {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;

// Lifted input matrix: identity for bias-free nets, [x, 1]/sqrt(2) rows
// under bias.
Eigen::MatrixXd effective_inputs(const TwoLayerNet& net, const Eigen::MatrixXd& x) {
  if (x.cols() != net.input_dim)
    throw std::invalid_argument("two-layer net: input dimension mismatch");
  if (!net.with_bias) return x;
  Eigen::MatrixXd lifted(x.rows(), x.cols() + 1);
  lifted.leftCols(x.cols()) = x * kInvSqrt2;
  lifted.col(x.cols()).setConstant(kInvSqrt2);
  return lifted;
}

double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Error measure recorded in the trace, and the matching pseudo-residual
// g = -dLoss/du, shared by all trainers.
double error_measure(const Eigen::VectorXd& u, const Eigen::VectorXd& y,
                     LossKind loss) {
  if (loss == LossKind::SquaredError) return (y - u).norm();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) acc += softplus(-y[i] * u[i]);
  return acc / static_cast<double>(u.size());
}

void pseudo_residual(const Eigen::VectorXd& u, const Eigen::VectorXd& y,
                     LossKind loss, Eigen::VectorXd& g) {
  if (loss == LossKind::SquaredError) {
    g = y - u;
    return;
  }
  const double inv_n = 1.0 / static_cast<double>(u.size());
  g.resize(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    g[i] = y[i] * logistic(-y[i] * u[i]) * inv_n;
}

// Shared trace/stop/divergence bookkeeping. Returns true when the
// caller should perform another gradient step.
struct RunState {
  TrainRun run;
  double initial = 0.0;
  long max_epochs = 0;
  double stop_fraction = 0.05;

  bool record_and_continue(double err) {
    const long epoch = static_cast<long>(run.residual_trace.size());
    run.residual_trace.push_back(err);
    if (epoch == 0) initial = err;
    if (err <= stop_fraction * initial) {
      run.epochs_to_stop = epoch;
      run.verdict = TrainVerdict::Converged;
      return false;
    }
    if (initial > 0 && err > 1e3 * initial) {
      run.verdict = TrainVerdict::Diverged;
      return false;
    }
    if (epoch >= max_epochs) {
      run.verdict = TrainVerdict::DidNotConverge;
      return false;
    }
    return true;
  }
};

void check_train_inputs(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const TrainConfig& config) {
  if (x.rows() != y.size())
    throw std::invalid_argument("train: points/labels size mismatch");
  if (!(config.eta >= 0)) throw std::invalid_argument("train: eta must be >= 0");
  if (!(config.stop_fraction > 0 && config.stop_fraction < 1))
    throw std::invalid_argument("train: stop_fraction must be in (0,1)");
  if (!y.allFinite()) throw std::invalid_argument("train: labels must be finite");
}

}  // namespace

const char* verdict_name(TrainVerdict v) {
  switch (v) {
    case TrainVerdict::Converged: return "converged";
    case TrainVerdict::DidNotConverge: return "did_not_converge";
    case TrainVerdict::Diverged: return "diverged";
  }
  return "?";
}

TwoLayerNet init_two_layer(int m, int input_dim, double kappa, bool with_bias,
                           std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("init_two_layer: m must be >= 1");
  if (input_dim < 1) throw std::invalid_argument("init_two_layer: bad input_dim");
  TwoLayerNet net;
  net.with_bias = with_bias;
  net.kappa = kappa;
  net.input_dim = input_dim;
  const int d_eff = input_dim + (with_bias ? 1 : 0);
  net.weights.resize(m, d_eff);
  net.out_weights.resize(m);
  SplitMix64 rng(seed);
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < input_dim; ++j) net.weights(r, j) = kappa * rng.next_gaussian();
  if (with_bias) net.weights.col(input_dim).setZero();
  for (int r = 0; r < m; ++r)
    net.out_weights[r] = (rng.next_u64() & 1) ? 1.0 : -1.0;
  return net;
}

TwoLayerNet init_two_layer_paired(int m, int input_dim, double kappa, bool with_bias,
                                  std::uint64_t seed) {
  if (m < 2 || m % 2 != 0)
    throw std::invalid_argument("init_two_layer_paired: m must be even and >= 2");
  TwoLayerNet half = init_two_layer(m / 2, input_dim, kappa, with_bias, seed);
  TwoLayerNet net;
  net.with_bias = with_bias;
  net.kappa = kappa;
  net.input_dim = input_dim;
  net.weights.resize(m, half.weights.cols());
  net.weights.topRows(m / 2) = half.weights;
  net.weights.bottomRows(m / 2) = half.weights;
  net.out_weights.resize(m);
  net.out_weights.head(m / 2) = half.out_weights;
  net.out_weights.tail(m / 2) = -half.out_weights;
  return net;
}

Eigen::VectorXd forward_batch(const TwoLayerNet& net, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd xe = effective_inputs(net, x);
  const double scale = 1.0 / std::sqrt(static_cast<double>(net.width()));
  Eigen::MatrixXd pre = xe * net.weights.transpose();  // n x m
  return scale * (pre.cwiseMax(0.0) * net.out_weights);
}

double forward(const TwoLayerNet& net, const UnitPoint& x) {
  Eigen::MatrixXd row(1, x.coords.size());
  row.row(0) = x.coords.transpose();
  return forward_batch(net, row)[0];
}

double two_layer_loss(const TwoLayerNet& net, const Eigen::MatrixXd& x,
                      const Eigen::VectorXd& y, LossKind loss) {
  const Eigen::VectorXd u = forward_batch(net, x);
  if (loss == LossKind::SquaredError) return 0.5 * (y - u).squaredNorm();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) acc += softplus(-y[i] * u[i]);
  return acc / static_cast<double>(u.size());
}

TrainRun train_full_batch(TwoLayerNet& net, const Eigen::MatrixXd& x,
                          const Eigen::VectorXd& y, const TrainConfig& config,
                          const EpochObserver& observer) {
  check_train_inputs(x, y, config);
  const Eigen::MatrixXd xe = effective_inputs(net, x);
  const Eigen::Index n = xe.rows();
  const int m = net.width();
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));

  Eigen::MatrixXd pre(n, m);
  Eigen::MatrixXd masked(n, m);
  Eigen::MatrixXd grad(m, xe.cols());
  Eigen::VectorXd u(n), g(n);

  RunState state;
  state.max_epochs = config.max_epochs;
  state.stop_fraction = config.stop_fraction;

  for (;;) {
    pre.noalias() = xe * net.weights.transpose();
    u.noalias() = pre.cwiseMax(0.0) * net.out_weights;
    u *= scale;
    if (observer) observer(static_cast<long>(state.run.residual_trace.size()), u);
    if (!state.record_and_continue(error_measure(u, y, config.loss))) break;
    pseudo_residual(u, y, config.loss, g);
    // dPhi/dw_r = -(a_r/sqrt(m)) sum_i g_i 1[z_ri >= 0] x~_i
    masked = ((pre.array() >= 0.0).cast<double>().colwise() * g.array()).matrix();
    grad.noalias() = masked.transpose() * xe;
    net.weights += (config.eta * scale) * (net.out_weights.asDiagonal() * grad);
  }
  return state.run;
}

TrainRun train_second_layer_only(TwoLayerNet& net, const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& y, const TrainConfig& config) {
  check_train_inputs(x, y, config);
  const Eigen::MatrixXd xe = effective_inputs(net, x);
  const int m = net.width();
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  // First layer frozen: features are fixed for the whole run. The output
  // weights restart from zero (see header).
  const Eigen::MatrixXd act = (xe * net.weights.transpose()).cwiseMax(0.0);  // n x m
  net.out_weights.setZero();

  Eigen::VectorXd u, g;
  RunState state;
  state.max_epochs = config.max_epochs;
  state.stop_fraction = config.stop_fraction;

  for (;;) {
    u.noalias() = act * net.out_weights;
    u *= scale;
    if (!state.record_and_continue(error_measure(u, y, config.loss))) break;
    pseudo_residual(u, y, config.loss, g);
    net.out_weights.noalias() += (config.eta * scale) * (act.transpose() * g);
  }
  return state.run;
}

DeepNet init_deep(const DeepNetSpec& spec, int input_dim, std::uint64_t seed) {
  if (spec.hidden_layers < 1)
    throw std::invalid_argument("init_deep: hidden_layers must be >= 1");
  if (spec.width < 1 || input_dim < 1)
    throw std::invalid_argument("init_deep: bad width or input_dim");
  DeepNet net;
  net.skip = spec.skip_connections;
  SplitMix64 rng(seed);
  const int layers = spec.hidden_layers + 1;  // + output layer
  net.weights.reserve(static_cast<std::size_t>(layers));
  if (spec.bias) net.biases.reserve(static_cast<std::size_t>(layers));
  for (int l = 0; l < layers; ++l) {
    const int rows = l == layers - 1 ? 1 : spec.width;
    const int cols = l == 0 ? input_dim : spec.width;
    Eigen::MatrixXd w(rows, cols);
    const double sd = spec.init == DeepNetSpec::Init::HeStyle
                          ? std::sqrt(2.0 / static_cast<double>(cols))
                          : spec.kappa;
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) w(i, j) = sd * rng.next_gaussian();
    net.weights.push_back(std::move(w));
    if (spec.bias) {
      Eigen::VectorXd b(rows);
      if (spec.init == DeepNetSpec::Init::HeStyle) {
        const double half = 1.0 / std::sqrt(static_cast<double>(cols));
        for (int i = 0; i < rows; ++i) b[i] = rng.next_uniform(-half, half);
      } else {
        b.setZero();
      }
      net.biases.push_back(std::move(b));
    }
  }
  return net;
}

namespace {

// Forward pass keeping pre-activations and activations for backprop.
// activations[l] is the output of hidden layer l (width x n); the
// network output is a length-n vector.
struct DeepForwardPass {
  std::vector<Eigen::MatrixXd> pre;          // hidden pre-activations
  std::vector<Eigen::MatrixXd> activations;  // hidden outputs
  Eigen::VectorXd out;
};

DeepForwardPass deep_forward_pass(const DeepNet& net, const Eigen::MatrixXd& x) {
  if (x.cols() != net.weights.front().cols())
    throw std::invalid_argument("deep net: input dimension mismatch");
  const std::size_t hidden = net.weights.size() - 1;
  DeepForwardPass pass;
  pass.pre.resize(hidden);
  pass.activations.resize(hidden);
  Eigen::MatrixXd input = x.transpose();  // D x n
  for (std::size_t l = 0; l < hidden; ++l) {
    const Eigen::MatrixXd& h_prev = l == 0 ? input : pass.activations[l - 1];
    pass.pre[l].noalias() = net.weights[l] * h_prev;
    if (!net.biases.empty()) pass.pre[l].colwise() += net.biases[l];
    pass.activations[l] = pass.pre[l].cwiseMax(0.0);
    // Identity shortcut only where the widths agree (hidden -> hidden).
    if (net.skip && l > 0) pass.activations[l] += pass.activations[l - 1];
  }
  Eigen::RowVectorXd out = net.weights.back() * pass.activations.back();
  if (!net.biases.empty()) out.array() += net.biases.back()[0];
  pass.out = out.transpose();
  return pass;
}

}  // namespace

Eigen::VectorXd deep_forward(const DeepNet& net, const Eigen::MatrixXd& x) {
  return deep_forward_pass(net, x).out;
}

double deep_loss(const DeepNet& net, const Eigen::MatrixXd& x,
                 const Eigen::VectorXd& y, LossKind loss) {
  const Eigen::VectorXd u = deep_forward(net, x);
  if (loss == LossKind::SquaredError) return 0.5 * (y - u).squaredNorm();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) acc += softplus(-y[i] * u[i]);
  return acc / static_cast<double>(u.size());
}

TrainRun train_deep(DeepNet& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const TrainConfig& config) {
  check_train_inputs(x, y, config);
  const std::size_t hidden = net.weights.size() - 1;
  const Eigen::MatrixXd input_t = x.transpose();

  Eigen::VectorXd g;
  RunState state;
  state.max_epochs = config.max_epochs;
  state.stop_fraction = config.stop_fraction;

  for (;;) {
    DeepForwardPass pass = deep_forward_pass(net, x);
    if (!state.record_and_continue(error_measure(pass.out, y, config.loss))) break;
    pseudo_residual(pass.out, y, config.loss, g);

    // delta = -dPhi/d(hidden activation); ascent direction already.
    Eigen::MatrixXd delta = net.weights.back().transpose() * g.transpose();  // w x n
    // Output layer first: W_out += eta g' act_last.
    if (!net.biases.empty()) net.biases.back()[0] += config.eta * g.sum();
    net.weights.back().noalias() += config.eta * g.transpose() * pass.activations[hidden - 1].transpose();

    for (std::size_t l = hidden; l-- > 0;) {
      const Eigen::MatrixXd branch =
          ((pass.pre[l].array() >= 0.0).cast<double>() * delta.array()).matrix();
      const Eigen::MatrixXd& h_prev = l == 0 ? input_t : pass.activations[l - 1];
      if (!net.biases.empty()) net.biases[l] += config.eta * branch.rowwise().sum();
      if (l > 0) {
        // Propagate before updating W_l so the update uses this epoch's weights.
        Eigen::MatrixXd next = net.weights[l].transpose() * branch;
        if (net.skip && l > 0) next += delta;  // shortcut path
        net.weights[l].noalias() += config.eta * branch * h_prev.transpose();
        delta = std::move(next);
      } else {
        net.weights[l].noalias() += config.eta * branch * h_prev.transpose();
      }
    }
  }
  return state.run;
}

std::pair<std::vector<UnitPoint>, Eigen::VectorXd> threshold_class_labels(
    std::span<const UnitPoint> points, int k, double cutoff) {
  if (k < 1) throw std::invalid_argument("threshold_class_labels: k must be >= 1");
  if (cutoff >= 1.0)
    throw std::invalid_argument("threshold_class_labels: cutoff >= 1 keeps nothing");
  std::vector<UnitPoint> kept;
  std::vector<double> labels;
  for (const auto& p : points) {
    const double v = std::cos(k * harmonics::circle_angle(p));
    if (v > cutoff) {
      kept.push_back(p);
      labels.push_back(1.0);
    } else if (v < -cutoff) {
      kept.push_back(p);
      labels.push_back(-1.0);
    }
  }
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(labels.data(),
                                                  static_cast<Eigen::Index>(labels.size()));
  return {std::move(kept), std::move(y)};
}

}  // namespace specbias::nets
