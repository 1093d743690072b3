#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "specbias/dynamics.hpp"
#include "specbias/harmonics.hpp"
#include "specbias/kernels.hpp"
#include "specbias/nets.hpp"
#include "specbias/rng.hpp"

using namespace specbias;
using nets::LossKind;
using nets::TrainVerdict;

namespace {

Eigen::MatrixXd circle_inputs(int n) {
  return harmonics::coords_matrix(harmonics::uniform_circle_grid(n));
}

Eigen::VectorXd cosine_labels(int n, int k) {
  Eigen::VectorXd y(n);
  for (int j = 0; j < n; ++j) y[j] = std::cos(2.0 * M_PI * k * j / n);
  return y;
}

// Extract the negative loss gradient from a single eta = h training step:
// the update is theta += h * (-dPhi/dtheta).
template <typename Net, typename Trainer>
Eigen::MatrixXd gradient_from_step(Net net, const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& y, LossKind loss,
                                   Trainer&& trainer, int layer) {
  const double h = 1.0;
  nets::TrainConfig config;
  config.eta = h;
  config.max_epochs = 1;
  config.stop_fraction = 1e-300;
  config.loss = loss;
  Net stepped = net;
  trainer(stepped, x, y, config);
  if constexpr (std::is_same_v<Net, nets::TwoLayerNet>) {
    (void)layer;
    return (stepped.weights - net.weights) / h;
  } else {
    return (stepped.weights[layer] - net.weights[layer]) / h;
  }
}

}  // namespace

TEST_CASE("init_two_layer statistics and determinism") {
  const auto a = nets::init_two_layer(512, 3, 1.5, true, 42);
  const auto b = nets::init_two_layer(512, 3, 1.5, true, 42);
  CHECK(a.weights == b.weights);
  CHECK(a.out_weights == b.out_weights);

  // Bias column starts at zero.
  CHECK(a.weights.col(3).cwiseAbs().maxCoeff() == 0.0);

  const auto wide = nets::init_two_layer(40000, 4, 0.7, false, 7);
  const double mean = wide.weights.mean();
  const double count = wide.weights.size();
  CHECK(std::abs(mean) <= 3.0 * 0.7 / std::sqrt(count));
  int plus = 0;
  for (int r = 0; r < wide.width(); ++r) {
    CHECK(std::abs(wide.out_weights[r]) == 1.0);
    if (wide.out_weights[r] > 0) ++plus;
  }
  CHECK(std::abs(plus - 20000.0) <= 3.0 * std::sqrt(40000.0) / 2.0);
}

TEST_CASE("two-layer forward") {
  // All-zero first layer: output 0 everywhere.
  auto zero = nets::init_two_layer(16, 2, 1.0, true, 1);
  zero.weights.setZero();
  const Eigen::MatrixXd x = circle_inputs(8);
  CHECK(nets::forward_batch(zero, x).cwiseAbs().maxCoeff() == 0.0);

  // One unit, a = +1, w.x = 2: output 2 (m = 1, no bias).
  nets::TwoLayerNet one;
  one.with_bias = false;
  one.input_dim = 2;
  one.weights.resize(1, 2);
  one.weights << 2.0, 0.0;
  one.out_weights.resize(1);
  one.out_weights << 1.0;
  Eigen::VectorXd px(2);
  px << 1.0, 0.0;
  CHECK(nets::forward(one, harmonics::make_unit_point(px, 1)) == doctest::Approx(2.0));

  // Two identical units with opposite signs cancel for every input.
  nets::TwoLayerNet pair;
  pair.with_bias = false;
  pair.input_dim = 2;
  pair.weights.resize(2, 2);
  pair.weights << 0.3, -0.7, 0.3, -0.7;
  pair.out_weights.resize(2);
  pair.out_weights << 1.0, -1.0;
  CHECK(nets::forward_batch(pair, circle_inputs(32)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("training trivia") {
  const Eigen::MatrixXd x = circle_inputs(16);
  // Labels equal to the net's own initial outputs: immediate convergence.
  auto net = nets::init_two_layer(64, 2, 1.0, true, 3);
  const Eigen::VectorXd self = nets::forward_batch(net, x);
  nets::TrainConfig config;
  config.eta = 0.01;
  config.max_epochs = 50;
  auto run = nets::train_full_batch(net, x, self, config);
  CHECK(run.epochs_to_stop == 0);
  CHECK(run.verdict == TrainVerdict::Converged);

  // eta = 0: the trace is constant and the run never converges.
  auto frozen = nets::init_two_layer(64, 2, 1.0, true, 3);
  config.eta = 0.0;
  config.max_epochs = 20;
  run = nets::train_full_batch(frozen, x, cosine_labels(16, 2), config);
  CHECK(run.verdict == TrainVerdict::DidNotConverge);
  for (double r : run.residual_trace)
    CHECK(r == doctest::Approx(run.residual_trace[0]).epsilon(1e-15));

  // Divergence guard. Organic over-stepping self-stabilizes (an
  // overshoot deactivates units and the output collapses back), so pin
  // the net in its linear region: pre-activations ~1e9 never change
  // sign, the dynamics are exactly u += eta H (y - u), and
  // eta lambda_max > 2 doubles the residual every step.
  nets::TwoLayerNet hot;
  hot.with_bias = false;
  hot.input_dim = 2;
  hot.weights.resize(2, 2);
  hot.weights << 1e9, 0.0, 1e9, 0.0;
  hot.out_weights.resize(2);
  hot.out_weights << 1.0, -1.0;
  Eigen::MatrixXd cluster(4, 2);
  for (int i = 0; i < 4; ++i) {
    const double th = 0.05 * i;
    cluster.row(i) << std::cos(th), std::sin(th);
  }
  Eigen::VectorXd yc(4);
  yc << 1.0, -1.0, 1.0, -1.0;
  config.eta = 10.0;
  config.max_epochs = 100000;
  run = nets::train_full_batch(hot, cluster, yc, config);
  CHECK(run.verdict == TrainVerdict::Diverged);
  CHECK(run.residual_trace.back() > 1e3 * run.residual_trace.front());
}

TEST_CASE("training is deterministic bit for bit") {
  const Eigen::MatrixXd x = circle_inputs(32);
  const Eigen::VectorXd y = cosine_labels(32, 3);
  nets::TrainConfig config;
  config.eta = 0.05;
  config.max_epochs = 200;
  auto net1 = nets::init_two_layer(128, 2, 1.0, true, 11);
  auto net2 = nets::init_two_layer(128, 2, 1.0, true, 11);
  const auto run1 = nets::train_full_batch(net1, x, y, config);
  const auto run2 = nets::train_full_batch(net2, x, y, config);
  REQUIRE(run1.residual_trace.size() == run2.residual_trace.size());
  for (std::size_t t = 0; t < run1.residual_trace.size(); ++t)
    CHECK(run1.residual_trace[t] == run2.residual_trace[t]);
  CHECK(net1.weights == net2.weights);
}

TEST_CASE("analytic gradients match central differences (shallow)") {
  const int n = 7, m = 10;
  const Eigen::MatrixXd x = circle_inputs(n);
  const Eigen::VectorXd y = cosine_labels(n, 2);
  for (const bool with_bias : {false, true}) {
    for (const LossKind loss : {LossKind::SquaredError, LossKind::CrossEntropy}) {
      // Find a seed whose pre-activations are all bounded away from the
      // ReLU kink so finite differences cannot flip an indicator.
      nets::TwoLayerNet net;
      std::uint64_t seed = 100;
      for (;; ++seed) {
        net = nets::init_two_layer(m, 2, 1.0, with_bias, seed);
        if (with_bias) net.weights.col(2).setConstant(0.2);  // off the kink
        Eigen::MatrixXd xe = x;
        if (with_bias) {
          xe.resize(n, 3);
          xe.leftCols(2) = x / std::sqrt(2.0);
          xe.col(2).setConstant(1.0 / std::sqrt(2.0));
        }
        if ((xe * net.weights.transpose()).cwiseAbs().minCoeff() > 1e-2) break;
      }
      const Eigen::VectorXd labels =
          loss == LossKind::CrossEntropy
              ? (Eigen::VectorXd)y.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; })
              : y;
      const Eigen::MatrixXd grad = gradient_from_step(
          net, x, labels, loss,
          [](nets::TwoLayerNet& nn, const Eigen::MatrixXd& xx, const Eigen::VectorXd& yy,
             const nets::TrainConfig& cc) { nets::train_full_batch(nn, xx, yy, cc); },
          0);
      SplitMix64 rng(17);
      int checked = 0;
      while (checked < 100) {
        const int r = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m));
        const int c = static_cast<int>(rng.next_u64() %
                                       static_cast<std::uint64_t>(net.weights.cols()));
        const double h = 1e-5;
        nets::TwoLayerNet plus = net, minus = net;
        plus.weights(r, c) += h;
        minus.weights(r, c) -= h;
        const double fd = (nets::two_layer_loss(plus, x, labels, loss) -
                           nets::two_layer_loss(minus, x, labels, loss)) /
                          (2 * h);
        const double analytic = -grad(r, c);
        if (std::abs(fd) < 1e-12) {
          CHECK(std::abs(analytic) <= 1e-10);
        } else {
          CHECK(analytic == doctest::Approx(fd).epsilon(1e-6));
        }
        ++checked;
      }
    }
  }
}

TEST_CASE("analytic gradients match central differences (deep)") {
  const int n = 6;
  const Eigen::MatrixXd x = circle_inputs(n);
  Eigen::VectorXd y = cosine_labels(n, 1);
  for (const bool skip : {false, true}) {
    nets::DeepNetSpec spec;
    spec.hidden_layers = 3;
    spec.width = 8;
    spec.skip_connections = skip;
    spec.bias = true;
    spec.init = nets::DeepNetSpec::Init::HeStyle;
    nets::DeepNet net;
    std::uint64_t seed = 7;
    for (;; ++seed) {
      net = nets::init_deep(spec, 2, seed);
      // Reject draws with any pre-activation near the kink.
      double min_abs = 1e300;
      Eigen::MatrixXd h = x.transpose();
      for (std::size_t l = 0; l + 1 < net.weights.size(); ++l) {
        Eigen::MatrixXd z = net.weights[l] * h;
        z.colwise() += net.biases[l];
        min_abs = std::min(min_abs, z.cwiseAbs().minCoeff());
        Eigen::MatrixXd act = z.cwiseMax(0.0);
        if (net.skip && l > 0) act += h;
        h = act;
      }
      if (min_abs > 1e-2) break;
    }
    for (int layer : {0, 1, 3}) {
      const Eigen::MatrixXd grad = gradient_from_step(
          net, x, y, LossKind::SquaredError,
          [](nets::DeepNet& nn, const Eigen::MatrixXd& xx, const Eigen::VectorXd& yy,
             const nets::TrainConfig& cc) { nets::train_deep(nn, xx, yy, cc); },
          layer);
      SplitMix64 rng(23);
      const auto rows = net.weights[static_cast<std::size_t>(layer)].rows();
      const auto cols = net.weights[static_cast<std::size_t>(layer)].cols();
      for (int trial = 0; trial < 34; ++trial) {
        const int r = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(rows));
        const int c = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(cols));
        const double h = 1e-5;
        nets::DeepNet plus = net, minus = net;
        plus.weights[static_cast<std::size_t>(layer)](r, c) += h;
        minus.weights[static_cast<std::size_t>(layer)](r, c) -= h;
        const double fd = (nets::deep_loss(plus, x, y, LossKind::SquaredError) -
                           nets::deep_loss(minus, x, y, LossKind::SquaredError)) /
                          (2 * h);
        const double analytic = -grad(r, c);
        if (std::abs(fd) < 1e-12) {
          CHECK(std::abs(analytic) <= 1e-10);
        } else {
          CHECK(analytic == doctest::Approx(fd).epsilon(1e-6));
        }
      }
    }
  }
}

TEST_CASE("deep net structural cases") {
  nets::DeepNetSpec spec;
  spec.hidden_layers = 3;
  spec.width = 6;
  spec.bias = true;
  spec.init = nets::DeepNetSpec::Init::Gaussian;
  spec.kappa = 0.0;  // all-zero weights and biases
  const auto zero = nets::init_deep(spec, 2, 5);
  CHECK(nets::deep_forward(zero, circle_inputs(12)).cwiseAbs().maxCoeff() == 0.0);

  // Skip net with zeroed hidden branches: the output layer sees the
  // first hidden activation propagated by the shortcuts.
  nets::DeepNetSpec skip_spec;
  skip_spec.hidden_layers = 4;
  skip_spec.width = 6;
  skip_spec.skip_connections = true;
  skip_spec.bias = false;
  skip_spec.init = nets::DeepNetSpec::Init::HeStyle;
  auto skip_net = nets::init_deep(skip_spec, 2, 9);
  for (std::size_t l = 1; l + 1 < skip_net.weights.size(); ++l)
    skip_net.weights[l].setZero();
  const Eigen::MatrixXd x = circle_inputs(10);
  const Eigen::MatrixXd h0 = (skip_net.weights[0] * x.transpose()).cwiseMax(0.0);
  const Eigen::VectorXd expected = (skip_net.weights.back() * h0).transpose();
  const Eigen::VectorXd got = nets::deep_forward(skip_net, x);
  CHECK((got - expected).cwiseAbs().maxCoeff() <= 1e-14);

  // He-style init: weight std near sqrt(2/fan_in), bias within its box.
  nets::DeepNetSpec he;
  he.hidden_layers = 2;
  he.width = 300;
  he.bias = true;
  const auto net = nets::init_deep(he, 2, 31);
  const auto& w1 = net.weights[1];
  const double sd = std::sqrt(w1.array().square().mean());
  CHECK(sd == doctest::Approx(std::sqrt(2.0 / 300.0)).epsilon(0.05));
  CHECK(net.biases[1].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(300.0));
}

TEST_CASE("second-layer-only training fits while the first layer stays put") {
  const int n = 24;
  const Eigen::MatrixXd x = circle_inputs(n);
  const Eigen::VectorXd y = cosine_labels(n, 2);
  auto net = nets::init_two_layer(600, 2, 0.5, false, 12);
  const Eigen::MatrixXd w0 = net.weights;
  nets::TrainConfig config;
  config.eta = 0.05;
  config.max_epochs = 40000;
  const auto run = nets::train_second_layer_only(net, x, y, config);
  CHECK(net.weights == w0);
  CHECK(run.verdict == TrainVerdict::Converged);
}

TEST_CASE("lazy training: relative weight motion shrinks with width") {
  const int n = 64;
  const Eigen::MatrixXd x = circle_inputs(n);
  const Eigen::VectorXd y = cosine_labels(n, 2);
  nets::TrainConfig config;
  config.eta = 0.01;
  config.max_epochs = 20000;
  double prev_motion = -1.0;
  for (int m : {10000, 1000, 100}) {
    double motion = 0.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto net = nets::init_two_layer(m, 2, 1.0, true, derive_seed(seed, m));
      const Eigen::MatrixXd w0 = net.weights;
      const auto run = nets::train_full_batch(net, x, y, config);
      REQUIRE(run.verdict == TrainVerdict::Converged);
      motion += (net.weights - w0).norm() / w0.norm();
    }
    motion /= 3.0;
    if (m == 10000) CHECK(motion <= 0.05);
    CHECK(motion > prev_motion);
    prev_motion = motion;
  }
}

TEST_CASE("bias-free nets stall on cos(3 theta)") {
  const int n = 128, m = 2000;
  const Eigen::MatrixXd x = circle_inputs(n);
  nets::TrainConfig config;
  config.eta = 0.02;
  config.max_epochs = 100000;
  long budget = 0;
  for (int k : {2, 4}) {
    auto net = nets::init_two_layer(m, 2, 1.0, false, 77);
    const auto run = nets::train_full_batch(net, x, cosine_labels(n, k), config);
    REQUIRE(run.verdict == TrainVerdict::Converged);
    budget = std::max(budget, run.epochs_to_stop);
  }
  auto net = nets::init_two_layer(m, 2, 1.0, false, 77);
  config.max_epochs = budget;
  const auto run = nets::train_full_batch(net, x, cosine_labels(n, 3), config);
  CHECK(run.verdict == TrainVerdict::DidNotConverge);
  CHECK(run.residual_trace.back() >= 0.5 * run.residual_trace.front());
}

TEST_CASE("empirical residual trace follows the kernel forecast") {
  // Reduced-scale version of the forecast-agreement check (the acceptance
  // suite runs the full m = 1e4, 10-seed version): seed-averaged traces
  // stay within 10% of the closed-form curve for 200 epochs.
  // kappa trades two systematic errors: the t = 0 offset from the
  // network's own initial output (about kappa^2/2 relative, since that
  // output is nearly orthogonal to the labels) against late-time kernel
  // drift when units move far relative to kappa. 0.25 keeps both under
  // ~5% at this width.
  const int n = 64, m = 10000, seeds = 3;
  const long horizon = 200;
  const double eta = 0.005, kappa = 0.25;
  const auto grid = harmonics::uniform_circle_grid(n);
  const Eigen::MatrixXd x = harmonics::coords_matrix(grid);
  const Eigen::VectorXd y = cosine_labels(n, 2);
  const auto gram = kernels::gram_matrix(grid, kernels::KernelVariant::WithBias);
  const auto forecast = dynamics::build_forecast(gram, y, eta);

  std::vector<double> mean_trace(static_cast<std::size_t>(horizon) + 1, 0.0);
  nets::TrainConfig config;
  config.eta = eta;
  config.max_epochs = horizon;
  config.stop_fraction = 1e-300;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    auto net = nets::init_two_layer(m, 2, kappa, true, seed);
    const auto run = nets::train_full_batch(net, x, y, config);
    REQUIRE(run.residual_trace.size() == mean_trace.size());
    for (std::size_t t = 0; t < mean_trace.size(); ++t)
      mean_trace[t] += run.residual_trace[t] / seeds;
  }
  for (long t = 0; t <= horizon; ++t) {
    const double predicted = dynamics::residual_at(forecast, t);
    CHECK(std::abs(mean_trace[static_cast<std::size_t>(t)] - predicted) <=
          0.10 * predicted);
  }
}

TEST_CASE("threshold_class_labels") {
  const auto grid = harmonics::uniform_circle_grid(100000);
  const auto [kept, labels] = nets::threshold_class_labels(grid, 1);
  REQUIRE(kept.size() == static_cast<std::size_t>(labels.size()));
  // theta = 0 is kept with label +1.
  CHECK(labels[0] == 1.0);
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    CHECK(std::abs(labels[i]) == 1.0);
  // Kept fraction approaches 2 acos(2/3) / pi.
  const double expected = 2.0 * std::acos(2.0 / 3.0) / M_PI;
  CHECK(static_cast<double>(kept.size()) / 100000.0 ==
        doctest::Approx(expected).epsilon(1e-3));

  // Same fraction at higher frequency.
  const auto [kept5, labels5] = nets::threshold_class_labels(grid, 5);
  CHECK(static_cast<double>(kept5.size()) / 100000.0 ==
        doctest::Approx(expected).epsilon(1e-3));

  CHECK_THROWS_AS(nets::threshold_class_labels(grid, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(nets::threshold_class_labels(grid, 0), std::invalid_argument);
}
