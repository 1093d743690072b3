#ifndef SPECBIAS_DYNAMICS_HPP
#define SPECBIAS_DYNAMICS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <span>

#include "specbias/kernels.hpp"

namespace specbias::dynamics {

using kernels::GramMatrix;

/// Eigenpairs of a Gram matrix plus the label projections; everything
/// needed to evaluate the closed-form residual curve of full-batch GD on
/// the linearized network, ||y - u(t)|| = (sum_i (1-eta l_i)^{2t} (v_i'y)^2)^{1/2}.
/// The probabilistic slack of that statement is not folded in; callers
/// report it separately.
struct LinearForecast {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::VectorXd projections;   // v_i' y, same order
  double learning_rate = 0.0;
  double initial_residual_norm = 0.0;  // ||y||
};

/// Eigendecomposes the Gram and projects the labels. Throws
/// std::invalid_argument on dimension mismatch and numerical_error when
/// eta * lambda_max >= 1 (the forecast recursion would diverge).
LinearForecast build_forecast(const GramMatrix& gram, const Eigen::VectorXd& labels,
                              double eta);

/// The forecast residual norm after t full-batch steps.
double residual_at(const LinearForecast& forecast, long t);

/// Residual target: fall to fraction `target_fraction` (plus slack) of
/// the initial norm.
struct ThresholdQuery {
  double target_fraction = 0.05;
  double slack = 0.0;
};

/// Sentinel for modes that never converge (lambda below 1e-12; the
/// odd-frequency null space is a genuine non-convergence, not a large
/// number).
inline constexpr std::int64_t kNeverConverges = -1;

/// Iterations for one eigenmode to fall to the target fraction:
/// ceil(-log(target+slack) / (eta*lambda)), the small-eta linearization.
/// With exact_mode, ceil(log(target+slack)/log(1-eta*lambda)) instead.
/// Throws std::domain_error unless 0 < eta*lambda < 1 (after the
/// lambda <= 1e-12 sentinel case).
std::int64_t iterations_to_fraction(double lambda, double eta,
                                    const ThresholdQuery& query,
                                    bool exact_mode = false);

/// Population-loss bound for a band-limited target with harmonic
/// amplitudes alpha_k (k starting at 1): sqrt(2 pi sum_k alpha_k^2 k^2 / n).
double generalization_bound(std::span<const double> alphas, int n);

}  // namespace specbias::dynamics

#endif  // SPECBIAS_DYNAMICS_HPP
