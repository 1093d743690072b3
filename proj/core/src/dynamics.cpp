#include "specbias/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "specbias/errors.hpp"
#include "specbias/spectra.hpp"

namespace specbias::dynamics {

LinearForecast build_forecast(const GramMatrix& gram, const Eigen::VectorXd& labels,
                              double eta) {
  if (labels.size() != gram.n())
    throw std::invalid_argument("build_forecast: labels/gram size mismatch");
  if (!(eta > 0)) throw std::invalid_argument("build_forecast: eta must be > 0");
  const spectra::EigenDecomposition eig = spectra::matrix_spectrum(gram);
  if (eta * eig.values[0] >= 1.0)
    throw numerical_error("build_forecast: eta * lambda_max >= 1, forecast diverges");
  LinearForecast f;
  f.eigenvalues = eig.values;
  f.projections = eig.vectors.transpose() * labels;
  f.learning_rate = eta;
  f.initial_residual_norm = labels.norm();
  return f;
}

double residual_at(const LinearForecast& forecast, long t) {
  if (t < 0) throw std::invalid_argument("residual_at: t must be >= 0");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < forecast.eigenvalues.size(); ++i) {
    const double factor = 1.0 - forecast.learning_rate * forecast.eigenvalues[i];
    const double proj = forecast.projections[i];
    acc += std::pow(factor * factor, static_cast<double>(t)) * proj * proj;
  }
  return std::sqrt(acc);
}

std::int64_t iterations_to_fraction(double lambda, double eta,
                                    const ThresholdQuery& query, bool exact_mode) {
  const double target = query.target_fraction + query.slack;
  if (!(query.target_fraction > 0 && query.target_fraction < 1) ||
      query.slack < 0 || !(target < 1))
    throw std::invalid_argument("iterations_to_fraction: bad threshold query");
  if (lambda <= 1e-12) return kNeverConverges;
  const double step = eta * lambda;
  if (!(step > 0) || step >= 1.0)
    throw std::domain_error("iterations_to_fraction: eta*lambda not in (0,1)");
  const double t = exact_mode ? std::log(target) / std::log1p(-step)
                              : -std::log(target) / step;
  return static_cast<std::int64_t>(std::ceil(t));
}

double generalization_bound(std::span<const double> alphas, int n) {
  if (n < 1) throw std::invalid_argument("generalization_bound: n must be >= 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double k = static_cast<double>(i + 1);  // alphas are indexed from k = 1
    acc += alphas[i] * alphas[i] * k * k;
  }
  return std::sqrt(2.0 * M_PI * acc / n);
}

}  // namespace specbias::dynamics
