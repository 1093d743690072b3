#ifndef SPECBIAS_TESTS_TEST_UTIL_HPP
#define SPECBIAS_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

// Test-side quadrature and special-function oracles. Kept independent of
// the library implementations they are used to check.
namespace test_util {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre on [a, b] via Newton iteration on P_n.
inline GaussRule gauss_legendre(int n, double a, double b) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const double mid = (a + b) / 2.0, half = (b - a) / 2.0;
    rule.nodes[i] = mid - half * x;
    rule.weights[i] = w * half;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[n - 1 - i] = w * half;
  }
  return rule;
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int nodes = 256) {
  const GaussRule rule = gauss_legendre(nodes, a, b);
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) acc += rule.weights[i] * f(rule.nodes[i]);
  return acc;
}

// The Gegenbauer polynomial from its derivative definition, expanded
// symbolically: the k-th derivative of (1-t^2)^p is
// sum_q (-1)^q C(p,q) (2q)!/(2q-k)! t^{2q-k}. Valid for even d and
// |t| < 1 (d > 2) or any |t| <= 1 (d = 2). Small k only; this is the
// unstable form the recurrence is checked against.
inline double gegenbauer_from_derivative_form(int k, int d, double t) {
  const int p = k + (d - 2) / 2;
  double sum = 0.0;
  for (int q = (k + 1) / 2; q <= p; ++q) {
    double binom = 1.0;
    for (int j = 1; j <= q; ++j) binom = binom * (p - q + j) / j;
    double falling = 1.0;  // (2q)!/(2q-k)!
    for (int j = 2 * q - k + 1; j <= 2 * q; ++j) falling *= j;
    const double sign = q % 2 == 0 ? 1.0 : -1.0;
    sum += sign * binom * falling * std::pow(t, 2 * q - k);
  }
  double gamma_ratio = 1.0;  // Gamma(d/2) / Gamma(k + d/2), even d
  for (int j = d / 2; j < k + d / 2; ++j) gamma_ratio /= j;
  const double prefactor =
      (k % 2 == 0 ? 1.0 : -1.0) / std::pow(2.0, k) * gamma_ratio;
  const double weight = std::pow(1.0 - t * t, (d - 2) / 2.0);
  return prefactor * sum / weight;
}

// Ordinary least squares slope of y against x.
inline std::pair<double, double> ols_slope_intercept(const std::vector<double>& x,
                                                     const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

}  // namespace test_util

#endif  // SPECBIAS_TESTS_TEST_UTIL_HPP
