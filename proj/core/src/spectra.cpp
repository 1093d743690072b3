#include "specbias/spectra.hpp"

#include <gmpxx.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "specbias/errors.hpp"
#include "specbias/harmonics.hpp"

namespace specbias::spectra {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// ----------------------------------------------------------------------
// Exact rational evaluation of the S^d closed forms (even d).
//
// Every eigenvalue factors as pi^{d/2} times a rational number. The
// alternating sum over q loses all significant digits in doubles once k
// grows past ~25, so the rational factor is carried exactly and
// converted to floating point once.

mpq_class binom_q(unsigned long n, unsigned long k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return mpq_class(b);
}

// C2(q,d,k) = (-1)^q C(p,q) (2q)!/(2q-k)!, with the falling factorial
// written as C(2q,k) k!.
mpq_class c2_term(unsigned long q, unsigned long p, unsigned long k,
                  const mpz_class& k_factorial) {
  mpz_class cpq, c2qk;
  mpz_bin_uiui(cpq.get_mpz_t(), p, q);
  mpz_bin_uiui(c2qk.get_mpz_t(), 2 * q, k);
  mpz_class v = cpq * c2qk * k_factorial;
  if (q % 2 == 1) v = -v;
  return mpq_class(v);
}

// C1(d,k) = pi^{d/2} * 2 (-1)^k / (2^k (k+d/2-1)!); this is the rational
// factor. Uses the surface area Vol(S^{d-1}) = 2 pi^{d/2} / Gamma(d/2);
// the Gegenbauer prefactor contributes Gamma(d/2)/(2^k Gamma(k+d/2)).
mpq_class c1_rational(int d, int k) {
  mpz_class fact;
  mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(k + d / 2 - 1));
  mpz_class denom;
  mpz_ui_pow_ui(denom.get_mpz_t(), 2, static_cast<unsigned long>(k));
  denom *= fact;
  mpq_class r(2, 1);
  r /= mpq_class(denom);
  r.canonicalize();
  if (k % 2 == 1) r = -r;
  return r;
}

// 1 - C(n, n/2) / 2^n  (n even).
mpq_class one_minus_central(unsigned long n) {
  mpz_class central;
  mpz_bin_uiui(central.get_mpz_t(), n, n / 2);
  mpz_class pow2;
  mpz_ui_pow_ui(pow2.get_mpz_t(), 2, n);
  mpq_class r(central);
  r /= mpq_class(pow2);
  r.canonicalize();
  return 1 - r;
}

mpq_class a_rational_k0(int d) {
  mpz_class cd;
  mpz_bin_uiui(cd.get_mpz_t(), static_cast<unsigned long>(d),
               static_cast<unsigned long>(d / 2));
  mpz_class denom;
  mpz_ui_pow_ui(denom.get_mpz_t(), 2, static_cast<unsigned long>(d + 1));
  denom *= d;
  mpq_class r(cd);
  r /= mpq_class(denom);
  r.canonicalize();
  return c1_rational(d, 0) * r;
}

mpq_class b_rational_k0(int d) {
  // K3 part: (1/2) Int (1-t^2)^{(d-2)/2} = 2^{d-1} / (d C(d-1, d/2)).
  mpz_class cdm1;
  mpz_bin_uiui(cdm1.get_mpz_t(), static_cast<unsigned long>(d - 1),
               static_cast<unsigned long>(d / 2));
  mpz_class num;
  mpz_ui_pow_ui(num.get_mpz_t(), 2, static_cast<unsigned long>(d - 1));
  mpq_class k3(num);
  k3 /= mpq_class(cdm1 * d);
  k3.canonicalize();
  // K4 part: -(1/2) sum_q (-1)^q C((d-2)/2, q) / (2q+1).
  mpq_class k4(0);
  const unsigned long top = static_cast<unsigned long>((d - 2) / 2);
  for (unsigned long q = 0; q <= top; ++q) {
    mpq_class t = binom_q(top, q) / mpq_class(2 * q + 1);
    t.canonicalize();
    k4 += (q % 2 == 0) ? t : -t;
  }
  return c1_rational(d, 0) * (k3 - k4 / 2);
}

// The per-q bracket for K^inf (a-series) and for the bias-only part
// (b-series); see the even/odd split of the t^{2q-k} moments of the
// kernel pieces.
mpq_class a_bracket(unsigned long q, unsigned long k) {
  const unsigned long n2 = 2 * q - k + 2;
  if (k % 2 == 0) return one_minus_central(n2) / mpq_class(2 * n2);
  return mpq_class(1, 2 * n2);
}

mpq_class b_bracket(unsigned long q, unsigned long k) {
  const unsigned long n1 = 2 * q - k + 1;
  if (k % 2 == 0) return mpq_class(-1, static_cast<long>(2 * n1));
  return one_minus_central(n1) / mpq_class(2 * n1);
}

enum class Series { KernelOnly, BiasAdjusted };

mpq_class sphere_rational(Series series, int k, int d) {
  if (d < 2 || d % 2 != 0)
    throw std::invalid_argument("sphere_coefficient: d must be even and >= 2");
  if (k < 0) throw std::invalid_argument("sphere_coefficient: k must be >= 0");
  if (k == 0) {
    const mpq_class a0 = a_rational_k0(d);
    if (series == Series::KernelOnly) return a0;
    return (a0 + b_rational_k0(d)) / 2;
  }
  const unsigned long uk = static_cast<unsigned long>(k);
  const unsigned long p = uk + static_cast<unsigned long>((d - 2) / 2);
  mpz_class k_factorial;
  mpz_fac_ui(k_factorial.get_mpz_t(), uk);
  mpq_class sum(0);
  for (unsigned long q = (uk + 1) / 2; q <= p; ++q) {
    mpq_class bracket = a_bracket(q, uk);
    if (series == Series::BiasAdjusted) bracket += b_bracket(q, uk);
    sum += c2_term(q, p, uk, k_factorial) * bracket;
  }
  mpq_class r = c1_rational(d, k) * sum;
  if (series == Series::BiasAdjusted) r /= 2;
  r.canonicalize();
  return r;
}

double pi_power_half_dim(int d) {
  return std::pow(kPi, static_cast<double>(d) / 2.0);
}

// ----------------------------------------------------------------------
// Gauss-Legendre rule on [0, pi], cached per node count.

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadRule build_rule(int n) {
  QuadRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
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
    // Map [-1,1] -> [0,pi].
    rule.nodes[static_cast<std::size_t>(i)] = (1.0 - x) * kPi / 2.0;
    rule.weights[static_cast<std::size_t>(i)] = w * kPi / 2.0;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = (1.0 + x) * kPi / 2.0;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w * kPi / 2.0;
  }
  return rule;
}

const QuadRule& cached_rule(int n) {
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

double kernel_value(KernelVariant variant, double t) {
  return variant == KernelVariant::BiasFree ? kernels::k_infinity(t)
                                            : kernels::k_bar_infinity(t);
}

// One quadrature pass at a fixed node count, in the angle variable where
// the kernel is analytic (K(cos th) is polynomial-in-th times cosines).
double quad_pass(KernelVariant variant, int k, int d, int n_nodes) {
  const QuadRule& rule = cached_rule(n_nodes);
  double acc = 0.0;
  if (d == 1) {
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double th = rule.nodes[i];
      acc += rule.weights[i] * kernel_value(variant, std::cos(th)) * std::cos(k * th);
    }
    const double zk = k == 0 ? 2.0 * kPi : kPi;
    return 2.0 * acc / zk;
  }
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double th = rule.nodes[i];
    const double ct = std::cos(th);
    acc += rule.weights[i] * kernel_value(variant, ct) *
           harmonics::gegenbauer(k, d, ct) *
           std::pow(std::sin(th), static_cast<double>(d - 1));
  }
  return sphere_surface(d - 1) * acc;
}

}  // namespace

const char* source_name(SpectrumSource s) {
  switch (s) {
    case SpectrumSource::ClosedForm: return "closed_form";
    case SpectrumSource::Quadrature: return "quadrature";
    case SpectrumSource::Matrix: return "matrix";
  }
  return "?";
}

double circle_coefficient(KernelVariant variant, int k) {
  if (k < 0) throw std::invalid_argument("circle_coefficient: k must be >= 0");
  const double kk = static_cast<double>(k) * k;
  if (variant == KernelVariant::BiasFree) {
    if (k == 0) return 1.0 / (kPi * kPi);
    if (k == 1) return 0.25;
    if (k % 2 == 0) return 2.0 * (kk + 1.0) / (kPi * kPi * (kk - 1.0) * (kk - 1.0));
    return 0.0;
  }
  if (k == 0) return 1.0 / (2.0 * kPi * kPi) + 0.125;
  if (k == 1) return 1.0 / (kPi * kPi) + 0.125;
  if (k % 2 == 0) return (kk + 1.0) / (kPi * kPi * (kk - 1.0) * (kk - 1.0));
  return 1.0 / (kPi * kPi * kk);
}

double sphere_coefficient(KernelVariant variant, int k, int d) {
  const Series s = variant == KernelVariant::BiasFree ? Series::KernelOnly
                                                      : Series::BiasAdjusted;
  const mpq_class r = sphere_rational(s, k, d);
  return r.get_d() * pi_power_half_dim(d);
}

int sphere_coefficient_sign(KernelVariant variant, int k, int d) {
  const Series s = variant == KernelVariant::BiasFree ? Series::KernelOnly
                                                      : Series::BiasAdjusted;
  return sgn(sphere_rational(s, k, d));
}

double sphere_surface(int n) {
  return 2.0 * std::pow(kPi, (n + 1) / 2.0) / std::tgamma((n + 1) / 2.0);
}

double c1_constant(int d, int k) {
  if (d < 2 || d % 2 != 0)
    throw std::invalid_argument("c1_constant: d must be even and >= 2");
  const double magnitude =
      sphere_surface(d - 1) *
      std::exp(std::lgamma(d / 2.0) - std::lgamma(k + d / 2.0) -
               k * std::log(2.0));
  return k % 2 == 0 ? magnitude : -magnitude;
}

double eigen_quadrature(KernelVariant variant, int k, int d, int initial_nodes) {
  if (k < 0 || d < 1) throw std::invalid_argument("eigen_quadrature: bad k or d");
  if (initial_nodes < 4) initial_nodes = 4;
  constexpr int kMaxNodes = 1 << 17;
  constexpr double kTol = 1e-10;
  int n = initial_nodes;
  double prev = quad_pass(variant, k, d, n);
  while (n <= kMaxNodes / 2) {
    n *= 2;
    const double cur = quad_pass(variant, k, d, n);
    if (std::abs(cur - prev) < kTol) return cur;
    prev = cur;
  }
  throw numerical_error("eigen_quadrature: node doubling did not converge for k=" +
                        std::to_string(k) + ", d=" + std::to_string(d));
}

double reference_integral(ReferenceIntegral which, int n) {
  if (n < 0) throw std::invalid_argument("reference_integral: n must be >= 0");
  const auto central = [](int m) {  // C(m, m/2) as double, m even
    double v = 1.0;
    for (int j = 1; j <= m / 2; ++j) v = v * (m / 2 + j) / j;
    return v;
  };
  switch (which) {
    case ReferenceIntegral::CosPow:
      if (n % 2 == 1) return 0.0;
      return kPi * central(n) / std::pow(2.0, n);
    case ReferenceIntegral::SinPow:
      if (n % 2 == 0) return kPi * central(n) / std::pow(2.0, n);
      {
        double c = 1.0;  // C(n, (n+1)/2)
        for (int j = 1; j <= (n - 1) / 2; ++j) c = c * ((n + 1) / 2 + j) / j;
        return std::pow(2.0, n + 1) / ((n + 1) * c);
      }
    case ReferenceIntegral::ThetaCosPowSin:
      if (n % 2 == 0) return kPi / (n + 1);
      return kPi / (n + 1) * (-1.0 + central(n + 1) / std::pow(2.0, n + 1));
    case ReferenceIntegral::ThetaCosSinPow:
      if (n % 2 == 1) return -kPi * central(n + 1) / ((n + 1) * std::pow(2.0, n + 1));
      {
        double c = 1.0;  // C(n+1, (n+2)/2)
        const int m = n + 1;
        const int h = (n + 2) / 2;
        for (int j = 1; j <= m - h; ++j) c = c * (h + j) / j;
        return -std::pow(2.0, n + 2) / (static_cast<double>(n + 1) * (n + 2) * c);
      }
  }
  throw std::invalid_argument("reference_integral: unknown integral");
}

EigenDecomposition matrix_spectrum(const GramMatrix& gram) {
  const Eigen::MatrixXd& h = gram.entries;
  if (h.rows() != h.cols())
    throw std::invalid_argument("matrix_spectrum: matrix is not square");
  const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    throw std::invalid_argument("matrix_spectrum: asymmetry above 1e-10");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      (h + h.transpose()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw numerical_error("matrix_spectrum: eigensolver failed");
  const Eigen::Index n = h.rows();
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {  // ascending -> descending
    out.values[i] = solver.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

double circulant_eigenvalue(const GramMatrix& grid_gram, int k) {
  const Eigen::Index n = grid_gram.n();
  if (n < 1) throw std::invalid_argument("circulant_eigenvalue: empty gram");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    acc += grid_gram.entries(0, j) *
           std::cos(2.0 * kPi * k * static_cast<double>(j) / static_cast<double>(n));
  return acc;
}

double convergence_exponent(KernelVariant variant, int d, int k_max) {
  if (k_max < 100)
    throw std::invalid_argument("convergence_exponent: k_max must be >= 100");
  if (d != 1 && (d < 2 || d % 2 != 0))
    throw std::invalid_argument("convergence_exponent: d must be 1 or even");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int k = k_max / 2; k <= k_max; ++k) {
    if (variant == KernelVariant::BiasFree && k % 2 == 1) continue;
    const double c = d == 1 ? circle_coefficient(variant, k)
                            : sphere_coefficient(variant, k, d);
    if (!(c > 0)) throw numerical_error("convergence_exponent: non-positive coefficient");
    const double x = std::log(static_cast<double>(k));
    const double y = -std::log(c);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

std::vector<SpectrumEntry> coefficient_table(const std::vector<int>& dims, int k_max,
                                             const std::vector<KernelVariant>& variants) {
  std::vector<SpectrumEntry> table;
  for (int d : dims) {
    for (KernelVariant v : variants) {
      for (int k = 0; k <= k_max; ++k) {
        if (d == 1) {
          table.push_back({k, d, v, SpectrumSource::ClosedForm,
                           circle_coefficient(v, k)});
        } else if (d % 2 == 0) {
          table.push_back({k, d, v, SpectrumSource::ClosedForm,
                           sphere_coefficient(v, k, d)});
        }
        table.push_back({k, d, v, SpectrumSource::Quadrature,
                         eigen_quadrature(v, k, d)});
      }
    }
  }
  return table;
}

}  // namespace specbias::spectra
