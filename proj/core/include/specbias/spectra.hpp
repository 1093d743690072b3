#ifndef SPECBIAS_SPECTRA_HPP
#define SPECBIAS_SPECTRA_HPP

#include <Eigen/Core>
#include <vector>

#include "specbias/kernels.hpp"

namespace specbias::spectra {

using kernels::GramMatrix;
using kernels::KernelVariant;

enum class SpectrumSource { ClosedForm, Quadrature, Matrix };

const char* source_name(SpectrumSource s);

/// One eigenvalue of the kernel: frequency k on S^d, under one variant,
/// computed by one of the three routes.
struct SpectrumEntry {
  int k = 0;
  int d = 1;
  KernelVariant variant = KernelVariant::BiasFree;
  SpectrumSource source = SpectrumSource::ClosedForm;
  double value = 0.0;
};

/// S^1 Fourier coefficients of the kernels: a_k (BiasFree) or c_k
/// (WithBias), by the four-case closed forms.
double circle_coefficient(KernelVariant variant, int k);

/// S^d eigenvalue for even d >= 2, by the alternating binomial sums.
/// The sums cancel catastrophically in doubles for k beyond ~25, so they
/// are evaluated in exact rational arithmetic and converted to floating
/// point once at the end. Throws std::invalid_argument for odd d (use
/// eigen_quadrature there).
double sphere_coefficient(KernelVariant variant, int k, int d);

/// Exact sign (-1, 0, +1) of sphere_coefficient, straight from the
/// rational value. Lets positivity be asserted at k where the magnitude
/// underflows any fixed-precision estimate.
int sphere_coefficient_sign(KernelVariant variant, int k, int d);

/// Funk-Hecke transform of the kernel at frequency k:
///   d >= 2:  Vol(S^{d-1}) * Int_{-1}^{1} K(t) P_{k,d}(t) (1-t^2)^{(d-2)/2} dt
///   d == 1:  (1/z_k) * Int_{-pi}^{pi} K(cos th) cos(k th) dth,
///            z_0 = 2 pi, z_k = pi.
/// Both are evaluated as Gauss-Legendre quadrature in the angle variable
/// (the integrand is smooth there), with node doubling from
/// `initial_nodes` until successive values differ by < 1e-10. Throws
/// numerical_error if that never happens.
double eigen_quadrature(KernelVariant variant, int k, int d, int initial_nodes = 64);

/// Surface area of S^{n}: 2 pi^{(n+1)/2} / Gamma((n+1)/2).
double sphere_surface(int n);

/// Funk-Hecke prefactor C1(d,k) = Vol(S^{d-1}) Gamma(d/2) (-1)^k
/// / (2^k Gamma(k + d/2)), even d.
double c1_constant(int d, int k);

/// The closed forms of the appendix's one-dimensional helper integrals,
/// all over [0, pi]: cos^n, sin^n, th cos^n(th) sin(th), th cos(th) sin^n(th).
enum class ReferenceIntegral { CosPow, SinPow, ThetaCosPowSin, ThetaCosSinPow };
double reference_integral(ReferenceIntegral which, int n);

/// Full symmetric eigendecomposition, eigenvalues descending, columns of
/// `vectors` the matching eigenvectors. Throws std::invalid_argument if
/// the matrix is asymmetric beyond 1e-10.
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};
EigenDecomposition matrix_spectrum(const GramMatrix& gram);

/// Circulant route for uniform circle grids: the frequency-k eigenvalue
/// of the Gram is sum_j K(theta_j) cos(k theta_j), read off the first row.
double circulant_eigenvalue(const GramMatrix& grid_gram, int k);

/// Least-squares slope of -log(coefficient) against log k over all k in
/// [k_max/2, k_max], i.e. the estimated decay exponent of the kernel
/// spectrum. d = 1 uses circle_coefficient; even d uses the exact
/// rational sphere_coefficient. For BiasFree the odd-k coefficients are
/// zero and only even k enter the fit.
double convergence_exponent(KernelVariant variant, int d, int k_max);

/// Closed-form + quadrature (and nothing else) table for reporting.
std::vector<SpectrumEntry> coefficient_table(const std::vector<int>& dims, int k_max,
                                             const std::vector<KernelVariant>& variants);

}  // namespace specbias::spectra

#endif  // SPECBIAS_SPECTRA_HPP
