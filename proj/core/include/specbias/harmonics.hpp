#ifndef SPECBIAS_HARMONICS_HPP
#define SPECBIAS_HARMONICS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

namespace specbias::harmonics {

/// A point on the hypersphere S^d. `coords` has length d+1 when the
/// point is expressed intrinsically, or D >= d+1 after an ambient
/// embedding (all points of a dataset share one (d+1)-dimensional
/// subspace in that case). The Euclidean norm is always 1 to 1e-12.
struct UnitPoint {
  Eigen::VectorXd coords;
  int sphere_dim = 1;
};

/// Validating constructor: checks the unit-norm invariant.
UnitPoint make_unit_point(Eigen::VectorXd coords, int sphere_dim);

/// Gegenbauer polynomial P_{k,d}(t), normalized so P_{k,d}(1) = 1.
/// Reduces to the Legendre family at d = 2. Evaluated by the three-term
/// recurrence P_{j+1} = ((2j+d-1) t P_j - j P_{j-1}) / (j+d-1).
/// Throws std::invalid_argument for d < 2 and std::domain_error for
/// |t| > 1 + 1e-12; t is clamped to [-1, 1] inside that slack.
double gegenbauer(int k, int d, double t);

/// cos(k*theta - phase); the S^1 label basis.
double circle_harmonic(int k, double phase, double theta);

/// Label description: frequency k plus, on S^1, a phase, or, on S^d for
/// d >= 2, the pole of the zonal harmonic.
struct HarmonicLabelSpec {
  int frequency = 0;
  int sphere_dim = 1;
  double phase = 0.0;  // d == 1 only
  UnitPoint pole;      // d >= 2 only
};

/// y_i = cos(k*theta_i - phase) on S^1, or P_{k,d}(x_i . pole) on S^d.
/// Throws std::invalid_argument on dimension mismatch.
Eigen::VectorXd harmonic_labels(std::span<const UnitPoint> points,
                                const HarmonicLabelSpec& spec);

/// n points at angles 2*pi*i/n on the circle. n >= 2.
std::vector<UnitPoint> uniform_circle_grid(int n);

/// n i.i.d. uniform points on S^d: normalized (d+1)-dimensional Gaussian
/// draws from a SplitMix64 stream. Identical seed, identical output.
std::vector<UnitPoint> sample_uniform_sphere(int n, int d, std::uint64_t seed);

/// Applies one shared orthonormal (d+1) -> ambient_dim isometry, the Q
/// factor of a seeded Gaussian matrix. Pairwise inner products are
/// preserved to 1e-12. Throws std::invalid_argument if ambient_dim < d+1.
std::vector<UnitPoint> embed_random_rotation(std::span<const UnitPoint> points,
                                             int ambient_dim,
                                             std::uint64_t seed);

/// Row i = coords of point i. All points must share one coordinate
/// length; throws std::invalid_argument otherwise.
Eigen::MatrixXd coords_matrix(std::span<const UnitPoint> points);

/// Angle of an intrinsic S^1 point.
double circle_angle(const UnitPoint& p);

/// Clamp a dot product into [-1, 1] before acos/Gegenbauer; inner
/// products of nominally-unit vectors drift past the endpoints by a few
/// ulp near antipodes.
inline double clamp_unit(double t) { return t < -1.0 ? -1.0 : (t > 1.0 ? 1.0 : t); }

}  // namespace specbias::harmonics

#endif  // SPECBIAS_HARMONICS_HPP
