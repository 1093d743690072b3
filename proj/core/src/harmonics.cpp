#include "specbias/harmonics.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

#include "specbias/rng.hpp"

namespace specbias::harmonics {

UnitPoint make_unit_point(Eigen::VectorXd coords, int sphere_dim) {
  if (sphere_dim < 1) throw std::invalid_argument("sphere_dim must be >= 1");
  if (coords.size() < sphere_dim + 1)
    throw std::invalid_argument("coords shorter than d+1");
  if (std::abs(coords.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("point is not unit norm");
  return UnitPoint{std::move(coords), sphere_dim};
}

double gegenbauer(int k, int d, double t) {
  if (k < 0) throw std::invalid_argument("gegenbauer: k must be >= 0");
  if (d < 2) throw std::invalid_argument("gegenbauer: d must be >= 2");
  if (std::abs(t) > 1.0 + 1e-12)
    throw std::domain_error("gegenbauer: |t| > 1");
  t = clamp_unit(t);
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (int j = 1; j < k; ++j) {
    const double next = ((2 * j + d - 1) * t * cur - j * prev) / (j + d - 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

double circle_harmonic(int k, double phase, double theta) {
  return std::cos(k * theta - phase);
}

double circle_angle(const UnitPoint& p) {
  if (p.sphere_dim != 1 || p.coords.size() != 2)
    throw std::invalid_argument("circle_angle: need an intrinsic S^1 point");
  return std::atan2(p.coords[1], p.coords[0]);
}

Eigen::VectorXd harmonic_labels(std::span<const UnitPoint> points,
                                const HarmonicLabelSpec& spec) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  if (spec.sphere_dim == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].sphere_dim != 1)
        throw std::invalid_argument("harmonic_labels: sphere_dim mismatch");
      y[static_cast<Eigen::Index>(i)] =
          circle_harmonic(spec.frequency, spec.phase, circle_angle(points[i]));
    }
    return y;
  }
  const auto& pole = spec.pole.coords;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (p.sphere_dim != spec.sphere_dim || p.coords.size() != pole.size())
      throw std::invalid_argument("harmonic_labels: sphere_dim mismatch");
    const double t = clamp_unit(p.coords.dot(pole));
    y[static_cast<Eigen::Index>(i)] =
        gegenbauer(spec.frequency, spec.sphere_dim, t);
  }
  return y;
}

std::vector<UnitPoint> uniform_circle_grid(int n) {
  if (n < 2) throw std::invalid_argument("uniform_circle_grid: n must be >= 2");
  std::vector<UnitPoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  const double step = 2.0 * M_PI / n;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd c(2);
    c << std::cos(step * i), std::sin(step * i);
    pts.push_back(UnitPoint{std::move(c), 1});
  }
  return pts;
}

std::vector<UnitPoint> sample_uniform_sphere(int n, int d, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_uniform_sphere: n must be >= 1");
  if (d < 1) throw std::invalid_argument("sample_uniform_sphere: d must be >= 1");
  SplitMix64 rng(seed);
  std::vector<UnitPoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd c(d + 1);
    double norm2;
    do {
      for (int j = 0; j <= d; ++j) c[j] = rng.next_gaussian();
      norm2 = c.squaredNorm();
    } while (norm2 < 1e-24);  // a zero draw has probability ~0 but would not normalize
    c /= std::sqrt(norm2);
    pts.push_back(UnitPoint{std::move(c), d});
  }
  return pts;
}

std::vector<UnitPoint> embed_random_rotation(std::span<const UnitPoint> points,
                                             int ambient_dim,
                                             std::uint64_t seed) {
  if (points.empty()) return {};
  const int intrinsic = static_cast<int>(points.front().coords.size());
  if (ambient_dim < intrinsic)
    throw std::invalid_argument("embed_random_rotation: ambient_dim < d+1");

  SplitMix64 rng(seed);
  Eigen::MatrixXd g(ambient_dim, intrinsic);
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.next_gaussian();
  // Thin Q factor: ambient_dim x intrinsic with orthonormal columns.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(ambient_dim, intrinsic);

  std::vector<UnitPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (p.coords.size() != intrinsic)
      throw std::invalid_argument("embed_random_rotation: mixed coordinate sizes");
    out.push_back(UnitPoint{q * p.coords, p.sphere_dim});
  }
  return out;
}

Eigen::MatrixXd coords_matrix(std::span<const UnitPoint> points) {
  if (points.empty()) return {};
  const Eigen::Index dim = points.front().coords.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(points.size()), dim);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].coords.size() != dim)
      throw std::invalid_argument("coords_matrix: mixed coordinate sizes");
    x.row(static_cast<Eigen::Index>(i)) = points[i].coords.transpose();
  }
  return x;
}

}  // namespace specbias::harmonics
