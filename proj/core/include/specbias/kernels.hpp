#ifndef SPECBIAS_KERNELS_HPP
#define SPECBIAS_KERNELS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>

#include "specbias/harmonics.hpp"

namespace specbias::kernels {

using harmonics::UnitPoint;

/// Which infinite-width kernel: the bias-free K or the bias-adjusted
/// kernel Kbar that arises from the homogeneous lift (x,1)/sqrt(2).
enum class KernelVariant { BiasFree, WithBias };

const char* variant_name(KernelVariant v);

/// K(t) = t (pi - acos t) / (2 pi). Input clamped to [-1, 1].
double k_infinity(double t);

/// Kbar(t) = (t+1) (pi - acos t) / (4 pi). Input clamped to [-1, 1].
double k_bar_infinity(double t);

/// The four pieces K1 = t/2, K2 = -t acos(t)/(2 pi), K3 = 1/2,
/// K4 = -acos(t)/(2 pi). K1+K2 = K and (K1+K2+K3+K4)/2 = Kbar, exactly.
struct KernelParts {
  double k1, k2, k3, k4;
};
KernelParts kernel_parts(double t);

/// x on S^d -> (x, 1)/sqrt(2), a unit vector one sphere dimension up.
UnitPoint homogeneous_lift(const UnitPoint& x);

/// Dense symmetric PSD kernel matrix with provenance. Diagonal entries
/// are 1/2 under both variants.
struct GramMatrix {
  Eigen::MatrixXd entries;
  KernelVariant variant = KernelVariant::BiasFree;
  int sphere_dim = 1;

  Eigen::Index n() const { return entries.rows(); }
};

/// entries_ij = K(x_i . x_j) or Kbar(x_i . x_j).
GramMatrix gram_matrix(std::span<const UnitPoint> points, KernelVariant variant);

/// Finite-width Monte-Carlo Gram: m hidden units with w ~ N(0, kappa^2 I)
/// (bias coordinates start at 0 under WithBias), activity indicator
/// 1[w.x >= 0], and the lifted inner product (x.x'+1)/2 under WithBias.
/// The m x n feature matrix is never materialized; units are streamed.
/// The result is kappa-independent: indicators are scale-invariant.
GramMatrix empirical_gram(std::span<const UnitPoint> points, KernelVariant variant,
                          int m, double kappa, std::uint64_t seed);

/// Dense binary format: 16-byte header (uint64 n, uint64 variant tag)
/// followed by n*n little-endian float64 entries, row-major.
void write_gram_binary(const GramMatrix& gram, const std::filesystem::path& file);
GramMatrix read_gram_binary(const std::filesystem::path& file);

/// Plain CSV (one row per matrix row) for inspection.
void write_gram_csv(const GramMatrix& gram, const std::filesystem::path& file);

}  // namespace specbias::kernels

#endif  // SPECBIAS_KERNELS_HPP
