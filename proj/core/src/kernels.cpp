#include "specbias/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "specbias/rng.hpp"

namespace specbias::kernels {

using harmonics::clamp_unit;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

const char* variant_name(KernelVariant v) {
  return v == KernelVariant::BiasFree ? "bias_free" : "with_bias";
}

double k_infinity(double t) {
  t = clamp_unit(t);
  return t * (kPi - std::acos(t)) / (2.0 * kPi);
}

double k_bar_infinity(double t) {
  t = clamp_unit(t);
  return (t + 1.0) * (kPi - std::acos(t)) / (4.0 * kPi);
}

KernelParts kernel_parts(double t) {
  t = clamp_unit(t);
  const double ac = std::acos(t);
  return KernelParts{t / 2.0, -t * ac / (2.0 * kPi), 0.5, -ac / (2.0 * kPi)};
}

UnitPoint homogeneous_lift(const UnitPoint& x) {
  const double inv_sqrt2 = 0.7071067811865475244008443621048490;
  Eigen::VectorXd lifted(x.coords.size() + 1);
  lifted.head(x.coords.size()) = x.coords * inv_sqrt2;
  lifted[x.coords.size()] = inv_sqrt2;
  return UnitPoint{std::move(lifted), x.sphere_dim + 1};
}

GramMatrix gram_matrix(std::span<const UnitPoint> points, KernelVariant variant) {
  if (points.empty()) throw std::invalid_argument("gram_matrix: no points");
  const Eigen::MatrixXd x = harmonics::coords_matrix(points);
  const Eigen::Index n = x.rows();
  GramMatrix gram;
  gram.variant = variant;
  gram.sphere_dim = points.front().sphere_dim;
  gram.entries.resize(n, n);
  const Eigen::MatrixXd dots = x * x.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    // x_i . x_i = 1 by the UnitPoint invariant; pin the diagonal to the
    // exact K(1) = 1/2 instead of round-tripping through acos.
    gram.entries(i, i) = 0.5;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double t = clamp_unit(dots(i, j));
      const double v = variant == KernelVariant::BiasFree ? k_infinity(t)
                                                          : k_bar_infinity(t);
      gram.entries(i, j) = v;
      gram.entries(j, i) = v;
    }
  }
  return gram;
}

GramMatrix empirical_gram(std::span<const UnitPoint> points, KernelVariant variant,
                          int m, double kappa, std::uint64_t seed) {
  if (points.empty()) throw std::invalid_argument("empirical_gram: no points");
  if (m < 1) throw std::invalid_argument("empirical_gram: m must be >= 1");
  if (!(kappa > 0)) throw std::invalid_argument("empirical_gram: kappa must be > 0");

  const Eigen::MatrixXd x = harmonics::coords_matrix(points);
  const Eigen::Index n = x.rows();
  const Eigen::Index dim = x.cols();

  // Counts of co-active units per pair; the indicator uses w.x >= 0 with
  // the bias coordinate at 0, so it is the same for both variants.
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
  SplitMix64 rng(seed);
  Eigen::VectorXd w(dim);
  Eigen::VectorXd z(n);
  std::vector<Eigen::Index> active;
  active.reserve(static_cast<std::size_t>(n));
  for (int r = 0; r < m; ++r) {
    for (Eigen::Index j = 0; j < dim; ++j) w[j] = kappa * rng.next_gaussian();
    z.noalias() = x * w;
    active.clear();
    for (Eigen::Index i = 0; i < n; ++i)
      if (z[i] >= 0.0) active.push_back(i);
    for (std::size_t a = 0; a < active.size(); ++a)
      for (std::size_t b = 0; b <= a; ++b) counts(active[a], active[b]) += 1.0;
  }

  GramMatrix gram;
  gram.variant = variant;
  gram.sphere_dim = points.front().sphere_dim;
  gram.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double t = clamp_unit(x.row(i).dot(x.row(j)));
      const double inner = variant == KernelVariant::BiasFree ? t : (t + 1.0) / 2.0;
      const double v = inner * counts(i, j) / static_cast<double>(m);
      gram.entries(i, j) = v;
      gram.entries(j, i) = v;
    }
  }
  return gram;
}

void write_gram_binary(const GramMatrix& gram, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  const std::uint64_t n = static_cast<std::uint64_t>(gram.n());
  const std::uint64_t tag = gram.variant == KernelVariant::BiasFree ? 0 : 1;
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&tag), 8);
  // Row-major on disk; Eigen stores column-major, so emit row by row.
  std::vector<double> row(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < gram.n(); ++i) {
    for (Eigen::Index j = 0; j < gram.n(); ++j)
      row[static_cast<std::size_t>(j)] = gram.entries(i, j);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(double) * row.size()));
  }
  if (!out) throw std::runtime_error("short write to " + file.string());
}

GramMatrix read_gram_binary(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::uint64_t n = 0, tag = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&tag), 8);
  if (!in || tag > 1) throw std::runtime_error("bad gram header in " + file.string());
  GramMatrix gram;
  gram.variant = tag == 0 ? KernelVariant::BiasFree : KernelVariant::WithBias;
  gram.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> row(static_cast<std::size_t>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(sizeof(double) * row.size()));
    if (!in) throw std::runtime_error("truncated gram file " + file.string());
    for (std::uint64_t j = 0; j < n; ++j)
      gram.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          row[static_cast<std::size_t>(j)];
  }
  return gram;
}

void write_gram_csv(const GramMatrix& gram, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  char buf[32];
  for (Eigen::Index i = 0; i < gram.n(); ++i) {
    for (Eigen::Index j = 0; j < gram.n(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", gram.entries(i, j));
      out << buf << (j + 1 == gram.n() ? '\n' : ',');
    }
  }
}

}  // namespace specbias::kernels
