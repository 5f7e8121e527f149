#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "lena/errors.hpp"

namespace lena {

/// splitmix64 finalizer; used for seed mixing and stream derivation.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic random stream. All floating-point transforms are
/// hand-rolled on top of mt19937_64 so a (seed, draw sequence) pair
/// reproduces bit-identical values on any conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1].
  double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * 3.14159265358979323846 * u2;
    spare_ = mag * std::sin(ang);
    have_spare_ = true;
    return mag * std::cos(ang);
  }

  /// Uniform integer in [0, n) via rejection sampling (no modulo bias).
  std::int64_t uniform_index(std::int64_t n) {
    require(n > 0, Errc::invalid_argument, "uniform_index: n must be positive");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<std::int64_t>(x % un);
  }

  Eigen::VectorXd gaussian(int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal();
    return v;
  }

  /// Uniform draw from the solid ball of given radius:
  /// radius * u^(1/dim) * g/||g|| with g standard Gaussian, u uniform.
  /// Draw order is fixed (gaussian vector first, then u).
  Eigen::VectorXd ball(int dim, double radius) {
    Eigen::VectorXd g = gaussian(dim);
    double norm = g.norm();
    while (norm == 0.0) {
      g = gaussian(dim);
      norm = g.norm();
    }
    const double u = uniform();
    const double scale = radius * std::pow(u, 1.0 / dim) / norm;
    return scale * g;
  }

  /// Derive an independent child stream. Children with distinct tags
  /// (and the parent) are decorrelated by splitmix64 mixing.
  Rng split(std::uint64_t tag) const { return Rng(mix64(seed_ ^ mix64(tag ^ 0xa0761d6478bd642fULL))); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lena
