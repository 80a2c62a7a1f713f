#ifndef AGEG_RANDOM_HPP
#define AGEG_RANDOM_HPP

// Counter-based random numbers. Every variate is a pure function of its key,
// so substreams can be consumed in any order without changing sample values.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

#include <Eigen/Dense>

namespace ageg {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_key(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

/// Uniform on the open interval (0, 1) with 53 random bits.
inline double uniform_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal keyed by `key` (Box-Muller, cosine branch).
inline double keyed_normal(std::uint64_t key) noexcept {
  const double u1 = uniform_open(mix64(key ^ 0x243f6a8885a308d3ULL));
  const double u2 = uniform_open(mix64(key ^ 0x13198a2e03707344ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Sequential generator for instance construction. Draw k of a given seed is
/// keyed_normal(hash(seed, k)), which keeps generated problems identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return hash_key({seed_, counter_++}); }
  double uniform() { return uniform_open(next_u64()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return keyed_normal(next_u64()); }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd a(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = normal();
    return a;
  }

  /// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
  Eigen::MatrixXd orthogonal(Eigen::Index n) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(normal_matrix(n, n));
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j)
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace ageg

#endif  // AGEG_RANDOM_HPP
