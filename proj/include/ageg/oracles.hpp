#ifndef AGEG_ORACLES_HPP
#define AGEG_ORACLES_HPP

// Stochastic first-order oracles for the separable and coupling gradients.
//
// Gaussian noise is additive, state-independent and isotropic inside each
// block. The budgets are split evenly between the x block and the R-weighted
// y block, so both weighted variance bounds hold with equality:
//   E||df||^2 = sigma_str^2 / 2,   (1/R) E||dg||^2 = sigma_str^2 / 2,
// and likewise for (dh_x, dh_y) with sigma_bil.

#include <cmath>
#include <cstdint>
#include <vector>

#include "ageg/core_model.hpp"
#include "ageg/random.hpp"

namespace ageg {

enum class NoiseKind { kDeterministic, kGaussian };

struct NoiseModel {
  NoiseKind kind = NoiseKind::kDeterministic;
  double sigma_str = 0.0;
  double sigma_bil = 0.0;

  static NoiseModel deterministic() { return {}; }
  static NoiseModel gaussian(double sigma_str, double sigma_bil) {
    return {NoiseKind::kGaussian, sigma_str, sigma_bil};
  }
};

/// Three independent substreams: one xi per iteration, two zetas.
enum class Substream : std::uint32_t { kXi = 0, kZetaHalf = 1, kZetaFull = 2 };

struct SampleToken {
  Substream stream = Substream::kXi;
  std::uint64_t index = 0;

  friend bool operator==(const SampleToken&, const SampleToken&) = default;
};

struct SampleDraw {
  SampleToken xi_half;
  SampleToken zeta_half;
  SampleToken zeta_full;
};

enum class OracleKind { kF, kG, kHx, kHy };

struct OracleCall {
  OracleKind kind;
  SampleToken token;
};

/// `queries` follows the one-query-per-sample convention: a [grad f; grad g]
/// evaluation or a grad h evaluation each count once (three per AG-EG
/// iteration). `gradient_evals` counts every partial gradient separately.
struct OracleCounts {
  std::uint64_t draws = 0;
  std::uint64_t queries = 0;
  std::uint64_t gradient_evals = 0;
};

class OracleBundle {
 public:
  struct FgGradient {
    Vector f;
    Vector g;
  };
  struct HGradient {
    Vector x;
    Vector y;
  };

  OracleBundle(SaddleProblem problem, NoiseModel noise, double R, std::uint64_t seed)
      : problem_(std::move(problem)), noise_(noise), R_(R), seed_(seed) {
    if (!(R > 0.0)) throw Error(ErrorKind::kConfig, "oracles: R must be positive");
    if (noise.sigma_str < 0.0 || noise.sigma_bil < 0.0)
      throw Error(ErrorKind::kConfig, "noise: sigma must be nonnegative");
    if (noise.kind == NoiseKind::kDeterministic && (noise.sigma_str != 0.0 || noise.sigma_bil != 0.0))
      throw Error(ErrorKind::kConfig, "noise: deterministic kind requires zero sigma");
    const double n = static_cast<double>(problem_.n());
    const double m = static_cast<double>(problem_.m());
    scale_[0] = noise.sigma_str / std::sqrt(2.0 * n);
    scale_[1] = noise.sigma_str * std::sqrt(R / (2.0 * m));
    scale_[2] = noise.sigma_bil / std::sqrt(2.0 * n);
    scale_[3] = noise.sigma_bil * std::sqrt(R / (2.0 * m));
  }

  SampleDraw draw() {
    const std::uint64_t k = counts_.draws++;
    return {{Substream::kXi, k}, {Substream::kZetaHalf, k}, {Substream::kZetaFull, k}};
  }

  Vector grad_f(const Vector& x, SampleToken xi) {
    log(OracleKind::kF, xi);
    return add_noise(problem_.F().gradient(x), 0, xi);
  }
  Vector grad_g(const Vector& y, SampleToken xi) {
    log(OracleKind::kG, xi);
    return add_noise(problem_.G().gradient(y), 1, xi);
  }
  Vector grad_h_x(const Vector& x, const Vector& y, SampleToken zeta) {
    log(OracleKind::kHx, zeta);
    return add_noise(problem_.H().grad_x(x, y), 2, zeta);
  }
  Vector grad_h_y(const Vector& x, const Vector& y, SampleToken zeta) {
    log(OracleKind::kHy, zeta);
    return add_noise(problem_.H().grad_y(x, y), 3, zeta);
  }

  /// One query: [grad f(x; xi); grad g(y; xi)].
  FgGradient grad_fg(const Vector& x, const Vector& y, SampleToken xi) {
    ++counts_.queries;
    return {grad_f(x, xi), grad_g(y, xi)};
  }

  /// One query: both partial gradients of h(x, y; zeta).
  HGradient grad_h(const Vector& x, const Vector& y, SampleToken zeta) {
    ++counts_.queries;
    return {grad_h_x(x, y, zeta), grad_h_y(x, y, zeta)};
  }

  const SaddleProblem& problem() const { return problem_; }
  const NoiseModel& noise() const { return noise_; }
  double sigma_str() const { return noise_.sigma_str; }
  double sigma_bil() const { return noise_.sigma_bil; }
  double R() const { return R_; }
  std::uint64_t seed() const { return seed_; }
  const OracleCounts& counts() const { return counts_; }

  /// Per-coordinate noise standard deviation of block f, g, h_x or h_y.
  double block_scale(OracleKind kind) const { return scale_[static_cast<int>(kind)]; }

  void enable_call_log(bool on = true) { log_calls_ = on; }
  const std::vector<OracleCall>& call_log() const { return call_log_; }

 private:
  void log(OracleKind kind, SampleToken token) {
    ++counts_.gradient_evals;
    if (log_calls_) call_log_.push_back({kind, token});
  }

  Vector add_noise(Vector grad, std::uint64_t block, SampleToken token) const {
    const double s = scale_[block];
    if (s == 0.0) return grad;
    const std::uint64_t base =
        hash_key({seed_, static_cast<std::uint64_t>(token.stream), token.index, block});
    for (Index i = 0; i < grad.size(); ++i)
      grad(i) += s * keyed_normal(mix64(base ^ static_cast<std::uint64_t>(i)));
    return grad;
  }

  SaddleProblem problem_;
  NoiseModel noise_;
  double R_;
  std::uint64_t seed_;
  double scale_[4] = {0.0, 0.0, 0.0, 0.0};
  OracleCounts counts_;
  bool log_calls_ = false;
  std::vector<OracleCall> call_log_;
};

inline OracleBundle make_oracles(const SaddleProblem& problem, const NoiseModel& noise, double R,
                                 std::uint64_t seed) {
  return OracleBundle(problem, noise, R, seed);
}

}  // namespace ageg

#endif  // AGEG_ORACLES_HPP
