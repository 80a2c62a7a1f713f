#ifndef AGEG_SCHEDULES_HPP
#define AGEG_SCHEDULES_HPP

// Stepsize and epoch-length schedules for the accelerated gradient /
// extragradient iteration, plus checkers for the stepsize properties the
// convergence analysis relies on.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ageg/core_model.hpp"

namespace ageg {

/// Inputs of the noise-aware stepsize. `sigma` is the combined noise level
/// (see combined_sigma) and `D0` the expected initial weighted squared
/// distance (or its upper estimate).
struct ScheduleParams {
  double r = 0.5;
  double beta = 1.0;
  double C = 1.0;
  long T = 1;
  double sigma = 0.0;
  double D0 = 0.0;
};

/// sigma = sqrt(sigma_str^2 / (1 - r) + (2 + 1/beta) sigma_bil^2) / sqrt(3).
/// A zero component contributes zero even when its coefficient is unbounded.
inline double combined_sigma(double sigma_str, double sigma_bil, double r, double beta) {
  if (sigma_str < 0.0 || sigma_bil < 0.0)
    throw Error(ErrorKind::kConfig, "sigma must be nonnegative");
  if (!(r > 0.0 && r <= 1.0)) throw Error(ErrorKind::kConfig, "r must lie in (0, 1]");
  if (beta < 0.0) throw Error(ErrorKind::kConfig, "beta must be nonnegative");
  double acc = 0.0;
  if (sigma_str > 0.0) {
    if (r >= 1.0) throw Error(ErrorKind::kConfig, "r must be < 1 when sigma_str > 0");
    acc += sigma_str * sigma_str / (1.0 - r);
  }
  if (sigma_bil > 0.0) {
    if (beta <= 0.0) throw Error(ErrorKind::kConfig, "beta must be > 0 when sigma_bil > 0");
    acc += (2.0 + 1.0 / beta) * sigma_bil * sigma_bil;
  }
  return std::sqrt(acc / 3.0);
}

inline double alpha_accel(long t) {
  if (t < 1) throw Error(ErrorKind::kDomain, "alpha_accel: t must be >= 1");
  return 2.0 / (static_cast<double>(t) + 1.0);
}

namespace detail {

inline void check_params(const ScheduleParams& p) {
  if (!(p.r > 0.0 && p.r <= 1.0)) throw Error(ErrorKind::kConfig, "schedule.r must lie in (0, 1]");
  if (!(p.beta >= 0.0)) throw Error(ErrorKind::kConfig, "schedule.beta must be nonnegative");
  if (!(p.C > 0.0)) throw Error(ErrorKind::kConfig, "schedule.C must be positive");
  if (p.T < 1) throw Error(ErrorKind::kConfig, "epoch length T must be >= 1");
  if (p.sigma < 0.0) throw Error(ErrorKind::kConfig, "sigma must be nonnegative");
  if (p.sigma > 0.0 && !(p.D0 > 0.0))
    throw Error(ErrorKind::kConfig, "stepsize undefined: sigma > 0 requires D0 > 0");
}

}  // namespace detail

/// The noise term sigma [T (T+1)^2]^(1/2) / (C sqrt(D0)) of the stepsize
/// denominator; zero in the noiseless case.
inline double noise_box(const ScheduleParams& p) {
  detail::check_params(p);
  if (p.sigma == 0.0) return 0.0;
  const double T = static_cast<double>(p.T);
  return p.sigma * std::sqrt(T) * (T + 1.0) / (p.C * std::sqrt(p.D0));
}

/// Common difference of the arithmetic sequence t / eta_t.
inline double eta_slope(const RescaledConstants& c, const ScheduleParams& p) {
  return std::sqrt((1.0 + p.beta) / p.r) * c.L_bil;
}

/// eta_t = t / ( max(2 L_Str / r, box) + sqrt((1 + beta) / r) L_Bil t )
inline double eta_bar(long t, const RescaledConstants& c, const ScheduleParams& p) {
  if (t < 1) throw Error(ErrorKind::kDomain, "eta_bar: t must be >= 1");
  const double base = std::max(2.0 / p.r * c.L_str, noise_box(p));
  const double td = static_cast<double>(t);
  const double denom = base + eta_slope(c, p) * td;
  if (!(denom > 0.0))
    throw Error(ErrorKind::kDegenerateProblem, "eta_bar: zero stepsize denominator");
  return td / denom;
}

/// Constant extragradient stepsize for bilinear games, sqrt(R / lambda_max(B'B)).
inline double eta_bilinear(double lambda_max, double R) {
  if (!(lambda_max > 0.0))
    throw Error(ErrorKind::kDegenerateProblem, "eta_bilinear: lambda_max(B'B) = 0");
  return std::sqrt(R / lambda_max);
}

inline double eta_bilinear(const RescaledConstants& c) {
  if (!(c.L_bil > 0.0)) throw Error(ErrorKind::kDegenerateProblem, "eta_bilinear: L_Bil = 0");
  return 1.0 / c.L_bil;
}

/// Largest admissible constant averaging weight of the direct method,
///   r / (1 + sqrt(1 + r (L_Str / mu + (1 + beta) L_Bil^2 / mu^2))),
/// for grouped constants.
inline double alpha_bar_direct(const RescaledConstants& c, double r, double beta) {
  if (!(c.mu_str > 0.0)) throw Error(ErrorKind::kInvalidRegime, "alpha_bar_direct: mu = 0");
  if (!(r > 0.0 && r <= 1.0)) throw Error(ErrorKind::kConfig, "r must lie in (0, 1]");
  if (beta < 0.0) throw Error(ErrorKind::kConfig, "beta must be nonnegative");
  const double mu = c.mu_str;
  const double kappa = c.L_str / mu + (1.0 + beta) * c.L_bil * c.L_bil / (mu * mu);
  return r / (1.0 + std::sqrt(1.0 + r * kappa));
}

struct DirectAlpha {
  double alpha = 0.0;
  bool clamped = false;  // the log branch was unusable and alpha_bar was taken
};

/// Constant weight minimizing the direct method's error bound over a known
/// horizon T: min((1 + log(D0 (L/mu + 1) mu^2 T / (3 sigma^2))) / T, alpha_bar).
inline DirectAlpha alpha_direct_optimized(const RescaledConstants& c, const ScheduleParams& p,
                                          double D0) {
  if (p.T < 1) throw Error(ErrorKind::kConfig, "alpha_direct_optimized: T must be >= 1");
  const double alpha_bar = alpha_bar_direct(c, p.r, p.beta);
  if (p.sigma == 0.0) return {alpha_bar, false};
  const double mu = c.mu_str;
  const double T = static_cast<double>(p.T);
  const double arg = D0 * (c.L_str / mu + 1.0) * mu * mu * T / (3.0 * p.sigma * p.sigma);
  if (!(arg > 0.0)) return {alpha_bar, true};
  const double candidate = (1.0 + std::log(arg)) / T;
  if (!(candidate > 0.0)) return {alpha_bar, true};
  return {std::min(candidate, alpha_bar), false};
}

/// Prefactor 1 + C sigma [T (T+1)^2]^(1/2) eta_1 / sqrt(D0) of the single-epoch
/// bound; lies in [1, 1 + C^2] and equals 1 without noise.
inline double prefactor_A(const RescaledConstants& c, const ScheduleParams& p) {
  if (p.sigma == 0.0) return 1.0;
  return 1.0 + p.C * p.C * noise_box(p) * eta_bar(1, c, p);
}

class Schedule {
 public:
  enum class Kind { kAcceleratedNesterov, kBilinearConstant, kDirectConstant };

  /// alpha_t = 2 / (t + 1), eta_t = eta_bar(t).
  static Schedule accelerated(const RescaledConstants& c, const ScheduleParams& p) {
    Schedule s(Kind::kAcceleratedNesterov);
    s.base_ = std::max(2.0 / p.r * c.L_str, noise_box(p));
    s.slope_ = eta_slope(c, p);
    if (!(s.base_ + s.slope_ > 0.0))
      throw Error(ErrorKind::kDegenerateProblem, "accelerated schedule: zero denominator");
    return s;
  }

  /// alpha_t = 2 / (t + 1), eta_t = eta.
  static Schedule bilinear_constant(double eta) {
    if (!(eta > 0.0)) throw Error(ErrorKind::kConfig, "eta must be positive");
    Schedule s(Kind::kBilinearConstant);
    s.eta_ = eta;
    return s;
  }

  /// alpha_t = alpha, eta_t = alpha / mu_star.
  static Schedule direct_constant(double alpha, double mu_star) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::kConfig, "alpha must lie in (0, 1]");
    if (!(mu_star > 0.0)) throw Error(ErrorKind::kInvalidRegime, "mu_star must be positive");
    Schedule s(Kind::kDirectConstant);
    s.alpha_ = alpha;
    s.eta_ = alpha / mu_star;
    return s;
  }

  Kind kind() const { return kind_; }

  double alpha(long t) const {
    return kind_ == Kind::kDirectConstant ? alpha_ : alpha_accel(t);
  }

  double eta(long t) const {
    if (kind_ != Kind::kAcceleratedNesterov) return eta_;
    const double td = static_cast<double>(t);
    return td / (base_ + slope_ * td);
  }

 private:
  explicit Schedule(Kind kind) : kind_(kind) {}

  Kind kind_;
  double base_ = 0.0;
  double slope_ = 0.0;
  double eta_ = 0.0;
  double alpha_ = 0.0;
};

/// Epoch lengths of a restarted run. When `stop_floor` > 0 and the tracked
/// distance estimate falls below it, restarting stops and one final epoch of
/// `final_epoch_length` iterations is run.
struct EpochPlan {
  std::vector<long> lengths;
  double stop_floor = 0.0;
  long final_epoch_length = 0;
};

namespace detail {

inline long ceil_positive(double v) {
  return std::max(1L, static_cast<long>(std::ceil(v - 1e-12 * std::max(1.0, std::abs(v)))));
}

}  // namespace detail

/// Number of epochs ceil(log(Gamma0^2 / eps^2)), at least one.
inline long epoch_count(double Gamma0_sq, double target_eps) {
  return detail::ceil_positive(std::log(Gamma0_sq / (target_eps * target_eps)));
}

/// T_s = ceil(c_epoch (sqrt(L_Str/mu) + L_Bil/mu + sigma^2 / (mu^2 Gamma0^2 e^{1-s}))).
inline EpochPlan epoch_plan_strongly_convex(const RescaledConstants& c, double sigma,
                                            double Gamma0_sq, double target_eps, double c_epoch) {
  if (!(Gamma0_sq > 0.0) || !(target_eps > 0.0) || !(c_epoch > 0.0))
    throw Error(ErrorKind::kConfig, "epoch plan needs Gamma0^2, eps, c_epoch > 0");
  if (!(c.mu_str > 0.0)) throw Error(ErrorKind::kInvalidRegime, "epoch plan: mu_Str = 0");
  const double mu = c.mu_str;
  const long S = epoch_count(Gamma0_sq, target_eps);
  EpochPlan plan;
  plan.lengths.reserve(static_cast<std::size_t>(S));
  for (long s = 1; s <= S; ++s) {
    const double noise = sigma * sigma / (mu * mu * Gamma0_sq * std::exp(1.0 - static_cast<double>(s)));
    plan.lengths.push_back(
        detail::ceil_positive(c_epoch * (std::sqrt(c.L_str / mu) + c.L_bil / mu + noise)));
  }
  return plan;
}

/// Constant epoch length ceil(c_epoch sqrt(lambda_max / lambda_min)) for
/// ceil(log(D0 / eps^2)) epochs; with noise, restarting stops at the
/// stationary level c_floor sigma_bil^2 / sqrt(lambda_min lambda_max) and a
/// final averaging epoch of ceil(sigma_bil^2 / (lambda_min eps^2)) follows.
inline EpochPlan epoch_plan_bilinear(const SpectralBounds& spec, double sigma_bil, double D0,
                                     double target_eps, double c_epoch, double c_floor = 1.0) {
  if (!(spec.lambda_min_BBt > 0.0))
    throw Error(ErrorKind::kNotApplicable, "bilinear epoch plan needs lambda_min(BB') > 0");
  if (!(D0 > 0.0) || !(target_eps > 0.0) || !(c_epoch > 0.0) || c_floor < 0.0)
    throw Error(ErrorKind::kConfig, "epoch plan needs D0, eps, c_epoch > 0 and c_floor >= 0");
  const long length =
      detail::ceil_positive(c_epoch * std::sqrt(spec.lambda_max / spec.lambda_min_BBt));
  EpochPlan plan;
  plan.lengths.assign(static_cast<std::size_t>(epoch_count(D0, target_eps)), length);
  if (sigma_bil > 0.0) {
    const double s2 = sigma_bil * sigma_bil;
    plan.stop_floor = c_floor * s2 / std::sqrt(spec.lambda_min_BBt * spec.lambda_max);
    plan.final_epoch_length =
        detail::ceil_positive(s2 / (spec.lambda_min_BBt * target_eps * target_eps));
  }
  return plan;
}

/// Worst-case margins of the four stepsize properties over t = 1..t_max:
/// (i) eta_t <= t / box, (ii) t / eta_t arithmetic with the stated common
/// difference, (iii) L_Bil eta_t <= 1, (iv) r - 2 L_Str eta_t / (t+1)
/// - (1 + beta) L_Bil^2 eta_t^2 >= 0. A property is violated when its
/// margin drops below -tol (relative for (ii)).
struct StepsizeReport {
  long checks = 0;
  long violations[4] = {0, 0, 0, 0};
  double worst_margin[4] = {0.0, 0.0, 0.0, 0.0};
  bool pass() const {
    return violations[0] == 0 && violations[1] == 0 && violations[2] == 0 && violations[3] == 0;
  }
};

inline StepsizeReport check_stepsize_properties(const RescaledConstants& c, const ScheduleParams& p,
                                              long t_max, double tol = 1e-12) {
  StepsizeReport rep;
  for (double& w : rep.worst_margin) w = std::numeric_limits<double>::infinity();
  const double box = noise_box(p);
  const double diff = eta_slope(c, p);
  double prev_ratio = 0.0;
  auto note = [&](int k, double margin, double scale) {
    rep.worst_margin[k] = std::min(rep.worst_margin[k], margin);
    if (margin < -tol * scale) ++rep.violations[k];
  };
  for (long t = 1; t <= t_max; ++t) {
    const double eta = eta_bar(t, c, p);
    const double td = static_cast<double>(t);
    if (box > 0.0) note(0, td / box - eta, std::max(1.0, td / box));
    const double ratio = td / eta;
    if (t > 1) {
      const double err = std::abs((ratio - prev_ratio) - diff);
      note(1, -err, std::max(1.0, ratio));
    }
    prev_ratio = ratio;
    note(2, 1.0 - c.L_bil * eta, 1.0);
    note(3, p.r - 2.0 * c.L_str / (td + 1.0) * eta - (1.0 + p.beta) * c.L_bil * c.L_bil * eta * eta,
         1.0);
    ++rep.checks;
  }
  for (double& w : rep.worst_margin)
    if (std::isinf(w)) w = 0.0;
  return rep;
}

/// Margin r - 2 alpha - (L_Str/mu + (1+beta) L_Bil^2/mu^2) alpha^2 of the
/// direct method's regularity condition (grouped constants).
inline double direct_feasibility_margin(const RescaledConstants& c, double alpha, double r,
                                        double beta) {
  const double mu = c.mu_str;
  const double kappa = c.L_str / mu + (1.0 + beta) * c.L_bil * c.L_bil / (mu * mu);
  return r - 2.0 * alpha - kappa * alpha * alpha;
}

}  // namespace ageg

#endif  // AGEG_SCHEDULES_HPP
