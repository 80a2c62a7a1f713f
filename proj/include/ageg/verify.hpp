#ifndef AGEG_VERIFY_HPP
#define AGEG_VERIFY_HPP

// Executable certificates: right-hand sides of the convergence bounds,
// property checkers for the auxiliary inequalities, a Monte-Carlo harness
// for the in-expectation statements, and log-log rate fitting.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ageg/core_model.hpp"
#include "ageg/generators.hpp"
#include "ageg/oracles.hpp"
#include "ageg/random.hpp"
#include "ageg/schedules.hpp"
#include "ageg/solvers.hpp"
#include "ageg/trace.hpp"

namespace ageg {

// ---------------------------------------------------------------------------
// Bound evaluators

enum class Theorem {
  kT1Bilinear,
  kT2Stochastic,
  kT3Deterministic,
  kT4DirectStochastic,
  kT5Direct,
  kC1RestartBilinear,
  kC2RestartStrong,
};

inline const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::kT1Bilinear: return "T1_bilinear";
    case Theorem::kT2Stochastic: return "T2_stochastic";
    case Theorem::kT3Deterministic: return "T3_deterministic";
    case Theorem::kT4DirectStochastic: return "T4_direct_stochastic";
    case Theorem::kT5Direct: return "T5_direct";
    case Theorem::kC1RestartBilinear: return "C1_restart_bilinear";
    case Theorem::kC2RestartStrong: return "C2_restart_strong";
  }
  return "unknown";
}

/// Hypothesis inputs of one bound. Which fields are required depends on the
/// variant; bound_rhs raises ErrorKind::kSpec naming the first missing one.
///   kT1Bilinear           consts (R), spectral, sigma_bil, D0
///   kT2Stochastic         consts, params (r, beta, C), sigma_str, sigma_bil, D0
///   kT3Deterministic      consts, D0
///   kT4DirectStochastic   consts (grouped), params (r, beta), sigma_str, sigma_bil, D0, alpha or alpha_t
///   kT5Direct             consts (grouped), D0
///   kC1RestartBilinear    as kT1Bilinear plus epoch_lengths; argument = completed epochs
///   kC2RestartStrong      as kT2Stochastic plus epoch_lengths; argument = completed epochs
/// The restart bounds apply the single-epoch bound recursively, feeding each
/// epoch's bound in as the next epoch's initial distance.
struct BoundSpec {
  Theorem theorem = Theorem::kT3Deterministic;
  std::optional<RescaledConstants> consts;
  std::optional<SpectralBounds> spectral;
  std::optional<ScheduleParams> params;
  std::optional<double> sigma_str;
  std::optional<double> sigma_bil;
  std::optional<double> D0;
  std::optional<double> alpha;
  std::function<double(long)> alpha_t;
  std::vector<long> epoch_lengths;
};

namespace detail {

template <typename T>
const T& need(const std::optional<T>& v, const char* name, Theorem th) {
  if (!v) throw Error(ErrorKind::kSpec, std::string(to_string(th)) + ": missing input '" + name + "'");
  return *v;
}

inline double t1_rhs(const RescaledConstants& c, const SpectralBounds& s, double sigma_bil,
                     double D0, long T) {
  if (!(s.lambda_min_BBt > 0.0))
    throw Error(ErrorKind::kNotApplicable, "T1 bound needs lambda_min(BB') > 0");
  const double Td = static_cast<double>(T);
  const double inner =
      4.0 * std::sqrt(s.lambda_max / c.R) / Td * std::sqrt(D0) + 7.0 * sigma_bil / std::sqrt(Td);
  return c.R / s.lambda_min_BBt * inner * inner;
}

inline double t2_rhs(const RescaledConstants& c, ScheduleParams p, double sigma, double D0, long T) {
  if (!(c.mu_str > 0.0)) throw Error(ErrorKind::kInvalidRegime, "T2 bound needs mu_Str > 0");
  p.T = T;
  p.sigma = sigma;
  p.D0 = D0;
  const double Td = static_cast<double>(T);
  const double mu = c.mu_str;
  const double A = prefactor_A(c, p);
  const double bias =
      2.0 / (mu * (Td + 1.0)) * (2.0 / p.r * c.L_str / Td + A * std::sqrt((1.0 + p.beta) / p.r) * c.L_bil) * D0;
  const double noise = 2.0 * (1.0 / p.C + p.C) * sigma / (mu * std::sqrt(Td)) * std::sqrt(D0);
  return bias + noise;
}

}  // namespace detail

/// Right-hand side of the selected bound at iteration count (or epoch count
/// for the restart bounds) `t_or_T`.
inline double bound_rhs(const BoundSpec& spec, long t_or_T) {
  const Theorem th = spec.theorem;
  const auto& c = detail::need(spec.consts, "consts", th);
  const double D0 = detail::need(spec.D0, "D0", th);
  if (D0 < 0.0) throw Error(ErrorKind::kSpec, "D0 must be nonnegative");
  if (t_or_T < 0) throw Error(ErrorKind::kSpec, "negative iteration count");
  const bool direct = th == Theorem::kT4DirectStochastic || th == Theorem::kT5Direct;
  if (direct && c.variant != RescaleVariant::kGrouped)
    throw Error(ErrorKind::kSpec, std::string(to_string(th)) + ": needs grouped constants");
  if (!direct && c.variant != RescaleVariant::kStandard)
    throw Error(ErrorKind::kSpec, std::string(to_string(th)) + ": needs standard constants");
  if (!direct && th != Theorem::kC1RestartBilinear && th != Theorem::kC2RestartStrong && t_or_T < 1)
    throw Error(ErrorKind::kSpec, std::string(to_string(th)) + ": T must be >= 1");

  switch (th) {
    case Theorem::kT1Bilinear: {
      const auto& spectral = detail::need(spec.spectral, "spectral", th);
      return detail::t1_rhs(c, spectral, detail::need(spec.sigma_bil, "sigma_bil", th), D0, t_or_T);
    }

    case Theorem::kT2Stochastic: {
      const auto& p = detail::need(spec.params, "params", th);
      const double s_str = detail::need(spec.sigma_str, "sigma_str", th);
      const double sigma = combined_sigma(s_str, detail::need(spec.sigma_bil, "sigma_bil", th), p.r, p.beta);
      return detail::t2_rhs(c, p, sigma, D0, t_or_T);
    }

    case Theorem::kT3Deterministic: {
      if (!(c.mu_str > 0.0)) throw Error(ErrorKind::kInvalidRegime, "T3 bound needs mu_Str > 0");
      const double Td = static_cast<double>(t_or_T);
      return 2.0 / (c.mu_str * (Td + 1.0)) * (2.0 * c.L_str / Td + c.L_bil) * D0;
    }

    case Theorem::kT4DirectStochastic: {
      const auto& p = detail::need(spec.params, "params", th);
      const double s_str = detail::need(spec.sigma_str, "sigma_str", th);
      const double sigma = combined_sigma(s_str, detail::need(spec.sigma_bil, "sigma_bil", th), p.r, p.beta);
      if (!spec.alpha && !spec.alpha_t)
        throw Error(ErrorKind::kSpec, "T4_direct_stochastic: missing input 'alpha'");
      const double mu = c.mu_str;
      // prod_{tau <= t} (1 - a_tau) and sum_tau a_tau^2 prod_{tau' > tau} (1 - a_tau')
      double prod = 1.0;
      double acc = 0.0;
      for (long tau = 1; tau <= t_or_T; ++tau) {
        const double a = spec.alpha_t ? spec.alpha_t(tau) : *spec.alpha;
        prod *= 1.0 - a;
        acc = acc * (1.0 - a) + a * a;
      }
      return D0 * (c.L_str / mu + 1.0) * prod + 3.0 * sigma * sigma / (mu * mu) * acc;
    }

    case Theorem::kT5Direct: {
      const double mu = c.mu_str;
      const double k = 1.0 + std::sqrt(1.0 + c.L_str / mu + c.L_bil * c.L_bil / (mu * mu));
      return D0 * (c.L_str / mu + 1.0) * std::exp(-static_cast<double>(t_or_T) / k);
    }

    case Theorem::kC1RestartBilinear:
    case Theorem::kC2RestartStrong: {
      if (static_cast<std::size_t>(t_or_T) > spec.epoch_lengths.size())
        throw Error(ErrorKind::kSpec, std::string(to_string(th)) + ": more epochs than epoch_lengths");
      double b = D0;
      for (long s = 0; s < t_or_T; ++s) {
        const long T = spec.epoch_lengths[static_cast<std::size_t>(s)];
        if (th == Theorem::kC1RestartBilinear) {
          b = detail::t1_rhs(c, detail::need(spec.spectral, "spectral", th),
                             detail::need(spec.sigma_bil, "sigma_bil", th), b, T);
        } else {
          const auto& p = detail::need(spec.params, "params", th);
          const double sigma = combined_sigma(detail::need(spec.sigma_str, "sigma_str", th),
                                              detail::need(spec.sigma_bil, "sigma_bil", th), p.r, p.beta);
          if (b == 0.0) continue;
          b = detail::t2_rhs(c, p, sigma, b, T);
        }
      }
      return b;
    }
  }
  throw Error(ErrorKind::kSpec, "unknown theorem");
}

// ---------------------------------------------------------------------------
// Gap quantities and lemma checkers

struct VQuantities {
  double V_F = 0.0;
  double V_G = 0.0;
  double V = 0.0;
};

/// V_F = F(x) - F(x~) + <grad_x H(x~, y~), x - x~>,
/// V_G = G(y) - G(y~) - <grad_y H(x~, y~), y - y~>.
inline VQuantities v_quantities(const SaddleProblem& problem, const Point& point, const Point& ref) {
  if (point.x.size() != problem.n() || ref.x.size() != problem.n() ||
      point.y.size() != problem.m() || ref.y.size() != problem.m())
    throw Error(ErrorKind::kDimensionMismatch, "v_quantities: dimensions differ from problem");
  const auto& H = problem.H();
  VQuantities v;
  v.V_F = problem.F().value(point.x) - problem.F().value(ref.x) +
          H.grad_x(ref.x, ref.y).dot(point.x - ref.x);
  v.V_G = problem.G().value(point.y) - problem.G().value(ref.y) -
          H.grad_y(ref.x, ref.y).dot(point.y - ref.y);
  v.V = v.V_F + v.V_G;
  return v;
}

/// Outcome of an inequality check: a violation is a margin below
/// -tol * scale, where scale is the magnitude of the terms involved.
struct CheckReport {
  std::string name;
  long checks = 0;
  long violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  nlohmann::json witness;  // first violating input, null when none

  bool pass() const { return violations == 0; }

  void note(double margin, double scale, double tol, const std::function<nlohmann::json()>& make_witness) {
    ++checks;
    min_margin = std::min(min_margin, margin);
    if (margin < -tol * std::max(1.0, scale)) {
      if (violations == 0) witness = make_witness();
      ++violations;
    }
  }

  nlohmann::json to_json() const {
    return {{"check", name},
            {"checks", checks},
            {"violations", violations},
            {"min_margin", checks ? min_margin : 0.0},
            {"verdict", pass() ? "pass" : "fail"},
            {"witness", witness}};
  }
};

struct Lemma1Terms {
  double lhs = 0.0;
  double rhs = 0.0;
  double scale = 0.0;
};

/// Extragradient three-point inequality with phi_i = theta - delta_i:
///   <delta2, phi1 - z> <= 1/2 |delta2 - delta1|^2
///                         + 1/2 (|theta - z|^2 - |phi2 - z|^2 - |theta - phi1|^2).
inline Lemma1Terms lemma1_terms(const Vector& theta, const Vector& d1, const Vector& d2,
                                const Vector& z) {
  const Vector phi1 = theta - d1;
  const Vector phi2 = theta - d2;
  const double a = (d2 - d1).squaredNorm();
  const double b = (theta - z).squaredNorm();
  const double c = (phi2 - z).squaredNorm();
  const double e = (theta - phi1).squaredNorm();
  Lemma1Terms t;
  t.lhs = d2.dot(phi1 - z);
  t.rhs = 0.5 * a + 0.5 * (b - c - e);
  t.scale = a + b + c + e + std::abs(t.lhs);
  return t;
}

/// The inequality on Gaussian (theta, delta1, delta2, z).
inline CheckReport check_lemma1(long n_trials, Index dim, std::uint64_t seed, double tol = 1e-12) {
  if (dim < 1) throw Error(ErrorKind::kConfig, "check_lemma1: dim must be >= 1");
  Rng rng(seed);
  CheckReport rep;
  rep.name = "lemma1";
  for (long k = 0; k < n_trials; ++k) {
    const Vector theta = rng.normal_vector(dim);
    const Vector d1 = rng.normal_vector(dim);
    const Vector d2 = rng.normal_vector(dim);
    const Vector z = rng.normal_vector(dim);
    const Lemma1Terms t = lemma1_terms(theta, d1, d2, z);
    rep.note(t.rhs - t.lhs, t.scale, tol, [&] {
      return nlohmann::json{{"trial", k}, {"lhs", t.lhs}, {"rhs", t.rhs}};
    });
  }
  return rep;
}

/// Quadratic lower bounds on V_F, V_G at the saddle, checked after the
/// equal-strong-convexity reparametrization. Points are drawn around the
/// saddle at radii spanning six decades.
inline CheckReport check_lemma2(const SaddleProblem& problem, long n_points, std::uint64_t seed,
                                double tol = 1e-12) {
  if (problem.regime() != Regime::kStronglyConvex)
    throw Error(ErrorKind::kInvalidRegime, "check_lemma2 needs the strongly convex regime");
  const RescaledProblem rp = rescale_problem(problem);
  const SaddleProblem& q = rp.problem;
  const SaddlePoint star = exact_saddle(q);
  const double mu = q.constants().mu_F;
  Rng rng(seed);
  CheckReport rep;
  rep.name = "lemma2";
  const auto& F = q.F();
  const auto& G = q.G();
  const Vector gx = q.H().grad_x(star.x, star.y);
  const Vector gy = q.H().grad_y(star.x, star.y);
  for (long k = 0; k < n_points; ++k) {
    const double radius = std::pow(10.0, rng.uniform(-3.0, 3.0));
    const Point p{star.x + radius * rng.normal_vector(q.n()), star.y + radius * rng.normal_vector(q.m())};
    const VQuantities v = v_quantities(q, p, star);
    const double fx = F.value(p.x), fs = F.value(star.x);
    const double gyv = G.value(p.y), gs = G.value(star.y);
    const double bx = 0.5 * mu * (p.x - star.x).squaredNorm();
    const double by = 0.5 * mu * (p.y - star.y).squaredNorm();
    const double sx = std::abs(fx) + std::abs(fs) + std::abs(gx.dot(p.x - star.x)) + bx;
    const double sy = std::abs(gyv) + std::abs(gs) + std::abs(gy.dot(p.y - star.y)) + by;
    auto witness = [&] {
      return nlohmann::json{{"point", k}, {"radius", radius}, {"V_F", v.V_F}, {"V_G", v.V_G},
                            {"bound_x", bx}, {"bound_y", by}};
    };
    rep.note(v.V_F - bx, sx, tol, witness);
    rep.note(v.V_G - by, sy, tol, witness);
  }
  return rep;
}

/// Stepsize properties over `n_params` random parameterizations for
/// t = 1..t_max.
inline CheckReport check_lemma3_suite(long n_params, long t_max, std::uint64_t seed,
                                      double tol = 1e-12) {
  Rng rng(seed);
  CheckReport rep;
  rep.name = "lemma3";
  for (long k = 0; k < n_params; ++k) {
    RescaledConstants c;
    c.L_str = k % 5 == 0 ? 0.0 : std::pow(10.0, rng.uniform(-2.0, 2.0));
    c.L_bil = k % 7 == 0 ? 0.0 : std::pow(10.0, rng.uniform(-2.0, 2.0));
    c.mu_str = 1.0;
    if (c.L_str == 0.0 && c.L_bil == 0.0) c.L_bil = 1.0;
    ScheduleParams p;
    p.r = rng.uniform(0.05, 1.0);
    p.beta = k % 3 == 0 ? 0.0 : rng.uniform(0.0, 4.0);
    p.C = std::pow(10.0, rng.uniform(-1.0, 1.0));
    p.T = 1 + static_cast<long>(rng.uniform(0.0, 1e4));
    p.sigma = k % 2 == 0 ? 0.0 : rng.uniform(0.0, 2.0);
    p.D0 = std::pow(10.0, rng.uniform(-2.0, 2.0));
    const StepsizeReport r = check_stepsize_properties(c, p, t_max, tol);
    for (int i = 0; i < 4; ++i) {
      rep.checks += r.checks;
      rep.min_margin = std::min(rep.min_margin, r.worst_margin[i]);
      if (r.violations[i] > 0 && rep.violations == 0)
        rep.witness = {{"param_set", k}, {"property", i + 1}, {"worst_margin", r.worst_margin[i]}};
      rep.violations += r.violations[i];
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Deterministic per-run certification sweeps

/// 20-style sweep of quadratic games with n, m <= 10 and all condition
/// numbers (L/mu per side, L_Bil/mu) at most 100.
inline std::vector<SaddleProblem> quadratic_sweep(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SaddleProblem> out;
  for (int i = 0; i < count; ++i) {
    const Index n = 1 + static_cast<Index>(rng.uniform(0.0, 10.0));
    const Index m = 1 + static_cast<Index>(rng.uniform(0.0, 10.0));
    const double mu_F = std::pow(10.0, rng.uniform(-1.0, 1.0));
    const double mu_G = std::pow(10.0, rng.uniform(-1.0, 1.0));
    const double L_F = mu_F * std::pow(10.0, rng.uniform(0.0, 2.0));
    const double L_G = mu_G * std::pow(10.0, rng.uniform(0.0, 2.0));
    const double b_max = std::sqrt(mu_F * mu_G) * std::pow(10.0, rng.uniform(-1.0, 2.0));
    out.push_back(gen_quadratic(n, m, L_F, mu_F, L_G, mu_G, b_max, rng.next_u64()));
  }
  return out;
}

inline std::vector<SaddleProblem> bilinear_sweep(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SaddleProblem> out;
  for (int i = 0; i < count; ++i) {
    const Index n = 1 + static_cast<Index>(rng.uniform(0.0, 10.0));
    const double kappa = std::pow(10.0, rng.uniform(0.0, 2.0));
    out.push_back(gen_bilinear(n, kappa, rng.next_u64()));
  }
  return out;
}

/// Deterministic start: origin unless it is the saddle, then all ones.
inline Point default_start(const SaddleProblem& problem, const SaddlePoint& star) {
  Point p{Vector::Zero(problem.n()), Vector::Zero(problem.m())};
  if (star.x.isZero(0.0) && star.y.isZero(0.0)) {
    p.x.setOnes();
    p.y.setOnes();
  }
  return p;
}

namespace detail {

/// Squared-distance resolution of double arithmetic around the saddle:
/// (1e3 eps_mach scale)^2, the 1e3 covering the conditioning of the saddle
/// solve. Bounds below it cannot be resolved and are compared with it added.
inline double resolution_floor(const SaddlePoint& star, const Point& start, double R) {
  const double scale = std::max({1.0, std::sqrt(star.x.squaredNorm() + R * star.y.squaredNorm()),
                                 std::sqrt(start.x.squaredNorm() + R * start.y.squaredNorm())});
  const double r = 1e3 * std::numeric_limits<double>::epsilon() * scale;
  return r * r;
}

/// Compares each traced distance with its bound at relative slack `rel`
/// plus the absolute resolution floor.
inline void compare_trace(const RunTrace& trace, double rel, double floor, CheckReport& rep,
                          std::size_t instance) {
  for (const TraceRecord& r : trace.records) {
    if (!r.bound_rhs) continue;
    const double b = *r.bound_rhs;
    rep.note((b * (1.0 + rel) + floor - r.weighted_sq_dist) / (b + floor), 0.0, 0.0,
             [&] {
               return nlohmann::json{{"instance", instance}, {"t", r.t}, {"dist", r.weighted_sq_dist},
                                     {"bound", b}};
             });
  }
}

}  // namespace detail

/// Accelerated schedule with eta_t = t / (2 L_Str + L_Bil t), the noiseless
/// limit r -> 1, beta -> 0.
inline Schedule deterministic_schedule(const RescaledConstants& c) {
  ScheduleParams p;
  p.r = 1.0;
  p.beta = 0.0;
  return Schedule::accelerated(c, p);
}

/// Single-epoch deterministic AG-EG against the averaged-output bound at
/// every t <= t_max. The schedule does not depend on the horizon, so the
/// running average after t steps is the output of a t-step run.
inline CheckReport certify_t3(const std::vector<SaddleProblem>& problems, long t_max, double rel = 1e-9) {
  CheckReport rep;
  rep.name = "T3_deterministic";
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const SaddleProblem& prob = problems[i];
    const RescaledConstants c = rescale(prob);
    const SaddlePoint star = exact_saddle(prob);
    const Point start = default_start(prob, star);
    BoundSpec spec;
    spec.theorem = Theorem::kT3Deterministic;
    spec.consts = c;
    spec.D0 = weighted_sq_distance(start, star, c.R);
    Monitor mon;
    mon.level = TraceLevel::kFull;
    mon.saddle = star;
    mon.bound = [&](long, long t) -> std::optional<double> { return bound_rhs(spec, t); };
    OracleBundle o(prob, NoiseModel::deterministic(), c.R, 0);
    const SolverOutput out = ageg_epoch(start, t_max, deterministic_schedule(c), o, c.R, mon);
    detail::compare_trace(out.trace, rel, detail::resolution_floor(star, start, c.R), rep, i);
  }
  return rep;
}

/// Direct AG-EG with alpha = alpha_bar(1, 0) against the last-iterate
/// exponential bound at every t <= t_max.
inline CheckReport certify_t5(const std::vector<SaddleProblem>& problems, long t_max, double rel = 1e-9) {
  CheckReport rep;
  rep.name = "T5_direct";
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const SaddleProblem& prob = problems[i];
    const RescaledConstants c = rescale(prob, RescaleVariant::kGrouped);
    const SaddlePoint star = exact_saddle(prob);
    const Point start = default_start(prob, star);
    BoundSpec spec;
    spec.theorem = Theorem::kT5Direct;
    spec.consts = c;
    spec.D0 = weighted_sq_distance(start, star, c.R);
    Monitor mon;
    mon.level = TraceLevel::kFull;
    mon.saddle = star;
    mon.bound = [&](long, long t) -> std::optional<double> { return bound_rhs(spec, t); };
    OracleBundle o(prob, NoiseModel::deterministic(), c.R, 0);
    const SolverOutput out = ageg_direct(start, t_max, alpha_bar_direct(c, 1.0, 0.0), o, c.R, mon);
    detail::compare_trace(out.trace, rel, detail::resolution_floor(star, start, c.R), rep, i);
  }
  return rep;
}

/// Noiseless bilinear AG-EG (eta = 1 / L_Bil) against the bilinear bound.
inline CheckReport certify_t1_deterministic(const std::vector<SaddleProblem>& problems, long t_max,
                                            double rel = 1e-9) {
  CheckReport rep;
  rep.name = "T1_bilinear_deterministic";
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const SaddleProblem& prob = problems[i];
    const RescaledConstants c = rescale(prob);
    const SaddlePoint star = exact_saddle(prob);
    const Point start = default_start(prob, star);
    BoundSpec spec;
    spec.theorem = Theorem::kT1Bilinear;
    spec.consts = c;
    spec.spectral = spectral_bounds(prob.H().B);
    spec.sigma_bil = 0.0;
    spec.D0 = weighted_sq_distance(start, star, c.R);
    Monitor mon;
    mon.level = TraceLevel::kFull;
    mon.saddle = star;
    mon.bound = [&](long, long t) -> std::optional<double> { return bound_rhs(spec, t); };
    OracleBundle o(prob, NoiseModel::deterministic(), c.R, 0);
    const SolverOutput out =
        ageg_epoch(start, t_max, Schedule::bilinear_constant(eta_bilinear(c)), o, c.R, mon);
    detail::compare_trace(out.trace, rel, detail::resolution_floor(star, start, c.R), rep, i);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Monte-Carlo certification

struct McReport {
  std::string spec;
  std::vector<std::pair<std::uint64_t, double>> per_seed;  // ascending seed
  std::vector<std::uint64_t> diverged;
  double mean = 0.0;
  double std_err = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool pass = false;

  std::size_t n_seeds() const { return per_seed.size() + diverged.size(); }

  nlohmann::json to_json() const {
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& [seed, v] : per_seed) seeds.push_back({{"seed", seed}, {"value", v}});
    return {{"spec", spec},         {"n_seeds", n_seeds()}, {"mean", mean},
            {"stderr", std_err},    {"bound", bound},       {"slack", slack},
            {"verdict", pass ? "pass" : "fail"},            {"diverged_seeds", diverged},
            {"per_seed", seeds}};
  }
};

/// Runs `run(seed)` for every seed (optionally on `jobs` threads), then
/// aggregates in ascending seed order. Pass iff no run diverged and
/// mean + 2 stderr <= bound (1 + slack).
inline McReport mc_certify(const std::string& name, double bound, std::vector<std::uint64_t> seeds,
                           const std::function<double(std::uint64_t)>& run, double slack = 0.1,
                           int jobs = 1) {
  if (seeds.empty()) throw Error(ErrorKind::kConfig, "mc_certify: no seeds");
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  std::vector<double> values(seeds.size(), 0.0);
  std::vector<char> failed(seeds.size(), 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr other_error;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        values[i] = run(seeds[i]);
        if (!std::isfinite(values[i])) failed[i] = 1;
      } catch (const DivergedError&) {
        failed[i] = 1;
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!other_error) other_error = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(seeds.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (other_error) std::rethrow_exception(other_error);

  McReport rep;
  rep.spec = name;
  rep.bound = bound;
  rep.slack = slack;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (failed[i]) rep.diverged.push_back(seeds[i]);
    else rep.per_seed.emplace_back(seeds[i], values[i]);
  }
  const double n = static_cast<double>(rep.per_seed.size());
  if (n > 0) {
    double sum = 0.0;
    for (const auto& sv : rep.per_seed) sum += sv.second;
    rep.mean = sum / n;
    if (n > 1) {
      double ss = 0.0;
      for (const auto& sv : rep.per_seed) ss += (sv.second - rep.mean) * (sv.second - rep.mean);
      rep.std_err = std::sqrt(ss / (n - 1.0) / n);
    }
  }
  rep.pass = rep.diverged.empty() && n > 0 && rep.mean + 2.0 * rep.std_err <= bound * (1.0 + slack);
  return rep;
}

inline McReport mc_certify(const BoundSpec& spec, long t_or_T, std::vector<std::uint64_t> seeds,
                           const std::function<double(std::uint64_t)>& run, double slack = 0.1,
                           int jobs = 1) {
  return mc_certify(to_string(spec.theorem), bound_rhs(spec, t_or_T), std::move(seeds), run, slack, jobs);
}

inline std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = first + i;
  return s;
}

/// Stochastic single-epoch bilinear AG-EG (eta = 1 / L_Bil, R = 1) from the
/// default start, certified against the bilinear bound at horizon T.
inline McReport mc_t1_bilinear(const SaddleProblem& problem, long T, double sigma_bil,
                               const std::vector<std::uint64_t>& seeds, double slack = 0.1, int jobs = 1) {
  const RescaledConstants c = rescale(problem);
  const SaddlePoint star = exact_saddle(problem);
  const Point start = default_start(problem, star);
  BoundSpec spec;
  spec.theorem = Theorem::kT1Bilinear;
  spec.consts = c;
  spec.spectral = spectral_bounds(problem.H().B);
  spec.sigma_bil = sigma_bil;
  spec.D0 = weighted_sq_distance(start, star, c.R);
  const Schedule schedule = Schedule::bilinear_constant(eta_bilinear(c));
  return mc_certify(spec, T, seeds, [&](std::uint64_t seed) {
    OracleBundle o(problem, NoiseModel::gaussian(0.0, sigma_bil), c.R, seed);
    const SolverOutput out = ageg_epoch(start, T, schedule, o, c.R);
    return weighted_sq_distance(out.point, star, c.R);
  }, slack, jobs);
}

/// Stochastic direct AG-EG with the horizon-optimized constant weight,
/// certified against the last-iterate bound at horizon T.
inline McReport mc_t4_direct(const SaddleProblem& problem, long T, double sigma_str, double sigma_bil,
                             const ScheduleParams& params, const std::vector<std::uint64_t>& seeds,
                             double slack = 0.1, int jobs = 1) {
  const RescaledConstants c = rescale(problem, RescaleVariant::kGrouped);
  const SaddlePoint star = exact_saddle(problem);
  const Point start = default_start(problem, star);
  ScheduleParams p = params;
  p.T = T;
  p.sigma = combined_sigma(sigma_str, sigma_bil, p.r, p.beta);
  const double D0 = weighted_sq_distance(start, star, c.R);
  const double alpha = alpha_direct_optimized(c, p, D0).alpha;
  BoundSpec spec;
  spec.theorem = Theorem::kT4DirectStochastic;
  spec.consts = c;
  spec.params = p;
  spec.sigma_str = sigma_str;
  spec.sigma_bil = sigma_bil;
  spec.D0 = D0;
  spec.alpha = alpha;
  return mc_certify(spec, T, seeds, [&](std::uint64_t seed) {
    OracleBundle o(problem, NoiseModel::gaussian(sigma_str, sigma_bil), c.R, seed);
    const SolverOutput out = ageg_direct(start, T, alpha, o, c.R);
    return weighted_sq_distance(out.point, star, c.R);
  }, slack, jobs);
}

/// Negative control: gradient descent-ascent on a bilinear game judged
/// against the bilinear AG-EG bound. GDA spirals outward, so a working
/// harness must report failure.
inline McReport mc_gda_control(const SaddleProblem& problem, long T, double eta,
                               const std::vector<std::uint64_t>& seeds, int jobs = 1) {
  const RescaledConstants c = rescale(problem);
  const SaddlePoint star = exact_saddle(problem);
  const Point start = default_start(problem, star);
  BoundSpec spec;
  spec.theorem = Theorem::kT1Bilinear;
  spec.consts = c;
  spec.spectral = spectral_bounds(problem.H().B);
  spec.sigma_bil = 0.0;
  spec.D0 = weighted_sq_distance(start, star, c.R);
  McReport rep = mc_certify(spec, T, seeds, [&](std::uint64_t seed) {
    OracleBundle o(problem, NoiseModel::deterministic(), c.R, seed);
    const SolverOutput out = baseline_gda(start, T, eta, o, c.R);
    return weighted_sq_distance(out.point, star, c.R);
  }, 0.1, jobs);
  rep.spec = "gda_negative_control";
  return rep;
}

/// Per-step growth of GDA on a bilinear game with orthogonal B (all
/// singular values one, R = 1): the distance must grow by exactly 1 + eta^2.
struct GrowthReport {
  long steps = 0;
  long non_increasing = 0;
  double max_factor_error = 0.0;
  bool pass(double tol = 1e-12) const { return non_increasing == 0 && max_factor_error <= tol; }
};

inline GrowthReport gda_growth_check(const SaddleProblem& problem, long T, double eta) {
  const SaddlePoint star = exact_saddle(problem);
  const Point start = default_start(problem, star);
  Monitor mon;
  mon.level = TraceLevel::kFull;
  mon.saddle = star;
  OracleBundle o(problem, NoiseModel::deterministic(), 1.0, 0);
  const SolverOutput out = baseline_gda(start, T, eta, o, 1.0, mon);
  GrowthReport rep;
  double prev = weighted_sq_distance(start, star, 1.0);
  for (const TraceRecord& r : out.trace.records) {
    ++rep.steps;
    if (!(r.weighted_sq_dist > prev)) ++rep.non_increasing;
    rep.max_factor_error = std::max(rep.max_factor_error, std::abs(r.weighted_sq_dist / prev - (1.0 + eta * eta)));
    prev = r.weighted_sq_dist;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Rate fitting

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};

/// Least-squares fit log(y) = intercept + slope log(x).
inline RateFit rate_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::kDimensionMismatch, "rate_fit: x and y differ in length");
  if (x.size() < 3) throw Error(ErrorKind::kInsufficientData, "rate_fit needs at least 3 points");
  const std::size_t k = x.size();
  Matrix A(static_cast<Index>(k), 2);
  Vector b(static_cast<Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorKind::kDomain, "rate_fit needs positive data");
    A(static_cast<Index>(i), 0) = 1.0;
    A(static_cast<Index>(i), 1) = std::log(x[i]);
    b(static_cast<Index>(i)) = std::log(y[i]);
  }
  const Vector coef = A.colPivHouseholderQr().solve(b);
  RateFit fit{coef(1), coef(0), {}};
  const Vector res = b - A * coef;
  fit.residuals.assign(res.data(), res.data() + res.size());
  return fit;
}

}  // namespace ageg

#endif  // AGEG_VERIFY_HPP
