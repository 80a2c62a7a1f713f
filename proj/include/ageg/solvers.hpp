#ifndef AGEG_SOLVERS_HPP
#define AGEG_SOLVERS_HPP

// Accelerated gradient / extragradient (AG-EG) iteration engines:
//   ageg_epoch      one epoch, outputs the half-shift average
//   ageg_restarted  epochs warm-started from the previous epoch's output
//   ageg_direct     grouped-objective variant, outputs the last iterate
// plus extragradient and gradient descent-ascent baselines that consume the
// same oracle interface.

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "ageg/core_model.hpp"
#include "ageg/oracles.hpp"
#include "ageg/schedules.hpp"
#include "ageg/trace.hpp"

namespace ageg {

namespace detail {

inline void check_start(const Point& start, const OracleBundle& oracles) {
  if (start.x.size() != oracles.problem().n() || start.y.size() != oracles.problem().m())
    throw Error(ErrorKind::kDimensionMismatch, "start point does not match problem dimensions");
}

struct Corrections {
  bool enabled = false;
  double mu_F = 0.0;
  double mu_G = 0.0;
};

/// One epoch of the AG-EG loop from `start`. With `corr.enabled` the grouped
/// correction terms of the direct variant are applied. Returns the final
/// state; `stopped` is set when the monitor's target stopped the run.
inline IterateState ag_eg_loop(const Point& start, long T, const Schedule& schedule,
                               OracleBundle& oracles, double R, const Corrections& corr,
                               OutputConvention convention, Recorder& rec, long epoch,
                               long global_offset, bool final_epoch, bool& stopped) {
  if (T < 1) throw Error(ErrorKind::kConfig, "epoch length must be >= 1");
  if (!(R > 0.0)) throw Error(ErrorKind::kConfig, "R must be positive");
  check_start(start, oracles);

  IterateState s{start.x, start.y, start.x, start.y, start.x, start.y, 0};
  Vector x_half, y_half, gx, gy;
  stopped = false;
  for (long t = 1; t <= T; ++t) {
    const SampleDraw draw = oracles.draw();
    const double a = schedule.alpha(t);
    const double a_next = schedule.alpha(t + 1);
    const double eta = schedule.eta(t);
    const double eta_y = eta / R;

    // grad f, grad g at the extrapolation point; one xi serves both steps.
    const auto fg = oracles.grad_fg(s.x_md, s.y_md, draw.xi_half);

    const auto h_half = oracles.grad_h(s.x, s.y, draw.zeta_half);
    gx = fg.f + h_half.x;
    gy = fg.g - h_half.y;
    if (corr.enabled) {
      gx -= corr.mu_F * (s.x_md - s.x);
      gy -= corr.mu_G * (s.y_md - s.y);
    }
    x_half = s.x - eta * gx;
    y_half = s.y - eta_y * gy;

    s.x_avg = (1.0 - a) * s.x_avg + a * x_half;
    s.y_avg = (1.0 - a) * s.y_avg + a * y_half;

    const auto h_full = oracles.grad_h(x_half, y_half, draw.zeta_full);
    gx = fg.f + h_full.x;
    gy = fg.g - h_full.y;
    if (corr.enabled) {
      gx -= corr.mu_F * (s.x_md - x_half);
      gy -= corr.mu_G * (s.y_md - y_half);
    }
    s.x -= eta * gx;
    s.y -= eta_y * gy;

    s.x_md = (1.0 - a_next) * s.x_avg + a_next * s.x;
    s.y_md = (1.0 - a_next) * s.y_avg + a_next * s.y;
    s.t = t;

    rec.check_finite(s.x, s.y, epoch, t);
    rec.check_finite(s.x_avg, s.y_avg, epoch, t);
    rec.observe(s);
    const bool avg = convention == OutputConvention::kHalfShiftAverage;
    if (rec.step(epoch, t, global_offset + t, oracles.counts().queries, avg ? s.x_avg : s.x,
                 avg ? s.y_avg : s.y, final_epoch && t == T)) {
      stopped = true;
      break;
    }
  }
  return s;
}

}  // namespace detail

/// Single epoch of stochastic AG-EG from `start`; returns the half-shift
/// average (x_avg, y_avg) after T iterations.
inline SolverOutput ageg_epoch(const Point& start, long T, const Schedule& schedule,
                               OracleBundle& oracles, double R, const Monitor& monitor = {}) {
  if (schedule.kind() == Schedule::Kind::kDirectConstant)
    throw Error(ErrorKind::kConfig, "ageg_epoch needs an accelerated or bilinear schedule");
  detail::Recorder rec(monitor, R);
  bool stopped = false;
  const IterateState s =
      detail::ag_eg_loop(start, T, schedule, oracles, R, {}, OutputConvention::kHalfShiftAverage,
                         rec, 1, 0, true, stopped);
  SolverOutput out;
  out.point = {s.x_avg, s.y_avg};
  out.convention = OutputConvention::kHalfShiftAverage;
  out.iterations = s.t;
  out.first_hit = rec.first_hit();
  out.epoch_end_dist.push_back(rec.distance(s.x_avg, s.y_avg));
  out.trace = std::move(rec.trace());
  out.trace.output = out.point;
  out.trace.seed = oracles.seed();
  return out;
}

/// Builds the schedule of epoch s (1-based) of length T from the D0 estimate
/// at that epoch's start.
using ScheduleFactory = std::function<Schedule(long epoch, long length, double D0)>;

/// Restarted AG-EG. Epoch s+1 starts from epoch s's averaged output. D0 is
/// the true weighted distance when the monitor knows the saddle, otherwise
/// gamma0_sq * e^(1-s). The plan's stop floor, when set, switches to the
/// final averaging epoch once the tracked estimate falls below it.
inline SolverOutput ageg_restarted(const Point& start, const EpochPlan& plan,
                                   const ScheduleFactory& factory, OracleBundle& oracles,
                                   double R, const Monitor& monitor = {}, double gamma0_sq = 0.0) {
  if (plan.lengths.empty()) throw Error(ErrorKind::kConfig, "empty epoch plan");
  detail::Recorder rec(monitor, R);
  auto estimate = [&](long s, const Point& p) {
    if (monitor.saddle) return rec.distance(p.x, p.y);
    return gamma0_sq * std::exp(1.0 - static_cast<double>(s));
  };

  SolverOutput out;
  out.convention = OutputConvention::kHalfShiftAverage;
  Point current = start;
  long global = 0;
  const long epochs = static_cast<long>(plan.lengths.size());
  bool finishing = false;
  for (long s = 1; s <= epochs || finishing; ++s) {
    const long T = finishing ? plan.final_epoch_length : plan.lengths[static_cast<std::size_t>(s - 1)];
    const bool last = finishing || s == epochs;
    const Schedule schedule = factory(s, T, estimate(s, current));
    bool stopped = false;
    const IterateState st =
        detail::ag_eg_loop(current, T, schedule, oracles, R, {}, OutputConvention::kHalfShiftAverage,
                           rec, s, global, last, stopped);
    global += st.t;
    current = {st.x_avg, st.y_avg};
    out.epoch_end_dist.push_back(rec.distance(current.x, current.y));
    if (stopped || finishing) break;
    if (plan.stop_floor > 0.0 && plan.final_epoch_length > 0 && s < epochs &&
        estimate(s + 1, current) < plan.stop_floor)
      finishing = true;
  }
  if (monitor.level == TraceLevel::kFinal && rec.trace().records.size() > 1)
    rec.trace().records.erase(rec.trace().records.begin(), rec.trace().records.end() - 1);
  out.point = current;
  out.iterations = global;
  out.first_hit = rec.first_hit();
  out.trace = std::move(rec.trace());
  out.trace.output = out.point;
  out.trace.seed = oracles.seed();
  return out;
}

/// Direct-approach AG-EG with constant weight alpha and eta = alpha / mu_F;
/// returns the last iterate (x_T, y_T). Requires mu_F, mu_G > 0 and alpha
/// no larger than the noiseless admissible weight alpha_bar(1, 0).
inline SolverOutput ageg_direct(const Point& start, long T, double alpha, OracleBundle& oracles,
                                double R, const Monitor& monitor = {}) {
  const SaddleProblem& problem = oracles.problem();
  if (problem.regime() != Regime::kStronglyConvex)
    throw Error(ErrorKind::kInvalidRegime, "ageg_direct needs mu_F, mu_G > 0");
  const RescaledConstants grouped = rescale(problem, RescaleVariant::kGrouped);
  const double alpha_max = alpha_bar_direct(grouped, 1.0, 0.0);
  if (!(alpha > 0.0) || alpha > alpha_max * (1.0 + 1e-12))
    throw Error(ErrorKind::kScheduleViolation,
                "alpha = " + format_double(alpha) + " exceeds alpha_bar = " + format_double(alpha_max));
  const Schedule schedule = Schedule::direct_constant(alpha, grouped.mu_str);
  const detail::Corrections corr{true, problem.constants().mu_F, problem.constants().mu_G};
  detail::Recorder rec(monitor, R);
  bool stopped = false;
  const IterateState s = detail::ag_eg_loop(start, T, schedule, oracles, R, corr,
                                            OutputConvention::kLastIterate, rec, 1, 0, true, stopped);
  SolverOutput out;
  out.point = {s.x, s.y};
  out.convention = OutputConvention::kLastIterate;
  out.iterations = s.t;
  out.first_hit = rec.first_hit();
  out.epoch_end_dist.push_back(rec.distance(s.x, s.y));
  out.trace = std::move(rec.trace());
  out.trace.output = out.point;
  out.trace.seed = oracles.seed();
  return out;
}

namespace detail {

template <typename Step>
SolverOutput run_baseline(const Point& start, long T, double R, OracleBundle& oracles,
                          const Monitor& monitor, Step&& step) {
  if (T < 1) throw Error(ErrorKind::kConfig, "T must be >= 1");
  if (!(R > 0.0)) throw Error(ErrorKind::kConfig, "R must be positive");
  check_start(start, oracles);
  Recorder rec(monitor, R);
  Point p = start;
  long t = 1;
  for (; t <= T; ++t) {
    step(p);
    rec.check_finite(p.x, p.y, 1, t);
    if (rec.step(1, t, t, oracles.counts().queries, p.x, p.y, t == T)) break;
  }
  SolverOutput out;
  out.point = p;
  out.convention = OutputConvention::kLastIterate;
  out.iterations = std::min(t, T);
  out.first_hit = rec.first_hit();
  out.epoch_end_dist.push_back(rec.distance(p.x, p.y));
  out.trace = std::move(rec.trace());
  out.trace.output = out.point;
  out.trace.seed = oracles.seed();
  return out;
}

/// Descent direction (grad_x f, (-grad_y f) / R) at p from a fresh sample pair.
inline Point field(OracleBundle& oracles, const Point& p) {
  const SampleDraw d = oracles.draw();
  const auto fg = oracles.grad_fg(p.x, p.y, d.xi_half);
  const auto h = oracles.grad_h(p.x, p.y, d.zeta_half);
  return {fg.f + h.x, fg.g - h.y};
}

}  // namespace detail

/// Plain extragradient on the full vector field (two evaluations per step,
/// independent samples); returns the last iterate.
inline SolverOutput baseline_eg(const Point& start, long T, double eta, OracleBundle& oracles,
                                double R, const Monitor& monitor = {}) {
  if (!(eta > 0.0)) throw Error(ErrorKind::kConfig, "eta must be positive");
  return detail::run_baseline(start, T, R, oracles, monitor, [&](Point& p) {
    const Point g0 = detail::field(oracles, p);
    const Point half{p.x - eta * g0.x, p.y - (eta / R) * g0.y};
    const Point g1 = detail::field(oracles, half);
    p.x -= eta * g1.x;
    p.y -= (eta / R) * g1.y;
  });
}

/// Simultaneous gradient descent-ascent; returns the last iterate.
inline SolverOutput baseline_gda(const Point& start, long T, double eta, OracleBundle& oracles,
                                 double R, const Monitor& monitor = {}) {
  if (!(eta > 0.0)) throw Error(ErrorKind::kConfig, "eta must be positive");
  return detail::run_baseline(start, T, R, oracles, monitor, [&](Point& p) {
    const Point g = detail::field(oracles, p);
    p.x -= eta * g.x;
    p.y -= (eta / R) * g.y;
  });
}

}  // namespace ageg

#endif  // AGEG_SOLVERS_HPP
