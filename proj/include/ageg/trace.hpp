#ifndef AGEG_TRACE_HPP
#define AGEG_TRACE_HPP

// Per-iteration run records and the monitor hooks the solvers report to.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ageg/core_model.hpp"

namespace ageg {

enum class TraceLevel { kNone, kFinal, kFull };

struct TraceRecord {
  long epoch = 1;
  long t = 0;
  std::uint64_t oracle_calls = 0;
  double weighted_sq_dist = std::nan("");  // NaN when the saddle is unknown
  std::optional<double> bound_rhs;
};

/// Shortest round-trip-safe text for a double (17 significant digits).
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct RunTrace {
  std::vector<TraceRecord> records;
  Point output;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;

  static constexpr const char* kCsvHeader = "epoch,t,oracle_calls,weighted_sq_dist,bound_rhs";

  void write_csv(std::ostream& os) const {
    os << kCsvHeader << '\n';
    for (const TraceRecord& r : records) {
      os << r.epoch << ',' << r.t << ',' << r.oracle_calls << ',';
      if (!std::isnan(r.weighted_sq_dist)) os << format_double(r.weighted_sq_dist);
      os << ',';
      if (r.bound_rhs) os << format_double(*r.bound_rhs);
      os << '\n';
    }
  }
};

/// Live vectors of the accelerated extragradient iteration at the end of
/// iteration t: x_t, y_t, the half-shift averages and the extrapolation
/// points.
struct IterateState {
  Vector x, y;
  Vector x_avg, y_avg;
  Vector x_md, y_md;
  long t = 0;
};

/// What a solver run reports and when it may stop early. Without a saddle
/// the distance column stays empty and targets are ignored.
struct Monitor {
  TraceLevel level = TraceLevel::kNone;
  std::optional<SaddlePoint> saddle;
  /// Bound on the weighted squared distance at (epoch, t), if certified.
  std::function<std::optional<double>(long epoch, long t)> bound;
  /// Called after every iteration (accelerated solvers pass the full state).
  std::function<void(const IterateState&)> observer;
  /// Record the first global iteration whose monitored point reaches this
  /// weighted squared distance, and optionally stop there.
  std::optional<double> target;
  bool stop_at_target = false;
};

enum class OutputConvention { kHalfShiftAverage, kLastIterate };

struct SolverOutput {
  Point point;
  RunTrace trace;
  OutputConvention convention = OutputConvention::kLastIterate;
  long iterations = 0;
  std::optional<long> first_hit;
  /// Weighted squared distance of each epoch's output (NaN without saddle).
  std::vector<double> epoch_end_dist;
};

/// Divergence (non-finite iterate); carries the partial trace.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, RunTrace trace)
      : Error(ErrorKind::kDiverged, what), trace_(std::move(trace)) {}
  const RunTrace& trace() const { return trace_; }

 private:
  RunTrace trace_;
};

namespace detail {

/// Shared bookkeeping for one solver run.
class Recorder {
 public:
  Recorder(const Monitor& monitor, double R) : monitor_(monitor), R_(R) {}

  double distance(const Vector& x, const Vector& y) const {
    if (!monitor_.saddle) return std::nan("");
    return weighted_sq_distance(x, y, *monitor_.saddle, R_);
  }

  /// Returns true when the run should stop (target reached with stop_at_target).
  bool step(long epoch, long t, long global_t, std::uint64_t calls, const Vector& x,
            const Vector& y, bool last) {
    const bool need_dist = monitor_.saddle &&
                           (monitor_.level == TraceLevel::kFull || monitor_.target ||
                            (last && monitor_.level == TraceLevel::kFinal));
    const double d = need_dist ? distance(x, y) : std::nan("");
    bool stop = false;
    if (monitor_.target && !std::isnan(d) && d <= *monitor_.target) {
      if (!first_hit_) first_hit_ = global_t;
      stop = monitor_.stop_at_target;
    }
    if (monitor_.level == TraceLevel::kFull || (monitor_.level == TraceLevel::kFinal && (last || stop))) {
      TraceRecord rec{epoch, t, calls, d, std::nullopt};
      if (monitor_.bound) rec.bound_rhs = monitor_.bound(epoch, t);
      trace_.records.push_back(rec);
    }
    return stop;
  }

  void check_finite(const Vector& x, const Vector& y, long epoch, long t) const {
    if (!x.allFinite() || !y.allFinite())
      throw DivergedError("non-finite iterate at epoch " + std::to_string(epoch) + ", t = " +
                              std::to_string(t),
                          trace_);
  }

  void observe(const IterateState& s) const {
    if (monitor_.observer) monitor_.observer(s);
  }

  std::optional<long> first_hit() const { return first_hit_; }
  RunTrace& trace() { return trace_; }

 private:
  const Monitor& monitor_;
  double R_;
  RunTrace trace_;
  std::optional<long> first_hit_;
};

}  // namespace detail

}  // namespace ageg

#endif  // AGEG_TRACE_HPP
