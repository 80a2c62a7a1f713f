#ifndef AGEG_ERROR_HPP
#define AGEG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ageg {

enum class ErrorKind {
  kInvalidRegime,
  kNoUniqueSaddle,
  kConfig,
  kDomain,
  kDimensionMismatch,
  kDegenerateProblem,
  kScheduleViolation,
  kNotApplicable,
  kNotStronglyConcave,
  kInsufficientData,
  kSpec,
  kDiverged,
  kIo,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidRegime: return "invalid-regime";
    case ErrorKind::kNoUniqueSaddle: return "no-unique-saddle";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kDimensionMismatch: return "dimension-mismatch";
    case ErrorKind::kDegenerateProblem: return "degenerate-problem";
    case ErrorKind::kScheduleViolation: return "schedule-violation";
    case ErrorKind::kNotApplicable: return "not-applicable";
    case ErrorKind::kNotStronglyConcave: return "not-strongly-concave";
    case ErrorKind::kInsufficientData: return "insufficient-data";
    case ErrorKind::kSpec: return "spec";
    case ErrorKind::kDiverged: return "diverged";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ageg

#endif  // AGEG_ERROR_HPP
