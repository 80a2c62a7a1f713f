#ifndef AGEG_CORE_MODEL_HPP
#define AGEG_CORE_MODEL_HPP

// Problem representation for bilinearly-coupled saddle-point problems
//
//   min_x max_y  F(x) + x'By - x'u_x + u_y'y - G(y)
//
// with quadratic F and G, plus the rescaling constants, spectral utilities,
// exact saddle solve and the weighted distance used as convergence metric.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "ageg/error.hpp"

namespace ageg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// A primal-dual pair (x, y).
struct Point {
  Vector x;
  Vector y;
};

/// The unique saddle (x*, y*) of a problem.
using SaddlePoint = Point;

/// q(z) = 1/2 z'Mz - v'z + c
struct QuadraticFn {
  Matrix M;
  Vector v;
  double c = 0.0;

  static QuadraticFn zero(Index n) { return {Matrix::Zero(n, n), Vector::Zero(n), 0.0}; }

  Index dim() const { return v.size(); }
  double value(const Vector& z) const { return 0.5 * z.dot(M * z) - v.dot(z) + c; }
  Vector gradient(const Vector& z) const { return M * z - v; }
  bool is_zero() const { return M.isZero(0.0) && v.isZero(0.0); }
};

/// H(x, y) = x'By - x'u_x + u_y'y
struct BilinearCoupling {
  Matrix B;
  Vector u_x;
  Vector u_y;

  double value(const Vector& x, const Vector& y) const {
    return x.dot(B * y) - x.dot(u_x) + u_y.dot(y);
  }
  Vector grad_x(const Vector& /*x*/, const Vector& y) const { return B * y - u_x; }
  Vector grad_y(const Vector& x, const Vector& /*y*/) const { return B.transpose() * x + u_y; }
};

/// Declared smoothness and strong-convexity constants of F and G.
struct ProblemConstants {
  double L_F = 0.0;
  double mu_F = 0.0;
  double L_G = 0.0;
  double mu_G = 0.0;
};

enum class Regime { kStronglyConvex, kBilinear };

struct SpectralBounds {
  double lambda_max = 0.0;      // lambda_max(B'B) = lambda_max(BB')
  double lambda_min_BBt = 0.0;  // lambda_min(BB'), zero when B is strictly tall
  double lambda_min_BtB = 0.0;  // lambda_min(B'B)
};

/// Extreme eigenvalues of the two Gram matrices of B. Only the smaller Gram
/// matrix is decomposed; the larger one has a zero eigenvalue whenever B is
/// non-square.
inline SpectralBounds spectral_bounds(const Matrix& B) {
  if (B.size() == 0) throw Error(ErrorKind::kDomain, "spectral_bounds: empty matrix");
  const Index n = B.rows();
  const Index m = B.cols();
  const Matrix gram = n >= m ? Matrix(B.transpose() * B) : Matrix(B * B.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double lo = std::max(0.0, ev.minCoeff());
  const double hi = std::max(0.0, ev.maxCoeff());
  SpectralBounds s;
  s.lambda_max = hi;
  if (n == m) {
    s.lambda_min_BBt = lo;
    s.lambda_min_BtB = lo;
  } else if (n > m) {
    s.lambda_min_BBt = 0.0;
    s.lambda_min_BtB = lo;
  } else {
    s.lambda_min_BBt = lo;
    s.lambda_min_BtB = 0.0;
  }
  return s;
}

namespace detail {

inline std::string dims(const Matrix& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

inline void check_symmetric(const Matrix& M, const char* name) {
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorKind::kDomain, std::string(name) + " is not symmetric");
}

inline void check_spectrum(const Matrix& M, double L, double mu, const char* name) {
  if (M.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double tol = 1e-9 * std::max(1.0, L);
  if (lo < mu - tol || hi > L + tol) {
    std::ostringstream os;
    os << name << " spectrum [" << lo << ", " << hi << "] is not bracketed by declared [mu, L] = ["
       << mu << ", " << L << "]";
    throw Error(ErrorKind::kInvalidRegime, os.str());
  }
}

}  // namespace detail

/// Immutable problem instance. A wide coupling matrix is replaced by the
/// symmetrized problem min_y max_x -f(x, y) so that B is always tall
/// internally; `swapped()` records this and `to_original` maps points back.
class SaddleProblem {
 public:
  static SaddleProblem create(QuadraticFn F, QuadraticFn G, BilinearCoupling H,
                              ProblemConstants constants) {
    SaddleProblem p;
    p.F_ = std::move(F);
    p.G_ = std::move(G);
    p.H_ = std::move(H);
    p.constants_ = constants;
    p.check_dimensions();
    if (p.H_.B.rows() < p.H_.B.cols()) p.swap_players();
    p.validate();
    return p;
  }

  const QuadraticFn& F() const { return F_; }
  const QuadraticFn& G() const { return G_; }
  const BilinearCoupling& H() const { return H_; }
  const ProblemConstants& constants() const { return constants_; }
  Regime regime() const { return regime_; }
  bool swapped() const { return swapped_; }
  Index n() const { return F_.dim(); }
  Index m() const { return G_.dim(); }

  double objective(const Vector& x, const Vector& y) const {
    return F_.value(x) + H_.value(x, y) - G_.value(y);
  }

  /// Maps a point of the internal (tall-B) problem to the caller's variables.
  Point to_original(const Point& p) const { return swapped_ ? Point{p.y, p.x} : p; }
  Point from_original(const Point& p) const { return swapped_ ? Point{p.y, p.x} : p; }

  /// Components in the caller's orientation (undoes the tall-B swap).
  struct Components {
    QuadraticFn F;
    QuadraticFn G;
    BilinearCoupling H;
    ProblemConstants constants;
  };
  Components original_components() const {
    if (!swapped_) return {F_, G_, H_, constants_};
    BilinearCoupling h{-H_.B.transpose(), H_.u_y, H_.u_x};
    ProblemConstants c{constants_.L_G, constants_.mu_G, constants_.L_F, constants_.mu_F};
    return {G_, F_, std::move(h), c};
  }

  /// Reparametrizes y_hat = factor * y; objective values agree under the map.
  /// `mu_G_exact` pins the new mu_G instead of mu_G / factor^2.
  SaddleProblem scaled_y(double factor, std::optional<double> mu_G_exact = std::nullopt) const {
    if (!(factor > 0.0)) throw Error(ErrorKind::kDomain, "scaled_y: factor must be positive");
    SaddleProblem p = *this;
    const double f2 = factor * factor;
    p.G_.M = G_.M / f2;
    p.G_.v = G_.v / factor;
    p.H_.B = H_.B / factor;
    p.H_.u_y = H_.u_y / factor;
    p.constants_.L_G = constants_.L_G / f2;
    p.constants_.mu_G = mu_G_exact.value_or(constants_.mu_G / f2);
    p.validate();
    return p;
  }

 private:
  SaddleProblem() = default;

  void check_dimensions() const {
    const Index n = F_.v.size();
    const Index m = G_.v.size();
    auto fail = [](const std::string& what) {
      throw Error(ErrorKind::kDimensionMismatch, what);
    };
    if (F_.M.rows() != n || F_.M.cols() != n) fail("F.M is " + detail::dims(F_.M));
    if (G_.M.rows() != m || G_.M.cols() != m) fail("G.M is " + detail::dims(G_.M));
    if (H_.B.rows() != n || H_.B.cols() != m) fail("B is " + detail::dims(H_.B));
    if (H_.u_x.size() != n) fail("u_x has wrong length");
    if (H_.u_y.size() != m) fail("u_y has wrong length");
    if (n == 0 || m == 0) fail("empty problem");
  }

  void swap_players() {
    std::swap(F_, G_);
    BilinearCoupling h{-H_.B.transpose(), H_.u_y, H_.u_x};
    H_ = std::move(h);
    constants_ = {constants_.L_G, constants_.mu_G, constants_.L_F, constants_.mu_F};
    swapped_ = !swapped_;
  }

  void validate() {
    const auto& c = constants_;
    for (double v : {c.L_F, c.mu_F, c.L_G, c.mu_G})
      if (!(v >= 0.0) || !std::isfinite(v))
        throw Error(ErrorKind::kInvalidRegime, "constants must be finite and nonnegative");
    if (c.mu_F > c.L_F || c.mu_G > c.L_G)
      throw Error(ErrorKind::kInvalidRegime, "strong convexity exceeds smoothness");
    detail::check_symmetric(F_.M, "F.M");
    detail::check_symmetric(G_.M, "G.M");

    if (c.mu_F > 0.0 && c.mu_G > 0.0) {
      detail::check_spectrum(F_.M, c.L_F, c.mu_F, "F.M");
      detail::check_spectrum(G_.M, c.L_G, c.mu_G, "G.M");
      regime_ = Regime::kStronglyConvex;
      return;
    }
    const bool zero_constants = c.L_F == 0.0 && c.mu_F == 0.0 && c.L_G == 0.0 && c.mu_G == 0.0;
    if (!zero_constants || !F_.is_zero() || !G_.is_zero())
      throw Error(ErrorKind::kInvalidRegime,
                  "need mu_F, mu_G > 0, or F = G = 0 with a square nonsingular B");
    if (n() != m())
      throw Error(ErrorKind::kInvalidRegime, "bilinear regime requires a square B");
    const SpectralBounds s = spectral_bounds(H_.B);
    if (!(s.lambda_min_BBt > 1e-14 * std::max(1.0, s.lambda_max)))
      throw Error(ErrorKind::kInvalidRegime, "bilinear regime requires a nonsingular B");
    regime_ = Regime::kBilinear;
  }

  QuadraticFn F_;
  QuadraticFn G_;
  BilinearCoupling H_;
  ProblemConstants constants_;
  Regime regime_ = Regime::kStronglyConvex;
  bool swapped_ = false;
};

enum class RescaleVariant { kStandard, kGrouped };

/// Rescaled constants L_Str, L_Bil, mu_Str and the ratio R = mu_G / mu_F.
/// The grouped variant belongs to the direct (last-iterate) algorithm.
struct RescaledConstants {
  double L_str = 0.0;
  double L_bil = 0.0;
  double mu_str = 0.0;
  double R = 1.0;
  RescaleVariant variant = RescaleVariant::kStandard;
};

/// `bilinear_R` is only consulted in the bilinear regime, where the ratio of
/// the (zero) strong-convexity parameters is indeterminate.
inline RescaledConstants rescale(const SaddleProblem& problem,
                                 RescaleVariant variant = RescaleVariant::kStandard,
                                 double bilinear_R = 1.0) {
  const ProblemConstants& c = problem.constants();
  const double lambda_max = spectral_bounds(problem.H().B).lambda_max;
  RescaledConstants out;
  out.variant = variant;
  if (problem.regime() == Regime::kBilinear) {
    if (variant == RescaleVariant::kGrouped)
      throw Error(ErrorKind::kInvalidRegime, "grouped rescaling needs mu_F, mu_G > 0");
    if (!(bilinear_R > 0.0)) throw Error(ErrorKind::kConfig, "R must be positive");
    out.R = bilinear_R;
    out.L_bil = std::sqrt(lambda_max / bilinear_R);
    return out;
  }
  if (!(c.mu_F > 0.0 && c.mu_G > 0.0))
    throw Error(ErrorKind::kInvalidRegime, "rescale: zero strong convexity");
  const double ratio = c.mu_F / c.mu_G;
  const double L_str = std::max(c.L_F, ratio * c.L_G);
  out.R = c.mu_G / c.mu_F;
  out.mu_str = c.mu_F;
  if (variant == RescaleVariant::kStandard) {
    out.L_str = L_str;
    out.L_bil = std::sqrt(lambda_max * ratio);
  } else {
    out.L_str = L_str - c.mu_F;
    out.L_bil = std::sqrt(lambda_max * ratio + c.mu_F * c.mu_F);
  }
  return out;
}

/// Solves the first-order stationarity system
///   M_F x + B y = v_x + u_x,   -B'x + M_G y = v_y + u_y.
inline SaddlePoint exact_saddle(const SaddleProblem& problem) {
  const Index n = problem.n();
  const Index m = problem.m();
  Matrix K(n + m, n + m);
  K.topLeftCorner(n, n) = problem.F().M;
  K.topRightCorner(n, m) = problem.H().B;
  K.bottomLeftCorner(m, n) = -problem.H().B.transpose();
  K.bottomRightCorner(m, m) = problem.G().M;
  Vector rhs(n + m);
  rhs.head(n) = problem.F().v + problem.H().u_x;
  rhs.tail(m) = problem.G().v + problem.H().u_y;

  Eigen::FullPivLU<Matrix> lu(K);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible())
    throw Error(ErrorKind::kNoUniqueSaddle, "stationarity system is singular");
  Vector z = lu.solve(rhs);
  z += lu.solve(Vector(rhs - K * z));  // one refinement step

  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff() * z.cwiseAbs().maxCoeff() +
                                         rhs.cwiseAbs().maxCoeff());
  if ((K * z - rhs).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw Error(ErrorKind::kNoUniqueSaddle, "stationarity residual too large");
  return {z.head(n), z.tail(m)};
}

/// ||x - x*||^2 + R ||y - y*||^2
inline double weighted_sq_distance(const Vector& x, const Vector& y, const SaddlePoint& saddle,
                                   double R) {
  if (x.size() != saddle.x.size() || y.size() != saddle.y.size())
    throw Error(ErrorKind::kDimensionMismatch, "weighted_sq_distance");
  if (!(R > 0.0)) throw Error(ErrorKind::kDomain, "weighted_sq_distance: R must be positive");
  return (x - saddle.x).squaredNorm() + R * (y - saddle.y).squaredNorm();
}

inline double weighted_sq_distance(const Point& p, const SaddlePoint& saddle, double R) {
  return weighted_sq_distance(p.x, p.y, saddle, R);
}

/// Equal-strong-convexity reparametrization y_hat = y_map * y with
/// y_map = sqrt(mu_G / mu_F).
struct RescaledProblem {
  SaddleProblem problem;
  double y_map;
};

inline RescaledProblem rescale_problem(const SaddleProblem& problem) {
  const ProblemConstants& c = problem.constants();
  if (!(c.mu_F > 0.0 && c.mu_G > 0.0))
    throw Error(ErrorKind::kInvalidRegime, "rescale_problem: zero strong convexity");
  const double y_map = std::sqrt(c.mu_G / c.mu_F);
  return {problem.scaled_y(y_map, c.mu_F), y_map};
}

}  // namespace ageg

#endif  // AGEG_CORE_MODEL_HPP
