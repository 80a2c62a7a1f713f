#ifndef AGEG_GENERATORS_HPP
#define AGEG_GENERATORS_HPP

// Seeded problem factories. Spectra are placed explicitly (log-spaced between
// the requested endpoints) so that condition numbers are exact.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ageg/core_model.hpp"
#include "ageg/random.hpp"

namespace ageg {

namespace detail {

/// k values log-spaced from `hi` down to `lo`, endpoints exact.
inline Vector log_spaced(double hi, double lo, Index k) {
  Vector out(k);
  if (k == 1) {
    out(0) = hi;
    return out;
  }
  const double a = std::log(hi);
  const double b = std::log(lo);
  for (Index i = 0; i < k; ++i)
    out(i) = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1));
  out(0) = hi;
  out(k - 1) = lo;
  return out;
}

inline Matrix symmetric_with_spectrum(const Vector& eig, Rng& rng) {
  const Matrix Q = rng.orthogonal(eig.size());
  Matrix M = Q * eig.asDiagonal() * Q.transpose();
  return 0.5 * (M + M.transpose());
}

}  // namespace detail

/// Square bilinear game with F = G = 0, B = U diag(s) V' and singular values
/// log-spaced from 1 down to 1/kappa, so sqrt(lambda_max / lambda_min) = kappa.
inline SaddleProblem gen_bilinear(Index n, double kappa, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::kConfig, "gen_bilinear: n must be >= 1");
  if (!(kappa >= 1.0)) throw Error(ErrorKind::kConfig, "gen_bilinear: kappa must be >= 1");
  Rng rng(seed);
  const Vector s = detail::log_spaced(1.0, 1.0 / kappa, n);
  const Matrix U = rng.orthogonal(n);
  const Matrix V = rng.orthogonal(n);
  BilinearCoupling h{U * s.asDiagonal() * V.transpose(), rng.normal_vector(n), rng.normal_vector(n)};
  return SaddleProblem::create(QuadraticFn::zero(n), QuadraticFn::zero(n), std::move(h),
                               {0.0, 0.0, 0.0, 0.0});
}

/// Strongly-convex-strongly-concave quadratic game. Spectra of M_F and M_G
/// span [mu, L] with both endpoints attained (one eigenvalue mu in dimension
/// one); ||B|| = b_max with the remaining singular values in [b_max/10, b_max];
/// u = 0 and v random.
inline SaddleProblem gen_quadratic(Index n, Index m, double L_F, double mu_F, double L_G,
                                   double mu_G, double b_max, std::uint64_t seed) {
  if (n < 1 || m < 1) throw Error(ErrorKind::kConfig, "gen_quadratic: dimensions must be >= 1");
  if (!(mu_F > 0.0) || !(mu_G > 0.0))
    throw Error(ErrorKind::kConfig, "gen_quadratic: mu must be positive");
  if (mu_F > L_F) throw Error(ErrorKind::kConfig, "gen_quadratic: mu_F exceeds L_F");
  if (mu_G > L_G) throw Error(ErrorKind::kConfig, "gen_quadratic: mu_G exceeds L_G");
  if (!(b_max >= 0.0)) throw Error(ErrorKind::kConfig, "gen_quadratic: b_max must be >= 0");
  Rng rng(seed);
  const Vector eF = n == 1 ? Vector::Constant(1, mu_F) : detail::log_spaced(L_F, mu_F, n);
  const Vector eG = m == 1 ? Vector::Constant(1, mu_G) : detail::log_spaced(L_G, mu_G, m);
  QuadraticFn F{detail::symmetric_with_spectrum(eF, rng), rng.normal_vector(n), 0.0};
  QuadraticFn G{detail::symmetric_with_spectrum(eG, rng), rng.normal_vector(m), 0.0};

  const Index k = std::min(n, m);
  Vector s(k);
  for (Index i = 0; i < k; ++i) s(i) = i == 0 ? b_max : rng.uniform(0.1 * b_max, b_max);
  const Matrix U = rng.orthogonal(n);
  const Matrix V = rng.orthogonal(m);
  Matrix B = U.leftCols(k) * s.asDiagonal() * V.leftCols(k).transpose();
  BilinearCoupling h{std::move(B), Vector::Zero(n), Vector::Zero(m)};
  return SaddleProblem::create(std::move(F), std::move(G), std::move(h), {L_F, mu_F, L_G, mu_G});
}

/// One transition (s_t, a_t, r_t, s_{t+1}) seen through the features phi.
struct MdpTuple {
  Vector phi_s;
  int action = 0;
  double reward = 0.0;
  Vector phi_next;
};

struct MdpTuples {
  std::vector<MdpTuple> tuples;
  double gamma = 0.9;
  double rho = 1.0;

  Index dim() const { return tuples.empty() ? 0 : tuples.front().phi_s.size(); }
};

/// Policy evaluation as a saddle problem:
///   min_theta max_w rho/2 ||theta||^2 - w'A theta - 1/2 w'C w + w'b
/// with A = mean phi (phi - gamma phi')', b = mean r phi, C = mean phi phi'.
inline SaddleProblem gen_mspbe(const MdpTuples& data) {
  if (data.tuples.empty()) throw Error(ErrorKind::kConfig, "mspbe: need at least one tuple");
  if (!(data.gamma >= 0.0 && data.gamma < 1.0))
    throw Error(ErrorKind::kConfig, "mspbe: gamma must lie in [0, 1)");
  if (!(data.rho > 0.0)) throw Error(ErrorKind::kConfig, "mspbe: rho must be positive");
  const Index d = data.dim();
  if (d < 1) throw Error(ErrorKind::kConfig, "mspbe: empty feature vectors");
  Matrix A = Matrix::Zero(d, d);
  Matrix C = Matrix::Zero(d, d);
  Vector b = Vector::Zero(d);
  for (const MdpTuple& tp : data.tuples) {
    if (tp.phi_s.size() != d || tp.phi_next.size() != d)
      throw Error(ErrorKind::kDimensionMismatch, "mspbe: feature vectors differ in dimension");
    A += tp.phi_s * (tp.phi_s - data.gamma * tp.phi_next).transpose();
    C += tp.phi_s * tp.phi_s.transpose();
    b += tp.reward * tp.phi_s;
  }
  const double inv = 1.0 / static_cast<double>(data.tuples.size());
  A *= inv;
  C *= inv;
  b *= inv;
  C = 0.5 * (C + C.transpose());

  const Eigen::SelfAdjointEigenSolver<Matrix> es(C, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(d - 1);
  if (!(lo > 1e-12 * std::max(1.0, hi)))
    throw Error(ErrorKind::kNotStronglyConcave, "mspbe: feature covariance C is singular");

  QuadraticFn F{data.rho * Matrix::Identity(d, d), Vector::Zero(d), 0.0};
  QuadraticFn G{C, Vector::Zero(d), 0.0};
  BilinearCoupling h{-A.transpose(), Vector::Zero(d), b};
  return SaddleProblem::create(std::move(F), std::move(G), std::move(h),
                               {data.rho, data.rho, hi, lo});
}

/// Tuples from a random walk on a chain of `n_states` states with Gaussian
/// features in dimension d and a fixed random reward per state. The walk
/// steps right with probability 0.6 and reflects at the ends.
inline MdpTuples synth_chain_mdp(int n_states, Index d, long n_tuples, double gamma, double rho,
                                 std::uint64_t seed) {
  if (n_states < 2 || n_states > 20) throw Error(ErrorKind::kConfig, "chain mdp: states in [2, 20]");
  if (d < 1 || d > 5) throw Error(ErrorKind::kConfig, "chain mdp: d in [1, 5]");
  if (n_tuples < 1) throw Error(ErrorKind::kConfig, "chain mdp: n_tuples must be >= 1");
  Rng rng(seed);
  std::vector<Vector> phi;
  std::vector<double> reward;
  for (int s = 0; s < n_states; ++s) {
    phi.push_back(rng.normal_vector(d));
    reward.push_back(rng.normal());
  }
  MdpTuples out;
  out.gamma = gamma;
  out.rho = rho;
  int s = 0;
  for (long t = 0; t < n_tuples; ++t) {
    const int right = rng.uniform() < 0.6 ? 1 : 0;
    int next = s + (right ? 1 : -1);
    if (next < 0) next = 1;
    if (next >= n_states) next = n_states - 2;
    out.tuples.push_back({phi[static_cast<std::size_t>(s)], right, reward[static_cast<std::size_t>(s)],
                          phi[static_cast<std::size_t>(next)]});
    s = next;
  }
  return out;
}

/// Reads tuples from CSV with header phi_s_0..phi_s_{d-1},reward,phi_sp_0..phi_sp_{d-1}.
inline MdpTuples load_mdp_csv(std::istream& in, double gamma, double rho) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      cells.push_back(cell);
    }
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kConfig, "mdp csv: missing header");
  const auto header = split(line);
  if (header.size() < 3 || header.size() % 2 == 0)
    throw Error(ErrorKind::kConfig, "mdp csv: expected 2d+1 columns");
  const std::size_t d = (header.size() - 1) / 2;
  for (std::size_t i = 0; i < d; ++i) {
    if (header[i] != "phi_s_" + std::to_string(i))
      throw Error(ErrorKind::kConfig, "mdp csv: unexpected column '" + header[i] + "'");
    if (header[d + 1 + i] != "phi_sp_" + std::to_string(i))
      throw Error(ErrorKind::kConfig, "mdp csv: unexpected column '" + header[d + 1 + i] + "'");
  }
  if (header[d] != "reward") throw Error(ErrorKind::kConfig, "mdp csv: missing reward column");

  MdpTuples out;
  out.gamma = gamma;
  out.rho = rho;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw Error(ErrorKind::kConfig, "mdp csv: row " + std::to_string(row) + " has wrong width");
    std::vector<double> v(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      try {
        std::size_t used = 0;
        v[i] = std::stod(cells[i], &used);
        if (used != cells[i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error(ErrorKind::kConfig, "mdp csv: row " + std::to_string(row) + ", column '" +
                                            header[i] + "' is not a number");
      }
    }
    MdpTuple tp;
    tp.phi_s = Eigen::Map<const Vector>(v.data(), static_cast<Index>(d));
    tp.reward = v[d];
    tp.phi_next = Eigen::Map<const Vector>(v.data() + d + 1, static_cast<Index>(d));
    out.tuples.push_back(std::move(tp));
  }
  if (out.tuples.empty()) throw Error(ErrorKind::kConfig, "mdp csv: no data rows");
  return out;
}

inline MdpTuples load_mdp_csv(const std::string& path, double gamma, double rho) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open tuple file " + path);
  return load_mdp_csv(in, gamma, rho);
}

/// Ridge regression min_x ridge/2 ||x||^2 + 1/(2N) ||A x - b||^2 through the
/// squared-loss conjugate l*(y) = y^2/2 + b y:
///   min_x max_y ridge/2 ||x||^2 + x'(A'/N) y - (1/N) sum (y_i^2/2 + b_i y_i).
/// Rows of A are samples. With more samples than features B is wide and the
/// problem is stored with the players swapped.
inline SaddleProblem ridge_erm_problem(const Matrix& A, const Vector& b, double ridge) {
  if (!(ridge > 0.0)) throw Error(ErrorKind::kConfig, "ridge_erm: ridge must be positive");
  if (A.rows() != b.size() || A.rows() < 1 || A.cols() < 1)
    throw Error(ErrorKind::kDimensionMismatch, "ridge_erm: A and b disagree");
  const Index N = A.rows();
  const Index d = A.cols();
  const double inv = 1.0 / static_cast<double>(N);
  QuadraticFn F{ridge * Matrix::Identity(d, d), Vector::Zero(d), 0.0};
  QuadraticFn G{inv * Matrix::Identity(N, N), Vector::Zero(N), 0.0};
  BilinearCoupling h{inv * A.transpose(), Vector::Zero(d), -inv * b};
  return SaddleProblem::create(std::move(F), std::move(G), std::move(h), {ridge, ridge, inv, inv});
}

inline SaddleProblem gen_ridge_erm(Index n_samples, Index d, double ridge, std::uint64_t seed) {
  if (n_samples < 1 || d < 1) throw Error(ErrorKind::kConfig, "ridge_erm: sizes must be >= 1");
  Rng rng(seed);
  const Matrix A = rng.normal_matrix(n_samples, d);
  const Vector b = rng.normal_vector(n_samples);
  return ridge_erm_problem(A, b, ridge);
}

}  // namespace ageg

#endif  // AGEG_GENERATORS_HPP
