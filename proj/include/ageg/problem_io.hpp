#ifndef AGEG_PROBLEM_IO_HPP
#define AGEG_PROBLEM_IO_HPP

// JSON form of a SaddleProblem:
//   {n, m, F:{M,v,c}, G:{M,v,c}, B, u_x, u_y, L_F, mu_F, L_G, mu_G}
// Matrices are row-major arrays of arrays. Problems are written in the
// caller's orientation, so a wide B round-trips as a wide B.

#include <fstream>
#include <string>

#include <json.hpp>

#include "ageg/core_model.hpp"

namespace ageg {

using json = nlohmann::json;

inline json to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json to_json(const Matrix& a) {
  json out = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

inline Vector vector_from_json(const json& j, const std::string& key) {
  if (!j.is_array()) throw Error(ErrorKind::kConfig, key + ": expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorKind::kConfig, key + ": expected numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline Matrix matrix_from_json(const json& j, const std::string& key, Index rows, Index cols) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    throw Error(ErrorKind::kConfig, key + ": expected " + std::to_string(rows) + " rows");
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw Error(ErrorKind::kConfig, key + ": row " + std::to_string(i) + " must have " +
                                          std::to_string(cols) + " entries");
    for (Index k = 0; k < cols; ++k) {
      if (!row[static_cast<std::size_t>(k)].is_number())
        throw Error(ErrorKind::kConfig, key + ": expected numbers");
      a(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
  }
  return a;
}

inline json problem_to_json(const SaddleProblem& problem) {
  const auto parts = problem.original_components();
  auto quad = [](const QuadraticFn& q) {
    return json{{"M", to_json(q.M)}, {"v", to_json(q.v)}, {"c", q.c}};
  };
  return json{{"n", parts.F.dim()},
              {"m", parts.G.dim()},
              {"F", quad(parts.F)},
              {"G", quad(parts.G)},
              {"B", to_json(parts.H.B)},
              {"u_x", to_json(parts.H.u_x)},
              {"u_y", to_json(parts.H.u_y)},
              {"L_F", parts.constants.L_F},
              {"mu_F", parts.constants.mu_F},
              {"L_G", parts.constants.L_G},
              {"mu_G", parts.constants.mu_G}};
}

inline SaddleProblem problem_from_json(const json& j) {
  static const char* const kKeys[] = {"n",   "m",   "F",    "G",   "B",   "u_x",
                                      "u_y", "L_F", "mu_F", "L_G", "mu_G"};
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "problem: expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kKeys) known = known || key == k;
    if (!known) throw Error(ErrorKind::kConfig, "problem: unknown key '" + key + "'");
  }
  for (const char* k : kKeys)
    if (!j.contains(k)) throw Error(ErrorKind::kConfig, std::string("problem: missing key '") + k + "'");

  const Index n = j.at("n").get<Index>();
  const Index m = j.at("m").get<Index>();
  auto quad = [](const json& q, const std::string& name, Index dim) {
    for (const auto& [key, value] : q.items())
      if (key != "M" && key != "v" && key != "c")
        throw Error(ErrorKind::kConfig, "problem." + name + ": unknown key '" + key + "'");
    QuadraticFn f;
    f.M = matrix_from_json(q.at("M"), "problem." + name + ".M", dim, dim);
    f.v = vector_from_json(q.at("v"), "problem." + name + ".v");
    f.c = q.value("c", 0.0);
    return f;
  };
  BilinearCoupling h;
  h.B = matrix_from_json(j.at("B"), "problem.B", n, m);
  h.u_x = vector_from_json(j.at("u_x"), "problem.u_x");
  h.u_y = vector_from_json(j.at("u_y"), "problem.u_y");
  ProblemConstants c{j.at("L_F").get<double>(), j.at("mu_F").get<double>(),
                     j.at("L_G").get<double>(), j.at("mu_G").get<double>()};
  return SaddleProblem::create(quad(j.at("F"), "F", n), quad(j.at("G"), "G", m), std::move(h), c);
}

inline SaddleProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open problem file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, path + ": " + e.what());
  }
  return problem_from_json(j);
}

}  // namespace ageg

#endif  // AGEG_PROBLEM_IO_HPP
