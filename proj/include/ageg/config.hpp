#ifndef AGEG_CONFIG_HPP
#define AGEG_CONFIG_HPP

// Experiment configuration. TOML and JSON share one schema: TOML documents
// are converted to JSON first and both go through the same validator, which
// rejects unknown keys and names the offending one.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "ageg/error.hpp"

namespace ageg {

struct ProblemConfig {
  std::string kind = "bilinear";  // bilinear | quadratic | mspbe | ridge_erm | file
  long n = 10;
  long m = 10;
  double kappa = 10.0;
  double L_F = 10.0, mu_F = 1.0, L_G = 10.0, mu_G = 1.0;
  double b_max = 1.0;
  double R = 1.0;  // ratio used in the bilinear regime
  std::string path;
  std::optional<std::uint64_t> seed;
  // mspbe
  long states = 10;
  long d = 3;
  long tuples = 500;
  double gamma = 0.9;
  double rho = 1.0;
  std::string csv;
  // ridge_erm
  long samples = 20;
  double ridge = 0.1;
};

struct SolverConfig {
  std::string algorithm = "ageg";  // ageg | ageg_restarted | ageg_direct | eg | gda
  long T = 200;
  std::optional<double> eta;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  bool stop_at_target = false;
  std::string start = "zero";  // zero | ones
};

struct ScheduleConfig {
  double r = 0.5;
  double beta = 1.0;
  double C = 1.0;
  std::optional<double> c_epoch;
  double c_floor = 1.0;
  std::optional<double> gamma0_sq;
};

struct NoiseConfig {
  std::string kind = "deterministic";  // deterministic | gaussian
  double sigma_str = 0.0;
  double sigma_bil = 0.0;
};

struct SweepConfig {
  std::string axis;  // kappa | sigma | T
  std::vector<double> values;
  long seeds = 1;
};

struct VerifyConfig {
  long seeds = 100;
  double slack = 0.1;
  long instances = 20;
  long lemma1_trials = 100000;
  long lemma2_points = 10000;
  long lemma3_params = 100;
  long lemma3_tmax = 10000;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  ProblemConfig problem;
  SolverConfig solver;
  ScheduleConfig schedule;
  NoiseConfig noise;
  std::string trace = "full";  // none | final | full
  SweepConfig sweep;
  VerifyConfig verify;
};

namespace detail {

/// Typed reader over one JSON object that remembers which keys were used.
class Section {
 public:
  Section(const nlohmann::json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) fail(prefix_.empty() ? "config" : prefix_.substr(0, prefix_.size() - 1), "expected a table");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.push_back(key);
    if (!j_.contains(key)) return;
    out = read<T>(j_.at(key), key);
  }

  template <typename T>
  void get(const char* key, std::optional<T>& out) {
    seen_.push_back(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    out = read<T>(j_.at(key), key);
  }

  void one_of(const char* key, const std::string& value, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
      if (value == a) return;
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    fail(prefix_ + key, "'" + value + "' is not one of {" + list + "}");
  }

  Section sub(const char* key) {
    seen_.push_back(key);
    static const nlohmann::json empty = nlohmann::json::object();
    return Section(j_.contains(key) ? j_.at(key) : empty, prefix_ + key + ".");
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      bool known = false;
      for (const std::string& s : seen_) known = known || s == key;
      if (!known) fail(prefix_ + key, "unknown key");
    }
  }

  [[noreturn]] static void fail(const std::string& key, const std::string& what) {
    throw Error(ErrorKind::kConfig, "config key '" + key + "': " + what);
  }

 private:
  template <typename T>
  T read(const nlohmann::json& v, const char* key) const {
    const std::string name = prefix_ + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(name, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(name, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) fail(name, "expected a number");
      return v.get<double>();
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) fail(name, "expected an array of numbers");
      std::vector<double> out;
      for (const auto& e : v) {
        if (!e.is_number()) fail(name, "expected an array of numbers");
        out.push_back(e.get<double>());
      }
      return out;
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        fail(name, "expected a nonnegative integer");
      return v.get<std::uint64_t>();
    } else {
      static_assert(std::is_same_v<T, long>);
      if (!v.is_number_integer()) fail(name, "expected an integer");
      return v.get<long>();
    }
  }

  const nlohmann::json& j_;
  std::string prefix_;
  std::vector<std::string> seen_;
};

inline nlohmann::json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
    return out;
  }
  if (const auto* a = node.as_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : *a) out.push_back(toml_to_json(v));
    return out;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  throw Error(ErrorKind::kConfig, "config: dates and times are not supported");
}

}  // namespace detail

/// Validates a config document against the schema.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  detail::Section root(j, "");
  root.get("seed", cfg.seed);
  root.get("trace", cfg.trace);
  root.one_of("trace", cfg.trace, {"none", "final", "full"});

  {
    auto s = root.sub("problem");
    auto& p = cfg.problem;
    s.get("kind", p.kind);
    s.one_of("kind", p.kind, {"bilinear", "quadratic", "mspbe", "ridge_erm", "file"});
    s.get("n", p.n);
    s.get("m", p.m);
    s.get("kappa", p.kappa);
    s.get("L_F", p.L_F);
    s.get("mu_F", p.mu_F);
    s.get("L_G", p.L_G);
    s.get("mu_G", p.mu_G);
    s.get("b_max", p.b_max);
    s.get("R", p.R);
    s.get("path", p.path);
    s.get("seed", p.seed);
    s.get("states", p.states);
    s.get("d", p.d);
    s.get("tuples", p.tuples);
    s.get("gamma", p.gamma);
    s.get("rho", p.rho);
    s.get("csv", p.csv);
    s.get("samples", p.samples);
    s.get("ridge", p.ridge);
    s.finish();
    if (p.kind == "file" && p.path.empty()) detail::Section::fail("problem.path", "required when kind = \"file\"");
    if (!(p.R > 0.0)) detail::Section::fail("problem.R", "must be positive");
  }
  {
    auto s = root.sub("solver");
    auto& v = cfg.solver;
    s.get("algorithm", v.algorithm);
    s.one_of("algorithm", v.algorithm, {"ageg", "ageg_restarted", "ageg_direct", "eg", "gda"});
    s.get("T", v.T);
    s.get("eta", v.eta);
    s.get("alpha", v.alpha);
    s.get("epsilon", v.epsilon);
    s.get("stop_at_target", v.stop_at_target);
    s.get("start", v.start);
    s.one_of("start", v.start, {"zero", "ones"});
    s.finish();
    if (v.T < 1) detail::Section::fail("solver.T", "must be >= 1");
    if (v.epsilon && !(*v.epsilon > 0.0)) detail::Section::fail("solver.epsilon", "must be positive");
    if (v.algorithm == "ageg_restarted" && !v.epsilon)
      detail::Section::fail("solver.epsilon", "required for ageg_restarted");
  }
  {
    auto s = root.sub("schedule");
    auto& v = cfg.schedule;
    s.get("r", v.r);
    s.get("beta", v.beta);
    s.get("C", v.C);
    s.get("c_epoch", v.c_epoch);
    s.get("c_floor", v.c_floor);
    s.get("gamma0_sq", v.gamma0_sq);
    s.finish();
  }
  {
    auto s = root.sub("noise");
    auto& v = cfg.noise;
    s.get("kind", v.kind);
    s.one_of("kind", v.kind, {"deterministic", "gaussian"});
    s.get("sigma_str", v.sigma_str);
    s.get("sigma_bil", v.sigma_bil);
    s.finish();
  }
  {
    auto s = root.sub("sweep");
    auto& v = cfg.sweep;
    s.get("axis", v.axis);
    if (!v.axis.empty()) s.one_of("axis", v.axis, {"kappa", "sigma", "T"});
    s.get("values", v.values);
    s.get("seeds", v.seeds);
    s.finish();
    if (v.seeds < 1) detail::Section::fail("sweep.seeds", "must be >= 1");
  }
  {
    auto s = root.sub("verify");
    auto& v = cfg.verify;
    s.get("seeds", v.seeds);
    s.get("slack", v.slack);
    s.get("instances", v.instances);
    s.get("lemma1_trials", v.lemma1_trials);
    s.get("lemma2_points", v.lemma2_points);
    s.get("lemma3_params", v.lemma3_params);
    s.get("lemma3_tmax", v.lemma3_tmax);
    s.finish();
    if (v.seeds < 1) detail::Section::fail("verify.seeds", "must be >= 1");
  }
  root.finish();
  return cfg;
}

inline nlohmann::json parse_toml(const std::string& text, const std::string& source) {
  try {
    return detail::toml_to_json(toml::parse(text, source));
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ':' << e.source().begin.line << ": " << e.description();
    throw Error(ErrorKind::kConfig, msg.str());
  }
}

/// Loads a config file; `.json` files are read as JSON, anything else as TOML.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  nlohmann::json j;
  if (is_json) {
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kConfig, path + ": " + e.what());
    }
  } else {
    j = parse_toml(text, path);
  }
  return config_from_json(j);
}

/// Canonical JSON echo of a validated config (every field, defaults filled).
inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
  const auto& p = c.problem;
  json problem{{"kind", p.kind}, {"n", p.n}, {"m", p.m}, {"kappa", p.kappa}, {"L_F", p.L_F},
               {"mu_F", p.mu_F}, {"L_G", p.L_G}, {"mu_G", p.mu_G}, {"b_max", p.b_max}, {"R", p.R},
               {"path", p.path}, {"seed", opt(p.seed)}, {"states", p.states}, {"d", p.d},
               {"tuples", p.tuples}, {"gamma", p.gamma}, {"rho", p.rho}, {"csv", p.csv},
               {"samples", p.samples}, {"ridge", p.ridge}};
  const auto& s = c.solver;
  json solver{{"algorithm", s.algorithm}, {"T", s.T}, {"eta", opt(s.eta)}, {"alpha", opt(s.alpha)},
              {"epsilon", opt(s.epsilon)}, {"stop_at_target", s.stop_at_target}, {"start", s.start}};
  const auto& h = c.schedule;
  json schedule{{"r", h.r}, {"beta", h.beta}, {"C", h.C}, {"c_epoch", opt(h.c_epoch)},
                {"c_floor", h.c_floor}, {"gamma0_sq", opt(h.gamma0_sq)}};
  json noise{{"kind", c.noise.kind}, {"sigma_str", c.noise.sigma_str}, {"sigma_bil", c.noise.sigma_bil}};
  json sweep{{"axis", c.sweep.axis}, {"values", c.sweep.values}, {"seeds", c.sweep.seeds}};
  const auto& v = c.verify;
  json verify{{"seeds", v.seeds}, {"slack", v.slack}, {"instances", v.instances},
              {"lemma1_trials", v.lemma1_trials}, {"lemma2_points", v.lemma2_points},
              {"lemma3_params", v.lemma3_params}, {"lemma3_tmax", v.lemma3_tmax}};
  return {{"seed", c.seed}, {"trace", c.trace}, {"problem", problem}, {"solver", solver},
          {"schedule", schedule}, {"noise", noise}, {"sweep", sweep}, {"verify", verify}};
}

}  // namespace ageg

#endif  // AGEG_CONFIG_HPP
