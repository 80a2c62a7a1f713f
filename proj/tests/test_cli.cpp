#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "ageg/cli.hpp"
#include "test_support.hpp"

using namespace ageg;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("ageg_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

int run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"ageg"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

const char* kBilinearToml = R"(seed = 3
[problem]
kind = "bilinear"
n = 4
kappa = 3.0
[solver]
algorithm = "ageg_restarted"
epsilon = 1e-4
[noise]
kind = "deterministic"
)";

}  // namespace

TEST(Config, TomlAndJsonAgree) {
  TempDir dir;
  write(dir.path() / "a.toml", kBilinearToml);
  write(dir.path() / "a.json",
        R"({"seed": 3, "problem": {"kind": "bilinear", "n": 4, "kappa": 3.0},
            "solver": {"algorithm": "ageg_restarted", "epsilon": 1e-4},
            "noise": {"kind": "deterministic"}})");
  const auto a = config_to_json(load_config((dir.path() / "a.toml").string()));
  const auto b = config_to_json(load_config((dir.path() / "a.json").string()));
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a["problem"]["n"], 4);
  EXPECT_EQ(a["solver"]["T"], 200);
}

TEST(Config, UnknownKeyIsNamed) {
  try {
    config_from_json(nlohmann::json::parse(R"({"problem": {"kappa_typo": 1}})"));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_NE(std::string(e.what()).find("problem.kappa_typo"), std::string::npos);
  }
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"solver": {"algorithm": "sgd"}})")), Error);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"solver": {"algorithm": "ageg_restarted"}})")),
               Error);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"seed": -1})")), Error);
}

TEST(Cli, SolveWritesTraceAndIsDeterministic) {
  TempDir dir;
  write(dir.path() / "c.toml", kBilinearToml);
  const std::string cfg = (dir.path() / "c.toml").string();
  ASSERT_EQ(run_cli({"--config", cfg, "--out", (dir.path() / "o1").string(), "solve"}), 0);
  ASSERT_EQ(run_cli({"--config", cfg, "--out", (dir.path() / "o2").string(), "solve"}), 0);
  const std::string trace = slurp(dir.path() / "o1" / "trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "epoch,t,oracle_calls,weighted_sq_dist,bound_rhs");
  EXPECT_EQ(trace, slurp(dir.path() / "o2" / "trace.csv"));
  EXPECT_EQ(slurp(dir.path() / "o1" / "result.json"), slurp(dir.path() / "o2" / "result.json"));
  const auto result = nlohmann::json::parse(slurp(dir.path() / "o1" / "result.json"));
  EXPECT_EQ(result["status"], "ok");
  EXPECT_EQ(result["oracle"]["queries"].get<long>(), 3 * result["iterations"].get<long>());
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  write(dir.path() / "bad.toml", "[problem]\nkappa_typo = 1\n");
  EXPECT_EQ(run_cli({"--config", (dir.path() / "bad.toml").string(), "solve"}), 1);
  EXPECT_EQ(run_cli({"--config", (dir.path() / "missing.toml").string(), "solve"}), 1);
  EXPECT_EQ(run_cli({"solve"}), 1);
  write(dir.path() / "gda.toml",
        "[problem]\nkind = \"bilinear\"\nn = 3\nkappa = 2.0\n[solver]\nalgorithm = \"gda\"\nT = 2000\neta = 5.0\n");
  EXPECT_EQ(run_cli({"--config", (dir.path() / "gda.toml").string(), "--out", dir.path().string(), "solve"}),
            2);
  const auto result = nlohmann::json::parse(slurp(dir.path() / "result.json"));
  EXPECT_EQ(result["status"], "diverged");
}

TEST(Cli, SingleValueSweepAndJobsInvariance) {
  TempDir dir;
  write(dir.path() / "s.toml", std::string(kBilinearToml) + "[sweep]\naxis = \"kappa\"\nvalues = [2.0, 4.0, 8.0]\n");
  const std::string cfg = (dir.path() / "s.toml").string();
  ASSERT_EQ(run_cli({"--config", cfg, "--out", (dir.path() / "j1").string(), "sweep"}), 0);
  ASSERT_EQ(run_cli({"--config", cfg, "--out", (dir.path() / "j2").string(), "--jobs", "2", "sweep"}), 0);
  const std::string summary = slurp(dir.path() / "j1" / "summary.csv");
  EXPECT_EQ(summary, slurp(dir.path() / "j2" / "summary.csv"));
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "axis_value,iters_to_eps,final_dist,slope,plateau_ratio");
  for (int i = 0; i < 3; ++i)
    EXPECT_EQ(slurp(dir.path() / "j1" / ("run_" + std::to_string(i)) / "trace.csv"),
              slurp(dir.path() / "j2" / ("run_" + std::to_string(i)) / "trace.csv"));

  write(dir.path() / "one.toml", std::string(kBilinearToml) + "[sweep]\naxis = \"T\"\nvalues = [50]\n");
  ASSERT_EQ(run_cli({"--config", (dir.path() / "one.toml").string(), "--out", (dir.path() / "one").string(),
                     "sweep"}),
            0);
  EXPECT_TRUE(fs::exists(dir.path() / "one" / "run_0" / "result.json"));
}

TEST(Cli, VerifyLemmasSmall) {
  TempDir dir;
  write(dir.path() / "v.toml",
        "[verify]\nlemma1_trials = 2000\nlemma2_points = 200\ninstances = 3\nlemma3_params = 5\nlemma3_tmax = 500\n");
  ASSERT_EQ(run_cli({"--config", (dir.path() / "v.toml").string(), "--out", dir.path().string(), "verify",
                     "lemmas"}),
            0);
  const auto summary = nlohmann::json::parse(slurp(dir.path() / "verify.json"));
  EXPECT_EQ(summary["overall"], "pass");
  EXPECT_EQ(summary["checks"].size(), 3u);
  EXPECT_TRUE(fs::exists(dir.path() / "lemma2.json"));
}
