#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"

namespace bmc::cli {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bmc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run_cli(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& body) { std::ofstream(dir_ / name) << body; }

  // Output with the echoed config line removed.
  std::string body() const {
    auto s = out_.str();
    if (s.rfind("config: ", 0) == 0) s = s.substr(s.find('\n') + 1);
    return s;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run_cli({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("estimate"), std::string::npos);
  EXPECT_EQ(run_cli({}), kExitValidation);
  EXPECT_EQ(run_cli({"frobnicate"}), kExitValidation);
  EXPECT_EQ(run_cli({"estimate", "--l", "3"}), kExitValidation);
}

TEST_F(Cli, EstimateWorkedQuery) {
  write("w.json", R"([{"lo":[0,2],"hi":[4,3]}])");
  ASSERT_EQ(run_cli({"estimate", "--workload", path("w.json"), "--l", "3", "--curves", "XYXYXY",
                     "--naive", "--format", "json"}),
            kExitOk)
      << err_.str();
  EXPECT_EQ(out_.str().rfind("config: ", 0), 0U);
  const auto j = nlohmann::json::parse(body());
  ASSERT_EQ(j["rows"].size(), 1U);
  EXPECT_EQ(j["rows"][0]["global"], "34");
  EXPECT_EQ(j["rows"][0]["local"], "3");
  EXPECT_EQ(j["rows"][0]["naive_local"], "3");
  EXPECT_DOUBLE_EQ(j["rows"][0]["cost"].get<double>(), 102.0);
}

TEST_F(Cli, EstimateCurvesFileGivesOneRowEach) {
  write("w.json", R"([{"lo":[0,2],"hi":[4,3]},{"lo":[1,1],"hi":[1,6]}])");
  write("curves.txt", "XYXYXY\nYXYXYX\n# comment\nXXXYYY\n");
  ASSERT_EQ(run_cli({"estimate", "--workload", path("w.json"), "--l", "3", "--curves-file",
                     path("curves.txt"), "--out", path("est.csv")}),
            kExitOk)
      << err_.str();
  std::istringstream csv(slurp(path("est.csv")));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4U);
  EXPECT_EQ(lines[0], "curve,global,local,cost");
}

TEST_F(Cli, EstimateBenchReportsTimings) {
  write("w.json", R"([{"lo":[0,2],"hi":[4,3]}])");
  ASSERT_EQ(run_cli({"estimate", "--workload", path("w.json"), "--l", "3", "--curves", "ZC,LC",
                     "--bench", "--format", "json"}),
            kExitOk);
  const auto j = nlohmann::json::parse(body());
  EXPECT_TRUE(j["rows"][0].contains("nlc_seconds"));
  EXPECT_TRUE(j["init"].contains("ilc_seconds"));
  EXPECT_EQ(run_cli({"estimate", "--workload", path("w.json"), "--l", "3", "--curves", "ZC",
                     "--bench", "--reps", "3"}),
            kExitValidation);
}

TEST_F(Cli, EstimateErrors) {
  write("w.json", R"([{"lo":[0,2],"hi":[4,3]}])");
  // Curve for a different l.
  EXPECT_EQ(run_cli({"estimate", "--workload", path("w.json"), "--l", "3", "--curves", "XYXY"}),
            kExitValidation);
  // Coordinates do not fit l = 2.
  EXPECT_EQ(run_cli({"estimate", "--workload", path("w.json"), "--l", "2", "--curves", "XYXY"}),
            kExitValidation);
  EXPECT_EQ(run_cli({"estimate", "--workload", path("missing.json"), "--l", "3", "--curves", "ZC"}),
            kExitIo);
  EXPECT_NE(err_.str().find("missing.json"), std::string::npos);
  EXPECT_EQ(run_cli({"estimate", "--workload", path("w.json"), "--l", "3", "--curves", "ZC",
                     "--format", "xml"}),
            kExitValidation);
}

TEST_F(Cli, GenerateTablesLearnSimulate) {
  ASSERT_EQ(run_cli({"gen", "data", "--kind", "skew", "--n", "3000", "--d", "2", "--l", "6",
                     "--seed", "4", "--out", path("d.csv")}),
            kExitOk)
      << err_.str();
  ASSERT_EQ(run_cli({"gen", "queries", "--data", path("d.csv"), "--l", "6", "--n", "40", "--area",
                     "64", "--aspect", "16:1", "--out", path("q.json")}),
            kExitOk)
      << err_.str();
  ASSERT_EQ(run_cli({"tables", "build", "--workload", path("q.json"), "--l", "6", "--out",
                     path("s.json")}),
            kExitOk);
  ASSERT_EQ(run_cli({"tables", "info", "--in", path("s.json")}), kExitOk);
  EXPECT_EQ(nlohmann::json::parse(out_.str())["queries"], 40);

  write("cfg.json", R"({"episodes": 4, "steps_per_episode": 8, "batch_size": 8, "hidden": [16]})");
  const std::vector<std::string> learn_args{"learn", "--tables", path("s.json"), "--config", path("cfg.json"),
                                            "--seed", "9", "--out", path("l.bmc"), "--trace", path("t1.csv")};
  ASSERT_EQ(run_cli(learn_args), kExitOk) << err_.str();
  auto again = learn_args;
  again.back() = path("t2.csv");
  ASSERT_EQ(run_cli(again), kExitOk);
  EXPECT_EQ(slurp(path("t1.csv")), slurp(path("t2.csv")));
  EXPECT_NE(out_.str().find("ratio"), std::string::npos);

  ASSERT_EQ(run_cli({"simulate", "--data", path("d.csv"), "--workload", path("q.json"), "--l", "6",
                     "--curves", "ZC,LC,HC,@" + path("l.bmc"), "--block-size", "32", "--format",
                     "json", "--out", path("per.json")}),
            kExitOk)
      << err_.str();
  ASSERT_EQ(run_cli({"simulate", "--data", path("d.csv"), "--workload", path("q.json"), "--l", "6",
                     "--curves", "ZC,LC,HC,@" + path("l.bmc"), "--block-size", "32", "--mode",
                     "full-range", "--format", "json", "--out", path("full.json")}),
            kExitOk);
  const auto per = nlohmann::json::parse(slurp(path("per.json")));
  const auto full = nlohmann::json::parse(slurp(path("full.json")));
  ASSERT_EQ(per.size(), 4U);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LE(per[i]["mean_blocks"].get<double>(), full[i]["mean_blocks"].get<double>());
  }
}

TEST_F(Cli, LearnConfigErrors) {
  write("w.json", R"([{"lo":[0,2],"hi":[4,3]}])");
  write("bad.json", R"({"episodez": 3})");
  EXPECT_EQ(run_cli({"learn", "--workload", path("w.json"), "--l", "3", "--config", path("bad.json")}),
            kExitValidation);
  EXPECT_EQ(run_cli({"learn", "--workload", path("w.json"), "--l", "3", "--episodes", "0"}),
            kExitValidation);
  EXPECT_EQ(run_cli({"learn", "--l", "3"}), kExitValidation);
}

TEST_F(Cli, SimulateErrors) {
  write("d.csv", "1,2\n3,4\n");
  write("w.json", R"([{"lo":[0,0],"hi":[4,3]}])");
  EXPECT_EQ(run_cli({"simulate", "--data", path("d.csv"), "--workload", path("w.json"), "--l", "3",
                     "--curves", "ZC", "--mode", "sideways"}),
            kExitValidation);
  EXPECT_EQ(run_cli({"simulate", "--data", path("nope.csv"), "--workload", path("w.json"), "--l",
                     "3", "--curves", "ZC"}),
            kExitIo);
}

}  // namespace
}  // namespace bmc::cli
