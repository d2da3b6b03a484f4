#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = MGOWER_CLI;
const std::string kData = MGOWER_TEST_DATA;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mgower_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Exit status of the CLI; stdout and stderr go to files in the temp dir.
  int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > " + path("stdout.txt") + " 2> " + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string data(const std::string& name) const { return kData + "/" + name; }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, DistWritesMatrix) {
  ASSERT_EQ(run("dist --recipients " + data("pairs_left.csv") + " --donors " + data("pairs_right.csv") +
                " --schema " + data("sex_age.schema.json") + " --method std --out " + path("m.csv")),
            0)
      << slurp(path("stderr.txt"));
  const auto m = slurp(path("m.csv"));
  EXPECT_EQ(m.substr(0, m.find('\n')), "id,q01,q02,q03,q04,q05,q06,q07,q08,q09,q10");
  EXPECT_NE(m.find("p10,"), std::string::npos);
  EXPECT_TRUE(slurp(path("stdout.txt")).empty());
}

TEST_F(Cli, MissingSchemaIsUsageError) {
  EXPECT_EQ(run("dist --recipients " + data("pairs_left.csv") + " --method std"), 1);
  EXPECT_NE(slurp(path("stderr.txt")).find("--schema"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
  const std::string base = "dist --recipients " + data("pairs_left.csv") + " --schema " + data("sex_age.schema.json");
  EXPECT_EQ(run(base + " --method std --scale iqr"), 1);
  EXPECT_EQ(run(base + " --method euclid"), 1);
  EXPECT_EQ(run(base + " --method std --scale iqr --force"), 0);
  EXPECT_EQ(run("dist --recipients " + path("nope.csv") + " --schema " + data("sex_age.schema.json")), 1);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
}

TEST_F(Cli, DataErrorExitsTwo) {
  std::ofstream(path("bad.csv")) << "id,sex,age\nr1,X,3\n";
  EXPECT_EQ(run("stats --data " + path("bad.csv") + " --schema " + data("sex_age.schema.json")), 2);
  EXPECT_NE(slurp(path("stderr.txt")).find("unknown category"), std::string::npos);
  std::ofstream(path("allmissing.csv")) << "id,sex,age\nr1,,NA\n";
  EXPECT_EQ(run("stats --data " + path("allmissing.csv") + " --schema " + data("sex_age.schema.json")), 2);
}

TEST_F(Cli, HelpPerSubcommand) {
  for (const char* sub : {"stats", "dist", "match", "impute", "simulate", "dummy-report"}) {
    EXPECT_EQ(run(std::string(sub) + " --help"), 0) << sub;
    EXPECT_NE(slurp(path("stdout.txt")).find("--"), std::string::npos);
  }
}

TEST_F(Cli, MatchOutputFormat) {
  ASSERT_EQ(run("match --recipients " + data("pairs_left.csv") + " --donors " + data("pairs_right.csv") +
                " --schema " + data("sex_age.schema.json") + " --top-n 3 --seed 4 --out " + path("x.csv")),
            0);
  const auto m = slurp(path("x.csv"));
  EXPECT_EQ(m.substr(0, m.find('\n')), "recipient_id,rank,donor_id,distance");
  EXPECT_NE(m.find("\np01,1,q01,0.000000\n"), std::string::npos);
  EXPECT_EQ(std::count(m.begin(), m.end(), '\n'), 31);
}

TEST_F(Cli, ImputeWritesCompletedAndDonorMap) {
  ASSERT_EQ(run("impute --data " + data("survey.csv") + " --schema " + data("survey.schema.json") +
                " --target income --method knn --scale iqr --out " + path("done.csv") + " --donor-map " +
                path("map.csv")),
            0)
      << slurp(path("stderr.txt"));
  const auto done = slurp(path("done.csv"));
  EXPECT_EQ(done.substr(0, done.find('\n')), "id,sex,edu,owner,age,income");
  EXPECT_EQ(done.find("NA"), std::string::npos);
  const auto map = slurp(path("map.csv"));
  EXPECT_EQ(std::count(map.begin(), map.end(), '\n'), 5);
  EXPECT_NE(map.find("h02,"), std::string::npos);
}

TEST_F(Cli, SimulateTwiceIsByteIdentical) {
  ASSERT_EQ(run("simulate --scenario fourcat --reps 5 --seed 7 --n 100 --out " + path("a.json")), 0);
  ASSERT_EQ(run("simulate --scenario fourcat --reps 5 --seed 7 --n 100 --out " + path("b.json")), 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  ASSERT_EQ(run("simulate --scenario fourcat --reps 5 --seed 7 --n 100 --workers 3 --out " + path("c.json")), 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("c.json")));
}

TEST_F(Cli, SimulateOnUserData) {
  ASSERT_EQ(run("simulate --data " + data("survey.csv") + " --schema " + data("survey.schema.json") +
                " --target age --mechanism mar --driver income --reps 3 --methods no.mod,kde2:iqr --trace --out " +
                path("u.json")),
            2);  // income has missing values: cannot drive MAR deletion
  ASSERT_EQ(run("simulate --data " + data("survey.csv") + " --schema " + data("survey.schema.json") +
                " --target age --mechanism mnar --reps 3 --methods no.mod,kde2:iqr --trace --out " + path("u.json")),
            0)
      << slurp(path("stderr.txt"));
  const auto report = slurp(path("u.json"));
  EXPECT_NE(report.find("\"source\": \"user\""), std::string::npos);
  EXPECT_NE(report.find("\"trace\""), std::string::npos);
  EXPECT_EQ(run("simulate --data " + data("survey.csv") + " --reps 2"), 1);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  std::ofstream(path("run.toml")) << "[dist]\nmethod = \"kde1\"\nscale = \"iqr\"\n";
  const std::string base = "dist --recipients " + data("pairs_left.csv") + " --schema " + data("sex_age.schema.json");
  ASSERT_EQ(run("--config " + path("run.toml") + " " + base + " --out " + path("cfg.csv")), 0)
      << slurp(path("stderr.txt"));
  ASSERT_EQ(run(base + " --method kde1 --scale iqr --out " + path("flags.csv")), 0);
  EXPECT_EQ(slurp(path("cfg.csv")), slurp(path("flags.csv")));
  ASSERT_EQ(run("--config " + path("run.toml") + " " + base + " --method std --scale range --out " + path("o.csv")),
            0);
  ASSERT_EQ(run(base + " --method std --out " + path("std.csv")), 0);
  EXPECT_EQ(slurp(path("o.csv")), slurp(path("std.csv")));
}

TEST_F(Cli, StatsAndDummyReport) {
  ASSERT_EQ(run("stats --data " + data("pairs_right.csv") + " --schema " + data("sex_age.schema.json")), 0);
  EXPECT_NE(slurp(path("stdout.txt")).find("\"R\": 85.0"), std::string::npos);
  ASSERT_EQ(run("dummy-report --data " + data("categorical.csv") + " --schema " + data("categorical.schema.json") +
                " --out " + path("d.json")),
            0);
  EXPECT_NE(slurp(path("d.json")).find("\"pairs\""), std::string::npos);
  EXPECT_EQ(run("dummy-report --data " + data("pairs_right.csv") + " --schema " + data("sex_age.schema.json")), 1);
}
