#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gvmf/cli.hpp"
#include "gvmf/io.hpp"

using namespace gvmf;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"simulate", "--help"}).code, 0);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  const Outcome bad_flag = run({"simulate", "--bogus", "1"});
  EXPECT_EQ(bad_flag.code, 2);
  EXPECT_NE(bad_flag.err.find("--bogus"), std::string::npos);
  EXPECT_EQ(run({"simulate", "--format", "xml"}).code, 2);
}

TEST(Cli, ValidationErrorsExitWithTwo) {
  const Outcome fam = run({"simulate", "--family", "IV"});
  EXPECT_EQ(fam.code, 2);
  EXPECT_NE(fam.err.find("--family"), std::string::npos);
  EXPECT_EQ(run({"simulate", "--alpha", "0"}).code, 2);
  EXPECT_EQ(run({"simulate", "--mu", "1,0"}).code, 2);
  EXPECT_EQ(run({"fit", "--in", temp_path("gvmf_missing_file.csv")}).code, 2);
}

TEST(Cli, SimulateRoundTripsThroughLoader) {
  const std::string path = temp_path("gvmf_cli_sim.csv");
  const Outcome o = run({"simulate", "--family", "II", "--alpha", "1.5", "--kappa", "2", "--n", "200",
                         "--seed", "9", "--mu", "0,1,1", "--out", path});
  ASSERT_EQ(o.code, 0) << o.err;
  const Dataset d = load_sample(path, 3);
  EXPECT_EQ(d.sample.size(), 200);
  Rng rng(SeedSpec{9, 0});
  const DirectionSample direct = sample_gvmf(
      GvmfParams(Family::II, 1.5, 2.0, UnitVector::normalized(Eigen::Vector3d(0, 1, 1))), rng, 200);
  EXPECT_EQ((d.sample.points - direct.points).cwiseAbs().maxCoeff(), 0.0);

  const Outcome f = run({"fit", "--family", "II", "--in", path, "--format", "json"});
  ASSERT_EQ(f.code, 0) << f.err;
  const auto j = nlohmann::json::parse(f.out);
  EXPECT_EQ(j["command"], "fit");
  EXPECT_EQ(j["rows"].size(), 1u);
  EXPECT_EQ(j["columns"][2], "alpha");
  EXPECT_TRUE(j["rows"][0][2].is_number());
  std::remove(path.c_str());
}

TEST(Cli, MomentsAndEntropy) {
  const Outcome m = run({"moments", "--family", "I", "--alpha", "1.5", "--kappa", "2", "--format", "json"});
  ASSERT_EQ(m.code, 0) << m.err;
  const auto j = nlohmann::json::parse(m.out);
  bool found = false;
  for (const auto& row : j["rows"])
    if (row[0] == "entropy") {
      EXPECT_NEAR(row[2].get<double>(), 2.3252290395222511, 1e-9);
      EXPECT_TRUE(row[1].is_null());
      found = true;
    }
  EXPECT_TRUE(found);
  const Outcome e = run({"entropy", "--family", "Axial", "--alpha", "1", "--kappa", "0"});
  ASSERT_EQ(e.code, 0);
  EXPECT_NE(e.out.find("2.53102424"), std::string::npos);
}

TEST(Cli, DensityAtAPoint) {
  const Outcome o = run({"density", "--family", "I", "--alpha", "1", "--kappa", "0", "--x", "1,0,0"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out.substr(0, o.out.find('\n')), "x1,x2,x3,log_density,density");
  EXPECT_NE(o.out.find("0.079577471545947"), std::string::npos);
}

TEST(Cli, NumericFailureExitsWithThree) {
  // Nearly balanced antipodal pairs: the resultant length is below anything
  // reachable inside the parameter box, so the moment fit has no root.
  const std::string path = temp_path("gvmf_cli_balanced.csv");
  {
    std::ofstream f(path);
    f.precision(17);
    Rng rng(SeedSpec{1, 0});
    for (int i = 0; i < 150; ++i) {
      Eigen::Vector3d v(rng.normal(), rng.normal(), rng.normal());
      v.normalize();
      f << v(0) << ',' << v(1) << ',' << v(2) << '\n';
      Eigen::Vector3d w = -v;
      w(2) += 1e-6;
      w.normalize();
      f << w(0) << ',' << w(1) << ',' << w(2) << '\n';
    }
  }
  const Outcome o = run({"gof", "--family", "I", "--estimator", "MoM", "--in", path, "--replicates", "100"});
  EXPECT_EQ(o.code, 3) << o.err;
  std::remove(path.c_str());
}

TEST(Cli, ExecutableExitCodes) {
  const std::string exe = GVMF_CLI_PATH;
  EXPECT_EQ(std::system((exe + " --help > /dev/null").c_str()), 0);
  const int status = std::system((exe + " simulate --n -3 2> /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

TEST(Cli, CsvQuoting) {
  cli::Table t;
  t.columns = {"a", "b"};
  t.rows.push_back({std::string("x,y"), std::string("say \"hi\"")});
  t.rows.push_back({1.5, static_cast<long long>(3)});
  std::ostringstream out;
  cli::write_csv(out, t);
  EXPECT_EQ(out.str(), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n1.5,3\n");
}
