#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "robust_t/cli.hpp"
#include "test_util.hpp"

namespace robust_t {
namespace {

struct Run {
  int code;
  std::string out;
  std::string err;

  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, TestSubcommandAsymptotic) {
  testutil::TempDir dir;
  const auto data = dir.file("d.csv", "1\n2\n3\n");
  const auto r = run({"test", "--data", data, "--mu0", "0", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = r.json();
  const auto& res = j["results"];
  EXPECT_NEAR(res["statistic_raw"].get<double>(), 2.0 * std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(res["p_value"].get<double>(), 2.0 * std_normal_cdf(-1.86425810056903035736), 1e-12);
  EXPECT_EQ(res["calibration"], "asymptotic");
  EXPECT_EQ(j["command"]["name"], "test");
  EXPECT_EQ(j["tool"], "robust-t");

  const auto human = run({"test", "--data", data, "--mu0", "0"});
  EXPECT_EQ(human.code, 0);
  EXPECT_NE(human.out.find("T_m"), std::string::npos);
  EXPECT_NE(human.out.find("p-value"), std::string::npos);
}

TEST(Cli, TestSubcommandMonteCarloWithTable) {
  testutil::TempDir dir;
  const auto table = dir.path("t.json");
  ASSERT_EQ(run({"calibrate", "--n", "5", "--reps", "2000", "--seed", "3", "--out", table}).code, 0);
  const auto data = dir.file("d.csv", "x\n0.4\n1.9\n-0.3\n2.5\n1.1\n");
  const auto r = run({"test", "--data", data, "--column", "x", "--mu0", "0", "--calibration", "mc",
                      "--table", table, "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto res = r.json()["results"];
  EXPECT_EQ(res["calibration"], "monte_carlo");
  EXPECT_EQ(res["table_id"], "n5-r2000-s3-t0");
  EXPECT_FALSE(res["notes"].empty());

  // Size mismatch is a domain error.
  const auto bad = dir.file("e.csv", "1\n2\n3\n4\n");
  EXPECT_EQ(run({"test", "--data", bad, "--mu0", "0", "--calibration", "mc", "--table", table}).code,
            1);
  // Missing table in mc mode.
  EXPECT_EQ(run({"test", "--data", data, "--mu0", "0", "--calibration", "mc"}).code, 1);
}

TEST(Cli, ClassicalAndRobustAgreeOnWellSeparatedCases) {
  testutil::TempDir dir;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Sample s = sample_location_scale({seed, 0, 0}, 40, 0.0, 1.0);
    std::string text;
    for (double x : s) text += std::to_string(x) + "\n";
    const auto data = dir.file("s.csv", text);
    // |effect| = 1.5, beyond 5 * scale / sqrt(n) ~ 0.79.
    for (const std::string mu0 : {"-1.5", "1.5"}) {
      const auto robust = run({"test", "--data", data, "--mu0", mu0, "--json"});
      const auto classical = run({"test", "--data", data, "--mu0", mu0, "--classical", "--json"});
      ASSERT_EQ(robust.code, 0);
      ASSERT_EQ(classical.code, 0);
      EXPECT_EQ(robust.json()["results"]["reject_at"]["reject"],
                classical.json()["results"]["reject_at"]["reject"]);
    }
  }
}

TEST(Cli, VerifyPivotPasses) {
  const auto r = run({"verify-pivot", "--n", "25", "--reps", "1000", "--seed", "7", "--params", "0,1",
                      "--params", "7,3"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST(Cli, VerifyPivotFailsOnImpossibleTolerance) {
  const auto r = run({"verify-pivot", "--n", "25", "--reps", "1000", "--seed", "7", "--params",
                      "1e9,1e-9", "--tolerance", "0"});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, CalibrateIsDeterministicAcrossThreadCounts) {
  testutil::TempDir dir;
  const auto a = dir.path("a.json");
  const auto b = dir.path("b.json");
  ASSERT_EQ(run({"calibrate", "--n", "25", "--reps", "1000", "--seed", "7", "--out", a}).code, 0);
  ASSERT_EQ(run({"calibrate", "--n", "25", "--reps", "1000", "--seed", "7", "--out", b, "--threads",
                 "4"})
                .code,
            0);
  const auto ja = nlohmann::json::parse(testutil::slurp(a));
  const auto jb = nlohmann::json::parse(testutil::slurp(b));
  EXPECT_EQ(ja["quantiles"].dump(), jb["quantiles"].dump());
  EXPECT_EQ(ja["probs"].dump(), jb["probs"].dump());
}

TEST(Cli, CalibrateCustomProbs) {
  testutil::TempDir dir;
  const auto out = dir.path("p.json");
  const auto r = run({"calibrate", "--n", "10", "--reps", "1000", "--seed", "1", "--probs",
                      "0.05,0.5,0.95", "--out", out, "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["results"]["quantiles"].size(), 3u);
  EXPECT_EQ(run({"calibrate", "--n", "10", "--reps", "10", "--seed", "1", "--out", out}).code, 1);
  EXPECT_EQ(run({"calibrate", "--n", "10", "--reps", "1000", "--seed", "1", "--probs", "0.5,x",
                 "--out", out})
                .code,
            2);
}

TEST(Cli, VerifyNormalityEmitsCsv) {
  const auto r = run({"verify-normality", "--grid", "20,50", "--reps", "2000", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("n,reps,ks_distance,mean,variance\n", 0), 0u);
  EXPECT_NE(r.out.find("\n20,2000,"), std::string::npos);
  EXPECT_NE(r.out.find("\n50,2000,"), std::string::npos);
}

TEST(Cli, RobustnessStudyReportsBothSizes) {
  const auto r = run({"robustness-study", "--n", "30", "--eps", "0.1", "--shift", "50", "--reps",
                      "2000", "--seed", "3", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto res = r.json()["results"];
  EXPECT_GE(res["robust_size"].get<double>(), 0.0);
  EXPECT_LE(res["classical_size"].get<double>(), 1.0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"test", "--mu0", "0"}).code, 2);
  EXPECT_EQ(run({"test", "--data", "x.csv", "--mu0", "0", "--bogus"}).code, 2);
  EXPECT_EQ(run({"test", "--data", "x.csv", "--mu0", "0", "--alternative", "sideways"}).code, 2);
  EXPECT_EQ(run({"verify-pivot", "--n", "5", "--reps", "10", "--seed", "1", "--params", "1"}).code, 2);
}

TEST(Cli, DomainErrors) {
  testutil::TempDir dir;
  EXPECT_EQ(run({"test", "--data", dir.file("c.csv", "2\n2\n2\n"), "--mu0", "0"}).code, 1);
  EXPECT_EQ(run({"test", "--data", dir.file("one.csv", "2\n"), "--mu0", "0"}).code, 1);
  EXPECT_EQ(run({"test", "--data", dir.path("missing.csv"), "--mu0", "0"}).code, 1);
  const auto r = run({"test", "--data", dir.file("bad.csv", "1\nabc\n"), "--mu0", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("row 2"), std::string::npos);
}

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, 0);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("1.0.0"), std::string::npos);
}

}  // namespace
}  // namespace robust_t
