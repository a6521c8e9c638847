#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "rdbp/cli.hpp"
#include "rdbp/errors.hpp"

using namespace rdbp;
using namespace rdbp::cli;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rdbp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rdbp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& name, const Json& j) {
    const auto p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p.string();
  }

  static std::string fixture(const std::string& name) {
    return std::string(RDBP_FIXTURE_DIR) + "/" + name;
  }

  Json base_config() const {
    return Json::parse(R"({
      "laws": {
        "offspring": {"kind": "discrete", "params": {"probabilities": [0.25, 0, 0, 0, 0.75]}},
        "claim": {"kind": "uniform", "params": {"d": 2}},
        "resource": {"kind": "constant", "params": {"r": 1}}
      }
    })");
  }

  fs::path dir_;
};

}  // namespace

TEST(Config, RoundTripIsIdentity) {
  for (const char* name : {"toy_wf.json", "classify_m3.json", "counterexample.json", "extinct_now.json"}) {
    const auto parsed = load_config(std::string(RDBP_FIXTURE_DIR) + "/" + name);
    const auto again = parse_config(Json::parse(dump(to_json(parsed))));
    EXPECT_EQ(parsed, again) << name;
    EXPECT_EQ(dump(to_json(parsed)), dump(to_json(again))) << name;
  }
}

TEST(Config, RoundTripAllLawKinds) {
  RunConfig c;
  c.laws = LawTriple{OffspringLaw({0.1, 0.2, 0.7}), ClaimLaw::scaled_beta(2, 10, 3.3),
                     ResourceLaw::scaled_beta(1.5, 2.5, 0.1)};
  c.seed = Seed{0xFFFFFFFFFFFFFFFFull};
  c.m_grid = {1.1, 2.0 / 3.0 + 1.0, 7.0};
  c.confidence = 0.1 + 0.2;
  c.verify.checks = {"dominance", "envelope"};
  EXPECT_EQ(parse_config(Json::parse(dump(to_json(c)))), c);
  c.laws = LawTriple{OffspringLaw::point_mass(2), ClaimLaw::exponential(0.7), ResourceLaw::uniform(0.1, 0.9)};
  EXPECT_EQ(parse_config(Json::parse(dump(to_json(c)))), c);
  c.laws.claim = ClaimLaw::constant(0.3);
  c.laws.resource = ResourceLaw::constant(0.3);
  EXPECT_EQ(parse_config(Json::parse(dump(to_json(c)))), c);
}

TEST(Config, ErrorsNameTheFieldPath) {
  const auto expect_error = [](const char* text, const std::string& path) {
    try {
      parse_config(Json::parse(text));
      FAIL() << "accepted " << text;
    } catch (const ConfigurationError& e) {
      EXPECT_NE(std::string(e.what()).find(path), std::string::npos) << e.what();
    }
  };
  expect_error(R"({})", "laws");
  expect_error(R"({"laws": {"offspring": {"kind": "point_mass", "params": {"k": 2}},
                  "claim": {"kind": "uniform", "params": {}},
                  "resource": {"kind": "constant", "params": {"r": 1}}}})",
               "laws.claim.params.d");
  expect_error(R"({"laws": {"offspring": {"kind": "point_mass", "params": {"k": 2}},
                  "claim": {"kind": "uniform", "params": {"d": 2, "extra": 1}},
                  "resource": {"kind": "constant", "params": {"r": 1}}}})",
               "laws.claim.params.extra");
  expect_error(R"({"laws": {"offspring": {"kind": "discrete", "params": {"probabilities": [0.5, 0.4]}},
                  "claim": {"kind": "uniform", "params": {"d": 2}},
                  "resource": {"kind": "constant", "params": {"r": 1}}}})",
               "laws.offspring");
  expect_error(R"({"laws": {"offspring": {"kind": "point_mass", "params": {"k": 2}},
                  "claim": {"kind": "uniform", "params": {"d": 2}},
                  "resource": {"kind": "constant", "params": {"r": 1}}}, "bogus": 1})",
               "bogus");
  expect_error(R"({"laws": {"offspring": {"kind": "point_mass", "params": {"k": 2}},
                  "claim": {"kind": "uniform", "params": {"d": 2}},
                  "resource": {"kind": "constant", "params": {"r": 1}}},
                  "verify": {"checks": ["dominance", "nope"]}})",
               "verify.checks[1]");
  expect_error(R"({"laws": {"offspring": {"kind": "point_mass", "params": {"k": 2}},
                  "claim": {"kind": "uniform", "params": {"d": "two"}},
                  "resource": {"kind": "constant", "params": {"r": 1}}}})",
               "laws.claim.params.d");
  expect_error(R"({"laws": {"offspring": {"kind": "point_mass", "params": {"k": 2}},
                  "claim": {"kind": "uniform", "params": {"d": 2}},
                  "resource": {"kind": "constant", "params": {"r": 1}}},
                  "mc": {"seed": "0xzz"}})",
               "mc.seed");
  expect_error(R"({"laws": {"offspring": {"kind": "point_mass", "params": {"k": 2}},
                  "claim": {"kind": "uniform", "params": {"d": 2}},
                  "resource": {"kind": "constant", "params": {"r": 1}}},
                  "policy": "random"})",
               "policy");
}

TEST(Dump, SeventeenSignificantDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(dump(Json{{"x", 1.0 / 3.0}}, -1), R"({"x":0.33333333333333331})");
  EXPECT_EQ(std::stod(format_double(2.0 / 3.0)), 2.0 / 3.0);
}

TEST_F(CliTest, SimulateIsByteIdentical) {
  const auto a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run_cli({"simulate", "--config", fixture("toy_wf.json"), "--seed", "42", "--out", a}).code, 0);
  ASSERT_EQ(run_cli({"simulate", "--config", fixture("toy_wf.json"), "--seed", "42", "--out", b}).code, 0);
  EXPECT_EQ(slurp(a / "trajectory.csv"), slurp(b / "trajectory.csv"));
  EXPECT_EQ(slurp(a / "trajectory.json"), slurp(b / "trajectory.json"));
  EXPECT_EQ(slurp(a / "trajectory.csv").rfind("generation,size\n0,1\n", 0), 0u);
}

TEST_F(CliTest, SeedAcceptsHex) {
  const auto a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run_cli({"simulate", "--config", fixture("toy_wf.json"), "--seed", "0x2a", "--out", a}).code, 0);
  ASSERT_EQ(run_cli({"simulate", "--config", fixture("toy_wf.json"), "--seed", "42", "--out", b}).code, 0);
  EXPECT_EQ(slurp(a / "trajectory.csv"), slurp(b / "trajectory.csv"));
  EXPECT_EQ(run_cli({"simulate", "--config", fixture("toy_wf.json"), "--seed", "x1", "--out", a}).code,
            kExitConfig);
}

TEST_F(CliTest, PointMassZeroGivesTwoRows) {
  const auto r = run_cli({"simulate", "--config", fixture("extinct_now.json"), "--out", dir_});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "trajectory.csv"), "generation,size\n0,1\n1,0\n# outcome Extinct(1)\n");
  const auto j = Json::parse(slurp(dir_ / "trajectory.json"));
  EXPECT_EQ(j["outcome"]["label"], "Extinct(1)");
  EXPECT_EQ(j["sizes"], Json::parse("[1, 0]"));
  EXPECT_NE(r.out.find("Extinct(1)"), std::string::npos);
}

TEST_F(CliTest, MissingLawFieldExitsTwo) {
  auto j = base_config();
  j["laws"].erase("claim");
  const auto r = run_cli({"simulate", "--config", write_config("c.json", j), "--out", dir_});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("laws.claim"), std::string::npos);
}

TEST_F(CliTest, BadArgumentsExitTwo) {
  EXPECT_EQ(run_cli({}).code, kExitConfig);
  EXPECT_EQ(run_cli({"simulate"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"frobnicate", "--config", "x"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"simulate", "--config", (dir_ / "missing.json").string()}).code, kExitConfig);
  std::ofstream(dir_ / "broken.json") << "{ not json";
  EXPECT_EQ(run_cli({"classify", "--config", (dir_ / "broken.json").string()}).code, kExitConfig);
}

TEST_F(CliTest, ClassifyUniformExample) {
  const auto r = run_cli({"classify", "--config", fixture("classify_m3.json"), "--out", dir_});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(slurp(dir_ / "classify.json"));
  EXPECT_EQ(j["verdicts"]["wf"]["verdict"], "PositiveSurvival");
  EXPECT_EQ(j["verdicts"]["sf"]["verdict"], "AlmostSureExtinction");
  EXPECT_EQ(j["verdicts"]["fcfs"]["verdict"], "Critical");
  EXPECT_NEAR(j["tau"].get<double>(), 1.1547005383792515, 1e-9);
  EXPECT_EQ(Json::parse(r.out), j);
}

TEST_F(CliTest, ClassifyAboveFullMoment) {
  auto j = base_config();
  j["laws"]["resource"]["params"]["r"] = 3.5;
  const auto r = run_cli({"classify", "--config", write_config("c.json", j), "--out", dir_});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = Json::parse(slurp(dir_ / "classify.json"));
  for (const char* k : {"wf", "sf", "fcfs"}) EXPECT_EQ(out["verdicts"][k]["verdict"], "PositiveSurvival");
}

TEST_F(CliTest, ClassifyExponentialSfInapplicable) {
  auto j = base_config();
  j["laws"]["claim"] = Json::parse(R"({"kind": "exponential", "params": {"lambda": 1}})");
  const auto r = run_cli({"classify", "--config", write_config("c.json", j), "--out", dir_});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = Json::parse(slurp(dir_ / "classify.json"));
  EXPECT_EQ(out["verdicts"]["sf"]["verdict"], "Inapplicable");
  EXPECT_NE(out["verdicts"]["sf"]["basis"].get<std::string>().find("bounded"), std::string::npos);
  EXPECT_TRUE(out["theta"].is_null());
}

TEST_F(CliTest, CurveMatchesClosedForms) {
  const auto r = run_cli({"curve", "--config", fixture("toy_wf.json"), "--out", dir_});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(dir_ / "curve.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "m,r_wc,r_uc,r_sc");
  int rows = 0;
  while (std::getline(csv, line)) {
    double m, wc, uc, sc;
    char c;
    std::istringstream(line) >> m >> c >> wc >> c >> uc >> c >> sc;
    EXPECT_NEAR(wc, 1.0 / m, 1e-6);
    EXPECT_NEAR(sc, 2.0 - 1.0 / m, 1e-6);
    EXPECT_EQ(uc, 1.0);
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}

TEST_F(CliTest, CurveBetaGrids) {
  for (auto [a, b] : {std::pair{2, 10}, {14, 14}, {10, 2}}) {
    auto j = base_config();
    j["laws"]["claim"] = Json{{"kind", "scaled_beta"}, {"params", {{"a", a}, {"b", b}}}};
    j["curve"] = Json{{"m_grid", {1.5, 2, 3, 5, 10}}};
    const auto r = run_cli({"curve", "--config", write_config("c.json", j), "--out", dir_});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
  }
}

TEST_F(CliTest, CurveEmptyGridExitsTwo) {
  auto j = base_config();
  j["curve"] = Json{{"m_grid", Json::array()}};
  EXPECT_EQ(run_cli({"curve", "--config", write_config("c.json", j), "--out", dir_}).code, kExitConfig);
}

TEST_F(CliTest, VerifyDominancePasses) {
  auto j = base_config();
  j["process"] = Json{{"horizon", 30}, {"explosion_cap", 5000}};
  j["mc"] = Json{{"replicates", 100}, {"seed", 3}};
  j["verify"] = Json{{"checks", {"dominance"}}};
  const auto r = run_cli({"verify", "--config", write_config("c.json", j), "--out", dir_, "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = Json::parse(slurp(dir_ / "verify.json"));
  EXPECT_EQ(out["checks"]["dominance"]["pass"], true);
  EXPECT_EQ(out["hard_invariants_hold"], true);
  EXPECT_EQ(out["checks"]["dominance"]["policies"].size(), 4u);
}

TEST_F(CliTest, VerifyResultsIndependentOfThreads) {
  auto j = base_config();
  j["process"] = Json{{"horizon", 30}, {"explosion_cap", 5000}};
  j["mc"] = Json{{"replicates", 100}, {"seed", 3}};
  j["verify"] = Json{{"checks", {"extinction", "superadditivity"}}};
  const auto cfg = write_config("c.json", j);
  const auto a = run_cli({"verify", "--config", cfg, "--out", (dir_ / "a").string(), "--threads", "1"});
  const auto b = run_cli({"verify", "--config", cfg, "--out", (dir_ / "b").string(), "--threads", "3"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, VerifyUnknownCheckExitsTwo) {
  auto j = base_config();
  j["verify"] = Json{{"checks", {"telepathy"}}};
  EXPECT_EQ(run_cli({"verify", "--config", write_config("c.json", j), "--out", dir_}).code, kExitConfig);
  j["verify"] = Json{{"checks", Json::array()}};
  EXPECT_EQ(run_cli({"verify", "--config", write_config("c.json", j), "--out", dir_}).code, kExitConfig);
}

TEST_F(CliTest, VerifyCounterexamplePrintsWitness) {
  const auto r = run_cli({"verify", "--config", fixture("counterexample.json"), "--out", dir_});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = Json::parse(r.out);
  const auto& c = out["checks"]["counterexample"];
  ASSERT_EQ(c["found"], true);
  EXPECT_EQ(c["policy_sizes"][2], 0);
  EXPECT_GT(c["sf_sizes"][2].get<int>(), 0);
  EXPECT_TRUE(c.contains("seed"));
  EXPECT_TRUE(c.contains("replicate_id"));
}

TEST_F(CliTest, VerifyPreconditionFailureIsReported) {
  auto j = base_config();
  j["verify"] = Json{{"checks", {"counterexample"}}, {"budget", 10}};
  j["laws"]["offspring"]["params"]["probabilities"] = {0.5, 0, 0.5};
  const auto r = run_cli({"verify", "--config", write_config("c.json", j), "--out", dir_});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = Json::parse(r.out);
  EXPECT_EQ(out["checks"]["counterexample"]["pass"], false);
  EXPECT_TRUE(out["checks"]["counterexample"].contains("error"));
}
