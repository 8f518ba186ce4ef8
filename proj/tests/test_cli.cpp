#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "amcsim/cli.hpp"
#include "amcsim/workload.hpp"
#include "nlohmann/json.hpp"
#include "oracles.hpp"

namespace amcsim {
namespace {

namespace fs = std::filesystem;

struct Cli {
  int code = -1;
  std::string out;
  std::string err;
};

Cli cli(std::vector<std::string> args) {
  args.insert(args.begin(), "amcsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Cli r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("amcsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::string kDemo = AMCSIM_SOURCE_DIR "/data/weight_stationary_demo.trace";

TEST_F(CliTest, SimulateDemoIsClean) {
  const auto r = cli({"simulate", kDemo, "--report", path("r.json"), "--events", path("e.log")});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("status: clean"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(path("r.json")));
  const auto log = oracle::sum_event_log(slurp(path("e.log")));
  const double dyn = j["dynamic_energy_fJ"].get<double>();
  EXPECT_NEAR(log.energy_fJ, dyn, dyn * 1e-9);
  EXPECT_EQ(j["counters"]["filo_violations"].get<std::uint64_t>(), 0u);
  EXPECT_EQ(j["model_checksum"].get<std::string>(), ModelParams::defaults().checksum);
  EXPECT_EQ(j["config"]["command"], "simulate");
  EXPECT_EQ(j["config"]["arrays"][0]["tech"], "aug8t");
}

TEST_F(CliTest, SimulateMissingTrace) {
  const auto r = cli({"simulate", path("nope.trace"), "--report", "", "--events", ""});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, SimulateMalformedTrace) {
  spit(path("bad.trace"), "0 WRITE_SRAM 0:0:0 1\n5 FROB 0:0:0\n");
  const auto r = cli({"simulate", path("bad.trace"), "--report", "", "--events", ""});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST_F(CliTest, SimulateWarnWithViolations) {
  spit(path("v.trace"),
       "# amcsim trace v1\n"
       "# array 0 aug8t augmented 4 4\n"
       "0 WRITE_SRAM 0:0:0 1\n"
       "10 WRITE_DRAM 0:0:0 1\n"
       "20 READ_SRAM 0:0:0\n");
  const auto r = cli({"simulate", path("v.trace"), "--filo", "warn", "--report", path("r.json"),
                      "--events", path("e.log")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("status: violations"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_EQ(j["counters"]["filo_violations"].get<int>(), 1);
  EXPECT_EQ(j["counters"]["dram_destroyed"].get<int>(), 1);
  EXPECT_EQ(oracle::sum_event_log(slurp(path("e.log"))).kinds["FILO_VIOLATION"], 1u);
}

TEST_F(CliTest, SimulateSnapshot) {
  spit(path("s.trace"),
       "# amcsim trace v1\n"
       "# array 0 aug8t augmented 1 2\n"
       "0 WRITE_SRAM 0:0:1 0\n"
       "5 WRITE_DRAM 0:0:0 1\n");
  const auto r = cli({"simulate", path("s.trace"), "--report", "", "--events", "", "--snapshot",
                      path("snap.txt")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(slurp(path("snap.txt")),
            "subarray 0 tech=aug8t mode=augmented rows=1 cols=2 at=5\n.1 0.\n");
}

TEST_F(CliTest, WorkersDoNotChangeOutputs) {
  ASSERT_EQ(cli({"gen-trace", "--generator", "random", "--count", "6", "--rows", "8", "--cols", "8",
                 "--commands", "5000", "--violation-rate", "0.2", "--set-mode-rate", "0.01",
                 "--seed", "5", "--out", path("t.trace")})
                .code,
            0);
  const auto a = cli({"simulate", path("t.trace"), "--filo", "warn", "--workers", "1", "--report",
                      path("a.json"), "--events", path("a.log")});
  const auto b = cli({"simulate", path("t.trace"), "--filo", "warn", "--workers", "4", "--report",
                      path("b.json"), "--events", path("b.log")});
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("a.log")), slurp(path("b.log")));
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, CapacityAug8T) {
  const auto r = cli({"capacity", "--tech", "aug8t", "--rows", "64", "--cols", "64", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["augmented_to_normal_ratio"].get<double>(), 2.0);
}

TEST_F(CliTest, CapacityAug7T) {
  const auto r = cli({"capacity", "--tech", "aug7t", "--rows", "64", "--cols", "64", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  bool seen = false;
  for (const auto& m : j["modes"]) {
    if (m["mode"] != "augmented") continue;
    seen = true;
    EXPECT_EQ(m["trits"].get<std::uint64_t>(), 4096u);
    EXPECT_NEAR(m["bit_equivalent"].get<double>(), 4096 * std::log2(3.0), 1e-9);
  }
  EXPECT_TRUE(seen);
  EXPECT_EQ(j["cells_per_trit"].get<int>(), 1);
  EXPECT_EQ(j["conventional_6t_cells_per_trit"].get<double>(), 2.0);
}

TEST_F(CliTest, Capacity6THasNoRatio) {
  const auto r = cli({"capacity", "--tech", "std6t", "--mode", "normal", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j.contains("augmented_to_normal_ratio"));
  EXPECT_EQ(j["modes"].size(), 1u);
}

TEST_F(CliTest, CompareTernary) {
  const auto r = cli({"compare", "--workload", "ternary", "--items", "500", "--report",
                      path("c.json")});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const auto j = nlohmann::json::parse(slurp(path("c.json")));
  EXPECT_NEAR(j["ratios"]["write_energy"].get<double>(), (2 * 2.07) / 0.99, 1e-12);
  EXPECT_EQ(j["ratios"]["cells"].get<double>(), 2.0);
  EXPECT_EQ(j["baseline"]["logical_ops"], j["amc"]["logical_ops"]);
  EXPECT_EQ(j["amc"]["cells"].get<int>(), 500);
  EXPECT_EQ(j["baseline"]["cells"].get<int>(), 1000);
}

TEST_F(CliTest, CompareDual) {
  const auto r = cli({"compare", "--workload", "dual", "--items", "300", "--report", path("c.json"),
                      "--amc-events", path("amc.log")});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const auto j = nlohmann::json::parse(slurp(path("c.json")));
  EXPECT_EQ(j["amc"]["cells"].get<int>(), 300);
  EXPECT_EQ(j["baseline"]["cells"].get<int>(), 600);
  EXPECT_EQ(j["amc"]["readback_errors"].get<int>(), 0);
  EXPECT_EQ(oracle::sum_event_log(slurp(path("amc.log"))).kinds.count("FILO_VIOLATION"), 0u);
}

TEST_F(CliTest, GenAndValidateClean) {
  const auto g = cli({"gen-trace", "--weights", "32", "--activations", "100", "--rows", "8", "--cols",
                      "8", "--out", path("ws.trace")});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_TRUE(g.err.empty());
  const auto v = cli({"validate-trace", path("ws.trace")});
  EXPECT_EQ(v.code, 0) << v.out;
  EXPECT_NE(v.out.find("0 finding(s)"), std::string::npos);
}

TEST_F(CliTest, GenWarnsOnSlowStream) {
  const auto g = cli({"gen-trace", "--weights", "4", "--activations", "3", "--inter-arrival",
                      "20000", "--rows", "4", "--cols", "4", "--out", path("ws.trace")});
  EXPECT_EQ(g.code, 0);
  EXPECT_NE(g.err.find("warning"), std::string::npos);
}

TEST_F(CliTest, GenToStdoutParses) {
  const auto g = cli({"gen-trace", "--generator", "random", "--commands", "50", "--tech", "aug7t"});
  ASSERT_EQ(g.code, 0) << g.err;
  const auto t = parse_trace_file(g.out);
  EXPECT_EQ(t.commands.size(), 50u);
  EXPECT_EQ(t.arrays[0].tech, Technology::Aug7T);
}

TEST_F(CliTest, ValidateFindsFilo) {
  spit(path("v.trace"),
       "# amcsim trace v1\n"
       "# array 0 aug8t augmented 4 4\n"
       "0 WRITE_SRAM 0:0:0 1\n"
       "10 WRITE_DRAM 0:0:0 1\n"
       "20 WRITE_SRAM 0:0:0 0\n"
       "30 READ_DRAM 0:0:0\n");
  const auto v = cli({"validate-trace", path("v.trace")});
  EXPECT_EQ(v.code, 2);
  EXPECT_NE(v.out.find("command 2: FILO violation"), std::string::npos) << v.out;
}

TEST_F(CliTest, ValidateRejectsOutOfRange) {
  spit(path("v.trace"),
       "# amcsim trace v1\n"
       "# array 0 aug8t augmented 4 4\n"
       "0 WRITE_SRAM 0:0:0 1\n"
       "10 WRITE_DRAM 0:9:0 1\n");
  const auto v = cli({"validate-trace", path("v.trace")});
  EXPECT_EQ(v.code, 1);
  EXPECT_NE(v.out.find("command 1: error"), std::string::npos) << v.out;
}

TEST_F(CliTest, ValidateReportsParseLine) {
  spit(path("v.trace"), "10 IDLE\n5 IDLE\n");
  const auto v = cli({"validate-trace", path("v.trace")});
  EXPECT_EQ(v.code, 1);
  EXPECT_NE(v.out.find(":2: error"), std::string::npos) << v.out;
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  spit(path("cfg.toml"), "temperature = 25\nseed = 9\n");
  const auto a = cli({"simulate", kDemo, "--config", path("cfg.toml"), "--report", path("a.json"),
                      "--events", ""});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto ja = nlohmann::json::parse(slurp(path("a.json")));
  EXPECT_EQ(ja["config"]["temperature_C"].get<double>(), 25.0);
  EXPECT_EQ(ja["config"]["seed"].get<int>(), 9);

  const auto b = cli({"simulate", kDemo, "--config", path("cfg.toml"), "--seed", "3", "--report",
                      path("b.json"), "--events", ""});
  ASSERT_EQ(b.code, 0) << b.err;
  const auto jb = nlohmann::json::parse(slurp(path("b.json")));
  EXPECT_EQ(jb["config"]["seed"].get<int>(), 3);
  EXPECT_EQ(jb["config"]["temperature_C"].get<double>(), 25.0);
}

TEST_F(CliTest, ModelFromEnvironment) {
  std::string text(default_model_text());
  text.replace(text.find("energy_fJ = 0.0"), 15, "energy_fJ = 0.5");
  spit(path("m.toml"), text);
  ::setenv("AMCSIM_MODEL_FILE", path("m.toml").c_str(), 1);
  const auto r = cli({"simulate", kDemo, "--report", path("r.json"), "--events", ""});
  ::unsetenv("AMCSIM_MODEL_FILE");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_EQ(j["model_checksum"].get<std::string>(), sha256_hex(text));
  EXPECT_EQ(j["config"]["model"].get<std::string>(), path("m.toml"));
}

TEST_F(CliTest, BadModelFile) {
  spit(path("m.toml"), "[op_energy_fJ]\nstd6t.normal.sram_read = 1\n");
  const auto r = cli({"capacity", "--model", path("m.toml"), "--tech", "aug8t"});
  // capacity does not consult the model; simulate does.
  EXPECT_EQ(r.code, 0);
  const auto s = cli({"simulate", kDemo, "--model", path("m.toml"), "--report", "", "--events", ""});
  EXPECT_EQ(s.code, 1);
}

TEST_F(CliTest, UnknownOptions) {
  EXPECT_EQ(cli({"simulate"}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({"capacity", "--tech", "aug9t"}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

}  // namespace
}  // namespace amcsim
