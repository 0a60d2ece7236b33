#include "jke/cli/commands.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/reference_values.hpp"

namespace jke::cli {
namespace {

const std::string kConfigs = std::string(JKE_SOURCE_DIR) + "/configs/";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / "jke_cli_test" / info->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  int Run(std::vector<std::string> args) {
    args.insert(args.begin(), "jke");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    log_.str("");
    err_.str("");
    return run_cli(static_cast<int>(argv.size()), argv.data(), log_, err_);
  }

  std::string Out(const std::string& name) const { return (dir_ / name).string(); }

  std::string WriteConfig(const std::string& name, const json& j) const {
    const auto path = dir_ / name;
    std::ofstream(path) << j.dump(2);
    return path.string();
  }

  static std::string Slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static json Json(const fs::path& p) { return json::parse(Slurp(p)); }

  static std::vector<std::vector<std::string>> Csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(Slurp(p));
    std::string line;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      rows.push_back(cells);
    }
    return rows;
  }

  fs::path dir_;
  std::ostringstream log_, err_;
};

TEST_F(CliTest, AnalyzeOperatingPoint) {
  ASSERT_EQ(Run({"analyze", "--config", kConfigs + "operating-point.json", "--out", Out("a")}), kOk);
  const auto r = Json(dir_ / "a" / "report.json");
  EXPECT_NEAR(r["timing"]["duration_s"].get<double>() / oracle::kOperatingDuration, 1.0, 1e-9);
  EXPECT_NEAR(r["secrecy"]["rate_bits_per_s"].get<double>() / oracle::kOperatingRate, 1.0, 1e-9);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "report.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "config.json"));
}

TEST_F(CliTest, JsonFormatSkipsCsv) {
  ASSERT_EQ(Run({"analyze", "--format", "json", "--out", Out("a")}), kOk);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "report.json"));
  EXPECT_FALSE(fs::exists(dir_ / "a" / "report.csv"));
}

TEST_F(CliTest, ExitCodes) {
  const auto zero_w = WriteConfig("w0.json", {{"system", {{"bandwidth_hz", 0}}}});
  EXPECT_EQ(Run({"analyze", "--config", zero_w, "--out", Out("a")}), kValidation);
  EXPECT_NE(err_.str().find("bandwidth"), std::string::npos);
  EXPECT_EQ(Run({"analyze", "--config", Out("missing.json"), "--out", Out("b")}), kIo);
  const auto unknown = WriteConfig("unknown.json", {{"system", {{"bandwith_hz", 1e6}}}});
  EXPECT_EQ(Run({"analyze", "--config", unknown, "--out", Out("c")}), kValidation);
  {
    std::ofstream(dir_ / "broken.json") << "{ not json";
  }
  EXPECT_EQ(Run({"analyze", "--config", Out("broken.json"), "--out", Out("d")}), kValidation);
  EXPECT_EQ(Run({"frobnicate"}), kValidation);
  const auto no_secrecy = WriteConfig(
      "none.json", {{"system", {{"jamming_bits_per_symbol", 0}, {"eve_adc", {{"aperture_jitter_s", 500e-15}}}}}});
  EXPECT_EQ(Run({"analyze", "--config", no_secrecy, "--out", Out("e")}), kNoSecrecy);
  EXPECT_TRUE(Json(dir_ / "e" / "report.json")["timing"].contains("error"));
}

TEST_F(CliTest, ConfigJsonReproducesRun) {
  ASSERT_EQ(Run({"race", "--config", kConfigs + "race-quantum.json", "--out", Out("first")}), kOk);
  ASSERT_EQ(Run({"race", "--config", Out("first/config.json"), "--out", Out("second")}), kOk);
  EXPECT_EQ(Slurp(dir_ / "first" / "race.json"), Slurp(dir_ / "second" / "race.json"));
  EXPECT_EQ(Slurp(dir_ / "first" / "config.json"), Slurp(dir_ / "second" / "config.json"));
}

TEST_F(CliTest, Fig3aCellMatchesAnalyze) {
  ASSERT_EQ(Run({"sweep", "fig3a", "--config", kConfigs + "fig3a.json", "--out", Out("s")}), kOk);
  const auto rows = Csv(dir_ / "s" / "fig3a.csv");
  ASSERT_EQ(rows.size(), 1u + 51u * 61u);
  EXPECT_EQ(rows[0][0], "snr_e_db");
  const double expected = secrecy_rate(load_config(kConfigs + "operating-point.json").system.to_params())
                              .rate_bits_per_s;
  bool found = false;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (std::stod(rows[i][0]) == 80.0 && std::stod(rows[i][1]) == 32.0) {
      EXPECT_NEAR(std::stod(rows[i][2]) / expected, 1.0, 1e-12);
      found = true;
    }
  EXPECT_TRUE(found);
  EXPECT_EQ(Csv(dir_ / "s" / "fig3a_contour.csv").size(), 52u);
  EXPECT_TRUE(fs::exists(dir_ / "s" / "fig3a.params.json"));
}

TEST_F(CliTest, SingleCellSweep) {
  const auto cfg = WriteConfig("one.json", {{"sweep", {{"snr_b_db", {32}}, {"snr_e_db", {80}}}}});
  ASSERT_EQ(Run({"sweep", "fig3a", "--config", cfg, "--out", Out("s")}), kOk);
  EXPECT_EQ(Csv(dir_ / "s" / "fig3a.csv").size(), 2u);
  const auto bad = WriteConfig("bad.json", {{"sweep", {{"snr_b_db", {32, 32}}}}});
  EXPECT_EQ(Run({"sweep", "fig3a", "--config", bad, "--out", Out("t")}), kValidation);
}

TEST_F(CliTest, Fig3bThresholdNonIncreasingInW) {
  ASSERT_EQ(Run({"sweep", "fig3b", "--config", kConfigs + "fig3b.json", "--out", Out("s")}), kOk);
  const auto rows = Csv(dir_ / "s" / "fig3b.csv");
  ASSERT_EQ(rows.size(), 1u + 20u * 50u);
  std::map<std::string, double> previous;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double v = std::stod(rows[i][3]);
    const auto it = previous.find(rows[i][1]);
    if (it != previous.end()) {
      EXPECT_LE(v, it->second + 1e-9) << "row " << i;
    }
    previous[rows[i][1]] = v;
  }
}

TEST_F(CliTest, SimulateIdealAndReproducible) {
  const std::string cfg = kConfigs + "simulate-ideal.json";
  ASSERT_EQ(Run({"simulate", "--config", cfg, "--out", Out("a")}), kOk);
  ASSERT_EQ(Run({"simulate", "--config", cfg, "--out", Out("b")}), kOk);
  const auto stats = Json(dir_ / "a" / "stats.json");
  EXPECT_EQ(stats["stats"]["bob_symbol_errors"], 0);
  EXPECT_EQ(stats["stats"]["bob_key_bit_errors"], 0);
  EXPECT_TRUE(stats["kem"]["keys_agree"].get<bool>());
  EXPECT_EQ(Slurp(dir_ / "a" / "stats.json"), Slurp(dir_ / "b" / "stats.json"));
  EXPECT_EQ(Slurp(dir_ / "a" / "trace.csv"), Slurp(dir_ / "b" / "trace.csv"));

  ASSERT_EQ(Run({"simulate", "--config", cfg, "--seed", "8", "--out", Out("c")}), kOk);
  EXPECT_NE(Slurp(dir_ / "a" / "trace.csv"), Slurp(dir_ / "c" / "trace.csv"));
}

TEST_F(CliTest, TraceStatisticsRecomputable) {
  const auto cfg = WriteConfig("sim.json", {{"simulate", {{"n_symbols", 3000}, {"cancellation_depth_db", 93}}}});
  ASSERT_EQ(Run({"simulate", "--config", cfg, "--out", Out("a")}), kOk);
  ASSERT_EQ(Run({"analyze", "--config", cfg, "--trace", Out("a/trace.csv"), "--out", Out("b")}), kOk);
  EXPECT_EQ(Json(dir_ / "b" / "trace_stats.json"), Json(dir_ / "a" / "stats.json")["stats"]);
}

TEST_F(CliTest, SimulateCancellationWarning) {
  const auto cfg = WriteConfig("sim.json", {{"simulate", {{"n_symbols", 1000}, {"cancellation_depth_db", 84}}}});
  ASSERT_EQ(Run({"simulate", "--config", cfg, "--out", Out("a")}), kOk);
  EXPECT_TRUE(Json(dir_ / "a" / "stats.json")["cancellation"]["warning"].get<bool>());
  EXPECT_NE(log_.str().find("warning"), std::string::npos);
}

TEST_F(CliTest, RaceVerdicts) {
  ASSERT_EQ(Run({"race", "--config", kConfigs + "race-quantum.json", "--out", Out("q")}), kOk);
  const auto q = Json(dir_ / "q" / "race.json");
  EXPECT_EQ(q["verdict"], "everlasting");
  EXPECT_NE(q["trend"]["annotation"].get<std::string>().find("2040"), std::string::npos);
  EXPECT_FALSE(q["trend"]["caveat"].get<std::string>().empty());

  const auto fast = WriteConfig(
      "fast.json", {{"race", {{"attacker", "fast"}, {"custom_attackers", {{{"name", "fast"}, {"t_qc_s", 1e-3}}}}}}});
  ASSERT_EQ(Run({"race", "--config", fast, "--out", Out("f")}), kOk);
  EXPECT_EQ(Json(dir_ / "f" / "race.json")["verdict"], "broken");

  ASSERT_EQ(Run({"race", "--config", kConfigs + "race-classical.json", "--out", Out("c")}), kOk);
  const auto c = Json(dir_ / "c" / "race.json");
  EXPECT_EQ(c["verdict"], "everlasting");
  EXPECT_NE(c["trend"]["annotation"].get<std::string>().find("2052"), std::string::npos);

  const auto nocores = WriteConfig("nocores.json", {{"race", {{"attacker", "classical-rsa829"}}}});
  EXPECT_EQ(Run({"race", "--config", nocores, "--out", Out("n")}), kValidation);
  const auto unknown = WriteConfig("unknown.json", {{"race", {{"attacker", "nobody"}}}});
  EXPECT_EQ(Run({"race", "--config", unknown, "--out", Out("u")}), kValidation);
  const auto unknown_verdict = WriteConfig("uv.json", {{"race", {{"attacker", "unknown"}}}});
  ASSERT_EQ(Run({"race", "--config", unknown_verdict, "--out", Out("v")}), kOk);
  EXPECT_EQ(Json(dir_ / "v" / "race.json")["verdict"], "unknown");
}

TEST_F(CliTest, RaceToyFactoring) {
  ASSERT_EQ(Run({"race", "--config", kConfigs + "race-toy-factoring.json", "--out", Out("t")}), kOk);
  const auto t = Json(dir_ / "t" / "race.json");
  EXPECT_EQ(t["attacker"]["name"], "toy-factoring-48");
  EXPECT_GT(t["attacker"]["t_qc_s"].get<double>(), 0.0);
}

}  // namespace
}  // namespace jke::cli
