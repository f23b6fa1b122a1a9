#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace cnorm;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string f;
    std::istringstream ls(line);
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(fields);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  ADD_FAILURE() << "missing column " << name;
  return 0;
}

int run_cli(const std::string& args, const std::string& out_file = "/dev/null") {
  const std::string cmd =
      std::string(COLLISION_NORM_BIN) + " " + args + " > " + out_file + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, ParsesKeyValueLinesWithComments) {
  ExperimentConfig cfg("norm");
  cfg.merge_text("# robot\nK_jt = 2e4   # stiffer joint\n\n  controller=pd\n");
  EXPECT_DOUBLE_EQ(cfg.number("K_jt", 0.0), 2e4);
  EXPECT_EQ(cfg.word("controller", ""), "pd");
  EXPECT_DOUBLE_EQ(cfg.number("K_e", 7.0), 7.0);
}

TEST(Config, CommandLineWins) {
  ExperimentConfig cfg("norm");
  cfg.merge_text("K_jt = 2e4\n");
  cfg.set_assignment("K_jt=5e3");
  EXPECT_DOUBLE_EQ(cfg.number("K_jt", 0.0), 5e3);
}

TEST(Config, RejectsBadInput) {
  ExperimentConfig cfg("norm");
  EXPECT_THROW(cfg.set("K_jtt", "1"), ConfigError);
  EXPECT_THROW(cfg.set("K_jt", "-1"), ConfigError);
  EXPECT_THROW(cfg.set("K_jt", "nan"), ConfigError);
  EXPECT_THROW(cfg.set("B", "-0.1"), ConfigError);
  EXPECT_THROW(cfg.set("samples", "2.5"), ConfigError);
  EXPECT_THROW(cfg.set("kjt_grid", "1:2:3"), ConfigError);
  EXPECT_THROW(cfg.set("sigma_w", "1,x"), ConfigError);
  EXPECT_THROW(cfg.set_assignment("K_jt"), ConfigError);
  EXPECT_THROW(cfg.merge_text("K_jt = 1\nK_jt = 2\n"), ConfigError);
  EXPECT_THROW(cfg.merge_text("just words\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig("sweep-everything"), ConfigError);
  EXPECT_NO_THROW(cfg.set("B", "0"));
}

TEST(Config, PhysicalValidationIsAConfigError) {
  ExperimentConfig cfg("norm");
  cfg.set("controller", "warp-drive");
  EXPECT_THROW(run(cfg), ConfigError);
  ExperimentConfig sf("norm");
  sf.set("controller", "statefeedback");
  sf.set("gain", "1,2");
  EXPECT_THROW(run(sf), ConfigError);
}

TEST(Grid, LogAndLinearSpacing) {
  const auto log = GridSpec::parse("1e2:1e5:4:log").values();
  ASSERT_EQ(log.size(), 4u);
  EXPECT_EQ(log.front(), 1e2);
  EXPECT_NEAR(log[1], 1e3, 1e-9);
  EXPECT_NEAR(log[2], 1e4, 1e-8);
  EXPECT_EQ(log.back(), 1e5);
  EXPECT_EQ(GridSpec::parse("0:1:5:lin").values(), (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  EXPECT_EQ(GridSpec::parse("3:9:1:lin").values(), std::vector<double>{3});
  EXPECT_THROW(GridSpec::parse("0:1:5:log"), ConfigError);
  EXPECT_THROW(GridSpec::parse("1:2:0:lin"), ConfigError);
  EXPECT_THROW(GridSpec::parse("1:2:3:cubic"), ConfigError);
}

TEST(Lcg, MatchesRecurrence) {
  // x ← a·x + c mod 2⁶⁴, uniform = (x >> 11)·2⁻⁵³.
  const std::uint64_t a = 6364136223846793005ULL, c = 1442695040888963407ULL;
  std::uint64_t x = 42;
  Lcg rng(42);
  for (int i = 0; i < 1000; ++i) {
    x = a * x + c;
    EXPECT_EQ(rng.uniform(), static_cast<double>(x >> 11) * std::ldexp(1.0, -53));
  }
  Lcg first(42);
  EXPECT_DOUBLE_EQ(first.uniform(), 0.5682303266439076);
}

TEST(Spearman, KnownValues) {
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3}, {1, 4, 9}), 1.0);  // rank, not linear
  // Reference values with tied ranks (scipy.stats.spearmanr).
  EXPECT_NEAR(spearman({1, 2, 2, 3, 5}, {1, 3, 2, 4, 4}), 0.9473684210526317, 1e-14);
  EXPECT_NEAR(spearman({3, 1, 4, 1, 5, 9, 2, 6}, {2, 7, 1, 8, 2, 8, 1, 8}),
              0.19885368120992467, 1e-14);
  EXPECT_THROW(spearman({1}, {1}), InvalidParams);
}

TEST(ParallelMap, KeepsIndexOrderAndPropagatesErrors) {
  const auto v = parallel_map<std::size_t>(1000, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], i * i);
  EXPECT_THROW(parallel_map<int>(50,
                                 [](std::size_t i) -> int {
                                   if (i == 17) throw SingularMatrix("boom");
                                   return 0;
                                 }),
               SingularMatrix);
}

TEST(Experiments, NormRowCoversPeak) {
  ExperimentConfig cfg("norm");
  const ResultTable t = run(cfg);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].status, "ok");
  EXPECT_GE(*t.rows[0].get("sobolev_bound"), *t.rows[0].get("sim_peak"));
}

TEST(Experiments, JointStiffnessSweepHasFourVariantsPerPoint) {
  const ResultTable t = run(ExperimentConfig("sweep-jointstiffness"));
  ASSERT_EQ(t.rows.size(), 100u);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    EXPECT_EQ(r.label, (std::vector<std::string>{"nocontrol", "nomotor", "pd", "lqr"})[i % 4]);
    EXPECT_EQ(r.status, "ok");
    EXPECT_LE(*r.get("sim_peak"), *r.get("sobolev_bound") * 1.001);
    EXPECT_EQ(r.get("lqr_cost").has_value(), r.label == "lqr");
  }
}

TEST(Experiments, ManutecGridSize) {
  const ResultTable t = run(ExperimentConfig("sweep-manutec"));
  EXPECT_EQ(t.rows.size(), 65u);
  for (const auto& r : t.rows) {
    EXPECT_TRUE(r.status == "ok" || r.status == "unstable");
    EXPECT_EQ(*r.get("relative_degree"), 2.0);
    if (r.status == "ok") EXPECT_LE(*r.get("sim_peak"), *r.get("sobolev_bound") * 1.001);
    else EXPECT_FALSE(r.get("sobolev_bound").has_value());
  }
  ExperimentConfig smaller("sweep-manutec");
  smaller.set("mt_grid", "25:400:4:log");
  smaller.set("omega_t_values", "1,8");
  EXPECT_EQ(run(smaller).rows.size(), 8u);
}

TEST(Experiments, DestabilizingFeedbackIsARowMarker) {
  ExperimentConfig cfg("norm");
  cfg.set("controller", "statefeedback");
  cfg.set("gain", "1e5,0,0,0");
  const ResultTable t = run(cfg);
  EXPECT_EQ(t.rows[0].status, "no_norm");
  EXPECT_NE(t.to_csv().find(",no_norm\n"), std::string::npos);
}

TEST(Experiments, InterfaceSweepAndEstimate) {
  ExperimentConfig cfg("sweep-interface");
  cfg.set("ke_grid", "1e2:1e5:6:log");
  const ResultTable t = run(cfg);
  ASSERT_EQ(t.rows.size(), 6u);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_GT(*t.rows[i].get("sobolev_bound"), *t.rows[i - 1].get("sobolev_bound"));
    EXPECT_LT(*t.rows[i].get("var_x_admittance"), *t.rows[i - 1].get("var_x_admittance"));
  }
  ExperimentConfig est("estimate");
  est.set("K_int", format_number(t.rows[2].params[0]));
  est.set("sensing", "admittance");
  EXPECT_DOUBLE_EQ(*run(est).rows[0].get("var_x"), *t.rows[2].get("var_x_admittance"));
}

TEST(Experiments, SimulateEmitsTimeSeries) {
  ExperimentConfig cfg("simulate");
  cfg.set("stride", "100");
  cfg.set("dt", "1e-4");
  cfg.set("horizon", "1");
  const ResultTable t = run(cfg);
  EXPECT_EQ(t.rows.front().params[0], 0.0);
  EXPECT_NEAR(t.rows[1].params[0], 0.01, 1e-15);
  EXPECT_EQ(*t.rows.front().get("f"), 0.0);
}

TEST(Experiments, ValidateBoundIsSeeded) {
  ExperimentConfig a("validate-bound");
  a.set("samples", "10");
  ExperimentConfig b = a;
  b.set("seed", "7");
  const ResultTable ta = run(a), ta2 = run(a), tb = run(b);
  EXPECT_EQ(ta.rows.size(), 40u);
  EXPECT_EQ(ta.to_csv(), ta2.to_csv());
  EXPECT_NE(ta.to_csv(), tb.to_csv());
  ASSERT_EQ(ta.notes.size(), 1u);
  EXPECT_EQ(ta.notes[0].rfind("max_peak_ratio=", 0), 0u);
  for (const auto& r : ta.rows) {
    for (std::size_t k = 1; k < r.params.size(); ++k) EXPECT_GT(r.params[k], 0.0);
    EXPECT_LE(*r.get("peak_ratio"), 1.001);
  }
}

TEST(Csv, RoundTripsFullPrecision) {
  ExperimentConfig cfg("sweep-jointstiffness");
  cfg.set("kjt_grid", "20:1e5:5:log");
  const ResultTable t = run(cfg);
  const std::string csv = t.to_csv();
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_EQ(csv.back(), '\n');
  const auto rows = parse_csv(csv);
  ASSERT_EQ(rows.size(), t.rows.size() + 1);
  const auto& header = rows[0];
  EXPECT_EQ(header.back(), "status");
  const std::size_t wcol = column(header, "sobolev_W");
  const std::size_t pcol = column(header, "sim_peak");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    ASSERT_EQ(rows[i + 1].size(), header.size());
    EXPECT_EQ(std::strtod(rows[i + 1][wcol].c_str(), nullptr), *t.rows[i].get("sobolev_W"));
    EXPECT_EQ(std::strtod(rows[i + 1][pcol].c_str(), nullptr), *t.rows[i].get("sim_peak"));
    EXPECT_EQ(std::strtod(rows[i + 1][0].c_str(), nullptr), t.rows[i].params[0]);
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("norm"), 0);
  EXPECT_EQ(run_cli("norm --set K_jt=-3"), 1);
  EXPECT_EQ(run_cli("norm --set nonsense=3"), 1);
  EXPECT_EQ(run_cli("teleport"), 1);
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("norm --config /nonexistent/file.cfg"), 1);
  // The simulation has nothing to report for an unstable closed loop.
  EXPECT_EQ(run_cli("simulate --set controller=statefeedback --set gain=1e5,0,0,0"), 2);
}

TEST(Cli, DeterministicBytesAcrossThreadCounts) {
  const std::string dir = ::testing::TempDir();
  const std::string a = dir + "cn_a.csv", b = dir + "cn_b.csv", c = dir + "cn_c.csv";
  const std::string args = "sweep-jointstiffness --config " + std::string(SAMPLES_DIR) +
                           "/jointstiffness.cfg --set kjt_grid=1e2:1e5:8:log";
  ASSERT_EQ(run_cli(args + " --out " + a), 0);
  ASSERT_EQ(run_cli(args, b), 0);
  ASSERT_EQ(std::system(("COLLISION_NORM_THREADS=1 " + std::string(COLLISION_NORM_BIN) + " " +
                         args + " --out " + c)
                            .c_str()),
            0);
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a), slurp(c));
}

TEST(Cli, SampleConfigsAreValid) {
  const std::string s = SAMPLES_DIR;
  EXPECT_EQ(run_cli("sweep-manutec --config " + s + "/manutec.cfg"), 0);
  EXPECT_EQ(run_cli("sweep-inertial --config " + s + "/human_contact.cfg"), 0);
  EXPECT_EQ(run_cli("validate-bound --config " + s + "/validate.cfg --set samples=5"), 0);
}
