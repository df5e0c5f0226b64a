#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "chiral/runner.hpp"

using namespace chiral;

namespace {

ExperimentConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> small(0, 3);
  ExperimentConfig c;
  c.kind = static_cast<ExperimentKind>(small(rng));
  c.L = 1.0 + std::abs(u(rng)) * 3.0;
  c.N = 24 + small(rng) * 5;
  c.f.clear();
  c.chi.clear();
  for (int k = 0; k <= small(rng); ++k) c.f.push_back({u(rng), k, u(rng)});
  for (int k = 1; k <= 1 + small(rng); ++k) c.chi.push_back({u(rng) / 3.0, k, u(rng)});
  c.tol = std::pow(10.0, -4.0 - small(rng) * 3.0) * (1.0 + std::abs(u(rng)));
  c.seed = rng();
  c.out = "results/run" + std::to_string(small(rng));
  c.time = u(rng);
  c.cases = 1 + small(rng);
  c.state_modes = 2 + small(rng);
  c.chi_time = static_cast<TimeProfile>(small(rng) % 3);
  c.momenta = {-1, 0, 2};
  if (small(rng) % 2) c.sweep = SweepSpec{SweepAxis::circumference, {1.5, 2.25, 7.0 / 3.0}, 1e-11};
  return c;
}

}  // namespace

TEST(Config, DefaultsMatchHeadlineCase) {
  const auto c = parse_config("");
  EXPECT_EQ(c.kind, ExperimentKind::anomaly);
  EXPECT_EQ(c.N, 24);
  EXPECT_DOUBLE_EQ(c.L, kTwoPi);
  const auto chi = TrigPolynomial::from_harmonics(c.L, c.chi);
  EXPECT_NEAR(chi.value(1.0), 0.7 * std::sin(1.0), 1e-15);
}

TEST(Config, ParsesExpressions) {
  EXPECT_DOUBLE_EQ(parse_real("2pi"), kTwoPi);
  EXPECT_DOUBLE_EQ(parse_real("-pi/2"), -kPi / 2);
  EXPECT_DOUBLE_EQ(parse_real("0.5*pi"), kPi / 2);
  EXPECT_DOUBLE_EQ(parse_real(" 1e-9 "), 1e-9);
  EXPECT_THROW((void)parse_real("two"), ConfigError);
  EXPECT_THROW((void)parse_real(""), ConfigError);
  const auto hs = parse_harmonics("1 1, 0.5 2 pi/2");
  ASSERT_EQ(hs.size(), 2u);
  EXPECT_EQ(hs[1].index, 2);
  EXPECT_DOUBLE_EQ(hs[1].phase, kPi / 2);
  EXPECT_THROW((void)parse_harmonics("1"), ConfigError);
}

TEST(Config, RoundTripProperty) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_config(rng);
    const auto text = emit_config(c);
    EXPECT_EQ(parse_config(text), c) << text;
    EXPECT_EQ(emit_config(parse_config(text)), text);
  }
}

TEST(Config, Rejections) {
  EXPECT_THROW((void)parse_config("[bogus]\nx = 1\n"), ConfigError);
  EXPECT_THROW((void)parse_config("[experiment]\nsize = 3\n"), ConfigError);
  EXPECT_THROW((void)parse_config("[experiment]\nkind = magic\n"), ConfigError);
  EXPECT_THROW((void)parse_config("[experiment]\nN = 2.5\n"), ConfigError);
  EXPECT_THROW((void)parse_config("[experiment]\nL = -1\n"), ConfigError);
  EXPECT_THROW((void)parse_config("[experiment]\ntol = 0\n"), ConfigError);
  EXPECT_THROW((void)parse_config("[fock]\nmomenta = 1, 1\n"), ConfigError);
  EXPECT_THROW((void)parse_config("[sweep]\naxis = N\nvalues = 32, 24\n"), ConfigError);
  EXPECT_THROW((void)parse_config("[sweep]\naxis = N\n"), ConfigError);
  EXPECT_THROW((void)parse_config("[experiment\nN = 3\n"), ConfigError);
  try {
    (void)parse_config("[experiment]\nN = 12\n[chi]\nharmonics = 0.5 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("minimum N is 18"), std::string::npos);
  }
}

TEST(Runner, AnomalyRow) {
  const auto rep = run(parse_config(""));
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_TRUE(rep.all_pass());
  EXPECT_NEAR(rep.rows[0].measured, -0.7, 1e-9);
  EXPECT_EQ(rep.rows[0].values.size(), rep.columns.size());
}

TEST(Runner, FailingToleranceIsReported) {
  auto c = parse_config("");
  c.tol = 1e-30;
  const auto rep = run(c);
  EXPECT_FALSE(rep.all_pass());
  EXPECT_FALSE(summary_json(rep)["all_pass"].get<bool>());
}

TEST(Runner, AllKindsProduceConsistentRows) {
  for (const char* kind : {"anomaly", "fock", "single-particle", "hs-check"}) {
    auto c = parse_config(std::string("[experiment]\nkind = ") + kind +
                          "\ntol = 1e-8\n[chi]\nharmonics = 0.5 1\n[single-particle]\ncases = 3\n");
    const auto rep = run(c);
    EXPECT_TRUE(rep.all_pass()) << kind;
    for (const auto& row : rep.rows) EXPECT_EQ(row.values.size(), rep.columns.size()) << kind;
  }
}

TEST(Runner, InadmissibleCutoffPropagates) {
  auto c = parse_config("[experiment]\nN = 6\n[chi]\nharmonics = 1 1\n");
  EXPECT_THROW((void)run(c), AdmissibilityError);
}

TEST(Runner, SweepsAndSpread) {
  auto n = parse_config("[sweep]\naxis = N\nvalues = 24, 32, 48\n");
  const auto rn = sweep(n);
  ASSERT_EQ(rn.rows.size(), 3u);
  EXPECT_EQ(rn.rows[1].id, "N=32");
  ASSERT_TRUE(rn.spread);
  EXPECT_LE(rn.spread->spread, 1e-10);
  EXPECT_TRUE(rn.all_pass());

  auto l = parse_config("[sweep]\naxis = L\nvalues = 2pi, 10\n");
  const auto rl = sweep(l);
  EXPECT_TRUE(rl.all_pass());
  EXPECT_LE(rl.spread->spread, 1e-10);

  auto a = parse_config("[chi]\nharmonics = 1 1 -pi/2\n[sweep]\naxis = amplitude\nvalues = 0.1, 0.3, 0.7, 1\n");
  const auto ra = sweep(a);
  EXPECT_FALSE(ra.spread);
  for (std::size_t i = 0; i < ra.rows.size(); ++i) {
    EXPECT_NEAR(ra.rows[i].measured, -a.sweep->values[i], 1e-9);
  }
  EXPECT_THROW((void)sweep(parse_config("")), ConfigError);
}

TEST(Runner, CsvDeterministicApartFromDuration) {
  auto c = parse_config("[experiment]\nkind = single-particle\nseed = 5\n[single-particle]\ncases = 4\n");
  const auto strip = [](const std::string& csv) {
    std::string out;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };
  const auto a = to_csv(run(c));
  const auto b = to_csv(run(c));
  EXPECT_EQ(strip(a), strip(b));
  EXPECT_EQ(a.substr(0, a.find('\n')), "id,L,N,time,grid_points,deviation,tol,pass,duration_ms");
  c.seed = 6;
  EXPECT_NE(strip(to_csv(run(c))), strip(a));
}

TEST(Runner, WritesCsvAndSummary) {
  const auto dir = std::filesystem::temp_directory_path() / "chiral_runner_test";
  std::filesystem::remove_all(dir);
  const auto rep = run(parse_config(""));
  const auto csv = write_report(rep, dir, "anomaly");
  EXPECT_TRUE(std::filesystem::exists(csv));
  std::ifstream js(dir / "anomaly_summary.json");
  const auto j = nlohmann::json::parse(js);
  EXPECT_EQ(j["rows"].get<int>(), 1);
  EXPECT_TRUE(j["all_pass"].get<bool>());
  std::filesystem::remove_all(dir);
}
