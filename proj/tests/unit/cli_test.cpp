#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "config.hpp"

namespace twostage::cli {
namespace {

namespace fs = std::filesystem;

std::size_t count_series(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  std::set<std::string> keys;
  while (std::getline(in, line)) {
    std::size_t comma = line.find(',');
    comma = line.find(',', comma + 1);
    comma = line.find(',', comma + 1);
    keys.insert(line.substr(0, comma));
  }
  return keys.size();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("twostage_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int cli(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST(ParseConfig, EmptyTextGivesToyDefaults) {
  const ExperimentConfig c = parse_config_text("");
  EXPECT_EQ(c.lambda, 1e-3);
  EXPECT_EQ(c.lambda_n, 1e-3);
  EXPECT_EQ(c.reward_noise_sd, 0.1);
  EXPECT_EQ(c.horizon, 2000u);
  EXPECT_EQ(c.runs, 400u);
  EXPECT_EQ(c.tie_break, TieBreak::seeded_uniform);
  EXPECT_EQ(c.update_target, UpdateTarget::recommended);
  EXPECT_EQ(c, ExperimentConfig{});
}

TEST(ParseConfig, OverrideWinsOverFile) {
  EXPECT_EQ(parse_config_text("", {"horizon=50"}).horizon, 50u);
  EXPECT_EQ(parse_config_text("horizon = 10\n", {"horizon=50"}).horizon, 50u);
}

TEST(ParseConfig, FullSyntax) {
  const ExperimentConfig c = parse_config_text(
      "# grid\n"
      "horizon = 300   # rounds\n"
      "variants = [\"naive\", sync_pre]\n"
      "gamma_list = [1, 10, 25, 50]\n"
      "sigma_list = [0.2]\n"
      "tie_break = 'lowest_index'\n"
      "update_target = nominated\n"
      "master_seed = 18446744073709551615\n");
  EXPECT_EQ(c.horizon, 300u);
  EXPECT_EQ(c.variants, (std::vector<Variant>{Variant::naive, Variant::sync_pre}));
  EXPECT_EQ(c.gamma_list, (std::vector<double>{1, 10, 25, 50}));
  EXPECT_EQ(c.tie_break, TieBreak::lowest_index);
  EXPECT_EQ(c.update_target, UpdateTarget::nominated);
  EXPECT_EQ(c.master_seed, 18446744073709551615ull);
}

TEST(ParseConfig, GammaListRoundTrip) {
  const ExperimentConfig c = parse_config_text("gamma_list = [1,10,25,50]\n");
  const std::string text = serialize_config(c);
  EXPECT_NE(text.find("gamma_list = [1, 10, 25, 50]"), std::string::npos);
  EXPECT_EQ(parse_config_text(text), c);
}

TEST(ParseConfig, RoundTripProperty) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = 0; i < 200; ++i) {
    ExperimentConfig c;
    c.horizon = 1 + gen() % 5000;
    c.runs = 1 + gen() % 1000;
    c.variants.clear();
    for (Variant v : {Variant::single_stage, Variant::naive, Variant::sync_post, Variant::sync_pre}) {
      if (coin(gen)) c.variants.push_back(v);
    }
    if (c.variants.empty()) c.variants.push_back(Variant::sync_pre);
    c.gamma_list = {u(gen), u(gen) / 7.0};
    c.sigma_list = {u(gen) * 1e-3};
    c.lambda = u(gen) + 1e-9;
    c.lambda_n = 1.0 / (u(gen) + 1.0);
    c.reward_noise_sd = u(gen) / 3.0;
    c.master_seed = gen();
    c.tie_break = coin(gen) ? TieBreak::lowest_index : TieBreak::seeded_uniform;
    c.update_target = coin(gen) ? UpdateTarget::nominated : UpdateTarget::recommended;
    ASSERT_EQ(parse_config_text(serialize_config(c)), c) << serialize_config(c);
  }
}

void expect_config_error(std::string_view text, const std::string& key,
                         const std::vector<std::string>& overrides = {}) {
  try {
    parse_config_text(text, overrides);
    ADD_FAILURE() << "accepted: " << text;
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), key) << e.what();
    EXPECT_NE(std::string(e.what()).find(key), std::string::npos);
  }
}

TEST(ParseConfig, ErrorsNameTheKey) {
  expect_config_error("horizont = 5\n", "horizont");
  expect_config_error("horizon = five\n", "horizon");
  expect_config_error("horizon = -3\n", "horizon");
  expect_config_error("horizon = 0\n", "horizon");
  expect_config_error("runs = 0\n", "runs");
  expect_config_error("lambda = 0\n", "lambda");
  expect_config_error("gamma_list = 5\n", "gamma_list");
  expect_config_error("variants = [\"greedy\"]\n", "variants");
  expect_config_error("variants = []\n", "variants");
  expect_config_error("tie_break = random\n", "tie_break");
  expect_config_error("runs = 3\nruns = 4\n", "runs");
  expect_config_error("", "sigma_list", {"sigma_list=[-1]"});
  expect_config_error("", "bogus", {"bogus=1"});
}

TEST(ParseConfig, SyntaxErrors) {
  EXPECT_THROW(parse_config_text("just words\n"), ConfigError);
  EXPECT_THROW(parse_config_text("= 4\n"), ConfigError);
  EXPECT_THROW(parse_config_text("", {"horizon"}), ConfigError);
}

TEST(FigurePreset, Grids) {
  const ExperimentConfig f2 = figure_preset("fig2");
  EXPECT_EQ(f2.variants.size() * f2.gamma_list.size() * f2.sigma_list.size(), 16u);
  EXPECT_EQ(f2.runs, 400u);
  const ExperimentConfig f3 = figure_preset("fig3");
  EXPECT_EQ(f3.variants, (std::vector<Variant>{Variant::naive, Variant::sync_post, Variant::sync_pre}));
  EXPECT_EQ(f3.gamma_list, std::vector<double>{50.0});
  EXPECT_EQ(f3.sigma_list, std::vector<double>{0.2});
  EXPECT_THROW(figure_preset("fig9"), ConfigError);
}

TEST_F(CliTest, RunWritesAllFilesAndRefusesRerun) {
  const fs::path cfg = write_file("toy.toml", "horizon = 40\nruns = 3\ngamma_list = [10]\nsigma_list = [0.1]\n");
  const fs::path out = dir_ / "results";
  ASSERT_EQ(cli({"run", "--config", cfg.string(), "--out", out.string(), "-j", "2"}), kExitOk) << err_.str();
  EXPECT_TRUE(fs::exists(out / "aggregates.csv"));
  EXPECT_TRUE(fs::exists(out / "runs.csv"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_NE(out_.str().find("naive gamma=10 sigma=0.1 T=40"), std::string::npos) << out_.str();
  EXPECT_TRUE(err_.str().empty());

  EXPECT_EQ(cli({"run", "--config", cfg.string(), "--out", out.string()}), kExitRefusedOverwrite);
  EXPECT_FALSE(err_.str().empty());
  EXPECT_EQ(cli({"run", "--config", cfg.string(), "--out", out.string(), "--force"}), kExitOk);
}

TEST_F(CliTest, RunWithoutConfigUsesDefaultsAndOverrides) {
  const fs::path out = dir_ / "r";
  ASSERT_EQ(cli({"run", "--set", "runs=4", "--set", "horizon=100", "--out", out.string()}), kExitOk)
      << err_.str();
  EXPECT_EQ(count_series(out / "aggregates.csv"), 16u);
}

TEST_F(CliTest, OutDirFromEnvironment) {
  const fs::path out = dir_ / "env_out";
  ::setenv(kOutDirEnv, out.string().c_str(), 1);
  const int code = cli({"run", "--set", "runs=2", "--set", "horizon=5", "--set", "gamma_list=[1]",
                        "--set", "sigma_list=[0.1]"});
  ::unsetenv(kOutDirEnv);
  ASSERT_EQ(code, kExitOk) << err_.str();
  EXPECT_TRUE(fs::exists(out / "aggregates.csv"));
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(cli({"run", "--config", (dir_ / "missing.toml").string(), "--out", dir_.string()}), kExitConfig);
  const fs::path bad = write_file("bad.toml", "horizon = 0\n");
  EXPECT_EQ(cli({"run", "--config", bad.string(), "--out", dir_.string()}), kExitConfig);
  EXPECT_NE(err_.str().find("horizon"), std::string::npos);
  EXPECT_EQ(cli({"run", "--set", "speed=3", "--out", dir_.string()}), kExitConfig);
  EXPECT_NE(err_.str().find("speed"), std::string::npos);
  EXPECT_EQ(cli({"frobnicate"}), kExitConfig);
  EXPECT_EQ(cli({}), kExitConfig);
  EXPECT_TRUE(out_.str().empty());
}

TEST_F(CliTest, RuntimeFailureExitsThree) {
  const fs::path blocker = write_file("blocker", "x");
  EXPECT_EQ(cli({"run", "--set", "runs=1", "--set", "horizon=2", "--out", (blocker / "sub").string()}),
            kExitRuntime);
}

TEST_F(CliTest, ReproduceFigureSeriesCounts) {
  const fs::path f2 = dir_ / "fig2";
  ASSERT_EQ(cli({"reproduce-figure", "fig2", "--out", f2.string(), "--set", "runs=2", "--set", "horizon=20"}),
            kExitOk)
      << err_.str();
  EXPECT_EQ(count_series(f2 / "aggregates.csv"), 16u);
  std::ifstream runs(f2 / "runs.csv");
  std::string line;
  std::getline(runs, line);
  EXPECT_FALSE(std::getline(runs, line));

  const fs::path f3 = dir_ / "fig3";
  ASSERT_EQ(cli({"reproduce-figure", "fig3", "--out", f3.string(), "--set", "runs=2", "--set", "horizon=20",
                 "--with-runs"}),
            kExitOk);
  EXPECT_EQ(count_series(f3 / "aggregates.csv"), 3u);
  std::ifstream runs3(f3 / "runs.csv");
  std::size_t rows = 0;
  while (std::getline(runs3, line)) ++rows;
  EXPECT_EQ(rows, 1u + 3 * 2 * 20);
}

TEST_F(CliTest, UnknownFigureListsValidIds) {
  EXPECT_EQ(cli({"reproduce-figure", "fig7", "--out", dir_.string()}), kExitConfig);
  EXPECT_NE(err_.str().find("fig2"), std::string::npos);
  EXPECT_NE(err_.str().find("fig3"), std::string::npos);
}

TEST_F(CliTest, SweepAndReport) {
  const fs::path cfg = write_file("s.toml", "horizon = 15\nruns = 2\ngamma_list = [1]\nsigma_list = [0.2]\n");
  const fs::path out = dir_ / "sweep";
  ASSERT_EQ(cli({"sweep", "--config", cfg.string(), "--over", "master_seed=1,2", "--out", out.string()}),
            kExitOk)
      << err_.str();
  EXPECT_TRUE(fs::exists(out / "master_seed=1" / "aggregates.csv"));
  EXPECT_TRUE(fs::exists(out / "master_seed=2" / "manifest.json"));
  EXPECT_EQ(cli({"sweep", "--config", cfg.string(), "--over", "gamma_list=1,2", "--out", out.string()}),
            kExitConfig);

  ASSERT_EQ(cli({"report", "--out", (out / "master_seed=1").string()}), kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("naive gamma=1 sigma=0.2 T=15"), std::string::npos) << out_.str();
  EXPECT_NE(out_.str().find("sync_post gamma=1 sigma=0.2 T=15"), std::string::npos);
  EXPECT_EQ(cli({"report", "--out", (dir_ / "nowhere").string()}), kExitConfig);
}

TEST_F(CliTest, ManifestReproducesOutputs) {
  const fs::path a = dir_ / "a";
  const fs::path b = dir_ / "b";
  const std::vector<std::string> common{"--set", "runs=3", "--set", "horizon=25", "--set", "gamma_list=[25]"};
  std::vector<std::string> args{"run", "--out", a.string()};
  args.insert(args.end(), common.begin(), common.end());
  ASSERT_EQ(cli(args), kExitOk);
  args[2] = b.string();
  ASSERT_EQ(cli(args), kExitOk);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  EXPECT_EQ(slurp(a / "aggregates.csv"), slurp(b / "aggregates.csv"));
  EXPECT_EQ(slurp(a / "runs.csv"), slurp(b / "runs.csv"));
}

}  // namespace
}  // namespace twostage::cli
