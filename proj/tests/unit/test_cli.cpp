#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "arom/feature_store.hpp"
#include "test_support.hpp"

namespace arom {
namespace {

struct CliResult {
  int status = 0;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run(const testing::TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string("cd '") + dir.path().string() + "' && '" + AROM_CLI_PATH + "' " + args +
                          " > '" + out.string() + "' 2> '" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    const auto r = run(dir_, "synth --prefix blobs --classes 3 --dim 32 --train 60 --val 20 --test 30 --layers 4,5 --seed 3");
    ASSERT_EQ(r.status, 0) << r.err;
  }
  testing::TempDir dir_;
};

TEST_F(Cli, EndToEnd) {
  ASSERT_TRUE(std::filesystem::exists(dir_ / "blobs_train_L4.arom"));
  ASSERT_TRUE(std::filesystem::exists(dir_ / "blobs_test_L5.arom"));
  EXPECT_EQ(read_features(dir_ / "blobs_train_L5.arom").layer_index, 5);

  auto r = run(dir_, "fit-language --input blobs_train_L4.arom -A 8 -V 4 --out lang.arlg");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out).at("alphabet_size"), 8);

  r = run(dir_, "fit-dictionary --lang lang.arlg --input blobs_train_L4.arom --out dict.ardc");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out).at("rank"), 2);

  r = run(dir_, "classify --lang lang.arlg --dict dict.ardc --input blobs_test_L4.arom --k 15 --out preds.json");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto preds = nlohmann::json::parse(slurp(dir_ / "preds.json"));
  ASSERT_EQ(preds.at("predictions").size(), 90u);
  EXPECT_EQ(preds.at("predictions")[0].at("neighbors").size(), 15u);

  r = run(dir_, "metrics --predictions preds.json --input blobs_test_L4.arom");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto metrics = nlohmann::json::parse(r.out);
  EXPECT_GE(metrics.at("accuracy").get<double>(), 0.99);
  EXPECT_EQ(metrics.at("confusion").size(), 3u);

  r = run(dir_, "evidence --lang lang.arlg --dict dict.ardc --input blobs_test_L4.arom --row 7 --k 10");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto ev = nlohmann::json::parse(r.out);
  EXPECT_EQ(ev.at("neighbors").size(), 10u);
  EXPECT_EQ(ev.at("exemplar_cloud").size(), 180u);
  EXPECT_EQ(ev.at("query").at("coords2d").size(), 2u);
}

TEST_F(Cli, SweepAndFewShot) {
  {
    std::ofstream cfg(dir_ / "sweep.toml");
    cfg << "layers = [4, 5]\nalphabet_sizes = [4, 8]\nvocab_sizes = [3]\nk = 5\n"
           "[data]\ntrain = \"blobs_train_L{layer}.arom\"\nval = \"blobs_val_L{layer}.arom\"\n";
  }
  auto r = run(dir_, "sweep --config sweep.toml --out-dir out");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto grid = slurp(dir_ / "out" / "sweep_grid.csv");
  EXPECT_EQ(std::count(grid.begin(), grid.end(), '\n'), 6);
  EXPECT_EQ(nlohmann::json::parse(r.out).size(), 2u);

  ASSERT_EQ(run(dir_, "fit-language --input blobs_train_L4.arom -A 8 -V 4 --out lang.arlg").status, 0);
  {
    std::ofstream cfg(dir_ / "fewshot.toml");
    cfg << "shots = [4, 16]\nrepeats = 2\nk = 3\n[data]\ntrain = \"blobs_train_L4.arom\"\ntest = \"blobs_test_L4.arom\"\n";
  }
  r = run(dir_, "fewshot --config fewshot.toml --lang lang.arlg --out-dir out");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto records = slurp(dir_ / "out" / "fewshot_records.csv");
  EXPECT_EQ(std::count(records.begin(), records.end(), '\n'), 6);
}

TEST_F(Cli, PresetSweepEchoesTableValues) {
  {
    std::ofstream cfg(dir_ / "path.toml");
    cfg << "preset = \"pathmnist\"\n[data]\ntrain = \"missing_L{layer}.arom\"\ntest = \"missing_L{layer}.arom\"\n";
  }
  // the feature files are absent: reports are still written, exit is nonzero
  const auto r = run(dir_, "sweep --config path.toml --out-dir out");
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(nlohmann::json::parse(r.err).at("error"), "degenerate");
  const auto report = nlohmann::json::parse(slurp(dir_ / "out" / "sweep.json"));
  const auto& cfg = report.at("config");
  EXPECT_EQ(cfg.at("layers"), nlohmann::json::array({13}));
  EXPECT_EQ(cfg.at("alphabet_sizes"), nlohmann::json::array({224}));
  EXPECT_EQ(cfg.at("vocab_sizes"), nlohmann::json::array({56}));
  EXPECT_EQ(cfg.at("k"), 15);
  EXPECT_TRUE(report.at("cells")[0].contains("error"));
}

TEST_F(Cli, ErrorsAreMachineReadable) {
  std::ofstream(dir_ / "junk.arom") << "XXXXnot a feature file";
  auto r = run(dir_, "fit-language --input junk.arom -A 2 -V 2 --out l.arlg");
  EXPECT_NE(r.status, 0);
  auto err = nlohmann::json::parse(r.err);
  EXPECT_EQ(err.at("error"), "bad_magic");
  EXPECT_TRUE(err.contains("message"));

  ASSERT_EQ(run(dir_, "fit-language --input blobs_train_L4.arom -A 8 -V 4 --out a.arlg").status, 0);
  ASSERT_EQ(run(dir_, "fit-language --input blobs_train_L4.arom -A 8 -V 5 --out b.arlg").status, 0);
  ASSERT_EQ(run(dir_, "fit-dictionary --lang a.arlg --input blobs_train_L4.arom --out a.ardc").status, 0);
  r = run(dir_, "classify --lang b.arlg --dict a.ardc --input blobs_test_L4.arom");
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(nlohmann::json::parse(r.err).at("error"), "fingerprint_mismatch");

  r = run(dir_, "classify --lang a.arlg");
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(nlohmann::json::parse(r.err).at("error"), "usage");
}

}  // namespace
}  // namespace arom
