#include <cmath>

#include <gtest/gtest.h>

#include "arom/error.hpp"
#include "arom/metrics.hpp"
#include "test_support.hpp"

namespace arom::metrics {
namespace {

// Pair-counting AUC: fraction of (positive, negative) pairs ordered
// correctly, ties counting one half.
double pair_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  double good = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (!positive[i] || positive[j]) continue;
      pairs += 1;
      good += scores[i] > scores[j] ? 1.0 : (scores[i] == scores[j] ? 0.5 : 0.0);
    }
  }
  return good / pairs;
}

Eigen::MatrixXd binary_scores(const std::vector<double>& p) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(p.size()), 2);
  for (std::size_t i = 0; i < p.size(); ++i) m.row(static_cast<Eigen::Index>(i)) << 1 - p[i], p[i];
  return m;
}

TEST(Accuracy, Fixtures) {
  EXPECT_EQ(accuracy({0, 1, 2}, {0, 1, 2}), 1.0);
  EXPECT_EQ(accuracy({0, 1, 1, 0}, {0, 1, 0, 0}), 0.75);
  EXPECT_THROW(accuracy({}, {}), Error);
  EXPECT_THROW(accuracy({0, 1}, {0}), Error);
}

TEST(BinaryAuc, Fixtures) {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.1};
  EXPECT_EQ(*binary_auc(s, {true, true, false, false}), 1.0);
  EXPECT_EQ(*binary_auc(s, {true, false, true, false}), 0.75);
  EXPECT_EQ(*binary_auc({0.4, 0.4, 0.4, 0.4}, {true, false, true, false}), 0.5);
  EXPECT_FALSE(binary_auc(s, {true, true, true, true}).has_value());
}

TEST(MacroAuc, Fixtures) {
  const auto scores = binary_scores({0.9, 0.8, 0.3, 0.1});
  EXPECT_EQ(macro_auc(scores, {1, 1, 0, 0}).macro, 1.0);
  EXPECT_EQ(macro_auc(scores, {1, 0, 1, 0}).macro, 0.75);
  const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(6, 3, 1.0 / 3.0);
  const auto res = macro_auc(flat, {0, 1, 2, 0, 1, 2});
  EXPECT_EQ(res.macro, 0.5);
  for (const auto& v : res.per_class) EXPECT_EQ(*v, 0.5);
}

TEST(MacroAuc, SkipsClassesWithoutBothGroups) {
  Eigen::MatrixXd scores(4, 3);
  scores << 0.8, 0.2, 0, 0.3, 0.7, 0, 0.6, 0.4, 0, 0.1, 0.9, 0;
  const auto res = macro_auc(scores, {0, 1, 0, 1});
  EXPECT_EQ(res.skipped, std::vector<std::size_t>{2});
  EXPECT_FALSE(res.per_class[2].has_value());
  EXPECT_EQ(res.macro, 1.0);
  EXPECT_THROW(macro_auc(Eigen::MatrixXd::Ones(3, 1), {0, 0, 0}), Error);
}

TEST(BinaryAuc, MatchesPairCountingOracle) {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> coarse(0, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + gen() % 40;
    std::vector<double> s(n);
    std::vector<bool> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = coarse(gen) / 5.0;  // frequent ties
      pos[i] = gen() % 2 == 0;
    }
    pos[0] = true;
    pos[1] = false;
    EXPECT_NEAR(*binary_auc(s, pos), pair_auc(s, pos), 1e-12);
  }
}

TEST(MacroAuc, InvariantUnderMonotoneTransform) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 30;
    Eigen::MatrixXd s = testing::random_matrix(gen, n, 4);
    std::vector<Label> truth(n);
    for (Eigen::Index i = 0; i < n; ++i) truth[i] = static_cast<Label>(i % 4);
    const Eigen::MatrixXd t = s.unaryExpr([](double v) { return std::exp(3.0 * v) + 7.0; });
    EXPECT_NEAR(macro_auc(s, truth).macro, macro_auc(t, truth).macro, 1e-12);
  }
}

TEST(Evaluate, ConfusionMatchesAccuracy) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 5 + gen() % 50;
    std::vector<Prediction> preds(n);
    std::vector<Label> truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = static_cast<Label>(gen() % 3);
      preds[i].label = static_cast<Label>(gen() % 3);
      preds[i].class_scores = Eigen::Vector3d::Zero();
      preds[i].class_scores(preds[i].label) = 1.0;
    }
    const auto report = evaluate(preds, truth, 3);
    std::size_t trace = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      trace += report.confusion[c][c];
      std::size_t row = 0;
      for (auto v : report.confusion[c]) row += v;
      EXPECT_EQ(row, static_cast<std::size_t>(std::count(truth.begin(), truth.end(), c)));
    }
    EXPECT_DOUBLE_EQ(report.accuracy, static_cast<double>(trace) / static_cast<double>(n));
    const auto j = to_json(report);
    EXPECT_DOUBLE_EQ(j.at("accuracy").get<double>(), report.accuracy);
    EXPECT_EQ(j.at("confusion").size(), 3u);
  }
}

}  // namespace
}  // namespace arom::metrics
