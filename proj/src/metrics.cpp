#include "arom/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "arom/error.hpp"

namespace arom::metrics {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::dimension_mismatch, "prediction count " + std::to_string(a) +
                                                   " does not match truth count " + std::to_string(b));
  }
  if (a == 0) throw Error(ErrorCode::degenerate, "no samples to score");
}

}  // namespace

double accuracy(const std::vector<Label>& predicted, const std::vector<Label>& truth) {
  check_lengths(predicted.size(), truth.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<std::vector<std::size_t>> confusion(const std::vector<Label>& predicted,
                                                const std::vector<Label>& truth,
                                                std::size_t num_classes) {
  check_lengths(predicted.size(), truth.size());
  std::vector<std::vector<std::size_t>> m(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= num_classes || predicted[i] >= num_classes) {
      throw Error(ErrorCode::invalid_argument, "label outside [0, " + std::to_string(num_classes) + ")");
    }
    ++m[truth[i]][predicted[i]];
  }
  return m;
}

std::optional<double> binary_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) {
    throw Error(ErrorCode::dimension_mismatch, "score and label vectors differ in length");
  }
  const std::size_t n = scores.size();
  const auto n_pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) {
      if (positive[order[t]]) pos_rank_sum += midrank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

AucResult macro_auc(const Eigen::MatrixXd& class_scores, const std::vector<Label>& truth) {
  if (static_cast<std::size_t>(class_scores.rows()) != truth.size()) {
    throw Error(ErrorCode::dimension_mismatch, "score rows do not match truth length");
  }
  if (truth.size() < 2) throw Error(ErrorCode::degenerate, "AUC needs at least 2 samples");
  AucResult out;
  double total = 0.0;
  std::size_t evaluated = 0;
  for (Eigen::Index c = 0; c < class_scores.cols(); ++c) {
    std::vector<double> scores(truth.size());
    std::vector<bool> positive(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
      scores[i] = class_scores(static_cast<Eigen::Index>(i), c);
      positive[i] = truth[i] == c;
    }
    auto auc = binary_auc(scores, positive);
    out.per_class.push_back(auc);
    if (auc) {
      total += *auc;
      ++evaluated;
    } else {
      out.skipped.push_back(static_cast<std::size_t>(c));
    }
  }
  if (evaluated == 0) throw Error(ErrorCode::degenerate, "no class has both positive and negative samples");
  out.macro = total / static_cast<double>(evaluated);
  return out;
}

MetricsReport evaluate(const std::vector<Prediction>& predictions, const std::vector<Label>& truth,
                       std::size_t num_classes, nlohmann::json config) {
  check_lengths(predictions.size(), truth.size());
  std::vector<Label> predicted;
  predicted.reserve(predictions.size());
  Eigen::MatrixXd scores(static_cast<Eigen::Index>(predictions.size()), static_cast<Eigen::Index>(num_classes));
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    predicted.push_back(predictions[i].label);
    if (predictions[i].class_scores.size() != static_cast<Eigen::Index>(num_classes)) {
      throw Error(ErrorCode::dimension_mismatch, "class score vector has the wrong length");
    }
    scores.row(static_cast<Eigen::Index>(i)) = predictions[i].class_scores.transpose();
  }

  MetricsReport report;
  report.config = std::move(config);
  report.accuracy = accuracy(predicted, truth);
  report.confusion = confusion(predicted, truth, num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    const auto& row = report.confusion[c];
    const auto count = std::accumulate(row.begin(), row.end(), std::size_t{0});
    report.per_class_accuracy.push_back(
        count > 0 ? std::optional<double>(static_cast<double>(row[c]) / static_cast<double>(count))
                  : std::nullopt);
  }
  if (truth.size() >= 2) {
    try {
      auto auc = macro_auc(scores, truth);
      report.macro_auc = auc.macro;
      report.auc_skipped_classes = auc.skipped;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::degenerate) throw;
    }
  }
  return report;
}

nlohmann::json to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["accuracy"] = report.accuracy;
  j["macro_auc"] = report.macro_auc ? nlohmann::json(*report.macro_auc) : nlohmann::json(nullptr);
  j["per_class_accuracy"] = nlohmann::json::array();
  for (const auto& a : report.per_class_accuracy) {
    j["per_class_accuracy"].push_back(a ? nlohmann::json(*a) : nlohmann::json(nullptr));
  }
  j["confusion"] = report.confusion;
  j["auc_skipped_classes"] = report.auc_skipped_classes;
  j["config"] = report.config;
  return j;
}

}  // namespace arom::metrics
