#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "arom/feature_store.hpp"
#include "arom/inference.hpp"

namespace arom::metrics {

double accuracy(const std::vector<Label>& predicted, const std::vector<Label>& truth);

/// confusion[t][p] counts samples of true class t predicted as p.
std::vector<std::vector<std::size_t>> confusion(const std::vector<Label>& predicted,
                                                const std::vector<Label>& truth,
                                                std::size_t num_classes);

/// Mann-Whitney ROC AUC with midranks for tied scores. Returns nullopt when
/// either the positive or the negative group is empty.
std::optional<double> binary_auc(const std::vector<double>& scores, const std::vector<bool>& positive);

struct AucResult {
  double macro = 0.0;
  std::vector<std::optional<double>> per_class;  // nullopt for skipped classes
  std::vector<std::size_t> skipped;
};

/// One-vs-rest AUC per column of `class_scores` (n x C), averaged without
/// weighting over classes that have both positives and negatives.
AucResult macro_auc(const Eigen::MatrixXd& class_scores, const std::vector<Label>& truth);

struct MetricsReport {
  double accuracy = 0.0;
  std::optional<double> macro_auc;
  std::vector<std::optional<double>> per_class_accuracy;
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<std::size_t> auc_skipped_classes;
  nlohmann::json config;
};

MetricsReport evaluate(const std::vector<Prediction>& predictions, const std::vector<Label>& truth,
                       std::size_t num_classes, nlohmann::json config = {});

nlohmann::json to_json(const MetricsReport& report);

}  // namespace arom::metrics
