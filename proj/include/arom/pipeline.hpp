#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "arom/concepts.hpp"
#include "arom/encoder.hpp"
#include "arom/feature_store.hpp"
#include "arom/inference.hpp"

namespace arom {

/// Classifies pre-encoded rows (n x (A+V)) against a dictionary.
std::vector<Prediction> classify_encoded(const ConceptDictionary& dict, const Eigen::MatrixXd& encodings,
                                         std::size_t k, ScoreMode mode = ScoreMode::inverse_distance,
                                         unsigned threads = 1);

struct EvalScores {
  double accuracy = 0.0;
  std::optional<double> macro_auc;
};

EvalScores score_predictions(const std::vector<Prediction>& predictions, const std::vector<Label>& truth,
                             std::size_t num_classes);

struct PipelineParams {
  Eigen::Index alphabet_size = 16;
  Eigen::Index vocab_size = 8;
  std::uint64_t seed = 0;
  LanguageOptions language;
  DictionaryOptions dictionary;
  std::size_t k = 15;
  ScoreMode score_mode = ScoreMode::inverse_distance;
  unsigned threads = 1;
};

struct PipelineRun {
  EncodingLanguage language;
  ConceptDictionary dictionary;
  std::vector<Prediction> predictions;
  EvalScores scores;
};

/// Stage 1 on `language_rows` (labels ignored), Stage 2 on `dictionary_rows`,
/// Stage 3 on `eval_rows`.
PipelineRun run_pipeline(const FeatureSet& language_rows, const FeatureSet& dictionary_rows,
                         const FeatureSet& eval_rows, const PipelineParams& params);

}  // namespace arom
