#include "arom/pipeline.hpp"

#include "arom/error.hpp"
#include "arom/metrics.hpp"
#include "arom/parallel.hpp"

namespace arom {

std::vector<Prediction> classify_encoded(const ConceptDictionary& dict, const Eigen::MatrixXd& encodings,
                                         std::size_t k, ScoreMode mode, unsigned threads) {
  std::vector<Prediction> out(static_cast<std::size_t>(encodings.rows()));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    out[i] = classify(dict, encodings.row(static_cast<Eigen::Index>(i)).transpose(), k, mode);
  });
  return out;
}

EvalScores score_predictions(const std::vector<Prediction>& predictions, const std::vector<Label>& truth,
                             std::size_t num_classes) {
  const auto report = metrics::evaluate(predictions, truth, num_classes);
  return {report.accuracy, report.macro_auc};
}

PipelineRun run_pipeline(const FeatureSet& language_rows, const FeatureSet& dictionary_rows,
                         const FeatureSet& eval_rows, const PipelineParams& params) {
  if (!dictionary_rows.has_labels() || !eval_rows.has_labels()) {
    throw Error(ErrorCode::invalid_argument, "dictionary and evaluation rows must be labeled");
  }
  PipelineRun run;
  run.language = fit_language(language_rows.without_labels(), params.alphabet_size, params.vocab_size,
                              params.seed, params.language);
  const auto train = encode_batch(run.language, dictionary_rows);
  run.dictionary = fit_dictionary(train.encodings, train.labels, params.dictionary, run.language.fingerprint());
  const auto eval = encode_batch(run.language, eval_rows);
  for (auto l : eval.labels) {
    if (l >= run.dictionary.num_classes()) {
      throw Error(ErrorCode::invalid_argument, "evaluation label " + std::to_string(l) +
                                                   " is not a dictionary class");
    }
  }
  run.predictions = classify_encoded(run.dictionary, eval.encodings, params.k, params.score_mode, params.threads);
  run.scores = score_predictions(run.predictions, eval.labels, run.dictionary.num_classes());
  return run;
}

}  // namespace arom
