#include "arom/fewshot.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "arom/concepts.hpp"
#include "arom/error.hpp"
#include "arom/parallel.hpp"
#include "arom/pipeline.hpp"

namespace arom {

namespace {

struct EncodedRows {
  Eigen::MatrixXd encodings;
  std::vector<Label> labels;
};

EncodedRows gather(const EncodedBatch& batch, const std::vector<std::size_t>& rows) {
  EncodedRows out;
  out.encodings.resize(static_cast<Eigen::Index>(rows.size()), batch.encodings.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.encodings.row(static_cast<Eigen::Index>(i)) = batch.encodings.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(batch.labels[rows[i]]);
  }
  return out;
}

EvalScores fit_and_score(const EncodedRows& train, const EncodedBatch& test, const EncodingLanguage& lang,
                         const config::FewShotConfig& cfg) {
  DictionaryOptions options;
  options.ridge = cfg.ridge;
  options.shrinkage = cfg.shrinkage;
  const auto dict = fit_dictionary(train.encodings, train.labels, options, lang.fingerprint());
  const auto preds = classify_encoded(dict, test.encodings, cfg.k, cfg.score_mode);
  return score_predictions(preds, test.labels, dict.num_classes());
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{:.6f}", *v) : std::string(); }

}  // namespace

std::string FewShotReport::records_csv() const {
  std::string out = "# config: " + config.to_json().dump() + "\n";
  out += "shot,repeat,seed,dictionary_size,accuracy,macro_auc\n";
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{:.6f},{}\n", r.shot, r.repeat, r.seed, r.dictionary_size, r.accuracy,
                       fmt_opt(r.macro_auc));
  }
  return out;
}

std::string FewShotReport::summary_csv() const {
  std::string out = "# config: " + config.to_json().dump() + "\n";
  out += fmt::format("# reference_accuracy: {:.6f}\n", reference_accuracy);
  out += "shot,mean_accuracy,min_accuracy,max_accuracy,retention\n";
  for (const auto& s : summary) {
    out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f}\n", s.shot, s.mean, s.min, s.max, s.retention);
  }
  return out;
}

nlohmann::json FewShotReport::to_json() const {
  nlohmann::json j;
  j["config"] = config.to_json();
  j["reference_accuracy"] = reference_accuracy;
  j["retention"] = retention;
  j["records"] = nlohmann::json::array();
  for (const auto& r : records) {
    j["records"].push_back({{"shot", r.shot},
                            {"repeat", r.repeat},
                            {"seed", r.seed},
                            {"dictionary_size", r.dictionary_size},
                            {"accuracy", r.accuracy},
                            {"macro_auc", r.macro_auc ? nlohmann::json(*r.macro_auc) : nlohmann::json(nullptr)}});
  }
  j["summary"] = nlohmann::json::array();
  for (const auto& s : summary) {
    j["summary"].push_back(
        {{"shot", s.shot}, {"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"retention", s.retention}});
  }
  return j;
}

FewShotReport run_fewshot(const DatasetSplit& data, const EncodingLanguage& lang,
                          const config::FewShotConfig& cfg) {
  cfg.validate();
  data.validate();
  if (!data.train.has_labels() || !data.test.has_labels()) {
    throw Error(ErrorCode::invalid_argument, "few-shot evaluation needs labeled train and test splits");
  }
  const auto seeds = cfg.resolved_seeds();
  const auto train = encode_batch(lang, data.train);
  const auto test = encode_batch(lang, data.test);

  FewShotReport report;
  report.config = cfg;
  if (cfg.reference_accuracy) {
    report.reference_accuracy = *cfg.reference_accuracy;
  } else {
    const auto rows = subsample_indices(train.labels, cfg.reference_cap_per_class, seeds.front());
    report.reference_accuracy = fit_and_score(gather(train, rows), test, lang, cfg).accuracy;
  }

  for (auto shot : cfg.shots) {
    for (std::size_t r = 0; r < cfg.repeats; ++r) report.records.push_back({shot, r, seeds[r], 0, 0.0, {}});
  }
  parallel_for(report.records.size(), cfg.threads, [&](std::size_t i) {
    auto& rec = report.records[i];
    const auto rows = subsample_indices(train.labels, rec.shot, rec.seed);
    const auto scores = fit_and_score(gather(train, rows), test, lang, cfg);
    rec.dictionary_size = rows.size();
    rec.accuracy = scores.accuracy;
    rec.macro_auc = scores.macro_auc;
  });

  for (std::size_t s = 0; s < cfg.shots.size(); ++s) {
    FewShotSummary sum;
    sum.shot = cfg.shots[s];
    sum.min = 1.0;
    double total = 0.0;
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
      const double acc = report.records[s * cfg.repeats + r].accuracy;
      total += acc;
      sum.min = std::min(sum.min, acc);
      sum.max = std::max(sum.max, acc);
    }
    sum.mean = total / static_cast<double>(cfg.repeats);
    sum.retention = report.reference_accuracy > 0 ? sum.mean / report.reference_accuracy : 0.0;
    report.summary.push_back(sum);
  }
  report.retention = report.summary.back().retention;
  return report;
}

}  // namespace arom
