#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arom/config.hpp"
#include "arom/encoder.hpp"
#include "arom/feature_store.hpp"

namespace arom {

struct FewShotRecord {
  std::size_t shot = 0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  std::size_t dictionary_size = 0;
  double accuracy = 0.0;
  std::optional<double> macro_auc;
};

struct FewShotSummary {
  std::size_t shot = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double retention = 0.0;  // mean / reference accuracy
};

struct FewShotReport {
  config::FewShotConfig config;
  double reference_accuracy = 0.0;
  std::vector<FewShotRecord> records;  // shot-major, then repeat
  std::vector<FewShotSummary> summary;
  /// Mean accuracy at the largest shot over the reference accuracy.
  double retention = 0.0;

  // records: shot,repeat,seed,dictionary_size,accuracy,macro_auc
  // summary: shot,mean_accuracy,min_accuracy,max_accuracy,retention
  // Both start with a "# config: {...}" echo line.
  std::string records_csv() const;
  std::string summary_csv() const;
  nlohmann::json to_json() const;
};

/// Few-shot protocol against a fixed language: for every (shot, seed) the
/// dictionary is rebuilt from `shot` rows per class of data.train and scored on
/// the whole data.test. The reference accuracy comes from a dictionary built
/// on up to reference_cap_per_class rows per class (first seed) unless the
/// config supplies one.
FewShotReport run_fewshot(const DatasetSplit& data, const EncodingLanguage& lang,
                          const config::FewShotConfig& cfg);

}  // namespace arom
