#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "arom/inference.hpp"

namespace arom::config {

using Scalar = std::variant<std::int64_t, double, bool, std::string>;
using Value = std::variant<Scalar, std::vector<Scalar>>;

/// Flat key/value document in a TOML subset: `key = value` lines, `[section]`
/// headers (keys become "section.key"), `#` comments, integers, floats,
/// booleans, double-quoted strings and single-line `[a, b, c]` arrays.
class Document {
public:
  static Document parse(std::string_view text);
  static Document load(const std::string& path);

  bool contains(const std::string& key) const { return values_.contains(key); }
  const std::map<std::string, Value>& values() const noexcept { return values_; }

  std::optional<std::int64_t> get_int(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<std::vector<std::int64_t>> get_int_list(const std::string& key) const;

  /// Throws Error{config} naming the first top-level key not in `known`.
  /// Sectioned keys ("data.train") are left to the caller.
  void require_known(const std::vector<std::string>& known) const;

  nlohmann::json to_json() const;

private:
  std::map<std::string, Value> values_;
};

struct SweepConfig {
  std::vector<int> layer_indices;
  std::vector<std::int64_t> alphabet_sizes;
  std::vector<std::int64_t> vocab_sizes;
  std::size_t k = 3;
  std::size_t language_sample_cap = 1000;
  /// When set, language rows are drawn per class instead of in total.
  std::optional<std::size_t> language_cap_per_class;
  std::size_t dict_cap_per_class = 64;
  std::size_t eval_cap = 200;
  /// "val" for the layer/size sweep, "test" for benchmark runs.
  std::string eval_split = "val";
  std::uint64_t seed = 0;
  double ridge = 1e-6;
  double shrinkage = 1e-4;
  ScoreMode score_mode = ScoreMode::inverse_distance;
  unsigned threads = 1;
  std::string preset;  // dataset preset key, empty when not used

  /// 1,000 language rows, 64 per class for the dictionary, 200 evaluation
  /// rows, k = 3, A and V grids {64, 256, 512}.
  static SweepConfig coarse_defaults();
  /// 5,000-per-class caps for language and dictionary, full test split, k = 15.
  static SweepConfig benchmark_defaults();

  void validate() const;
  nlohmann::json to_json() const;
};

struct FewShotConfig {
  std::vector<std::size_t> shots{8, 16, 32, 64, 128, 256, 512};
  std::size_t repeats = 5;
  std::size_t k = 15;
  std::vector<std::uint64_t> seeds;  // one per repeat; defaults to 0..repeats-1
  std::size_t reference_cap_per_class = 5000;
  std::optional<double> reference_accuracy;
  double ridge = 1e-6;
  double shrinkage = 1e-4;
  ScoreMode score_mode = ScoreMode::inverse_distance;
  unsigned threads = 1;

  /// Seeds actually used, filling defaults.
  std::vector<std::uint64_t> resolved_seeds() const;
  void validate() const;
  nlohmann::json to_json() const;
};

/// Builds a sweep configuration: mode defaults ("coarse" or "benchmark"),
/// then a dataset preset, then explicit keys.
SweepConfig sweep_config_from(const Document& doc);
FewShotConfig fewshot_config_from(const Document& doc);

ScoreMode parse_score_mode(const std::string& text);
std::string to_string(ScoreMode mode);

}  // namespace arom::config
