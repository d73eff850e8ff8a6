#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arom/config.hpp"
#include "arom/feature_store.hpp"

namespace arom {

/// Supplies the train/val/test features extracted at one layer.
using LayerSource = std::function<DatasetSplit(int layer)>;

struct SweepCell {
  int layer = 0;
  std::int64_t alphabet_size = 0;
  std::int64_t vocab_size = 0;
  std::size_t k = 0;
  std::optional<double> accuracy;
  std::optional<double> macro_auc;
  std::string error;  // empty on success

  bool ok() const noexcept { return error.empty(); }
};

struct SweepReport {
  config::SweepConfig config;
  std::vector<SweepCell> cells;  // layer-major, then alphabet size, then vocabulary size

  /// Highest-accuracy successful cell per layer (first in grid order on ties).
  std::vector<SweepCell> best_per_layer() const;

  // Both CSVs start with a "# config: {...}" line echoing the configuration.
  // grid: layer,alphabet_size,vocab_size,k,accuracy,macro_auc,status,message
  // best: layer,alphabet_size,vocab_size,k,accuracy,macro_auc
  std::string grid_csv() const;
  std::string best_csv() const;
  nlohmann::json to_json() const;
};

/// Evaluates every (layer, A, V) cell. Per layer, the language rows, the
/// per-class dictionary rows and the evaluation rows are drawn once (seeds
/// cfg.seed, cfg.seed + 1 and cfg.seed + 2) and shared by all cells of that
/// layer. Cells run on cfg.threads workers; a failing cell records its error
/// and the sweep continues.
SweepReport run_sweep(const LayerSource& source, const config::SweepConfig& cfg);

}  // namespace arom
