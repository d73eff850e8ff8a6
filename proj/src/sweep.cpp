#include "arom/sweep.hpp"

#include <fmt/format.h>

#include "arom/error.hpp"
#include "arom/parallel.hpp"
#include "arom/pipeline.hpp"

namespace arom {

namespace {

struct LayerRows {
  FeatureSet language;
  FeatureSet dictionary;
  FeatureSet eval;
};

LayerRows draw_rows(const DatasetSplit& split, const config::SweepConfig& cfg) {
  split.validate();
  if (!split.train.has_labels()) throw Error(ErrorCode::invalid_argument, "training split is unlabeled");
  LayerRows rows;
  FeatureSet pool = cfg.language_cap_per_class
                        ? subsample_per_class(split.train, *cfg.language_cap_per_class, cfg.seed)
                        : split.train;
  rows.language = pool.select_rows(sample_indices(pool.num_samples(), cfg.language_sample_cap, cfg.seed))
                      .without_labels();
  rows.dictionary = subsample_per_class(split.train, cfg.dict_cap_per_class, cfg.seed + 1);
  const FeatureSet& eval = cfg.eval_split == "test" ? split.test : split.val;
  rows.eval = eval.select_rows(sample_indices(eval.num_samples(), cfg.eval_cap, cfg.seed + 2));
  return rows;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{:.6f}", *v) : std::string(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

nlohmann::json cell_json(const SweepCell& c) {
  nlohmann::json j;
  j["layer"] = c.layer;
  j["alphabet_size"] = c.alphabet_size;
  j["vocab_size"] = c.vocab_size;
  j["k"] = c.k;
  j["accuracy"] = c.accuracy ? nlohmann::json(*c.accuracy) : nlohmann::json(nullptr);
  j["macro_auc"] = c.macro_auc ? nlohmann::json(*c.macro_auc) : nlohmann::json(nullptr);
  if (!c.ok()) j["error"] = c.error;
  return j;
}

}  // namespace

std::vector<SweepCell> SweepReport::best_per_layer() const {
  std::vector<SweepCell> best;
  for (auto layer : config.layer_indices) {
    const SweepCell* top = nullptr;
    for (const auto& c : cells) {
      if (c.layer != layer || !c.ok() || !c.accuracy) continue;
      if (!top || *c.accuracy > *top->accuracy) top = &c;
    }
    if (top) best.push_back(*top);
  }
  return best;
}

std::string SweepReport::grid_csv() const {
  std::string out = "# config: " + config.to_json().dump() + "\n";
  out += "layer,alphabet_size,vocab_size,k,accuracy,macro_auc,status,message\n";
  for (const auto& c : cells) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", c.layer, c.alphabet_size, c.vocab_size, c.k,
                       fmt_opt(c.accuracy), fmt_opt(c.macro_auc), c.ok() ? "ok" : "error",
                       csv_field(c.error));
  }
  return out;
}

std::string SweepReport::best_csv() const {
  std::string out = "# config: " + config.to_json().dump() + "\n";
  out += "layer,alphabet_size,vocab_size,k,accuracy,macro_auc\n";
  for (const auto& c : best_per_layer()) {
    out += fmt::format("{},{},{},{},{},{}\n", c.layer, c.alphabet_size, c.vocab_size, c.k,
                       fmt_opt(c.accuracy), fmt_opt(c.macro_auc));
  }
  return out;
}

nlohmann::json SweepReport::to_json() const {
  nlohmann::json j;
  j["config"] = config.to_json();
  j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) j["cells"].push_back(cell_json(c));
  j["best_per_layer"] = nlohmann::json::array();
  for (const auto& c : best_per_layer()) j["best_per_layer"].push_back(cell_json(c));
  return j;
}

SweepReport run_sweep(const LayerSource& source, const config::SweepConfig& cfg) {
  cfg.validate();
  SweepReport report;
  report.config = cfg;

  for (auto layer : cfg.layer_indices) {
    const auto first = report.cells.size();
    for (auto a : cfg.alphabet_sizes) {
      for (auto v : cfg.vocab_sizes) report.cells.push_back({layer, a, v, cfg.k, {}, {}, {}});
    }
    const auto count = report.cells.size() - first;

    std::optional<LayerRows> rows;
    try {
      rows = draw_rows(source(layer), cfg);
    } catch (const std::exception& e) {
      for (std::size_t i = first; i < report.cells.size(); ++i) {
        report.cells[i].error = std::string("layer ") + std::to_string(layer) + ": " + e.what();
      }
      continue;
    }

    parallel_for(count, cfg.threads, [&](std::size_t i) {
      auto& cell = report.cells[first + i];
      PipelineParams params;
      params.alphabet_size = cell.alphabet_size;
      params.vocab_size = cell.vocab_size;
      params.seed = cfg.seed;
      params.dictionary.ridge = cfg.ridge;
      params.dictionary.shrinkage = cfg.shrinkage;
      params.k = cfg.k;
      params.score_mode = cfg.score_mode;
      try {
        const auto run = run_pipeline(rows->language, rows->dictionary, rows->eval, params);
        cell.accuracy = run.scores.accuracy;
        cell.macro_auc = run.scores.macro_auc;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    });
  }
  return report;
}

}  // namespace arom
