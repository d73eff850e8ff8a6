// arom: command-line front end for the three-stage classifier and its
// evaluation harness.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "arom/concepts.hpp"
#include "arom/config.hpp"
#include "arom/encoder.hpp"
#include "arom/error.hpp"
#include "arom/feature_store.hpp"
#include "arom/fewshot.hpp"
#include "arom/inference.hpp"
#include "arom/metrics.hpp"
#include "arom/pipeline.hpp"
#include "arom/sweep.hpp"
#include "arom/synthetic.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw arom::Error(arom::ErrorCode::io, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw arom::Error(arom::ErrorCode::io, "failed writing " + path.string());
}

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    write_text(out, j.dump(2) + "\n");
  }
}

std::string expand_layer(std::string pattern, int layer) {
  const std::string token = "{layer}";
  for (auto pos = pattern.find(token); pos != std::string::npos; pos = pattern.find(token)) {
    pattern.replace(pos, token.size(), std::to_string(layer));
  }
  return pattern;
}

// Relative data paths in a config file resolve against the file's directory.
std::string resolve(const fs::path& config_path, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? p : (config_path.parent_path() / path).string();
}

std::string require_key(const arom::config::Document& doc, const std::string& key) {
  auto v = doc.get_string(key);
  if (!v) throw arom::Error(arom::ErrorCode::config, "missing key '" + key + "'");
  return *v;
}

arom::FeatureSet row_or_all(const arom::FeatureSet& set, std::optional<std::size_t> row) {
  if (!row) return set;
  if (*row >= set.num_samples()) {
    throw arom::Error(arom::ErrorCode::invalid_argument, "row " + std::to_string(*row) + " out of range");
  }
  return set.select_rows({*row});
}

struct Options {
  // shared
  std::string input, lang, dict, out = "-", config, out_dir = ".";
  std::size_t k = 15;
  std::string score_mode = "inverse_distance";
  unsigned threads = 1;
  std::uint64_t seed = 0;
  // fit-language
  long alphabet = 16, vocab = 8;
  std::size_t cap = 0;
  bool whiten = false;
  // fit-dictionary
  double ridge = arom::numlin::kDefaultRidge, shrinkage = 1e-4;
  long rank = 0;
  std::size_t cap_per_class = 0;
  std::string covariance = "reestimated";
  bool classical = false;
  // evidence
  std::optional<std::size_t> row;
  // metrics
  std::string predictions;
  // synth
  std::string prefix = "blobs";
  std::size_t classes = 3, dim = 64, train = 200, val = 50, test = 200;
  double separation = 10.0, sigma = 1.0;
  std::vector<int> layers{0};
};

void cmd_fit_language(const Options& o) {
  auto set = arom::read_features(o.input);
  if (o.cap > 0) set = set.select_rows(arom::sample_indices(set.num_samples(), o.cap, o.seed));
  arom::LanguageOptions opts;
  opts.whiten = o.whiten;
  const auto lang = arom::fit_language(set.without_labels(), o.alphabet, o.vocab, o.seed, opts);
  arom::save_language(lang, o.out);
  emit({{"language", o.out},
        {"alphabet_size", lang.alphabet_size()},
        {"vocab_size", lang.vocab_size()},
        {"feature_dim", lang.feature_dim},
        {"layer_index", lang.layer_index},
        {"rows", set.num_samples()},
        {"inertia", lang.vocabulary.inertia},
        {"fingerprint", lang.fingerprint()}},
       "-");
}

void cmd_fit_dictionary(const Options& o) {
  const auto lang = arom::load_language(o.lang);
  auto set = arom::read_features(o.input);
  if (!set.has_labels()) throw arom::Error(arom::ErrorCode::invalid_argument, o.input + " has no labels");
  if (o.cap_per_class > 0) set = arom::subsample_per_class(set, o.cap_per_class, o.seed);
  arom::DictionaryOptions opts;
  opts.ridge = o.ridge;
  opts.shrinkage = o.shrinkage;
  if (o.rank > 0) opts.rank = o.rank;
  opts.classical_scatter = o.classical;
  if (o.covariance == "projected") {
    opts.covariance_source = arom::ClassCovarianceSource::projected;
  } else if (o.covariance != "reestimated") {
    throw arom::Error(arom::ErrorCode::invalid_argument, "--covariance must be reestimated or projected");
  }
  const auto enc = arom::encode_batch(lang, set);
  const auto dict = arom::fit_dictionary(enc.encodings, enc.labels, opts, lang.fingerprint());
  arom::save_dictionary(dict, o.out);
  emit({{"dictionary", o.out},
        {"rank", dict.rank()},
        {"classes", dict.num_classes()},
        {"exemplars", dict.num_exemplars()},
        {"class_counts", dict.class_counts}},
       "-");
}

void cmd_classify(const Options& o) {
  const auto lang = arom::load_language(o.lang);
  const auto dict = arom::load_dictionary(o.dict);
  const auto set = arom::read_features(o.input);
  arom::BatchOptions opts;
  opts.score_mode = arom::config::parse_score_mode(o.score_mode);
  opts.threads = o.threads;
  const auto preds = arom::classify_batch(lang, dict, set, o.k, opts);
  json j;
  j["k"] = o.k;
  j["score_mode"] = arom::config::to_string(opts.score_mode);
  j["predictions"] = json::array();
  for (const auto& p : preds) j["predictions"].push_back(arom::to_json(p));
  emit(j, o.out);
}

void cmd_evidence(const Options& o) {
  const auto lang = arom::load_language(o.lang);
  const auto dict = arom::load_dictionary(o.dict);
  if (dict.language_fingerprint != lang.fingerprint()) {
    throw arom::Error(arom::ErrorCode::fingerprint_mismatch, "dictionary was built from a different encoding language");
  }
  const auto set = row_or_all(arom::read_features(o.input), o.row);
  const auto mode = arom::config::parse_score_mode(o.score_mode);
  const auto batch = arom::encode_batch(lang, set);
  json records = json::array();
  for (Eigen::Index i = 0; i < batch.encodings.rows(); ++i) {
    const Eigen::VectorXd s_proj = arom::project(dict, batch.encodings.row(i).transpose());
    const auto pred = arom::classify_projected(dict, s_proj, o.k, mode);
    auto rec = arom::to_json(arom::export_evidence(pred, dict, s_proj));
    rec["row"] = o.row ? *o.row : static_cast<std::size_t>(i);
    if (set.has_labels()) rec["true_label"] = set.labels[static_cast<std::size_t>(i)];
    records.push_back(std::move(rec));
  }
  emit(o.row ? records.at(0) : records, o.out);
}

void cmd_metrics(const Options& o) {
  std::ifstream in(o.predictions);
  if (!in) throw arom::Error(arom::ErrorCode::io, "cannot open " + o.predictions);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw arom::Error(arom::ErrorCode::invalid_argument, o.predictions + ": " + e.what());
  }
  const auto truth_set = arom::read_features(o.input);
  if (!truth_set.has_labels()) throw arom::Error(arom::ErrorCode::invalid_argument, o.input + " has no labels");
  const auto& items = doc.at("predictions");
  std::vector<arom::Prediction> preds;
  for (const auto& item : items) {
    arom::Prediction p;
    p.label = item.at("label").get<arom::Label>();
    const auto scores = item.at("class_scores").get<std::vector<double>>();
    p.class_scores = Eigen::Map<const Eigen::VectorXd>(scores.data(), static_cast<Eigen::Index>(scores.size()));
    preds.push_back(std::move(p));
  }
  const std::size_t classes =
      preds.empty() ? truth_set.num_classes() : static_cast<std::size_t>(preds.front().class_scores.size());
  json cfg{{"predictions", o.predictions}, {"truth", o.input}};
  if (doc.contains("k")) cfg["k"] = doc["k"];
  emit(arom::metrics::to_json(arom::metrics::evaluate(preds, truth_set.labels, classes, cfg)), o.out);
}

void cmd_sweep(const Options& o) {
  const auto doc = arom::config::Document::load(o.config);
  auto cfg = arom::config::sweep_config_from(doc);
  if (o.threads > 1) cfg.threads = o.threads;
  const std::string train = resolve(o.config, require_key(doc, "data.train"));
  const std::string eval_path = resolve(o.config, require_key(doc, "data." + cfg.eval_split));
  const auto source = [&](int layer) {
    arom::DatasetSplit split;
    split.train = arom::read_features(expand_layer(train, layer));
    auto& eval = cfg.eval_split == "test" ? split.test : split.val;
    auto& unused = cfg.eval_split == "test" ? split.val : split.test;
    eval = arom::read_features(expand_layer(eval_path, layer));
    unused = split.train.select_rows({});
    return split;
  };
  const auto report = arom::run_sweep(source, cfg);
  const fs::path dir(o.out_dir);
  write_text(dir / "sweep_grid.csv", report.grid_csv());
  write_text(dir / "sweep_best.csv", report.best_csv());
  write_text(dir / "sweep.json", report.to_json().dump(2) + "\n");
  const auto best = report.best_per_layer();
  if (best.empty()) {
    throw arom::Error(arom::ErrorCode::degenerate, "no sweep cell succeeded; first error: " + report.cells.front().error);
  }
  emit(report.to_json()["best_per_layer"], "-");
}

void cmd_fewshot(const Options& o) {
  const auto doc = arom::config::Document::load(o.config);
  auto cfg = arom::config::fewshot_config_from(doc);
  if (o.threads > 1) cfg.threads = o.threads;
  const auto lang = arom::load_language(o.lang);
  arom::DatasetSplit split;
  split.train = arom::read_features(resolve(o.config, require_key(doc, "data.train")));
  split.test = arom::read_features(resolve(o.config, require_key(doc, "data.test")));
  split.val = split.train.select_rows({});
  const auto report = arom::run_fewshot(split, lang, cfg);
  const fs::path dir(o.out_dir);
  write_text(dir / "fewshot_records.csv", report.records_csv());
  write_text(dir / "fewshot_summary.csv", report.summary_csv());
  write_text(dir / "fewshot.json", report.to_json().dump(2) + "\n");
  emit({{"reference_accuracy", report.reference_accuracy}, {"retention", report.retention}}, "-");
}

void cmd_synth(const Options& o) {
  json written = json::array();
  for (int layer : o.layers) {
    arom::synthetic::BlobSpec spec;
    spec.num_classes = o.classes;
    spec.dim = o.dim;
    spec.separation = o.separation;
    spec.sigma = o.sigma;
    spec.layer_index = static_cast<std::uint16_t>(layer);
    const auto split = arom::synthetic::make_blob_split(spec, o.train, o.val, o.test, o.seed);
    for (const auto& [name, set] : {std::pair<const char*, const arom::FeatureSet*>{"train", &split.train},
                                    {"val", &split.val},
                                    {"test", &split.test}}) {
      const std::string path = o.prefix + "_" + name + "_L" + std::to_string(layer) + ".arom";
      if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
      arom::write_features(*set, path);
      written.push_back(path);
    }
  }
  emit({{"written", written}}, "-");
}

int fail(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"A-ROM feature classifier"};
  app.require_subcommand(1);
  Options o;

  auto* fl = app.add_subcommand("fit-language", "Fit the PCA alphabet and k-means vocabulary");
  fl->add_option("--input", o.input, "Feature file (labels ignored)")->required();
  fl->add_option("--alphabet,-A", o.alphabet, "PCA components")->capture_default_str();
  fl->add_option("--vocab,-V", o.vocab, "k-means centroids")->capture_default_str();
  fl->add_option("--cap", o.cap, "Use at most this many random rows (0 = all)");
  fl->add_option("--seed", o.seed)->capture_default_str();
  fl->add_flag("--whiten", o.whiten, "Scale alphabet coordinates to unit variance");
  fl->add_option("--out", o.out, "Output language file")->required();

  auto* fd = app.add_subcommand("fit-dictionary", "Build the concept dictionary from labeled features");
  fd->add_option("--lang", o.lang)->required();
  fd->add_option("--input", o.input, "Labeled feature file")->required();
  fd->add_option("--ridge", o.ridge)->capture_default_str();
  fd->add_option("--shrinkage", o.shrinkage)->capture_default_str();
  fd->add_option("--rank", o.rank, "Discriminant rank (0 = automatic)");
  fd->add_option("--cap-per-class", o.cap_per_class, "Rows per class (0 = all)");
  fd->add_option("--covariance", o.covariance, "reestimated or projected")->capture_default_str();
  fd->add_flag("--classical-scatter", o.classical);
  fd->add_option("--seed", o.seed)->capture_default_str();
  fd->add_option("--out", o.out, "Output dictionary file")->required();

  auto* cl = app.add_subcommand("classify", "Classify every row of a feature file");
  cl->add_option("--lang", o.lang)->required();
  cl->add_option("--dict", o.dict)->required();
  cl->add_option("--input", o.input)->required();
  cl->add_option("--k", o.k)->capture_default_str();
  cl->add_option("--score-mode", o.score_mode)->capture_default_str();
  cl->add_option("--threads", o.threads)->capture_default_str();
  cl->add_option("--out", o.out, "Predictions JSON (- for stdout)")->capture_default_str();

  auto* ev = app.add_subcommand("evidence", "Export neighbor evidence for one row or all rows");
  ev->add_option("--lang", o.lang)->required();
  ev->add_option("--dict", o.dict)->required();
  ev->add_option("--input", o.input)->required();
  ev->add_option("--row", o.row, "Row index (default: every row)");
  ev->add_option("--k", o.k)->default_val(10);
  ev->add_option("--score-mode", o.score_mode)->capture_default_str();
  ev->add_option("--out", o.out)->capture_default_str();

  auto* me = app.add_subcommand("metrics", "Score a predictions file against labeled features");
  me->add_option("--predictions", o.predictions)->required();
  me->add_option("--input", o.input, "Feature file holding the true labels")->required();
  me->add_option("--out", o.out)->capture_default_str();

  auto* sw = app.add_subcommand("sweep", "Layer / alphabet / vocabulary grid search");
  sw->add_option("--config", o.config)->required();
  sw->add_option("--out-dir", o.out_dir)->capture_default_str();
  sw->add_option("--threads", o.threads, "Override the configured worker count");

  auto* fs_cmd = app.add_subcommand("fewshot", "Dictionary size study against a fixed language");
  fs_cmd->add_option("--config", o.config)->required();
  fs_cmd->add_option("--lang", o.lang)->required();
  fs_cmd->add_option("--out-dir", o.out_dir)->capture_default_str();
  fs_cmd->add_option("--threads", o.threads, "Override the configured worker count");

  auto* sy = app.add_subcommand("synth", "Write Gaussian blob feature files");
  sy->add_option("--prefix", o.prefix, "Writes <prefix>_<split>_L<layer>.arom")->capture_default_str();
  sy->add_option("--classes", o.classes)->capture_default_str();
  sy->add_option("--dim", o.dim)->capture_default_str();
  sy->add_option("--train", o.train, "Rows per class")->capture_default_str();
  sy->add_option("--val", o.val, "Rows per class")->capture_default_str();
  sy->add_option("--test", o.test, "Rows per class")->capture_default_str();
  sy->add_option("--separation", o.separation, "Distance between class means in sigmas")->capture_default_str();
  sy->add_option("--sigma", o.sigma)->capture_default_str();
  sy->add_option("--layers", o.layers)->delimiter(',');
  sy->add_option("--seed", o.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (*fl) cmd_fit_language(o);
    if (*fd) cmd_fit_dictionary(o);
    if (*cl) cmd_classify(o);
    if (*ev) cmd_evidence(o);
    if (*me) cmd_metrics(o);
    if (*sw) cmd_sweep(o);
    if (*fs_cmd) cmd_fewshot(o);
    if (*sy) cmd_synth(o);
  } catch (const arom::Error& e) {
    return fail(std::string(arom::to_string(e.code())), e.what());
  } catch (const json::exception& e) {
    return fail("invalid_argument", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return EXIT_SUCCESS;
}
