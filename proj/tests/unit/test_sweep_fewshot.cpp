#include <algorithm>

#include <gtest/gtest.h>

#include "arom/error.hpp"
#include "arom/fewshot.hpp"
#include "arom/pipeline.hpp"
#include "arom/sweep.hpp"
#include "arom/synthetic.hpp"

namespace arom {
namespace {

DatasetSplit blobs(std::uint64_t seed, double separation = 10.0, std::size_t dim = 32) {
  synthetic::BlobSpec spec;
  spec.dim = dim;
  spec.separation = separation;
  return synthetic::make_blob_split(spec, 120, 40, 60, seed);
}

config::SweepConfig small_sweep() {
  config::SweepConfig cfg = config::SweepConfig::coarse_defaults();
  cfg.layer_indices = {3};
  cfg.alphabet_sizes = {8};
  cfg.vocab_sizes = {4};
  cfg.k = 5;
  cfg.language_sample_cap = 200;
  cfg.dict_cap_per_class = 30;
  cfg.eval_cap = 50;
  cfg.seed = 11;
  return cfg;
}

TEST(Sweep, SingleCellEqualsDirectPipeline) {
  const auto data = blobs(1, 3.0);
  const auto cfg = small_sweep();
  const auto report = run_sweep([&](int) { return data; }, cfg);
  ASSERT_EQ(report.cells.size(), 1u);
  ASSERT_TRUE(report.cells[0].ok()) << report.cells[0].error;

  const auto language = data.train.select_rows(sample_indices(data.train.num_samples(), 200, 11)).without_labels();
  const auto dictionary = subsample_per_class(data.train, 30, 12);
  const auto eval = data.val.select_rows(sample_indices(data.val.num_samples(), 50, 13));
  PipelineParams params;
  params.alphabet_size = 8;
  params.vocab_size = 4;
  params.seed = 11;
  params.k = 5;
  const auto direct = run_pipeline(language, dictionary, eval, params);
  EXPECT_EQ(*report.cells[0].accuracy, direct.scores.accuracy);
  EXPECT_EQ(report.cells[0].macro_auc, direct.scores.macro_auc);
}

TEST(Sweep, GridShapeAndOrder) {
  auto cfg = small_sweep();
  cfg.alphabet_sizes = {4, 8, 12};
  cfg.vocab_sizes = {2, 4, 6};
  cfg.layer_indices = {1, 2};
  const auto data = blobs(2);
  const auto report = run_sweep([&](int) { return data; }, cfg);
  ASSERT_EQ(report.cells.size(), 18u);
  EXPECT_EQ(report.cells[0].layer, 1);
  EXPECT_EQ(report.cells[1].vocab_size, 4);
  EXPECT_EQ(report.cells[3].alphabet_size, 8);
  EXPECT_EQ(report.cells[9].layer, 2);
  EXPECT_EQ(report.best_per_layer().size(), 2u);
}

TEST(Sweep, IdenticalLayersGiveMatchingBestCells) {
  auto cfg = small_sweep();
  cfg.layer_indices = {4, 9};
  cfg.alphabet_sizes = {4, 8};
  cfg.vocab_sizes = {2, 6};
  const auto data = blobs(3, 3.0);
  const auto best = run_sweep([&](int) { return data; }, cfg).best_per_layer();
  ASSERT_EQ(best.size(), 2u);
  EXPECT_NEAR(*best[0].accuracy, *best[1].accuracy, 0.02);
}

TEST(Sweep, MissingLayerIsRecordedAndSweepContinues) {
  auto cfg = small_sweep();
  cfg.layer_indices = {1, 2};
  const auto data = blobs(4);
  const auto report = run_sweep(
      [&](int layer) {
        if (layer == 1) throw Error(ErrorCode::io, "no features for layer 1");
        return data;
      },
      cfg);
  ASSERT_EQ(report.cells.size(), 2u);
  EXPECT_FALSE(report.cells[0].ok());
  EXPECT_NE(report.cells[0].error.find("layer 1"), std::string::npos);
  EXPECT_TRUE(report.cells[1].ok());
  EXPECT_NE(report.grid_csv().find(",error,"), std::string::npos);
}

TEST(Sweep, FailingCellDoesNotStopOthers) {
  auto cfg = small_sweep();
  cfg.alphabet_sizes = {8, 100000};
  const auto data = blobs(5);
  const auto report = run_sweep([&](int) { return data; }, cfg);
  EXPECT_TRUE(report.cells[0].ok());
  EXPECT_FALSE(report.cells[1].ok());
}

TEST(Sweep, CsvIsDeterministicAcrossThreadCounts) {
  auto cfg = small_sweep();
  cfg.alphabet_sizes = {4, 8};
  cfg.vocab_sizes = {2, 4, 6};
  const auto data = blobs(6, 2.0);
  const auto serial = run_sweep([&](int) { return data; }, cfg);
  cfg.threads = 4;
  const auto parallel = run_sweep([&](int) { return data; }, cfg);
  cfg.threads = 1;
  EXPECT_EQ(serial.grid_csv(), run_sweep([&](int) { return data; }, cfg).grid_csv());
  // only the echoed thread count differs
  auto strip = [](std::string csv) { return csv.substr(csv.find('\n') + 1); };
  EXPECT_EQ(strip(serial.grid_csv()), strip(parallel.grid_csv()));
  EXPECT_EQ(serial.grid_csv().rfind("# config: {", 0), 0u);
  EXPECT_NE(serial.best_csv().find("layer,alphabet_size,vocab_size,k,accuracy,macro_auc\n"), std::string::npos);
}

EncodingLanguage fixed_language(const DatasetSplit& data) {
  return fit_language(data.train.without_labels(), 8, 4, 0);
}

TEST(FewShot, RecordCountsAndMonotoneMeans) {
  synthetic::BlobSpec spec;
  spec.dim = 32;
  spec.separation = 2.0;
  const auto data = synthetic::make_blob_split(spec, 300, 10, 100, 7);
  config::FewShotConfig cfg;
  cfg.shots = {8, 32, 128, 256};
  cfg.repeats = 5;
  cfg.k = 15;
  const auto report = run_fewshot(data, fixed_language(data), cfg);
  ASSERT_EQ(report.records.size(), 20u);
  ASSERT_EQ(report.summary.size(), 4u);
  EXPECT_EQ(report.records[0].dictionary_size, 24u);
  EXPECT_EQ(report.records[19].shot, 256u);
  EXPECT_GE(report.summary[3].mean, report.summary[0].mean);
  EXPECT_GT(report.reference_accuracy, 0.0);
  EXPECT_DOUBLE_EQ(report.retention, report.summary[3].mean / report.reference_accuracy);
  for (const auto& s : report.summary) {
    EXPECT_LE(s.min, s.mean);
    EXPECT_LE(s.mean, s.max);
  }
  const auto csv = report.records_csv();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 22);
}

TEST(FewShot, FullClassShotEqualsFullDataRun) {
  const auto data = blobs(8, 2.0);
  const auto lang = fixed_language(data);
  config::FewShotConfig cfg;
  cfg.shots = {120};
  cfg.repeats = 1;
  cfg.k = 7;
  const auto report = run_fewshot(data, lang, cfg);
  const auto train = encode_batch(lang, data.train);
  const auto test = encode_batch(lang, data.test);
  const auto dict = fit_dictionary(train.encodings, train.labels, {}, lang.fingerprint());
  const auto preds = classify_encoded(dict, test.encodings, 7);
  EXPECT_EQ(report.records[0].accuracy, score_predictions(preds, test.labels, 3).accuracy);
  EXPECT_EQ(report.records[0].accuracy, report.reference_accuracy);
}

TEST(FewShot, RejectsShotBelowTwo) {
  const auto data = blobs(9);
  config::FewShotConfig cfg;
  cfg.shots = {1, 8};
  EXPECT_THROW(run_fewshot(data, fixed_language(data), cfg), Error);
}

TEST(FewShot, SuppliedReferenceAccuracy) {
  const auto data = blobs(10);
  config::FewShotConfig cfg;
  cfg.shots = {8};
  cfg.repeats = 2;
  cfg.reference_accuracy = 0.5;
  const auto report = run_fewshot(data, fixed_language(data), cfg);
  EXPECT_EQ(report.reference_accuracy, 0.5);
  EXPECT_DOUBLE_EQ(report.retention, report.summary[0].mean / 0.5);
  EXPECT_EQ(report.to_json().at("records").size(), 2u);
}

}  // namespace
}  // namespace arom
