#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "arom/error.hpp"
#include "arom/encoder.hpp"
#include "test_support.hpp"

namespace arom {
namespace {

EncodingLanguage identity_language() {
  EncodingLanguage lang;
  lang.pca.mean = Eigen::VectorXd::Zero(2);
  lang.pca.components = Eigen::MatrixXd::Identity(2, 2);
  lang.pca.explained_variance = Eigen::VectorXd::Ones(2);
  lang.vocabulary.centroids.resize(2, 2);
  lang.vocabulary.centroids << 1, 2, 4, 6;
  lang.feature_dim = 2;
  return lang;
}

FeatureSet random_set(std::uint64_t seed, Eigen::Index n, Eigen::Index d) {
  std::mt19937_64 gen(seed);
  return testing::make_set(testing::random_matrix(gen, n, d));
}

TEST(Encode, HandFixture) {
  const auto lang = identity_language();
  const auto enc = encode(lang, Eigen::Vector2d(1, 2));
  EXPECT_NEAR(enc.alphabet(0), 1.0, 1e-15);
  EXPECT_NEAR(enc.alphabet(1), 2.0, 1e-15);
  EXPECT_NEAR(enc.word(0), 0.0, 1e-15);
  EXPECT_NEAR(enc.word(1), 5.0, 1e-15);
  const Eigen::VectorXd s = enc.combined();
  ASSERT_EQ(s.size(), 4);
  EXPECT_LT((s - Eigen::Vector4d(1, 2, 0, 5)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Encode, MeanMapsToOrigin) {
  std::mt19937_64 gen(2);
  EncodingLanguage lang;
  lang.pca.mean = testing::random_matrix(gen, 5, 1).col(0);
  lang.pca.components = Eigen::HouseholderQR<Eigen::MatrixXd>(testing::random_matrix(gen, 5, 3))
                            .householderQ() *
                        Eigen::MatrixXd::Identity(5, 3);
  lang.pca.explained_variance = Eigen::VectorXd::Ones(3);
  lang.vocabulary.centroids = testing::random_matrix(gen, 4, 3);
  lang.feature_dim = 5;
  const auto enc = encode(lang, lang.pca.mean);
  EXPECT_LT(enc.alphabet.cwiseAbs().maxCoeff(), 1e-12);
  for (Eigen::Index j = 0; j < 4; ++j) EXPECT_NEAR(enc.word(j), lang.vocabulary.centroids.row(j).norm(), 1e-12);
}

TEST(Encode, RejectsBadInput) {
  const auto lang = identity_language();
  EXPECT_THROW(encode(lang, Eigen::Vector3d(1, 2, 3)), Error);
  EXPECT_THROW(encode(lang, Eigen::Vector2d(1, std::numeric_limits<double>::infinity())), Error);
}

TEST(FitLanguage, PathMnistShape) {
  auto set = random_set(1, 1000, 256);
  set.layer_index = 13;
  const auto lang = fit_language(set, 224, 56, 0);
  EXPECT_EQ(lang.alphabet_size(), 224);
  EXPECT_EQ(lang.vocab_size(), 56);
  EXPECT_EQ(lang.vocabulary.dim(), 224);
  EXPECT_EQ(lang.feature_dim, 256u);
  EXPECT_EQ(lang.layer_index, 13);
  EXPECT_EQ(encode(lang, set.to_double().row(0).transpose()).combined().size(), 280);
}

TEST(FitLanguage, FullRankAlphabetIsLossless) {
  const auto set = random_set(3, 50, 6);
  const auto lang = fit_language(set, 6, 3, 0);
  const Eigen::MatrixXd x = set.to_double();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Eigen::VectorXd z = x.row(i).transpose();
    const auto enc = encode(lang, z);
    EXPECT_LT((lang.pca.inverse_transform(enc.alphabet) - z).norm(), 1e-8);
  }
}

TEST(FitLanguage, SingleWord) {
  const auto set = random_set(4, 30, 4);
  const auto lang = fit_language(set, 2, 1, 0);
  EXPECT_EQ(encode(lang, set.to_double().row(3).transpose()).word.size(), 1);
}

TEST(FitLanguage, CentroidPlacedOnPointGivesZeroWord) {
  // v = n puts every centroid on a training point
  const auto set = random_set(5, 6, 4);
  const auto lang = fit_language(set, 3, 6, 1);
  const Eigen::MatrixXd x = set.to_double();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    EXPECT_LT(encode(lang, x.row(i).transpose()).word.minCoeff(), 1e-12);
  }
}

TEST(FitLanguage, RejectsInsufficientData) {
  const auto set = random_set(6, 10, 4);
  EXPECT_THROW(fit_language(set, 5, 2, 0), Error);    // a_size > feature_dim
  EXPECT_THROW(fit_language(set, 10, 2, 0), Error);   // n < a_size + 1
  EXPECT_THROW(fit_language(set, 2, 11, 0), Error);   // n < v_size
}

TEST(EncodeBatch, MatchesPerSampleLoopExactly) {
  const auto set = random_set(7, 120, 16);
  const auto lang = fit_language(set, 8, 5, 3);
  auto labeled = random_set(8, 40, 16);
  labeled.labels.assign(40, 0);
  for (std::size_t i = 0; i < 40; ++i) labeled.labels[i] = static_cast<Label>(i % 3);
  const auto batch = encode_batch(lang, labeled);
  EXPECT_EQ(batch.labels, labeled.labels);
  ASSERT_EQ(batch.encodings.rows(), 40);
  ASSERT_EQ(batch.encodings.cols(), 13);
  const Eigen::MatrixXd x = labeled.to_double();
  for (Eigen::Index i = 0; i < 40; ++i) {
    const Eigen::VectorXd single = encode(lang, x.row(i).transpose()).combined();
    EXPECT_TRUE(batch.encodings.row(i).transpose() == single) << "row " << i;
  }
  const auto one = encode_batch(lang, labeled.select_rows({5}));
  EXPECT_TRUE(one.encodings.row(0) == batch.encodings.row(5));
}

TEST(EncodeBatch, EmptySet) {
  const auto set = random_set(9, 20, 4);
  const auto lang = fit_language(set, 2, 2, 0);
  FeatureSet empty;
  empty.features.resize(0, 4);
  const auto batch = encode_batch(lang, empty);
  EXPECT_EQ(batch.encodings.rows(), 0);
  EXPECT_EQ(batch.encodings.cols(), 4);
}

TEST(EncodeBatch, RejectsDimensionMismatch) {
  const auto lang = fit_language(random_set(10, 20, 4), 2, 2, 0);
  EXPECT_THROW(encode_batch(lang, random_set(11, 3, 5)), Error);
}

TEST(EncodeProperties, AlphabetDifferenceIsLinear) {
  const auto set = random_set(12, 80, 10);
  const auto lang = fit_language(set, 4, 3, 0);
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd z1 = testing::random_matrix(gen, 10, 1).col(0);
    const Eigen::VectorXd z2 = testing::random_matrix(gen, 10, 1).col(0);
    const auto e1 = encode(lang, z1);
    EXPECT_TRUE(e1.combined() == encode(lang, z1).combined());
    const Eigen::VectorXd diff = e1.alphabet - encode(lang, z2).alphabet;
    EXPECT_LT((diff - lang.pca.components.transpose() * (z1 - z2)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(EncodeProperties, WordSatisfiesTriangleInequality) {
  const auto set = random_set(14, 150, 8);
  const auto lang = fit_language(set, 5, 7, 2);
  const auto batch = encode_batch(lang, random_set(15, 50, 8));
  const auto& c = lang.vocabulary.centroids;
  for (Eigen::Index n = 0; n < batch.encodings.rows(); ++n) {
    const Eigen::VectorXd d = batch.encodings.row(n).tail(7).transpose();
    EXPECT_GE(d.minCoeff(), 0.0);
    for (Eigen::Index i = 0; i < 7; ++i) {
      for (Eigen::Index j = 0; j < 7; ++j) {
        const double gap = (c.row(i) - c.row(j)).norm();
        EXPECT_LE(std::abs(d(i) - d(j)), gap + 1e-9);
        EXPECT_LE(gap, d(i) + d(j) + 1e-9);
      }
    }
  }
}

TEST(LanguageSerialization, RoundTripIsBitExact) {
  auto set = random_set(16, 90, 12);
  set.layer_index = 7;
  for (bool whiten : {false, true}) {
    LanguageOptions opts;
    opts.whiten = whiten;
    const auto lang = fit_language(set, 6, 4, 9, opts);
    const std::string bytes = serialize_language(lang);
    const auto back = deserialize_language(bytes);
    EXPECT_EQ(serialize_language(back), bytes);
    EXPECT_EQ(back.fingerprint(), lang.fingerprint());
    EXPECT_EQ(back.whiten, whiten);
    EXPECT_EQ(back.layer_index, 7);
    EXPECT_TRUE(back.pca.components == lang.pca.components);
    EXPECT_TRUE(back.vocabulary.centroids == lang.vocabulary.centroids);

    testing::TempDir dir;
    save_language(lang, dir / "lang.arlg");
    EXPECT_EQ(serialize_language(load_language(dir / "lang.arlg")), bytes);
  }
}

TEST(LanguageSerialization, RejectsCorruption) {
  const auto lang = fit_language(random_set(17, 30, 4), 2, 2, 0);
  std::string bytes = serialize_language(lang);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_language(bad_magic), Error);
  EXPECT_THROW(deserialize_language(bytes.substr(0, bytes.size() - 3)), Error);
  EXPECT_THROW(deserialize_language(bytes + "x"), Error);
  auto bad_version = bytes;
  bad_version[4] = 9;
  try {
    deserialize_language(bad_version);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::version_mismatch);
  }
}

TEST(LanguageFingerprint, DiffersAcrossLanguages) {
  const auto set = random_set(18, 40, 6);
  EXPECT_NE(fit_language(set, 3, 2, 0).fingerprint(), fit_language(set, 3, 3, 0).fingerprint());
}

TEST(Whiten, UnitVarianceAlphabet) {
  const auto set = random_set(19, 400, 6);
  LanguageOptions opts;
  opts.whiten = true;
  const auto lang = fit_language(set, 3, 2, 0, opts);
  const auto batch = encode_batch(lang, set);
  const Eigen::MatrixXd a = batch.encodings.leftCols(3);
  const Eigen::RowVectorXd mean = a.colwise().mean();
  for (Eigen::Index j = 0; j < 3; ++j) {
    const double var = (a.col(j).array() - mean(j)).square().sum() / (a.rows() - 1);
    EXPECT_NEAR(var, 1.0, 1e-4);
  }
}

}  // namespace
}  // namespace arom
