#include "arom/encoder.hpp"

#include <cmath>

#include "arom/detail/binary_io.hpp"
#include "arom/error.hpp"

namespace arom {

namespace {

constexpr char kMagic[4] = {'A', 'R', 'L', 'G'};

void alphabet_into(const EncodingLanguage& lang, const double* z, double* alphabet) {
  const auto d = static_cast<Eigen::Index>(lang.feature_dim);
  const auto& comps = lang.pca.components;
  const auto& mean = lang.pca.mean;
  for (Eigen::Index k = 0; k < lang.alphabet_size(); ++k) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) acc += comps(i, k) * (z[i] - mean(i));
    if (lang.whiten) {
      const double var = lang.pca.explained_variance(k);
      acc = var > 0.0 ? acc / std::sqrt(var) : 0.0;
    }
    alphabet[k] = acc;
  }
}

// Shared by encode() and encode_batch() so both produce identical bits.
void encode_into(const EncodingLanguage& lang, const double* z, double* alphabet, double* word) {
  alphabet_into(lang, z, alphabet);
  const auto& centroids = lang.vocabulary.centroids;
  for (Eigen::Index j = 0; j < lang.vocab_size(); ++j) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < lang.alphabet_size(); ++k) {
      const double diff = alphabet[k] - centroids(j, k);
      acc += diff * diff;
    }
    word[j] = std::sqrt(acc);
  }
}

void check_input(const EncodingLanguage& lang, Eigen::Index dim) {
  if (dim != static_cast<Eigen::Index>(lang.feature_dim)) {
    throw Error(ErrorCode::dimension_mismatch, "input dimension " + std::to_string(dim) +
                                                   " does not match language feature_dim " +
                                                   std::to_string(lang.feature_dim));
  }
}

}  // namespace

Eigen::VectorXd FullEncoding::combined() const {
  Eigen::VectorXd s(alphabet.size() + word.size());
  s << alphabet, word;
  return s;
}

std::uint64_t EncodingLanguage::fingerprint() const {
  return detail::fnv1a(serialize_language(*this));
}

EncodingLanguage fit_language(const FeatureSet& unlabeled, Eigen::Index a_size, Eigen::Index v_size,
                              std::uint64_t seed, const LanguageOptions& options) {
  unlabeled.validate();
  const auto n = static_cast<Eigen::Index>(unlabeled.num_samples());
  const auto d = static_cast<Eigen::Index>(unlabeled.feature_dim());
  if (a_size < 1 || v_size < 1) {
    throw Error(ErrorCode::invalid_argument, "alphabet and vocabulary sizes must be at least 1");
  }
  if (a_size > d) {
    throw Error(ErrorCode::invalid_argument, "alphabet size " + std::to_string(a_size) +
                                                 " exceeds feature_dim " + std::to_string(d));
  }
  if (n < std::max(a_size + 1, v_size)) {
    throw Error(ErrorCode::invalid_argument,
                "language fitting needs at least max(A+1, V) = " +
                    std::to_string(std::max(a_size + 1, v_size)) + " samples, got " + std::to_string(n));
  }

  EncodingLanguage lang;
  lang.feature_dim = static_cast<std::uint32_t>(d);
  lang.layer_index = unlabeled.layer_index;
  lang.whiten = options.whiten;

  const Eigen::MatrixXd z = unlabeled.to_double();
  lang.pca = numlin::fit_pca(z, a_size);

  Eigen::MatrixXd alphabet(n, a_size);
  Eigen::VectorXd row(d);
  Eigen::VectorXd a(a_size);
  for (Eigen::Index i = 0; i < n; ++i) {
    row = z.row(i).transpose();
    alphabet_into(lang, row.data(), a.data());
    alphabet.row(i) = a.transpose();
  }
  lang.vocabulary = vocab::fit_kmeans(alphabet, v_size, seed, options.kmeans);
  return lang;
}

FullEncoding encode(const EncodingLanguage& lang, const Eigen::VectorXd& z) {
  check_input(lang, z.size());
  if (!z.allFinite()) throw Error(ErrorCode::non_finite, "latent vector has non-finite entries");
  FullEncoding out;
  out.alphabet.resize(lang.alphabet_size());
  out.word.resize(lang.vocab_size());
  encode_into(lang, z.data(), out.alphabet.data(), out.word.data());
  return out;
}

EncodedBatch encode_batch(const EncodingLanguage& lang, const FeatureSet& set) {
  check_input(lang, static_cast<Eigen::Index>(set.feature_dim()));
  const auto n = static_cast<Eigen::Index>(set.num_samples());
  const auto a_size = lang.alphabet_size();
  EncodedBatch out;
  out.labels = set.labels;
  out.encodings.resize(n, lang.encoding_dim());
  Eigen::VectorXd z(lang.feature_dim);
  Eigen::VectorXd a(a_size);
  Eigen::VectorXd w(lang.vocab_size());
  for (Eigen::Index i = 0; i < n; ++i) {
    z = set.features.row(i).cast<double>().transpose();
    if (!z.allFinite()) throw Error(ErrorCode::non_finite, "row " + std::to_string(i) + " is non-finite");
    encode_into(lang, z.data(), a.data(), w.data());
    out.encodings.row(i).head(a_size) = a.transpose();
    out.encodings.row(i).tail(lang.vocab_size()) = w.transpose();
  }
  return out;
}

std::string serialize_language(const EncodingLanguage& lang) {
  const auto d = static_cast<Eigen::Index>(lang.feature_dim);
  const auto a_size = lang.alphabet_size();
  const auto v_size = lang.vocab_size();
  if (lang.pca.mean.size() != d || lang.pca.components.rows() != d ||
      lang.pca.explained_variance.size() != a_size || lang.vocabulary.dim() != a_size) {
    throw Error(ErrorCode::dimension_mismatch, "inconsistent encoding language shapes");
  }
  detail::ByteWriter w;
  w.bytes(std::string_view(kMagic, 4));
  w.u16(kLanguageFormatVersion);
  w.u16(lang.whiten ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(a_size));
  w.u32(static_cast<std::uint32_t>(v_size));
  w.u32(lang.feature_dim);
  w.u16(lang.layer_index);
  w.u32(static_cast<std::uint32_t>(lang.vocabulary.iterations_run));
  w.f64(lang.vocabulary.inertia);
  for (Eigen::Index i = 0; i < d; ++i) w.f64(lang.pca.mean(i));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < a_size; ++k) w.f64(lang.pca.components(i, k));
  }
  for (Eigen::Index k = 0; k < a_size; ++k) w.f64(lang.pca.explained_variance(k));
  for (Eigen::Index j = 0; j < v_size; ++j) {
    for (Eigen::Index k = 0; k < a_size; ++k) w.f64(lang.vocabulary.centroids(j, k));
  }
  return w.take();
}

EncodingLanguage deserialize_language(std::string_view bytes) {
  detail::ByteReader r(bytes);
  if (r.remaining() < 4 || r.bytes(4) != std::string_view(kMagic, 4)) {
    throw Error(ErrorCode::bad_magic, "not an ARLG language file (bad magic)");
  }
  const auto version = r.u16();
  if (version != kLanguageFormatVersion) {
    throw Error(ErrorCode::version_mismatch, "unsupported ARLG version " + std::to_string(version));
  }
  EncodingLanguage lang;
  lang.whiten = (r.u16() & 1u) != 0;
  const Eigen::Index a_size = r.u32();
  const Eigen::Index v_size = r.u32();
  lang.feature_dim = r.u32();
  lang.layer_index = r.u16();
  lang.vocabulary.iterations_run = static_cast<int>(r.u32());
  lang.vocabulary.inertia = r.f64();
  const auto d = static_cast<Eigen::Index>(lang.feature_dim);
  if (a_size < 1 || v_size < 1 || d < a_size) {
    throw Error(ErrorCode::invalid_header, "invalid ARLG dimensions");
  }
  const auto expected = static_cast<std::uint64_t>(d + d * a_size + a_size + v_size * a_size) * 8;
  if (r.remaining() != expected) {
    throw Error(r.remaining() < expected ? ErrorCode::truncated : ErrorCode::invalid_header,
                "ARLG payload size mismatch");
  }
  lang.pca.mean.resize(d);
  lang.pca.components.resize(d, a_size);
  lang.pca.explained_variance.resize(a_size);
  lang.vocabulary.centroids.resize(v_size, a_size);
  for (Eigen::Index i = 0; i < d; ++i) lang.pca.mean(i) = r.f64();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < a_size; ++k) lang.pca.components(i, k) = r.f64();
  }
  for (Eigen::Index k = 0; k < a_size; ++k) lang.pca.explained_variance(k) = r.f64();
  for (Eigen::Index j = 0; j < v_size; ++j) {
    for (Eigen::Index k = 0; k < a_size; ++k) lang.vocabulary.centroids(j, k) = r.f64();
  }
  return lang;
}

void save_language(const EncodingLanguage& lang, const std::filesystem::path& path) {
  detail::write_file(path, serialize_language(lang));
}

EncodingLanguage load_language(const std::filesystem::path& path) {
  return deserialize_language(detail::read_file(path));
}

}  // namespace arom
