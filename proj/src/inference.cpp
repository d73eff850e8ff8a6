#include "arom/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arom/error.hpp"
#include "arom/parallel.hpp"

namespace arom {

namespace {

double quadratic_form(const Eigen::MatrixXd& inv, const Eigen::VectorXd& s_proj,
                      const Eigen::MatrixXd& exemplars, Eigen::Index row) {
  const auto r = s_proj.size();
  double q = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    const double di = s_proj(i) - exemplars(row, i);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < r; ++j) acc += inv(i, j) * (s_proj(j) - exemplars(row, j));
    q += di * acc;
  }
  return std::sqrt(std::max(q, 0.0));
}

Eigen::Vector2d leading_coords(const Eigen::VectorXd& v) {
  return {v(0), v.size() >= 2 ? v(1) : 0.0};
}

nlohmann::json coords_json(const Eigen::Vector2d& c) { return nlohmann::json::array({c(0), c(1)}); }

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

double mahalanobis(const ConceptDictionary& dict, const Eigen::VectorXd& s_proj,
                   std::size_t exemplar_index) {
  if (exemplar_index >= dict.num_exemplars()) {
    throw Error(ErrorCode::invalid_argument, "exemplar index " + std::to_string(exemplar_index) +
                                                 " out of range (" + std::to_string(dict.num_exemplars()) +
                                                 " exemplars)");
  }
  if (s_proj.size() != dict.rank()) {
    throw Error(ErrorCode::dimension_mismatch, "projected query has dimension " +
                                                   std::to_string(s_proj.size()) + ", dictionary rank is " +
                                                   std::to_string(dict.rank()));
  }
  const auto& inv = dict.class_cov_inv[dict.exemplar_labels[exemplar_index]];
  return quadratic_form(inv, s_proj, dict.exemplars, static_cast<Eigen::Index>(exemplar_index));
}

Prediction classify_projected(const ConceptDictionary& dict, const Eigen::VectorXd& s_proj,
                              std::size_t k, ScoreMode mode) {
  const auto m = dict.num_exemplars();
  if (k < 1 || k > m) {
    throw Error(ErrorCode::invalid_argument,
                "k = " + std::to_string(k) + " outside [1, " + std::to_string(m) + "]");
  }
  if (s_proj.size() != dict.rank()) {
    throw Error(ErrorCode::dimension_mismatch, "projected query has dimension " +
                                                   std::to_string(s_proj.size()) + ", dictionary rank is " +
                                                   std::to_string(dict.rank()));
  }
  if (!s_proj.allFinite()) throw Error(ErrorCode::non_finite, "query has non-finite entries");

  std::vector<double> dist(m);
  for (std::size_t i = 0; i < m; ++i) {
    dist[i] = quadratic_form(dict.class_cov_inv[dict.exemplar_labels[i]], s_proj, dict.exemplars,
                             static_cast<Eigen::Index>(i));
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                    });

  const auto num_classes = dict.num_classes();
  std::vector<std::size_t> votes(num_classes, 0);
  std::vector<double> summed(num_classes, 0.0);
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_classes));

  Prediction pred;
  pred.neighbors.reserve(k);
  double max_dist = 0.0;
  for (std::size_t n = 0; n < k; ++n) {
    const auto idx = order[n];
    const auto label = dict.exemplar_labels[idx];
    pred.neighbors.push_back({idx, label, dist[idx], 0.0});
    max_dist = std::max(max_dist, dist[idx]);
    ++votes[label];
    summed[label] += dist[idx];
    scores(label) += mode == ScoreMode::inverse_distance ? 1.0 / (kScoreEpsilon + dist[idx]) : 1.0;
  }
  for (auto& nb : pred.neighbors) nb.normalized_distance = max_dist > 0.0 ? nb.distance / max_dist : 0.0;

  std::size_t best = 0;
  for (std::size_t c = 1; c < num_classes; ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && summed[c] < summed[best])) best = c;
  }
  pred.label = static_cast<Label>(best);
  pred.class_scores = scores / scores.sum();
  return pred;
}

Prediction classify(const ConceptDictionary& dict, const Eigen::VectorXd& s, std::size_t k,
                    ScoreMode mode) {
  return classify_projected(dict, project(dict, s), k, mode);
}

std::vector<Prediction> classify_batch(const EncodingLanguage& lang, const ConceptDictionary& dict,
                                       const FeatureSet& set, std::size_t k,
                                       const BatchOptions& options) {
  if (dict.language_fingerprint != lang.fingerprint()) {
    throw Error(ErrorCode::fingerprint_mismatch,
                "dictionary was built from a different encoding language");
  }
  if (dict.input_dim() != lang.encoding_dim()) {
    throw Error(ErrorCode::dimension_mismatch, "dictionary input dimension does not match language");
  }
  if (set.feature_dim() != lang.feature_dim) {
    throw Error(ErrorCode::dimension_mismatch, "feature_dim " + std::to_string(set.feature_dim()) +
                                                   " does not match language feature_dim " +
                                                   std::to_string(lang.feature_dim));
  }
  std::vector<Prediction> out(set.num_samples());
  parallel_for(set.num_samples(), options.threads, [&](std::size_t i) {
    const Eigen::VectorXd z = set.features.row(static_cast<Eigen::Index>(i)).cast<double>().transpose();
    out[i] = classify(dict, encode(lang, z).combined(), k, options.score_mode);
  });
  return out;
}

EvidenceRecord export_evidence(const Prediction& pred, const ConceptDictionary& dict,
                               const Eigen::VectorXd& s_proj) {
  if (s_proj.size() != dict.rank()) {
    throw Error(ErrorCode::dimension_mismatch, "projected query does not match dictionary rank");
  }
  EvidenceRecord rec;
  rec.query_projected = s_proj;
  rec.query_coords = leading_coords(s_proj);
  rec.neighbors = pred.neighbors;
  rec.predicted_label = pred.label;
  rec.class_scores = pred.class_scores;
  for (const auto& nb : pred.neighbors) {
    rec.neighbor_coords.push_back(
        leading_coords(dict.exemplars.row(static_cast<Eigen::Index>(nb.exemplar_index)).transpose()));
  }
  rec.cloud_labels = dict.exemplar_labels;
  rec.cloud_coords.reserve(dict.num_exemplars());
  for (Eigen::Index i = 0; i < dict.exemplars.rows(); ++i) {
    rec.cloud_coords.push_back(leading_coords(dict.exemplars.row(i).transpose()));
  }
  return rec;
}

nlohmann::json to_json(const EvidenceRecord& record) {
  nlohmann::json j;
  j["query"] = {{"coords2d", coords_json(record.query_coords)},
                {"projected", vector_json(record.query_projected)}};
  j["neighbors"] = nlohmann::json::array();
  for (std::size_t i = 0; i < record.neighbors.size(); ++i) {
    const auto& nb = record.neighbors[i];
    j["neighbors"].push_back({{"index", nb.exemplar_index},
                              {"label", nb.exemplar_label},
                              {"distance", nb.distance},
                              {"normalized_distance", nb.normalized_distance},
                              {"coords2d", coords_json(record.neighbor_coords[i])}});
  }
  j["exemplar_cloud"] = nlohmann::json::array();
  for (std::size_t i = 0; i < record.cloud_labels.size(); ++i) {
    j["exemplar_cloud"].push_back(
        {{"label", record.cloud_labels[i]}, {"coords2d", coords_json(record.cloud_coords[i])}});
  }
  j["predicted_label"] = record.predicted_label;
  j["class_scores"] = vector_json(record.class_scores);
  return j;
}

nlohmann::json to_json(const Prediction& pred) {
  nlohmann::json j;
  j["label"] = pred.label;
  j["class_scores"] = vector_json(pred.class_scores);
  j["neighbors"] = nlohmann::json::array();
  for (const auto& nb : pred.neighbors) {
    j["neighbors"].push_back({{"index", nb.exemplar_index},
                              {"label", nb.exemplar_label},
                              {"distance", nb.distance},
                              {"normalized_distance", nb.normalized_distance}});
  }
  return j;
}

}  // namespace arom
