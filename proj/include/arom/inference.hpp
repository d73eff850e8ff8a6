#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "arom/concepts.hpp"
#include "arom/encoder.hpp"
#include "arom/feature_store.hpp"

namespace arom {

struct NeighborEvidence {
  std::size_t exemplar_index = 0;
  Label exemplar_label = 0;
  double distance = 0.0;
  double normalized_distance = 0.0;  // distance / max distance among the k reported
};

struct Prediction {
  Label label = 0;
  std::vector<NeighborEvidence> neighbors;  // ascending distance
  Eigen::VectorXd class_scores;             // length C, sums to 1
};

enum class ScoreMode {
  inverse_distance,  // share of sum 1 / (eps + distance) over the k neighbors
  vote_fraction,     // share of the k votes
};

inline constexpr double kScoreEpsilon = 1e-9;

/// Quadratic-form distance from `s_proj` to exemplar `exemplar_index`, under
/// the inverse covariance of that exemplar's own class.
double mahalanobis(const ConceptDictionary& dict, const Eigen::VectorXd& s_proj,
                   std::size_t exemplar_index);

/// Exhaustive kNN over the dictionary for an already projected query.
/// Neighbors are ordered by (distance, exemplar index); the label is the
/// class with most votes, then the smaller summed neighbor distance, then the
/// smaller class index.
Prediction classify_projected(const ConceptDictionary& dict, const Eigen::VectorXd& s_proj,
                              std::size_t k, ScoreMode mode = ScoreMode::inverse_distance);

/// Projects the full encoding `s` and classifies it.
Prediction classify(const ConceptDictionary& dict, const Eigen::VectorXd& s, std::size_t k,
                    ScoreMode mode = ScoreMode::inverse_distance);

struct BatchOptions {
  ScoreMode score_mode = ScoreMode::inverse_distance;
  unsigned threads = 1;
};

/// encode -> project -> classify for every row. Requires the dictionary to
/// have been built from `lang`.
std::vector<Prediction> classify_batch(const EncodingLanguage& lang, const ConceptDictionary& dict,
                                       const FeatureSet& set, std::size_t k,
                                       const BatchOptions& options = {});

/// Data behind a neighbor-evidence figure: the query, its neighbors and the
/// whole exemplar cloud on the two leading discriminant axes (second
/// coordinate 0 when the dictionary has rank 1).
struct EvidenceRecord {
  Eigen::VectorXd query_projected;
  Eigen::Vector2d query_coords;
  std::vector<NeighborEvidence> neighbors;
  std::vector<Eigen::Vector2d> neighbor_coords;
  std::vector<Label> cloud_labels;
  std::vector<Eigen::Vector2d> cloud_coords;
  Label predicted_label = 0;
  Eigen::VectorXd class_scores;
};

EvidenceRecord export_evidence(const Prediction& pred, const ConceptDictionary& dict,
                               const Eigen::VectorXd& s_proj);

nlohmann::json to_json(const EvidenceRecord& record);
nlohmann::json to_json(const Prediction& pred);

}  // namespace arom
