#include "arom/synthetic.hpp"

#include <cmath>

#include "arom/error.hpp"
#include "arom/rng.hpp"

namespace arom::synthetic {

FeatureSet make_blobs(const BlobSpec& spec, std::size_t per_class, std::uint64_t seed) {
  if (spec.dim < spec.num_classes || spec.num_classes < 1) {
    throw Error(ErrorCode::invalid_argument, "blob dimension must be at least the class count");
  }
  const double offset = spec.separation * spec.sigma / std::sqrt(2.0);
  Rng rng(seed);
  FeatureSet set;
  set.layer_index = spec.layer_index;
  set.backbone_id = "synthetic";
  set.source_dataset = spec.source_dataset;
  set.features.resize(static_cast<Eigen::Index>(spec.num_classes * per_class),
                      static_cast<Eigen::Index>(spec.dim));
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i, ++row) {
      for (std::size_t j = 0; j < spec.dim; ++j) {
        const double mean = j == c ? offset : 0.0;
        set.features(row, static_cast<Eigen::Index>(j)) = static_cast<float>(mean + spec.sigma * rng.normal());
      }
      set.labels.push_back(static_cast<Label>(c));
    }
  }
  return set;
}

DatasetSplit make_blob_split(const BlobSpec& spec, std::size_t train_per_class, std::size_t val_per_class,
                             std::size_t test_per_class, std::uint64_t seed) {
  const std::uint64_t base = seed * 3;
  return {make_blobs(spec, train_per_class, base), make_blobs(spec, val_per_class, base + 1),
          make_blobs(spec, test_per_class, base + 2)};
}

}  // namespace arom::synthetic
