#pragma once

#include <cstdint>
#include <string>

#include "arom/feature_store.hpp"

namespace arom::synthetic {

/// Isotropic Gaussian classes. Class c is centred at
/// (separation * sigma / sqrt(2)) * e_c, so every pair of class means is
/// exactly separation * sigma apart.
struct BlobSpec {
  std::size_t num_classes = 3;
  std::size_t dim = 64;
  double separation = 10.0;  // in units of sigma
  double sigma = 1.0;
  std::uint16_t layer_index = 0;
  std::string source_dataset = "synthetic-blobs";
};

/// `per_class` rows of every class, class-major order.
FeatureSet make_blobs(const BlobSpec& spec, std::size_t per_class, std::uint64_t seed);

/// Train/val/test drawn from the same class means with derived seeds.
DatasetSplit make_blob_split(const BlobSpec& spec, std::size_t train_per_class, std::size_t val_per_class,
                             std::size_t test_per_class, std::uint64_t seed);

}  // namespace arom::synthetic
