#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace arom {

/// Best (layer, alphabet size, vocabulary size) per MedMNIST 2-D dataset.
/// Layer 0 is the patch-embedding output and 1..24 the transformer block
/// outputs, so the final block is layer 24.
struct DatasetPreset {
  std::string_view key;  // MedMNIST dataset key, e.g. "pathmnist"
  std::string_view short_name;
  int layer;
  int components;
  int clusters;
};

std::span<const DatasetPreset> dataset_presets();

/// Case-insensitive lookup by key ("pathmnist") or short name ("Path").
std::optional<DatasetPreset> find_preset(std::string_view name);

}  // namespace arom
