#include "arom/presets.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

namespace arom {

namespace {

constexpr std::array<DatasetPreset, 11> kPresets{{
    {"pathmnist", "Path", 13, 224, 56},
    {"dermamnist", "Derma", 15, 512, 88},
    {"octmnist", "OCT", 20, 512, 48},
    {"pneumoniamnist", "Pneumo", 24, 224, 480},
    {"retinamnist", "Retina", 22, 488, 56},
    {"breastmnist", "Breast", 18, 248, 32},
    {"bloodmnist", "Blood", 18, 496, 488},
    {"tissuemnist", "Tissue", 17, 512, 288},
    {"organamnist", "OrganA", 13, 248, 288},
    {"organcmnist", "OrganC", 16, 248, 72},
    {"organsmnist", "OrganS", 16, 272, 96},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::span<const DatasetPreset> dataset_presets() { return kPresets; }

std::optional<DatasetPreset> find_preset(std::string_view name) {
  const auto wanted = lower(name);
  for (const auto& p : kPresets) {
    if (lower(p.key) == wanted || lower(p.short_name) == wanted) return p;
  }
  return std::nullopt;
}

}  // namespace arom
