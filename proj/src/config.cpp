#include "arom/config.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "arom/detail/binary_io.hpp"
#include "arom/error.hpp"
#include "arom/presets.hpp"

namespace arom::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw Error(ErrorCode::config, "config line " + std::to_string(line) + ": " + message);
}

// Drops a trailing `#` comment that is not inside a string.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && in_string) {
      ++i;
    } else if (s[i] == '"') {
      in_string = !in_string;
    } else if (s[i] == '#' && !in_string) {
      return s.substr(0, i);
    }
  }
  return s;
}

Scalar parse_scalar(std::string_view text, std::size_t line) {
  text = trim(text);
  if (text.empty()) fail(line, "missing value");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') fail(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
      if (text[i] == '\\' && i + 2 < text.size()) ++i;
      out.push_back(text[i]);
    }
    return out;
  }
  if (text == "true") return true;
  if (text == "false") return false;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  std::int64_t i = 0;
  if (auto [p, ec] = std::from_chars(begin, end, i); ec == std::errc{} && p == end) return i;
  double d = 0;
  if (auto [p, ec] = std::from_chars(begin, end, d); ec == std::errc{} && p == end) return d;
  fail(line, "cannot parse value '" + std::string(text) + "'");
}

std::vector<Scalar> parse_array(std::string_view text, std::size_t line) {
  if (text.back() != ']') fail(line, "arrays must close on the same line");
  text = trim(text.substr(1, text.size() - 2));
  std::vector<Scalar> out;
  if (text.empty()) return out;
  bool in_string = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] == '"') in_string = !in_string;
    if (i == text.size() || (text[i] == ',' && !in_string)) {
      const auto item = trim(text.substr(start, i - start));
      if (!item.empty()) out.push_back(parse_scalar(item, line));
      start = i + 1;
    }
  }
  return out;
}

nlohmann::json scalar_json(const Scalar& s) {
  return std::visit([](const auto& v) { return nlohmann::json(v); }, s);
}

const Scalar* as_scalar(const std::map<std::string, Value>& values, const std::string& key) {
  auto it = values.find(key);
  if (it == values.end()) return nullptr;
  const auto* s = std::get_if<Scalar>(&it->second);
  if (!s) throw Error(ErrorCode::config, "key '" + key + "' must be a scalar, not an array");
  return s;
}

std::size_t non_negative(std::int64_t v, const std::string& key) {
  if (v < 0) throw Error(ErrorCode::config, "key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

}  // namespace

Document Document::parse(std::string_view text) {
  Document doc;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const auto key_part = trim(line.substr(0, eq));
    const auto value_part = trim(line.substr(eq + 1));
    if (key_part.empty()) fail(line_no, "empty key");
    const auto key = section.empty() ? std::string(key_part) : section + "." + std::string(key_part);
    if (doc.values_.contains(key)) fail(line_no, "duplicate key '" + key + "'");
    if (!value_part.empty() && value_part.front() == '[') {
      doc.values_[key] = parse_array(value_part, line_no);
    } else {
      doc.values_[key] = parse_scalar(value_part, line_no);
    }
  }
  return doc;
}

Document Document::load(const std::string& path) { return parse(detail::read_file(path)); }

std::optional<std::int64_t> Document::get_int(const std::string& key) const {
  const auto* s = as_scalar(values_, key);
  if (!s) return std::nullopt;
  if (const auto* v = std::get_if<std::int64_t>(s)) return *v;
  throw Error(ErrorCode::config, "key '" + key + "' must be an integer");
}

std::optional<double> Document::get_double(const std::string& key) const {
  const auto* s = as_scalar(values_, key);
  if (!s) return std::nullopt;
  if (const auto* v = std::get_if<double>(s)) return *v;
  if (const auto* v = std::get_if<std::int64_t>(s)) return static_cast<double>(*v);
  throw Error(ErrorCode::config, "key '" + key + "' must be a number");
}

std::optional<bool> Document::get_bool(const std::string& key) const {
  const auto* s = as_scalar(values_, key);
  if (!s) return std::nullopt;
  if (const auto* v = std::get_if<bool>(s)) return *v;
  throw Error(ErrorCode::config, "key '" + key + "' must be true or false");
}

std::optional<std::string> Document::get_string(const std::string& key) const {
  const auto* s = as_scalar(values_, key);
  if (!s) return std::nullopt;
  if (const auto* v = std::get_if<std::string>(s)) return *v;
  throw Error(ErrorCode::config, "key '" + key + "' must be a string");
}

std::optional<std::vector<std::int64_t>> Document::get_int_list(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  std::vector<Scalar> items;
  if (const auto* arr = std::get_if<std::vector<Scalar>>(&it->second)) {
    items = *arr;
  } else {
    items.push_back(std::get<Scalar>(it->second));
  }
  std::vector<std::int64_t> out;
  for (const auto& item : items) {
    const auto* v = std::get_if<std::int64_t>(&item);
    if (!v) throw Error(ErrorCode::config, "key '" + key + "' must hold integers");
    out.push_back(*v);
  }
  return out;
}

void Document::require_known(const std::vector<std::string>& known) const {
  for (const auto& [key, value] : values_) {
    if (key.find('.') != std::string::npos) continue;
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::config, "unknown config key '" + key + "'");
    }
  }
}

nlohmann::json Document::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : values_) {
    if (const auto* s = std::get_if<Scalar>(&value)) {
      j[key] = scalar_json(*s);
    } else {
      auto arr = nlohmann::json::array();
      for (const auto& item : std::get<std::vector<Scalar>>(value)) arr.push_back(scalar_json(item));
      j[key] = arr;
    }
  }
  return j;
}

ScoreMode parse_score_mode(const std::string& text) {
  if (text == "inverse_distance" || text == "idw") return ScoreMode::inverse_distance;
  if (text == "vote" || text == "vote_fraction") return ScoreMode::vote_fraction;
  throw Error(ErrorCode::config, "unknown score mode '" + text + "' (expected inverse_distance or vote)");
}

std::string to_string(ScoreMode mode) {
  return mode == ScoreMode::inverse_distance ? "inverse_distance" : "vote";
}

SweepConfig SweepConfig::coarse_defaults() {
  SweepConfig cfg;
  cfg.alphabet_sizes = {64, 256, 512};
  cfg.vocab_sizes = {64, 256, 512};
  return cfg;
}

SweepConfig SweepConfig::benchmark_defaults() {
  SweepConfig cfg;
  cfg.k = 15;
  cfg.language_sample_cap = std::numeric_limits<std::size_t>::max();
  cfg.language_cap_per_class = 5000;
  cfg.dict_cap_per_class = 5000;
  cfg.eval_cap = std::numeric_limits<std::size_t>::max();
  cfg.eval_split = "test";
  return cfg;
}

void SweepConfig::validate() const {
  if (layer_indices.empty() || alphabet_sizes.empty() || vocab_sizes.empty()) {
    throw Error(ErrorCode::config, "layer, alphabet and vocabulary grids must be non-empty");
  }
  for (auto l : layer_indices) {
    if (l < 0 || l > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorCode::config, "layer index " + std::to_string(l) + " out of range");
    }
  }
  for (auto a : alphabet_sizes) {
    if (a < 1) throw Error(ErrorCode::config, "alphabet sizes must be positive");
  }
  for (auto v : vocab_sizes) {
    if (v < 1) throw Error(ErrorCode::config, "vocabulary sizes must be positive");
  }
  if (k < 1) throw Error(ErrorCode::config, "k must be at least 1");
  if (language_sample_cap < 1 || dict_cap_per_class < 1 || eval_cap < 1 ||
      (language_cap_per_class && *language_cap_per_class < 1)) {
    throw Error(ErrorCode::config, "caps must be at least 1");
  }
  if (eval_split != "val" && eval_split != "test") {
    throw Error(ErrorCode::config, "eval_split must be \"val\" or \"test\"");
  }
  if (threads < 1) throw Error(ErrorCode::config, "threads must be at least 1");
}

namespace {

nlohmann::json cap_json(std::size_t cap) {
  return cap == std::numeric_limits<std::size_t>::max() ? nlohmann::json("all") : nlohmann::json(cap);
}

}  // namespace

nlohmann::json SweepConfig::to_json() const {
  nlohmann::json j;
  j["layers"] = layer_indices;
  j["alphabet_sizes"] = alphabet_sizes;
  j["vocab_sizes"] = vocab_sizes;
  j["k"] = k;
  j["language_sample_cap"] = cap_json(language_sample_cap);
  j["language_cap_per_class"] =
      language_cap_per_class ? nlohmann::json(*language_cap_per_class) : nlohmann::json(nullptr);
  j["dict_cap_per_class"] = cap_json(dict_cap_per_class);
  j["eval_cap"] = cap_json(eval_cap);
  j["eval_split"] = eval_split;
  j["seed"] = seed;
  j["ridge"] = ridge;
  j["shrinkage"] = shrinkage;
  j["score_mode"] = config::to_string(score_mode);
  j["threads"] = threads;
  j["preset"] = preset;
  return j;
}

std::vector<std::uint64_t> FewShotConfig::resolved_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out(repeats);
  for (std::size_t i = 0; i < repeats; ++i) out[i] = i;
  return out;
}

void FewShotConfig::validate() const {
  if (shots.empty()) throw Error(ErrorCode::config, "shots must be non-empty");
  for (std::size_t i = 0; i < shots.size(); ++i) {
    if (shots[i] < 2) {
      throw Error(ErrorCode::config, "shot " + std::to_string(shots[i]) +
                                         " is below 2; class covariances need at least 2 samples");
    }
    if (i > 0 && shots[i] <= shots[i - 1]) throw Error(ErrorCode::config, "shots must be strictly ascending");
  }
  if (repeats < 1) throw Error(ErrorCode::config, "repeats must be at least 1");
  if (!seeds.empty() && seeds.size() != repeats) {
    throw Error(ErrorCode::config, "seeds must list exactly one seed per repeat");
  }
  if (k < 1) throw Error(ErrorCode::config, "k must be at least 1");
  if (reference_cap_per_class < 1) throw Error(ErrorCode::config, "reference_cap_per_class must be at least 1");
  if (threads < 1) throw Error(ErrorCode::config, "threads must be at least 1");
}

nlohmann::json FewShotConfig::to_json() const {
  nlohmann::json j;
  j["shots"] = shots;
  j["repeats"] = repeats;
  j["k"] = k;
  j["seeds"] = resolved_seeds();
  j["reference_cap_per_class"] = reference_cap_per_class;
  j["reference_accuracy"] = reference_accuracy ? nlohmann::json(*reference_accuracy) : nlohmann::json(nullptr);
  j["ridge"] = ridge;
  j["shrinkage"] = shrinkage;
  j["score_mode"] = config::to_string(score_mode);
  j["threads"] = threads;
  return j;
}

SweepConfig sweep_config_from(const Document& doc) {
  doc.require_known({"mode", "preset", "layers", "alphabet_sizes", "vocab_sizes", "k", "language_sample_cap",
                     "language_cap_per_class", "dict_cap_per_class", "eval_cap", "eval_split", "seed", "ridge",
                     "shrinkage", "score_mode", "threads"});
  const auto preset_name = doc.get_string("preset");
  const auto mode = doc.get_string("mode").value_or(preset_name ? "benchmark" : "coarse");
  SweepConfig cfg;
  if (mode == "coarse") {
    cfg = SweepConfig::coarse_defaults();
  } else if (mode == "benchmark") {
    cfg = SweepConfig::benchmark_defaults();
  } else {
    throw Error(ErrorCode::config, "mode must be \"coarse\" or \"benchmark\"");
  }
  if (preset_name) {
    const auto preset = find_preset(*preset_name);
    if (!preset) throw Error(ErrorCode::config, "unknown dataset preset '" + *preset_name + "'");
    cfg.preset = std::string(preset->key);
    cfg.layer_indices = {preset->layer};
    cfg.alphabet_sizes = {preset->components};
    cfg.vocab_sizes = {preset->clusters};
  }
  if (auto v = doc.get_int_list("layers")) cfg.layer_indices.assign(v->begin(), v->end());
  if (auto v = doc.get_int_list("alphabet_sizes")) cfg.alphabet_sizes = *v;
  if (auto v = doc.get_int_list("vocab_sizes")) cfg.vocab_sizes = *v;
  if (auto v = doc.get_int("k")) cfg.k = non_negative(*v, "k");
  if (auto v = doc.get_int("language_sample_cap")) cfg.language_sample_cap = non_negative(*v, "language_sample_cap");
  if (auto v = doc.get_int("language_cap_per_class")) {
    cfg.language_cap_per_class = non_negative(*v, "language_cap_per_class");
  }
  if (auto v = doc.get_int("dict_cap_per_class")) cfg.dict_cap_per_class = non_negative(*v, "dict_cap_per_class");
  if (auto v = doc.get_int("eval_cap")) cfg.eval_cap = non_negative(*v, "eval_cap");
  if (auto v = doc.get_string("eval_split")) cfg.eval_split = *v;
  if (auto v = doc.get_int("seed")) cfg.seed = non_negative(*v, "seed");
  if (auto v = doc.get_double("ridge")) cfg.ridge = *v;
  if (auto v = doc.get_double("shrinkage")) cfg.shrinkage = *v;
  if (auto v = doc.get_string("score_mode")) cfg.score_mode = parse_score_mode(*v);
  if (auto v = doc.get_int("threads")) cfg.threads = static_cast<unsigned>(non_negative(*v, "threads"));
  cfg.validate();
  return cfg;
}

FewShotConfig fewshot_config_from(const Document& doc) {
  doc.require_known({"shots", "repeats", "k", "seeds", "reference_cap_per_class", "reference_accuracy", "ridge",
                     "shrinkage", "score_mode", "threads"});
  FewShotConfig cfg;
  if (auto v = doc.get_int_list("shots")) {
    cfg.shots.clear();
    for (auto s : *v) cfg.shots.push_back(non_negative(s, "shots"));
  }
  if (auto v = doc.get_int("repeats")) cfg.repeats = non_negative(*v, "repeats");
  if (auto v = doc.get_int("k")) cfg.k = non_negative(*v, "k");
  if (auto v = doc.get_int_list("seeds")) {
    for (auto s : *v) cfg.seeds.push_back(non_negative(s, "seeds"));
  }
  if (auto v = doc.get_int("reference_cap_per_class")) {
    cfg.reference_cap_per_class = non_negative(*v, "reference_cap_per_class");
  }
  if (auto v = doc.get_double("reference_accuracy")) cfg.reference_accuracy = *v;
  if (auto v = doc.get_double("ridge")) cfg.ridge = *v;
  if (auto v = doc.get_double("shrinkage")) cfg.shrinkage = *v;
  if (auto v = doc.get_string("score_mode")) cfg.score_mode = parse_score_mode(*v);
  if (auto v = doc.get_int("threads")) cfg.threads = static_cast<unsigned>(non_negative(*v, "threads"));
  cfg.validate();
  return cfg;
}

}  // namespace arom::config
