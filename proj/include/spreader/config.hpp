// Flat key=value pipeline configuration. Relative paths are resolved
// against the directory containing the config file, so a config can be
// invoked from anywhere.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "spreader/csv.hpp"
#include "spreader/time.hpp"

namespace spreader {

// Invalid configuration — the CLI maps this to exit code 2, as opposed to
// fatal input errors (unreadable corpora etc.) which exit 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  std::string tweets;      // NDJSON tweet corpus
  std::string users;       // NDJSON user records
  std::string labels;      // news_id,veracity CSV
  std::string lexicon;     // bracketed-header category lexicon
  std::string embeddings;  // optional external embedding CSV
  std::string out_dir = ".";

  int spreader_threshold = 3;
  std::size_t target_words = 150;
  std::optional<EpochSeconds> reference_now;
  double split_ratio = 0.8;
  std::optional<std::uint64_t> seed;

  std::size_t hidden = 64;
  double learning_rate = 0.01;
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  bool class_weighting = false;

  std::size_t embedding_dim = 256;  // hashed baseline dimension
  bool baseline_embed = false;
};

namespace detail {

inline bool parse_config_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

template <typename Fn>
inline auto parse_config_num(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

}  // namespace detail

// Parses config text. `base_dir` anchors relative paths; pass "" to leave
// paths untouched.
inline PipelineConfig parse_config(const std::string& text, const std::string& base_dir = "") {
  PipelineConfig cfg;
  auto resolve = [&](const std::string& p) -> std::string {
    if (base_dir.empty() || p.empty()) return p;
    std::filesystem::path fp(p);
    if (fp.is_absolute()) return p;
    return (std::filesystem::path(base_dir) / fp).lexically_normal().string();
  };

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (value.empty()) throw ConfigError("config key '" + key + "': empty value");

    if (key == "tweets") {
      cfg.tweets = resolve(value);
    } else if (key == "users") {
      cfg.users = resolve(value);
    } else if (key == "labels") {
      cfg.labels = resolve(value);
    } else if (key == "lexicon") {
      cfg.lexicon = resolve(value);
    } else if (key == "embeddings") {
      cfg.embeddings = resolve(value);
    } else if (key == "out_dir") {
      cfg.out_dir = resolve(value);
    } else if (key == "spreader_threshold") {
      cfg.spreader_threshold =
          detail::parse_config_num(key, [&] { return static_cast<int>(parse_int(value)); });
    } else if (key == "target_words") {
      cfg.target_words =
          detail::parse_config_num(key, [&] { return static_cast<std::size_t>(parse_int(value)); });
    } else if (key == "reference_now") {
      const auto ts = parse_rfc3339(value);
      if (!ts) throw ConfigError("config key 'reference_now': not an RFC 3339 timestamp: " + value);
      cfg.reference_now = *ts;
    } else if (key == "split_ratio") {
      cfg.split_ratio = detail::parse_config_num(key, [&] { return parse_double(value); });
    } else if (key == "seed") {
      cfg.seed = detail::parse_config_num(
          key, [&] { return static_cast<std::uint64_t>(parse_int(value)); });
    } else if (key == "hidden") {
      cfg.hidden =
          detail::parse_config_num(key, [&] { return static_cast<std::size_t>(parse_int(value)); });
    } else if (key == "learning_rate") {
      cfg.learning_rate = detail::parse_config_num(key, [&] { return parse_double(value); });
    } else if (key == "epochs") {
      cfg.epochs =
          detail::parse_config_num(key, [&] { return static_cast<std::size_t>(parse_int(value)); });
    } else if (key == "batch_size") {
      cfg.batch_size =
          detail::parse_config_num(key, [&] { return static_cast<std::size_t>(parse_int(value)); });
    } else if (key == "class_weighting") {
      cfg.class_weighting = detail::parse_config_bool(key, value);
    } else if (key == "embedding_dim") {
      cfg.embedding_dim =
          detail::parse_config_num(key, [&] { return static_cast<std::size_t>(parse_int(value)); });
    } else if (key == "baseline_embed") {
      cfg.baseline_embed = detail::parse_config_bool(key, value);
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  if (!(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0)) {
    throw ConfigError("split_ratio must be in (0,1)");
  }
  if (cfg.spreader_threshold < 1) throw ConfigError("spreader_threshold must be >= 1");
  if (cfg.target_words < 1) throw ConfigError("target_words must be >= 1");
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (cfg.hidden < 1) throw ConfigError("hidden must be >= 1");
  if (cfg.embedding_dim < 1) throw ConfigError("embedding_dim must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  const std::string base = std::filesystem::path(path).parent_path().string();
  return parse_config(text, base);
}

}  // namespace spreader
