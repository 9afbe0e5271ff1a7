#include "subpair/config.hpp"

#include <fstream>
#include <sstream>

#include "subpair/textutil.hpp"

namespace subpair {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

std::u32string terminators_from(const nlohmann::json& node, const char* key,
                                const std::u32string& fallback) {
  if (!node.contains(key)) return fallback;
  const std::u32string set = text::decode_utf8_lossy(node.at(key).get<std::string>());
  if (set.empty()) throw ConfigError(std::string(key) + " must not be empty");
  return set;
}

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& doc,
                                const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  PipelineConfig config;
  try {
    if (doc.contains("data_root")) {
      config.data_root = resolve(base_dir, doc["data_root"].get<std::string>());
    }
    if (doc.contains("jobs")) config.jobs = doc["jobs"].get<int>();
    if (doc.contains("budget")) config.budget = doc["budget"].get<int>();
    if (doc.contains("seed")) config.seed = doc["seed"].get<unsigned long long>();
    if (doc.contains("dedup")) config.dedup = doc["dedup"].get<bool>();

    if (doc.contains("catalog")) {
      const auto& cat = doc["catalog"];
      if (cat.contains("path")) {
        config.catalog_path = resolve(base_dir, cat["path"].get<std::string>());
      }
      if (cat.contains("mapping")) {
        const auto& m = cat["mapping"];
        auto take = [&](const char* key, std::string& field) {
          if (m.contains(key)) field = m[key].get<std::string>();
        };
        take("id", config.mapping.id);
        take("title", config.mapping.title);
        take("year", config.mapping.year);
        take("type", config.mapping.type);
        take("rating", config.mapping.rating);
        take("rating_count", config.mapping.rating_count);
        take("duration", config.mapping.duration);
        if (m.contains("duration_unit")) {
          const std::string unit = m["duration_unit"].get<std::string>();
          if (unit == "seconds") {
            config.mapping.duration_unit = ColumnMapping::DurationUnit::seconds;
          } else if (unit == "minutes") {
            config.mapping.duration_unit = ColumnMapping::DurationUnit::minutes;
          } else {
            throw ConfigError("duration_unit must be \"seconds\" or \"minutes\"");
          }
        }
        if (m.contains("genre_columns")) {
          config.mapping.genre_columns =
              m["genre_columns"].get<std::vector<std::string>>();
        }
      }
    }

    if (doc.contains("filter")) {
      const auto& f = doc["filter"];
      if (f.contains("type")) config.filter.type_limit = f["type"].get<std::string>();
      if (f.contains("year_min")) config.filter.year_min = f["year_min"].get<int>();
      if (f.contains("rating_min")) config.filter.rating_min = f["rating_min"].get<double>();
      if (f.contains("duration_min_s")) {
        config.filter.duration_min_s = f["duration_min_s"].get<std::int64_t>();
      }
      if (f.contains("genre_any")) {
        const auto genres = f["genre_any"].get<std::vector<std::string>>();
        if (!genres.empty()) {
          config.filter.genre_any = std::set<std::string>(genres.begin(), genres.end());
        }
      }
    }

    if (doc.contains("sync")) {
      const auto& s = doc["sync"];
      if (s.contains("tolerance_ms")) config.sync.tolerance_ms = s["tolerance_ms"].get<std::int64_t>();
      if (s.contains("min_match_fraction")) {
        config.sync.min_match_fraction = s["min_match_fraction"].get<double>();
      }
      if (s.contains("max_shift_ms")) config.sync.max_shift_ms = s["max_shift_ms"].get<std::int64_t>();
      if (s.contains("shift_step_ms")) config.sync.shift_step_ms = s["shift_step_ms"].get<std::int64_t>();
      if (s.contains("shift_enabled")) config.sync.shift_enabled = s["shift_enabled"].get<bool>();
      if (s.contains("exhaustive_search")) {
        config.sync.exhaustive_search = s["exhaustive_search"].get<bool>();
      }
      if (s.contains("max_candidates")) config.sync.max_candidates = s["max_candidates"].get<int>();
      if (config.sync.tolerance_ms < 0 || config.sync.shift_step_ms <= 0 ||
          config.sync.min_match_fraction <= 0.0 || config.sync.min_match_fraction > 1.0) {
        throw ConfigError("invalid sync policy values");
      }
      if (config.sync.max_shift_ms > 0 &&
          config.sync.shift_step_ms > config.sync.max_shift_ms) {
        throw ConfigError("shift_step_ms must not exceed max_shift_ms");
      }
    }

    if (doc.contains("split")) {
      const auto& s = doc["split"];
      config.split.source_terminators =
          terminators_from(s, "source_terminators", config.split.source_terminators);
      config.split.target_terminators =
          terminators_from(s, "target_terminators", config.split.target_terminators);
      if (s.contains("unequal_policy")) {
        const std::string p = s["unequal_policy"].get<std::string>();
        if (p == "skip") {
          config.split.unequal_policy = SplitPolicy::UnequalPolicy::skip;
        } else if (p == "prefix") {
          config.split.unequal_policy = SplitPolicy::UnequalPolicy::prefix;
        } else {
          throw ConfigError("unequal_policy must be \"skip\" or \"prefix\"");
        }
      }
      if (s.contains("abbreviations")) {
        config.split.abbreviations = s["abbreviations"].get<std::vector<std::string>>();
      }
    }

    if (doc.contains("cleaning_rules")) {
      const auto& c = doc["cleaning_rules"];
      if (c.is_string()) {
        config.cleaning = load_cleaning_rules(resolve(base_dir, c.get<std::string>()));
      } else if (c.is_array()) {
        config.cleaning = cleaning_rules_from_json(c.dump());
      } else {
        throw ConfigError("cleaning_rules must be a path or an inline rule array");
      }
    }

    if (doc.contains("parse")) {
      const auto& p = doc["parse"];
      if (p.contains("fallback_encoding")) {
        const std::string enc = p["fallback_encoding"].get<std::string>();
        if (enc == "none") {
          config.parse_options.fallback = FallbackEncoding::none;
        } else if (enc == "windows1252") {
          config.parse_options.fallback = FallbackEncoding::windows1252;
        } else if (enc == "windows1256") {
          config.parse_options.fallback = FallbackEncoding::windows1256;
        } else {
          throw ConfigError("unknown fallback_encoding: " + enc);
        }
      }
    }

    if (doc.contains("provider")) {
      const auto& p = doc["provider"];
      config.provider_kind = p.value("kind", std::string("local"));
      if (config.provider_kind == "local") {
        if (p.contains("root")) {
          config.provider_root = resolve(base_dir, p["root"].get<std::string>());
        }
      } else if (config.provider_kind == "remote") {
        config.remote.base_url = p.value("base_url", std::string());
        if (config.remote.base_url.empty()) {
          throw ConfigError("remote provider needs a base_url");
        }
        if (p.contains("rate_per_minute")) {
          config.remote.max_requests_per_minute = p["rate_per_minute"].get<int>();
        }
        if (p.contains("cache_root")) {
          config.remote.cache_root = resolve(base_dir, p["cache_root"].get<std::string>());
        }
        if (p.contains("credential_env")) {
          config.remote.credential_env = p["credential_env"].get<std::string>();
        }
        if (p.contains("name")) config.remote.provider_name = p["name"].get<std::string>();
        if (p.contains("retry_attempts")) {
          config.remote.retry_attempts = p["retry_attempts"].get<int>();
        }
        if (p.contains("backoff_base_ms")) {
          config.remote.backoff_base_ms = p["backoff_base_ms"].get<int>();
        }
      } else {
        throw ConfigError("unknown provider kind: " + config.provider_kind);
      }
    }

    if (doc.contains("output")) {
      const auto& o = doc["output"];
      if (o.contains("dir")) {
        config.output_dir = resolve(base_dir, o["dir"].get<std::string>());
      }
      if (o.contains("prefix")) config.output_prefix = o["prefix"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }

  if (config.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (config.budget < 1) throw ConfigError("budget must be >= 1");
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json doc = nlohmann::json::parse(buffer.str(), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
  return config_from_json(doc, path.parent_path());
}

}  // namespace subpair
