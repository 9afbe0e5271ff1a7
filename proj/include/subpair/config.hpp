// Pipeline configuration: one JSON file holding the filter, policies,
// cleaning rules, provider selection and paths. CLI flags override values
// loaded here. Relative paths are resolved against the config file's
// directory.
#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "subpair/catalog.hpp"
#include "subpair/dialogue.hpp"
#include "subpair/provider.hpp"
#include "subpair/sentence.hpp"
#include "subpair/sync.hpp"

namespace subpair {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  std::filesystem::path data_root = "data";

  std::filesystem::path catalog_path;  // empty until configured
  ColumnMapping mapping;
  FilterSpec filter;

  SyncPolicy sync;
  SplitPolicy split;
  CleaningRules cleaning = CleaningRules::defaults();
  ParseOptions parse_options;

  std::string provider_kind = "local";  // "local" | "remote"
  std::filesystem::path provider_root = "subs";
  RemoteProviderConfig remote;

  std::optional<std::filesystem::path> output_dir;  // default: the pair dir
  std::string output_prefix = "corpus";
  bool dedup = false;

  int jobs = 4;
  int budget = 16;
  unsigned long long seed = 0;  // reserved for randomized providers
};

PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig config_from_json(const nlohmann::json& doc,
                                const std::filesystem::path& base_dir);

}  // namespace subpair
