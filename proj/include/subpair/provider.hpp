// Pluggable subtitle acquisition and the synchronized-pair search loop.
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "subpair/catalog.hpp"
#include "subpair/srt.hpp"
#include "subpair/sync.hpp"

namespace subpair {

struct SubtitleCandidate {
  std::string provider_id;   // unique within one provider
  std::string video_id;
  std::string language;
  std::string release_label;
  std::int64_t byte_size = 0;
};

class ProviderError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class SubtitleProvider {
 public:
  virtual ~SubtitleProvider() = default;
  virtual std::vector<SubtitleCandidate> list_candidates(const MovieRecord& video,
                                                         const std::string& language) = 0;
  virtual std::string fetch(const SubtitleCandidate& candidate) = 0;
};

// Candidates are files at <root>/<video_id>/<language>/*.srt in file-name
// order. A missing directory yields an empty candidate list.
std::unique_ptr<SubtitleProvider> make_local_provider(std::filesystem::path root);

struct RemoteProviderConfig {
  std::string base_url;                        // e.g. "http://host:port"
  std::string credential_env = "SUBPAIR_API_TOKEN";
  int max_requests_per_minute = 30;
  std::filesystem::path cache_root = "cache";
  std::string provider_name = "remote";        // cache subdirectory
  int retry_attempts = 3;
  int backoff_base_ms = 500;
};

// Generic REST-style provider: GET <base>/search?title=..&year=..&lang=..
// returns [{id, release, size}]; GET <base>/download/<id> returns the
// subtitle bytes. Fetches are cached on disk under
// <cache_root>/<provider_name>/<id>.srt so re-runs stay network-free.
std::unique_ptr<SubtitleProvider> make_remote_provider(RemoteProviderConfig config);

struct SearchOptions {
  ParseOptions parse;
  int budget = 16;              // max candidate combinations examined
  std::ostream* log = nullptr;  // per-candidate diagnostics
};

struct PairResult {
  SubtitleDocument source;
  SubtitleDocument target;      // shifted when offset recovery was applied
  SyncVerdict verdict;
};

// Walks candidate pairs in (source-rank, target-rank) order until one
// synchronizes under the policy, applying offset recovery when enabled.
// Candidates that fail to fetch or parse are skipped with a logged
// diagnostic. Returns nullopt once the budget or the candidates run out.
std::optional<PairResult> find_synchronized_pair(const MovieRecord& video,
                                                 const std::string& src_lang,
                                                 const std::string& dst_lang,
                                                 SubtitleProvider& provider,
                                                 const SyncPolicy& policy,
                                                 const SearchOptions& options = {});

}  // namespace subpair
