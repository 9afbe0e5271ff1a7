#include "subpair/provider.hpp"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace subpair {

namespace {

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProviderError("cannot read subtitle file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw ProviderError("i/o error reading: " + path.string());
  return std::move(buffer).str();
}

class LocalProvider final : public SubtitleProvider {
 public:
  explicit LocalProvider(std::filesystem::path root) : root_(std::move(root)) {}

  std::vector<SubtitleCandidate> list_candidates(const MovieRecord& video,
                                                 const std::string& language) override {
    std::vector<SubtitleCandidate> candidates;
    const std::filesystem::path dir = root_ / video.id / language;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) return candidates;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
      if (!entry.is_regular_file(ec)) continue;
      if (entry.path().extension() != ".srt") continue;
      SubtitleCandidate c;
      c.provider_id = video.id + "/" + language + "/" + entry.path().filename().string();
      c.video_id = video.id;
      c.language = language;
      c.release_label = entry.path().stem().string();
      c.byte_size = static_cast<std::int64_t>(entry.file_size(ec));
      candidates.push_back(std::move(c));
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const SubtitleCandidate& a, const SubtitleCandidate& b) {
                return a.provider_id < b.provider_id;
              });
    return candidates;
  }

  std::string fetch(const SubtitleCandidate& candidate) override {
    return read_file_bytes(root_ / candidate.provider_id);
  }

 private:
  std::filesystem::path root_;
};

// Sleeps just long enough to keep the request rate under the configured
// per-minute cap.
class TokenBucket {
 public:
  explicit TokenBucket(int per_minute)
      : capacity_(std::max(per_minute, 1)), tokens_(capacity_) {}

  void acquire() {
    using clock = std::chrono::steady_clock;
    std::unique_lock lock(mutex_);
    for (;;) {
      const auto now = clock::now();
      const double elapsed = std::chrono::duration<double>(now - refill_at_).count();
      tokens_ = std::min<double>(capacity_, tokens_ + elapsed * capacity_ / 60.0);
      refill_at_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      const double wait_s = (1.0 - tokens_) * 60.0 / capacity_;
      lock.unlock();
      std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
      lock.lock();
    }
  }

 private:
  std::mutex mutex_;
  int capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point refill_at_ = std::chrono::steady_clock::now();
};

std::string url_encode(const std::string& value) {
  static const char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : value) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

class RemoteProvider final : public SubtitleProvider {
 public:
  explicit RemoteProvider(RemoteProviderConfig config)
      : config_(std::move(config)),
        client_(config_.base_url),
        bucket_(config_.max_requests_per_minute) {
    client_.set_connection_timeout(10);
    client_.set_read_timeout(30);
    if (const char* token = std::getenv(config_.credential_env.c_str());
        token && *token) {
      client_.set_default_headers({{"Authorization", std::string("Bearer ") + token}});
    }
  }

  std::vector<SubtitleCandidate> list_candidates(const MovieRecord& video,
                                                 const std::string& language) override {
    std::string path = "/search?title=" + url_encode(video.title) +
                       "&lang=" + url_encode(language);
    if (video.year) path += "&year=" + std::to_string(*video.year);
    const std::string body = request(path);

    nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
    if (!doc.is_array()) {
      throw ProviderError("malformed search response for " + video.id);
    }
    std::vector<SubtitleCandidate> candidates;
    for (const auto& item : doc) {
      SubtitleCandidate c;
      c.provider_id = item.value("id", "");
      if (c.provider_id.empty()) continue;
      c.video_id = video.id;
      c.language = language;
      c.release_label = item.value("release", "");
      c.byte_size = item.value("size", 0);
      candidates.push_back(std::move(c));
    }
    return candidates;
  }

  std::string fetch(const SubtitleCandidate& candidate) override {
    const std::filesystem::path cached = cache_path(candidate.provider_id);
    {
      std::ifstream in(cached, std::ios::binary);
      if (in) {
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return std::move(buffer).str();
      }
    }
    const std::string body = request("/download/" + url_encode(candidate.provider_id));

    // write-to-temp + atomic rename keeps concurrent writers safe
    std::filesystem::create_directories(cached.parent_path());
    const std::filesystem::path tmp =
        cached.string() + ".tmp." + std::to_string(::getpid());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(body.data(), static_cast<std::streamsize>(body.size()));
      if (!out) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw ProviderError("cannot write cache file: " + tmp.string());
      }
    }
    std::filesystem::rename(tmp, cached);
    return body;
  }

 private:
  std::filesystem::path cache_path(const std::string& id) const {
    return config_.cache_root / config_.provider_name / (id + ".srt");
  }

  // Retries transport and 5xx failures with exponential backoff; 429
  // responses wait (honoring Retry-After when present) without consuming
  // an attempt. Serialized: one in-flight request per provider instance.
  std::string request(const std::string& path) {
    std::lock_guard guard(request_mutex_);
    int failures = 0;
    int rate_limit_waits = 0;
    for (;;) {
      bucket_.acquire();
      httplib::Result res = client_.Get(path);
      if (res && res->status == 200) return res->body;
      if (res && res->status == 429 && rate_limit_waits < 10) {
        ++rate_limit_waits;
        int wait_ms = config_.backoff_base_ms;
        if (res->has_header("Retry-After")) {
          wait_ms = std::max(wait_ms, 1000 * std::atoi(res->get_header_value("Retry-After").c_str()));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(wait_ms));
        continue;
      }
      ++failures;
      if (failures >= config_.retry_attempts) {
        std::string reason = res ? "http status " + std::to_string(res->status)
                                 : "transport error";
        throw ProviderError("request failed after " + std::to_string(failures) +
                            " attempts (" + reason + "): " + path);
      }
      const int backoff = config_.backoff_base_ms * (1 << (failures - 1));
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
    }
  }

  RemoteProviderConfig config_;
  httplib::Client client_;
  TokenBucket bucket_;
  std::mutex request_mutex_;
};

}  // namespace

std::unique_ptr<SubtitleProvider> make_local_provider(std::filesystem::path root) {
  return std::make_unique<LocalProvider>(std::move(root));
}

std::unique_ptr<SubtitleProvider> make_remote_provider(RemoteProviderConfig config) {
  return std::make_unique<RemoteProvider>(std::move(config));
}

std::optional<PairResult> find_synchronized_pair(const MovieRecord& video,
                                                 const std::string& src_lang,
                                                 const std::string& dst_lang,
                                                 SubtitleProvider& provider,
                                                 const SyncPolicy& policy,
                                                 const SearchOptions& options) {
  const std::vector<SubtitleCandidate> sources = provider.list_candidates(video, src_lang);
  const std::vector<SubtitleCandidate> targets = provider.list_candidates(video, dst_lang);
  auto log = [&](const std::string& message) {
    if (options.log) *options.log << message << "\n";
  };
  if (sources.empty() || targets.empty()) {
    log("no candidates for " + video.id + " (" + src_lang + ": " +
        std::to_string(sources.size()) + ", " + dst_lang + ": " +
        std::to_string(targets.size()) + ")");
    return std::nullopt;
  }

  // Parse each candidate at most once; a failed candidate stays failed.
  std::map<std::string, std::optional<SubtitleDocument>> parsed;
  auto document_for = [&](const SubtitleCandidate& candidate,
                          const std::string& language) -> const std::optional<SubtitleDocument>& {
    auto it = parsed.find(candidate.provider_id);
    if (it != parsed.end()) return it->second;
    std::optional<SubtitleDocument> doc;
    try {
      ParseResult result =
          parse_srt(provider.fetch(candidate), language, video.id, options.parse);
      if (result.document.cues.empty()) {
        log("candidate " + candidate.provider_id + ": no parseable cues");
      } else {
        doc = std::move(result.document);
      }
    } catch (const std::exception& e) {
      log("candidate " + candidate.provider_id + ": " + e.what());
    }
    return parsed.emplace(candidate.provider_id, std::move(doc)).first->second;
  };

  int combinations = 0;
  for (const SubtitleCandidate& source_candidate : sources) {
    if (combinations >= options.budget) break;
    for (const SubtitleCandidate& target_candidate : targets) {
      if (combinations >= options.budget) break;
      ++combinations;
      const auto& source = document_for(source_candidate, src_lang);
      if (!source) break;  // useless source: skip its whole row
      const auto& target = document_for(target_candidate, dst_lang);
      if (!target) continue;

      SyncVerdict verdict = check_sync(*source, *target, policy);
      if (verdict.synchronized) {
        return PairResult{*source, *target, verdict};
      }
      if (policy.shift_enabled && policy.max_shift_ms > 0) {
        const ShiftRecovery recovery = recover_shift(*source, *target, policy);
        if (recovery.verdict.synchronized) {
          PairResult result;
          result.source = *source;
          result.target = shift_document(*target, recovery.best_delta_ms).document;
          result.verdict = recovery.verdict;
          return result;
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace subpair
