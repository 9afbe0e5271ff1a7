#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <httplib.h>

#include "subpair/provider.hpp"

using namespace subpair;

namespace {

// Minimal in-process subtitle API used to exercise the remote provider.
struct StubServer {
  StubServer() {
    server.Get("/search", [this](const httplib::Request&, httplib::Response& res) {
      ++search_hits;
      res.set_content(R"([{"id":"sub-1","release":"first","size":42},
                          {"id":"sub-2","release":"second","size":43}])",
                      "application/json");
    });
    server.Get("/download/sub-1", [this](const httplib::Request&, httplib::Response& res) {
      ++download_hits;
      if (fail_next_downloads > 0) {
        --fail_next_downloads;
        res.status = fail_status;
        return;
      }
      res.set_content("1\n00:00:01,000 --> 00:00:02,000\nremote hello\n\n", "text/plain");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~StubServer() {
    server.stop();
    thread.join();
  }

  RemoteProviderConfig config(const std::filesystem::path& cache) const {
    RemoteProviderConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.cache_root = cache;
    cfg.max_requests_per_minute = 100000;  // keep tests fast
    cfg.backoff_base_ms = 5;
    return cfg;
  }

  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> search_hits{0};
  std::atomic<int> download_hits{0};
  std::atomic<int> fail_next_downloads{0};
  int fail_status = 500;
};

struct TempDir {
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("subpair_remote_" + std::to_string(counter++));
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::filesystem::path path;
  static inline int counter = 0;
};

MovieRecord video() {
  MovieRecord r;
  r.id = "tt0042";
  r.title = "Remote & Co";
  r.year = 1984;
  return r;
}

}  // namespace

TEST_CASE("remote provider: search lists candidates from the API") {
  StubServer stub;
  TempDir cache;
  auto provider = make_remote_provider(stub.config(cache.path));
  const auto candidates = provider->list_candidates(video(), "en");
  REQUIRE(candidates.size() == 2);
  CHECK(candidates[0].provider_id == "sub-1");
  CHECK(candidates[0].release_label == "first");
  CHECK(candidates[0].byte_size == 42);
  CHECK(candidates[1].provider_id == "sub-2");
}

TEST_CASE("remote provider: second fetch is served from the disk cache") {
  StubServer stub;
  TempDir cache;
  auto provider = make_remote_provider(stub.config(cache.path));
  const auto candidates = provider->list_candidates(video(), "en");
  const std::string first = provider->fetch(candidates[0]);
  CHECK(stub.download_hits == 1);
  const std::string second = provider->fetch(candidates[0]);
  CHECK(second == first);
  CHECK(stub.download_hits == 1);  // no extra network call
  CHECK(std::filesystem::exists(cache.path / "remote" / "sub-1.srt"));
}

TEST_CASE("remote provider: 429 waits and retries to success") {
  StubServer stub;
  stub.fail_status = 429;
  stub.fail_next_downloads = 1;
  TempDir cache;
  auto provider = make_remote_provider(stub.config(cache.path));
  const auto candidates = provider->list_candidates(video(), "en");
  const std::string bytes = provider->fetch(candidates[0]);
  CHECK(bytes.find("remote hello") != std::string::npos);
  CHECK(stub.download_hits == 2);
}

TEST_CASE("remote provider: transient 500 is retried with backoff") {
  StubServer stub;
  stub.fail_next_downloads = 2;
  TempDir cache;
  auto provider = make_remote_provider(stub.config(cache.path));
  const auto candidates = provider->list_candidates(video(), "en");
  const std::string bytes = provider->fetch(candidates[0]);
  CHECK(bytes.find("remote hello") != std::string::npos);
  CHECK(stub.download_hits == 3);
}

TEST_CASE("remote provider: persistent failures raise a candidate-level error") {
  StubServer stub;
  stub.fail_next_downloads = 100;
  TempDir cache;
  auto provider = make_remote_provider(stub.config(cache.path));
  const auto candidates = provider->list_candidates(video(), "en");
  CHECK_THROWS_AS(provider->fetch(candidates[0]), ProviderError);
  CHECK(stub.download_hits == 3);  // three attempts, then give up
}

TEST_CASE("remote provider: search failure propagates as ProviderError") {
  TempDir cache;
  RemoteProviderConfig cfg;
  cfg.base_url = "http://127.0.0.1:1";  // nothing listens here
  cfg.cache_root = cache.path;
  cfg.retry_attempts = 2;
  cfg.backoff_base_ms = 1;
  auto provider = make_remote_provider(cfg);
  CHECK_THROWS_AS(provider->list_candidates(video(), "en"), ProviderError);
}
