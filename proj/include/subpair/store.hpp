// Append-only per-stage record store backing every pipeline step.
//
// Layout: <data_root>/<src>-<dst>/<stage>.jsonl, one JSON record per line,
// first line a header carrying the schema version. A single .lock file per
// language-pair directory enforces writer exclusivity. Records become
// durable at flush boundaries (every batch_size appends and on writer
// close); a torn trailing line is detected and dropped on the next open.
#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace subpair {

enum class Stage { catalog, subtitle_pair, dialogue, sentence };

const char* stage_name(Stage stage);

struct StageRecord {
  Stage stage = Stage::catalog;
  std::uint64_t id = 0;        // strictly increasing per stage, from 1
  std::string created_at;      // ISO-8601 UTC
  std::string run_id;
  nlohmann::json payload;
};

class StoreError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class StageStore {
 public:
  StageStore(std::filesystem::path data_root, std::string src_lang, std::string dst_lang);

  class Writer {
   public:
    Writer(Writer&&) noexcept;
    Writer& operator=(Writer&&) = delete;
    Writer(const Writer&) = delete;
    ~Writer();

    std::uint64_t append(const nlohmann::json& payload);
    void flush();  // fsync; appended records are durable once this returns

   private:
    friend class StageStore;
    Writer() = default;

    std::FILE* file_ = nullptr;
    int lock_fd_ = -1;
    Stage stage_ = Stage::catalog;
    std::string run_id_;
    std::uint64_t next_id_ = 1;
    std::size_t batch_size_ = 256;
    std::size_t pending_ = 0;
  };

  class Reader {
   public:
    // nullopt at end of stream or at the first corrupt record.
    std::optional<StageRecord> next();
    bool truncated() const { return truncated_; }

   private:
    friend class StageStore;
    std::ifstream in_;
    Stage stage_ = Stage::catalog;
    bool done_ = false;
    bool truncated_ = false;
    std::uint64_t line_ = 0;
  };

  // truncate=true replaces the stage file; otherwise appends after the
  // existing valid prefix (a torn tail is cut off first). Takes the
  // directory lock for the lifetime of the writer.
  Writer open_writer(Stage stage, bool truncate, std::string run_id,
                     std::size_t batch_size = 256);

  Reader open_reader(Stage stage) const;
  std::uint64_t count(Stage stage) const;
  std::vector<StageRecord> read_all(
      Stage stage,
      const std::function<bool(const StageRecord&)>& pred = {}) const;

  bool stage_exists(Stage stage) const;
  std::filesystem::path stage_path(Stage stage) const;
  std::filesystem::path pair_dir() const;
  const std::string& source_lang() const { return src_; }
  const std::string& target_lang() const { return dst_; }

  static constexpr int kSchemaVersion = 1;

 private:
  std::filesystem::path root_;
  std::string src_;
  std::string dst_;
};

}  // namespace subpair
