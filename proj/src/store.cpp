#include "subpair/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <utility>

namespace subpair {

namespace {

std::string now_iso8601() {
  std::time_t t;
  // SOURCE_DATE_EPOCH makes store bytes reproducible across runs.
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::time(nullptr);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json parse_line(const std::string& line) {
  return nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
}

bool valid_header(const nlohmann::json& doc, Stage stage) {
  return doc.is_object() && doc.value("schema", -1) == StageStore::kSchemaVersion &&
         doc.value("stage", "") == stage_name(stage);
}

bool valid_record(const nlohmann::json& doc) {
  return doc.is_object() && doc.contains("id") && doc["id"].is_number_unsigned() &&
         doc.contains("data");
}

// Scans an existing stage file and reports the byte length of the valid
// prefix plus the highest record id inside it.
struct ValidPrefix {
  std::uint64_t byte_length = 0;
  std::uint64_t max_id = 0;
  bool header_ok = false;
};

ValidPrefix scan_valid_prefix(const std::filesystem::path& path, Stage stage) {
  ValidPrefix result;
  std::ifstream in(path, std::ios::binary);
  if (!in) return result;
  std::string line;
  bool first = true;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const bool complete = !in.eof();  // a line without "\n" is a torn tail
    if (!complete) break;
    const std::uint64_t line_bytes = line.size() + 1;
    nlohmann::json doc = parse_line(line);
    if (first) {
      if (!valid_header(doc, stage)) return result;
      result.header_ok = true;
      first = false;
    } else {
      if (!valid_record(doc)) break;
      const std::uint64_t id = doc["id"].get<std::uint64_t>();
      if (id <= result.max_id) break;  // ids must be strictly increasing
      result.max_id = id;
    }
    offset += line_bytes;
    result.byte_length = offset;
  }
  return result;
}

}  // namespace

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::catalog: return "catalog";
    case Stage::subtitle_pair: return "subtitle_pair";
    case Stage::dialogue: return "dialogue";
    case Stage::sentence: return "sentence";
  }
  return "unknown";
}

StageStore::StageStore(std::filesystem::path data_root, std::string src_lang,
                       std::string dst_lang)
    : root_(std::move(data_root)), src_(std::move(src_lang)), dst_(std::move(dst_lang)) {}

std::filesystem::path StageStore::pair_dir() const {
  return root_ / (src_ + "-" + dst_);
}

std::filesystem::path StageStore::stage_path(Stage stage) const {
  return pair_dir() / (std::string(stage_name(stage)) + ".jsonl");
}

bool StageStore::stage_exists(Stage stage) const {
  std::error_code ec;
  return std::filesystem::exists(stage_path(stage), ec);
}

StageStore::Writer::Writer(Writer&& other) noexcept
    : file_(std::exchange(other.file_, nullptr)),
      lock_fd_(std::exchange(other.lock_fd_, -1)),
      stage_(other.stage_),
      run_id_(std::move(other.run_id_)),
      next_id_(other.next_id_),
      batch_size_(other.batch_size_),
      pending_(other.pending_) {}

StageStore::Writer::~Writer() {
  if (file_) {
    flush();
    std::fclose(file_);
  }
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

void StageStore::Writer::flush() {
  if (!file_) return;
  if (std::fflush(file_) != 0) throw StoreError("stage file flush failed");
  ::fsync(fileno(file_));
  pending_ = 0;
}

std::uint64_t StageStore::Writer::append(const nlohmann::json& payload) {
  if (!file_) throw StoreError("writer is closed");
  nlohmann::json record = {
      {"id", next_id_},
      {"at", now_iso8601()},
      {"run", run_id_},
      {"data", payload},
  };
  const std::string line = record.dump();
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() ||
      std::fputc('\n', file_) == EOF) {
    throw StoreError("stage file append failed (disk full?)");
  }
  if (++pending_ >= batch_size_) flush();
  return next_id_++;
}

StageStore::Writer StageStore::open_writer(Stage stage, bool truncate,
                                           std::string run_id, std::size_t batch_size) {
  const std::filesystem::path dir = pair_dir();
  std::filesystem::create_directories(dir);

  const std::filesystem::path lock_path = dir / ".lock";
  int lock_fd = ::open(lock_path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
  if (lock_fd < 0) {
    throw StoreError("cannot open lock file " + lock_path.string() + ": " +
                     std::strerror(errno));
  }
  if (::flock(lock_fd, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd);
    throw StoreError("another writer holds the lock for " + dir.string());
  }

  const std::filesystem::path path = stage_path(stage);
  Writer writer;
  writer.lock_fd_ = lock_fd;
  writer.stage_ = stage;
  writer.run_id_ = std::move(run_id);
  writer.batch_size_ = batch_size == 0 ? 1 : batch_size;

  bool fresh = truncate || !std::filesystem::exists(path);
  if (!fresh) {
    const ValidPrefix prefix = scan_valid_prefix(path, stage);
    if (!prefix.header_ok) {
      fresh = true;  // unreadable or foreign file: start over
    } else {
      // Cut off a torn tail before appending after it.
      std::error_code ec;
      if (std::filesystem::file_size(path, ec) != prefix.byte_length) {
        std::filesystem::resize_file(path, prefix.byte_length, ec);
        if (ec) {
          ::close(lock_fd);
          throw StoreError("cannot truncate torn stage file: " + path.string());
        }
      }
      writer.next_id_ = prefix.max_id + 1;
    }
  }

  writer.file_ = std::fopen(path.c_str(), fresh ? "wb" : "ab");
  if (!writer.file_) {
    ::close(lock_fd);
    writer.lock_fd_ = -1;
    throw StoreError("cannot open stage file " + path.string() + ": " +
                     std::strerror(errno));
  }
  if (fresh) {
    nlohmann::json header = {
        {"schema", kSchemaVersion},
        {"stage", stage_name(stage)},
        {"src", src_},
        {"dst", dst_},
    };
    const std::string line = header.dump() + "\n";
    if (std::fwrite(line.data(), 1, line.size(), writer.file_) != line.size()) {
      throw StoreError("cannot write stage header: " + path.string());
    }
    writer.next_id_ = 1;
  }
  return writer;
}

StageStore::Reader StageStore::open_reader(Stage stage) const {
  Reader reader;
  reader.stage_ = stage;
  reader.in_.open(stage_path(stage), std::ios::binary);
  if (!reader.in_) {
    reader.done_ = true;
    return reader;
  }
  std::string line;
  ++reader.line_;
  if (!std::getline(reader.in_, line) || reader.in_.eof() ||
      !valid_header(parse_line(line), stage)) {
    reader.done_ = true;
    reader.truncated_ = reader.in_.is_open() && !line.empty();
  }
  return reader;
}

std::optional<StageRecord> StageStore::Reader::next() {
  if (done_) return std::nullopt;
  std::string line;
  if (!std::getline(in_, line)) {
    done_ = true;
    return std::nullopt;
  }
  if (in_.eof()) {  // no trailing newline: torn write
    done_ = true;
    truncated_ = true;
    return std::nullopt;
  }
  ++line_;
  nlohmann::json doc = parse_line(line);
  if (!valid_record(doc)) {
    done_ = true;
    truncated_ = true;
    return std::nullopt;
  }
  StageRecord record;
  record.stage = stage_;
  record.id = doc["id"].get<std::uint64_t>();
  record.created_at = doc.value("at", "");
  record.run_id = doc.value("run", "");
  record.payload = std::move(doc["data"]);
  return record;
}

std::uint64_t StageStore::count(Stage stage) const {
  Reader reader = open_reader(stage);
  std::uint64_t n = 0;
  while (reader.next()) ++n;
  return n;
}

std::vector<StageRecord> StageStore::read_all(
    Stage stage, const std::function<bool(const StageRecord&)>& pred) const {
  Reader reader = open_reader(stage);
  std::vector<StageRecord> records;
  while (auto record = reader.next()) {
    if (!pred || pred(*record)) records.push_back(std::move(*record));
  }
  return records;
}

}  // namespace subpair
