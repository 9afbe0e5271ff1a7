// Subtitle document model and the SubRip (SRT) parser/serializer.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace subpair {

struct Cue {
  int index = 0;                // block ordinal as found in the file
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;      // start_ms <= end_ms
  std::string text;             // raw multi-line text, never empty
  friend bool operator==(const Cue&, const Cue&) = default;
};

struct SubtitleDocument {
  std::string language;         // alpha-2, lowercase
  std::string video_id;
  std::vector<Cue> cues;        // sorted by (start_ms, end_ms, index)
  friend bool operator==(const SubtitleDocument&, const SubtitleDocument&) = default;
};

struct ParseDiagnostic {
  std::size_t line = 0;         // 1-based line number in the input
  std::string message;
};

enum class SubtitleFormat { srt };

// Applied only when strict UTF-8 decoding fails.
enum class FallbackEncoding { none, windows1252, windows1256 };

struct ParseOptions {
  FallbackEncoding fallback = FallbackEncoding::none;
};

struct ParseResult {
  SubtitleDocument document;
  std::vector<ParseDiagnostic> diagnostics;
};

class EncodingError : public std::runtime_error {
 public:
  explicit EncodingError(std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Lenient block parser: malformed blocks are skipped and reported in the
// diagnostics, never aborting the file. Accepts CRLF line endings, a "."
// millisecond separator and hours wider than two digits. Throws
// EncodingError when the bytes are not UTF-8 and no fallback is configured.
ParseResult parse_srt(std::string_view bytes, std::string language,
                      std::string video_id, const ParseOptions& options = {});

ParseResult parse_subtitle(std::string_view bytes, SubtitleFormat format,
                           std::string language, std::string video_id,
                           const ParseOptions& options = {});

// Canonical form: blocks renumbered 1..n, "HH:MM:SS,mmm --> HH:MM:SS,mmm"
// timing lines, LF endings, one blank line after every block.
std::string serialize_srt(const SubtitleDocument& doc);

struct ShiftOutcome {
  SubtitleDocument document;
  std::size_t clamped_cues = 0;  // cues whose shifted start hit the 0 floor
};

ShiftOutcome shift_document(const SubtitleDocument& doc, std::int64_t delta_ms);

// Re-establishes the (start_ms, end_ms, index) ordering invariant.
void sort_cues(SubtitleDocument& doc);

bool is_alpha2(std::string_view code);

}  // namespace subpair
