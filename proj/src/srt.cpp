#include "subpair/srt.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <tuple>

#include "subpair/textutil.hpp"

namespace subpair {

namespace {

struct InputLine {
  std::string_view text;  // without the line terminator (and trailing CR)
  std::size_t number;     // 1-based
};

std::vector<InputLine> split_lines(std::string_view s) {
  std::vector<InputLine> lines;
  std::size_t start = 0, number = 1;
  while (start <= s.size()) {
    std::size_t nl = s.find('\n', start);
    std::string_view line = nl == std::string_view::npos
                                ? s.substr(start)
                                : s.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (nl == std::string_view::npos) {
      if (!line.empty()) lines.push_back({line, number});  // fragment after last "\n"
      break;
    }
    lines.push_back({line, number});
    start = nl + 1;
    ++number;
  }
  return lines;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

std::string_view trim_ascii(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_int(std::string_view s, std::int64_t& value) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// "HH:MM:SS,mmm" with "." accepted for "," and 1..6 hour digits. A short
// fraction is scaled ("1,5" -> 500 ms).
bool parse_timestamp(std::string_view s, std::int64_t& ms) {
  s = trim_ascii(s);
  std::size_t c1 = s.find(':');
  if (c1 == std::string_view::npos || c1 == 0 || c1 > 6) return false;
  std::size_t c2 = s.find(':', c1 + 1);
  if (c2 == std::string_view::npos || c2 - c1 - 1 == 0 || c2 - c1 - 1 > 2) return false;
  std::size_t sep = s.find_first_of(",.", c2 + 1);
  if (sep == std::string_view::npos || sep - c2 - 1 == 0 || sep - c2 - 1 > 2) return false;
  std::string_view frac = s.substr(sep + 1);
  if (frac.empty() || frac.size() > 3) return false;

  std::int64_t h, m, sec, f;
  if (!parse_int(s.substr(0, c1), h) || !parse_int(s.substr(c1 + 1, c2 - c1 - 1), m) ||
      !parse_int(s.substr(c2 + 1, sep - c2 - 1), sec) || !parse_int(frac, f)) {
    return false;
  }
  for (std::size_t k = frac.size(); k < 3; ++k) f *= 10;
  ms = ((h * 60 + m) * 60 + sec) * 1000 + f;
  return true;
}

bool parse_timing_line(std::string_view line, std::int64_t& start, std::int64_t& end) {
  std::size_t arrow = line.find("-->");
  if (arrow == std::string_view::npos) return false;
  return parse_timestamp(line.substr(0, arrow), start) &&
         parse_timestamp(line.substr(arrow + 3), end);
}

void format_timestamp(std::string& out, std::int64_t ms) {
  char buf[32];
  std::int64_t h = ms / 3600000;
  std::int64_t m = (ms / 60000) % 60;
  std::int64_t s = (ms / 1000) % 60;
  std::int64_t f = ms % 1000;
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld,%03lld",
                static_cast<long long>(h), static_cast<long long>(m),
                static_cast<long long>(s), static_cast<long long>(f));
  out += buf;
}

}  // namespace

EncodingError::EncodingError(std::size_t offset)
    : std::runtime_error("undecodable byte sequence at offset " + std::to_string(offset)),
      offset_(offset) {}

bool is_alpha2(std::string_view code) {
  return code.size() == 2 && code[0] >= 'a' && code[0] <= 'z' && code[1] >= 'a' &&
         code[1] <= 'z';
}

void sort_cues(SubtitleDocument& doc) {
  std::stable_sort(doc.cues.begin(), doc.cues.end(), [](const Cue& a, const Cue& b) {
    return std::tie(a.start_ms, a.end_ms, a.index) < std::tie(b.start_ms, b.end_ms, b.index);
  });
}

ParseResult parse_srt(std::string_view bytes, std::string language,
                      std::string video_id, const ParseOptions& options) {
  if (!is_alpha2(language)) {
    throw std::invalid_argument("language must be a lowercase alpha-2 code: " + language);
  }

  // BOM, then encoding: strict UTF-8 unless a fallback codepage is allowed.
  if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  std::string recoded;
  std::size_t bad_offset = 0;
  if (!text::is_valid_utf8(bytes, &bad_offset)) {
    switch (options.fallback) {
      case FallbackEncoding::none:
        throw EncodingError(bad_offset);
      case FallbackEncoding::windows1252:
        recoded = text::decode_windows1252(bytes);
        break;
      case FallbackEncoding::windows1256:
        recoded = text::decode_windows1256(bytes);
        break;
    }
    bytes = recoded;
  }

  ParseResult result;
  result.document.language = std::move(language);
  result.document.video_id = std::move(video_id);

  const std::vector<InputLine> lines = split_lines(bytes);
  std::size_t i = 0;
  const std::size_t n = lines.size();
  auto skip_block = [&] {
    while (i < n && !is_blank(lines[i].text)) ++i;
  };

  while (i < n) {
    if (is_blank(lines[i].text)) {
      ++i;
      continue;
    }
    // ordinal line
    std::int64_t ordinal = 0;
    if (!parse_int(trim_ascii(lines[i].text), ordinal)) {
      result.diagnostics.push_back({lines[i].number, "expected cue number"});
      skip_block();
      continue;
    }
    std::size_t ordinal_line = lines[i].number;
    ++i;
    // timing line
    std::int64_t start = 0, end = 0;
    if (i >= n || !parse_timing_line(lines[i].text, start, end)) {
      result.diagnostics.push_back(
          {i < n ? lines[i].number : ordinal_line, "expected timing line"});
      skip_block();
      continue;
    }
    std::size_t timing_line = lines[i].number;
    ++i;
    // text lines until a blank line or EOF
    std::string cue_text;
    while (i < n && !is_blank(lines[i].text)) {
      if (!cue_text.empty()) cue_text += '\n';
      cue_text += lines[i].text;
      ++i;
    }
    if (cue_text.empty()) {
      result.diagnostics.push_back({timing_line, "cue has no text"});
      continue;
    }
    if (start > end) {
      result.diagnostics.push_back({timing_line, "cue end precedes start"});
      continue;
    }
    result.document.cues.push_back(
        {static_cast<int>(ordinal), start, end, std::move(cue_text)});
  }

  sort_cues(result.document);
  return result;
}

ParseResult parse_subtitle(std::string_view bytes, SubtitleFormat format,
                           std::string language, std::string video_id,
                           const ParseOptions& options) {
  switch (format) {
    case SubtitleFormat::srt:
      return parse_srt(bytes, std::move(language), std::move(video_id), options);
  }
  throw std::invalid_argument("unknown subtitle format");
}

std::string serialize_srt(const SubtitleDocument& doc) {
  std::string out;
  int number = 1;
  for (const Cue& cue : doc.cues) {
    out += std::to_string(number++);
    out += '\n';
    format_timestamp(out, cue.start_ms);
    out += " --> ";
    format_timestamp(out, cue.end_ms);
    out += '\n';
    out += cue.text;
    out += "\n\n";
  }
  return out;
}

ShiftOutcome shift_document(const SubtitleDocument& doc, std::int64_t delta_ms) {
  ShiftOutcome outcome;
  outcome.document.language = doc.language;
  outcome.document.video_id = doc.video_id;
  outcome.document.cues.reserve(doc.cues.size());
  for (const Cue& cue : doc.cues) {
    Cue shifted = cue;
    shifted.start_ms = cue.start_ms + delta_ms;
    shifted.end_ms = cue.end_ms + delta_ms;
    if (shifted.start_ms < 0) {
      shifted.start_ms = 0;
      shifted.end_ms = std::max<std::int64_t>(shifted.end_ms, 0);
      ++outcome.clamped_cues;
    }
    outcome.document.cues.push_back(std::move(shifted));
  }
  sort_cues(outcome.document);
  return outcome;
}

}  // namespace subpair
