#include "subpair/dialogue.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "subpair/textutil.hpp"

namespace subpair {

namespace {

using text::decode_utf8_lossy;
using text::encode_utf8;
using text::is_space;

constexpr char32_t kHyphen = U'-';
constexpr char32_t kEnDash = U'–';
constexpr std::size_t kMaxLabelLength = 30;  // codepoints, colon included
constexpr int kMaxCleanPasses = 8;

std::vector<std::string> split_text_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      lines.emplace_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return lines;
}

std::string join_text_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

// <...> and {...} runs; an unclosed opener eats the rest of the line.
std::string strip_tags_line(const std::string& line) {
  std::string out;
  out.reserve(line.size());
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == '<' || c == '{') {
      const char closer = c == '<' ? '>' : '}';
      std::size_t end = line.find(closer, i + 1);
      if (end == std::string::npos) break;
      i = end + 1;
    } else {
      out += c;
      ++i;
    }
  }
  return out;
}

// Matched [..] and (..) pairs anywhere in the cue (they may span lines);
// unmatched halves stay. Repeats until nothing is removable.
std::string strip_brackets(std::string text) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::size_t> squares, rounds;
    for (std::size_t i = 0; i < text.size(); ++i) {
      switch (text[i]) {
        case '[': squares.push_back(i); break;
        case '(': rounds.push_back(i); break;
        case ']':
          if (!squares.empty()) {
            text.erase(squares.back(), i - squares.back() + 1);
            changed = true;
          }
          break;
        case ')':
          if (!rounds.empty()) {
            text.erase(rounds.back(), i - rounds.back() + 1);
            changed = true;
          }
          break;
        default: break;
      }
      if (changed) break;
    }
  }
  return text;
}

// Leading "NAME:" tokens. The label may sit behind dialogue dashes (those
// are rule 4's job) and counts as followed-by-text when any non-space
// content remains in the rest of the cue.
std::u32string strip_labels_line(std::u32string line, bool later_lines_have_text) {
  for (;;) {
    std::size_t i = 0;
    while (i < line.size() && is_space(line[i])) ++i;
    while (i < line.size() && (line[i] == kHyphen || line[i] == kEnDash)) {
      ++i;
      while (i < line.size() && is_space(line[i])) ++i;
    }
    const std::size_t token_start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    const std::size_t token_len = i - token_start;
    if (token_len == 0 || token_len > kMaxLabelLength) return line;
    if (line[i - 1] != U':') return line;
    bool rest_has_text = later_lines_have_text;
    for (std::size_t k = i; k < line.size() && !rest_has_text; ++k) {
      if (!is_space(line[k])) rest_has_text = true;
    }
    if (!rest_has_text) return line;
    line.erase(token_start, token_len);
  }
}

std::u32string strip_dashes_line(std::u32string line) {
  std::size_t i = 0;
  while (i < line.size()) {
    if (is_space(line[i])) {
      ++i;
    } else if (line[i] == kHyphen || line[i] == kEnDash) {
      line.erase(i, 1);
    } else {
      break;
    }
  }
  return line;
}

bool decode_numeric_entity(std::string_view s, char32_t& cp, std::size_t& len) {
  // at "&#": digits then ";"
  std::size_t i = 2;
  std::uint64_t value = 0;
  std::size_t digits = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9' && digits < 8) {
    value = value * 10 + static_cast<std::uint64_t>(s[i] - '0');
    ++i;
    ++digits;
  }
  if (digits == 0 || i >= s.size() || s[i] != ';') return false;
  if (value == 0 || value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) return false;
  cp = static_cast<char32_t>(value);
  len = i + 1;
  return true;
}

std::string decode_entities(std::string text) {
  for (int pass = 0; pass < kMaxCleanPasses; ++pass) {
    std::string out;
    out.reserve(text.size());
    bool changed = false;
    std::size_t i = 0;
    while (i < text.size()) {
      if (text[i] == '&') {
        std::string_view rest(text.data() + i, text.size() - i);
        auto take = [&](std::string_view entity, char32_t cp) {
          if (rest.substr(0, entity.size()) != entity) return false;
          text::append_utf8(out, cp);
          i += entity.size();
          changed = true;
          return true;
        };
        if (take("&amp;", U'&') || take("&lt;", U'<') || take("&gt;", U'>') ||
            take("&quot;", U'"')) {
          continue;
        }
        char32_t cp = 0;
        std::size_t len = 0;
        if (rest.size() > 2 && rest[1] == '#' && decode_numeric_entity(rest, cp, len)) {
          text::append_utf8(out, cp);
          i += len;
          changed = true;
          continue;
        }
      }
      out += text[i++];
    }
    text = std::move(out);
    if (!changed) break;
  }
  return text;
}

bool line_has_music_glyph(const std::u32string& line, const std::u32string& glyphs) {
  return std::any_of(line.begin(), line.end(), [&](char32_t cp) {
    return glyphs.find(cp) != std::u32string::npos;
  });
}

const std::regex& compiled_pattern(const std::string& pattern) {
  thread_local std::unordered_map<std::string, std::regex> cache;
  auto it = cache.find(pattern);
  if (it == cache.end()) {
    it = cache.emplace(pattern, std::regex(pattern, std::regex::ECMAScript)).first;
  }
  return it->second;
}

template <typename Fn>
std::string for_each_line(const std::string& text, Fn&& fn) {
  std::vector<std::string> lines = split_text_lines(text);
  for (std::string& line : lines) line = fn(line);
  return join_text_lines(lines);
}

std::string apply_rule(const CleaningRule& rule, const std::string& text) {
  switch (rule.kind) {
    case CleaningRule::Kind::tag_strip:
      return for_each_line(text, strip_tags_line);
    case CleaningRule::Kind::bracket_strip:
      return strip_brackets(text);
    case CleaningRule::Kind::speaker_label: {
      std::vector<std::string> lines = split_text_lines(text);
      std::vector<bool> later(lines.size(), false);
      bool seen = false;
      for (std::size_t k = lines.size(); k-- > 0;) {
        later[k] = seen;
        if (text::collapse_whitespace(lines[k]) != "") seen = true;
      }
      for (std::size_t k = 0; k < lines.size(); ++k) {
        lines[k] = encode_utf8(strip_labels_line(decode_utf8_lossy(lines[k]), later[k]));
      }
      return join_text_lines(lines);
    }
    case CleaningRule::Kind::dash_strip:
      return for_each_line(text, [](const std::string& line) {
        return encode_utf8(strip_dashes_line(decode_utf8_lossy(line)));
      });
    case CleaningRule::Kind::entity_decode:
      return decode_entities(text);
    case CleaningRule::Kind::music_drop: {
      const std::u32string glyphs =
          decode_utf8_lossy(rule.pattern.empty() ? "♪♫♬" : rule.pattern);
      return for_each_line(text, [&](const std::string& line) {
        return line_has_music_glyph(decode_utf8_lossy(line), glyphs) ? std::string() : line;
      });
    }
    case CleaningRule::Kind::custom_pattern:
      return std::regex_replace(text, compiled_pattern(rule.pattern), rule.replacement);
  }
  return text;
}

std::string finalize(const std::string& text) {
  std::string stripped;
  stripped.reserve(text.size());
  for (char c : text) {
    if (c == '<' || c == '>' || c == '{' || c == '}') continue;
    stripped += c;
  }
  return text::collapse_whitespace(stripped);
}

}  // namespace

CleaningRules CleaningRules::defaults() {
  CleaningRules rules;
  rules.rules = {
      {CleaningRule::Kind::tag_strip, "", ""},
      {CleaningRule::Kind::bracket_strip, "", ""},
      {CleaningRule::Kind::speaker_label, "", ""},
      {CleaningRule::Kind::dash_strip, "", ""},
      {CleaningRule::Kind::entity_decode, "", ""},
  };
  return rules;
}

std::string clean_dialogue(std::string_view raw, const CleaningRules& rules) {
  std::string current = text::is_valid_utf8(raw)
                            ? std::string(raw)
                            : encode_utf8(decode_utf8_lossy(raw));
  // Run the whole sequence to a fixed point: rules can expose content for
  // earlier rules (entity decoding in particular), and the result must be
  // stable under re-cleaning.
  for (int pass = 0; pass < kMaxCleanPasses; ++pass) {
    std::string next = current;
    for (const CleaningRule& rule : rules.rules) next = apply_rule(rule, next);
    next = finalize(next);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

namespace {

CleaningRule::Kind kind_from_string(const std::string& name) {
  static const std::unordered_map<std::string, CleaningRule::Kind> kinds = {
      {"tag-strip", CleaningRule::Kind::tag_strip},
      {"bracket-strip", CleaningRule::Kind::bracket_strip},
      {"speaker-label", CleaningRule::Kind::speaker_label},
      {"dash-strip", CleaningRule::Kind::dash_strip},
      {"entity-decode", CleaningRule::Kind::entity_decode},
      {"music-drop", CleaningRule::Kind::music_drop},
      {"custom-pattern", CleaningRule::Kind::custom_pattern},
  };
  auto it = kinds.find(name);
  if (it == kinds.end()) throw std::runtime_error("unknown cleaning rule kind: " + name);
  return it->second;
}

}  // namespace

CleaningRules cleaning_rules_from_json(std::string_view json_text) {
  nlohmann::json doc = nlohmann::json::parse(json_text);
  if (!doc.is_array()) throw std::runtime_error("cleaning rules must be a JSON array");
  CleaningRules rules;
  for (const auto& entry : doc) {
    CleaningRule rule;
    rule.kind = kind_from_string(entry.at("kind").get<std::string>());
    if (rule.kind == CleaningRule::Kind::music_drop) {
      rule.pattern = entry.value("glyphs", "");
    } else if (rule.kind == CleaningRule::Kind::custom_pattern) {
      rule.pattern = entry.at("pattern").get<std::string>();
      rule.replacement = entry.value("replacement", "");
      compiled_pattern(rule.pattern);  // validate eagerly
    }
    rules.rules.push_back(std::move(rule));
  }
  return rules;
}

CleaningRules load_cleaning_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open cleaning rules file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return cleaning_rules_from_json(buffer.str());
}

std::vector<DialoguePair> pair_dialogues(const SubtitleDocument& a,
                                         const SubtitleDocument& b,
                                         const std::vector<CueMatch>& matching,
                                         const CleaningRules& rules) {
  std::vector<DialoguePair> pairs;
  pairs.reserve(matching.size());
  for (const auto& [ia, ib] : matching) {
    const Cue& source = a.cues.at(ia);
    const Cue& target = b.cues.at(ib);
    std::string source_text = clean_dialogue(source.text, rules);
    if (source_text.empty()) continue;
    std::string target_text = clean_dialogue(target.text, rules);
    if (target_text.empty()) continue;
    DialoguePair pair;
    pair.video_id = a.video_id;
    pair.start_ms = source.start_ms;
    pair.end_ms = source.end_ms;
    pair.source_text = std::move(source_text);
    pair.target_text = std::move(target_text);
    pair.source_lang = a.language;
    pair.target_lang = b.language;
    pairs.push_back(std::move(pair));
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const DialoguePair& x, const DialoguePair& y) {
                     return x.start_ms < y.start_ms;
                   });
  return pairs;
}

}  // namespace subpair
