// Cue-text cleaning and pairing of matched cues into dialogue pairs.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "subpair/srt.hpp"
#include "subpair/sync.hpp"

namespace subpair {

struct CleaningRule {
  enum class Kind {
    tag_strip,       // <...> and {...} markup, unclosed runs to end of line
    bracket_strip,   // [...] and (...) descriptions, matched pairs only
    speaker_label,   // leading "NAME:" tokens
    dash_strip,      // leading dialogue dashes "-" / "–"
    entity_decode,   // &amp; &lt; &gt; &quot; &#NN;
    music_drop,      // drop lines carrying music glyphs
    custom_pattern,  // user regex removal/replacement
  };
  Kind kind = Kind::tag_strip;
  std::string pattern;       // music glyphs or the custom regex
  std::string replacement;   // custom_pattern only
};

struct CleaningRules {
  std::vector<CleaningRule> rules;
  static CleaningRules defaults();
};

CleaningRules load_cleaning_rules(const std::filesystem::path& path);
CleaningRules cleaning_rules_from_json(std::string_view json_text);

// Applies the rule list in order, then joins lines, strips residual markup
// characters and collapses whitespace. Runs the whole sequence to a fixed
// point so the result is stable under re-cleaning. Empty output means
// "drop this cue".
std::string clean_dialogue(std::string_view raw, const CleaningRules& rules);

struct DialoguePair {
  std::string video_id;
  std::int64_t start_ms = 0;   // taken from the source cue
  std::int64_t end_ms = 0;
  std::string source_text;
  std::string target_text;
  std::string source_lang;
  std::string target_lang;
  friend bool operator==(const DialoguePair&, const DialoguePair&) = default;
};

// Cleans both sides of every matched cue pair; a pair is emitted only when
// both cleaned texts are non-empty. Output ordered by start_ms.
std::vector<DialoguePair> pair_dialogues(const SubtitleDocument& a,
                                         const SubtitleDocument& b,
                                         const std::vector<CueMatch>& matching,
                                         const CleaningRules& rules);

}  // namespace subpair
