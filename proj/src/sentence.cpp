#include "subpair/sentence.hpp"

#include <algorithm>

#include "subpair/textutil.hpp"

namespace subpair {

namespace {

using text::decode_utf8_lossy;
using text::encode_utf8;
using text::is_letter_or_digit;
using text::is_space;

bool is_terminator(char32_t cp, const std::u32string& terminators) {
  return terminators.find(cp) != std::u32string::npos;
}

// A "." after a single letter ("J.") or a known abbreviation token does not
// end a sentence. The token is the letter/digit run immediately before the
// period.
bool is_digit(char32_t cp) {
  return (cp >= U'0' && cp <= U'9') || (cp >= 0x660 && cp <= 0x669) ||
         (cp >= 0x6F0 && cp <= 0x6F9);
}

// A single letter before the "." reads as a name initial ("J. Smith") —
// unless the word after it carries its own terminator, which marks a run of
// short sentences ("A. B.") rather than initials.
bool initial_guard(const std::u32string& cps, std::size_t dot,
                   const std::u32string& terminators) {
  std::size_t next = dot + 1;
  while (next < cps.size() && is_space(cps[next])) ++next;
  if (next >= cps.size()) return true;
  std::size_t end = next;
  while (end < cps.size() && !is_space(cps[end])) ++end;
  return terminators.find(cps[end - 1]) == std::u32string::npos;
}

bool abbreviation_guard(const std::u32string& cps, std::size_t dot,
                        const std::u32string& terminators,
                        const std::vector<std::string>& abbreviations) {
  std::size_t begin = dot;
  while (begin > 0 && is_letter_or_digit(cps[begin - 1])) --begin;
  const std::size_t len = dot - begin;
  if (len == 0) return false;
  if (len == 1 && !is_digit(cps[begin])) return initial_guard(cps, dot, terminators);
  const std::string token = encode_utf8(std::u32string_view(cps).substr(begin, len));
  return std::find(abbreviations.begin(), abbreviations.end(), token) !=
         abbreviations.end();
}

void flush_segment(std::vector<std::string>& out, std::u32string& segment) {
  // trim; empty-after-trim segments are discarded
  std::size_t b = 0, e = segment.size();
  while (b < e && is_space(segment[b])) ++b;
  while (e > b && is_space(segment[e - 1])) --e;
  if (e > b) out.push_back(encode_utf8(std::u32string_view(segment).substr(b, e - b)));
  segment.clear();
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text,
                                         const std::u32string& terminators,
                                         const std::vector<std::string>& abbreviations) {
  const std::u32string cps = decode_utf8_lossy(text);
  std::vector<std::string> sentences;
  std::u32string segment;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    segment.push_back(cps[i]);
    if (!is_terminator(cps[i], terminators)) continue;
    // runs like "?!" stay attached to the sentence they end
    if (i + 1 < cps.size() && is_terminator(cps[i + 1], terminators)) continue;
    if (cps[i] == U'.' && abbreviation_guard(cps, i, terminators, abbreviations)) continue;
    flush_segment(sentences, segment);
  }
  flush_segment(sentences, segment);  // trailing half sentence, if any
  return sentences;
}

std::vector<SentencePair> match_sentences(const DialoguePair& pair,
                                          const SplitPolicy& policy) {
  const std::vector<std::string> source =
      split_sentences(pair.source_text, policy.source_terminators, policy.abbreviations);
  const std::vector<std::string> target =
      split_sentences(pair.target_text, policy.target_terminators, policy.abbreviations);

  std::size_t take = 0;
  if (source.size() == target.size()) {
    take = source.size();  // cases 1 and 2
  } else if (policy.unequal_policy == SplitPolicy::UnequalPolicy::prefix) {
    take = std::min(source.size(), target.size());
  }

  std::vector<SentencePair> out;
  out.reserve(take);
  for (std::size_t k = 0; k < take; ++k) {
    SentencePair sp;
    sp.video_id = pair.video_id;
    sp.source_text = source[k];
    sp.target_text = target[k];
    sp.dialogue_start_ms = pair.start_ms;
    sp.ordinal = static_cast<int>(k);
    out.push_back(std::move(sp));
  }
  return out;
}

}  // namespace subpair
