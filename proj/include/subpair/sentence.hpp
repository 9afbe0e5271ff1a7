// Sentence splitting and the three-case dialogue-to-sentence pairing.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "subpair/dialogue.hpp"

namespace subpair {

struct SplitPolicy {
  enum class UnequalPolicy { skip, prefix };

  std::u32string source_terminators = U".!?…";
  std::u32string target_terminators = U".!?…؟۔";
  UnequalPolicy unequal_policy = UnequalPolicy::skip;
  std::vector<std::string> abbreviations = {"Mr", "Mrs", "Dr", "St", "vs", "etc"};
};

// Splits after each terminator character. Consecutive terminators ("?!")
// stay attached, a "." after a single letter or a known abbreviation does
// not split, and a trailing segment without a terminator is kept as a
// final half sentence.
std::vector<std::string> split_sentences(std::string_view text,
                                         const std::u32string& terminators,
                                         const std::vector<std::string>& abbreviations);

struct SentencePair {
  std::string video_id;
  std::string source_text;
  std::string target_text;
  std::int64_t dialogue_start_ms = 0;  // origin dialogue
  int ordinal = 0;                     // position within that dialogue
  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

// Case 1: one sentence on both sides -> stored as-is. Case 2: equal counts
// -> paired in order. Case 3: unequal counts -> skipped, or paired from the
// front when the policy says prefix.
std::vector<SentencePair> match_sentences(const DialoguePair& pair,
                                          const SplitPolicy& policy);

}  // namespace subpair
