// Final cleaning pass, corpus file emission and pipeline statistics.
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "subpair/catalog.hpp"
#include "subpair/sentence.hpp"
#include "subpair/store.hpp"

namespace subpair {

struct CorpusStats {
  std::int64_t movies_considered = 0;
  std::int64_t subtitle_pairs_found = 0;
  std::int64_t dialogues_count = 0;
  std::int64_t sentence_pairs_count = 0;
  std::int64_t emitted_lines = 0;
  std::int64_t dropped_in_final_clean = 0;
  std::int64_t duplicates_dropped = 0;  // only when deduplication is on

  // Ratios are always recomputed from the counts. Rendered to two decimals,
  // "undefined" on a zero denominator.
  static std::string render_ratio(std::int64_t numerator, std::int64_t denominator);
  std::string dialogues_per_movie() const;
  std::string sentences_per_movie() const;
  std::string sentences_per_dialogue() const;
};

// Drops the pair when either side is empty, whitespace-only or carries no
// letter or digit in any script; otherwise returns it with line breaks
// replaced by spaces and whitespace normalized. Dropping is pairwise.
std::optional<SentencePair> final_clean(const SentencePair& pair);

struct EmitOptions {
  bool dedup = false;  // exact duplicate-pair removal
};

using SentenceSource = std::function<std::optional<SentencePair>()>;

// Writes the two line-aligned UTF-8 corpus files (LF endings, equal line
// counts). Outputs appear atomically; on error any partial output is
// removed and the error rethrown.
CorpusStats emit_corpus(const SentenceSource& pairs,
                        const std::filesystem::path& out_src,
                        const std::filesystem::path& out_dst,
                        const EmitOptions& options = {});

CorpusStats emit_corpus(const std::vector<SentencePair>& pairs,
                        const std::filesystem::path& out_src,
                        const std::filesystem::path& out_dst,
                        const EmitOptions& options = {});

// Counts from the store stages; emission fields are left at zero.
CorpusStats compute_stats(const StageStore& store);

// Aligned plain-text report; stages is the optional movie-filter breakdown.
std::string render_stats_table(const CorpusStats& stats,
                               const std::vector<FilterStage>& stages = {});
nlohmann::json stats_to_json(const CorpusStats& stats);

}  // namespace subpair
