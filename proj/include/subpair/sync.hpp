// Timing-based synchronization check and constant-offset recovery.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "subpair/srt.hpp"

namespace subpair {

struct SyncPolicy {
  std::int64_t tolerance_ms = 200;      // max start/end discrepancy per cue
  double min_match_fraction = 0.6;      // fraction of the smaller doc that must match
  std::int64_t max_shift_ms = 120000;   // offset search half-range
  std::int64_t shift_step_ms = 10;      // offset grid granularity
  bool shift_enabled = true;            // try offset recovery in the search loop
  bool exhaustive_search = false;       // full grid scan instead of candidate voting
  int max_candidates = 64;              // voting survivors scored exactly
};

struct SyncVerdict {
  std::size_t matched_count = 0;
  double match_fraction = 0.0;          // matched_count / min(|a|,|b|)
  bool synchronized = false;            // match_fraction >= min_match_fraction
  std::int64_t applied_shift_ms = 0;    // 0 for exact (unshifted) verdicts
};

using CueMatch = std::pair<std::size_t, std::size_t>;

// Maximum one-to-one monotone matching, computed by a merge-style band
// sweep over both sorted cue lists. A pair qualifies when both start and
// end times agree within tolerance_ms; maximality makes the matched count
// symmetric and monotone in the tolerance. Near-linear: the sweep only
// inspects cue pairs whose start times are within tolerance of each other.
std::vector<CueMatch> match_cues(const SubtitleDocument& a,
                                 const SubtitleDocument& b,
                                 std::int64_t tolerance_ms);

SyncVerdict check_sync(const SubtitleDocument& a, const SubtitleDocument& b,
                       const SyncPolicy& policy);

struct ShiftRecovery {
  std::int64_t best_delta_ms = 0;
  SyncVerdict verdict;                  // verdict at best_delta_ms
};

// Finds the constant offset delta maximizing the matched cue count of
// match_cues(a, shift_document(b, delta)). Default strategy: start-time
// difference voting bucketed at shift_step_ms, top buckets scored exactly;
// policy.exhaustive_search switches to the full grid scan. Ties break by
// smaller |delta|, then smaller delta. Throws std::invalid_argument when
// either document is empty.
ShiftRecovery recover_shift(const SubtitleDocument& a,
                            const SubtitleDocument& b,
                            const SyncPolicy& policy);

}  // namespace subpair
