#include "subpair/sync.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace subpair {

namespace {

// Cue times of `b` shifted by delta with the same floor-at-zero clamping
// shift_document applies, so scoring a candidate offset agrees exactly with
// materializing the shifted document.
struct ShiftedTimes {
  std::int64_t start, end;
};

ShiftedTimes shifted(const Cue& cue, std::int64_t delta) {
  std::int64_t s = cue.start_ms + delta;
  std::int64_t e = cue.end_ms + delta;
  if (s < 0) {
    s = 0;
    e = std::max<std::int64_t>(e, 0);
  }
  return {s, e};
}

bool qualifies(const Cue& x, const Cue& y, std::int64_t delta, std::int64_t tolerance) {
  const ShiftedTimes t = shifted(y, delta);
  return std::llabs(x.start_ms - t.start) <= tolerance &&
         std::llabs(x.end_ms - t.end) <= tolerance;
}

// Maximum one-to-one monotone matching, computed by a merge-style band
// sweep. For each cue of `a` the start-compatible cues of `b` form a small
// window that only moves forward, so the alignment DP touches O(n + m +
// total window size) cells. Maximality is what makes the matched count
// symmetric in (a, b) and monotone in the tolerance.
//
// Values are prefix sizes: F(i, p) = matching size between a[0..i) and
// b[0..p). Row i stores its window cells; everything right of the window is
// covered by a single pending rule "p >= tail_pos: max(stored, tail_value)",
// which is sufficient because windows never move left.
struct BandRow {
  std::size_t jlo = 0, jhi = 0;       // window cue range [jlo, jhi)
  std::vector<std::int32_t> values;   // F(i, p) for p in [jlo, jhi]
};

template <bool KeepRows>
std::int32_t run_band_sweep(const SubtitleDocument& a, const SubtitleDocument& b,
                            std::int64_t tolerance, std::int64_t delta,
                            std::vector<BandRow>* rows) {
  const auto& A = a.cues;
  const auto& B = b.cues;
  const std::size_t n = A.size(), m = B.size();
  if (n == 0 || m == 0) return 0;

  std::vector<std::int32_t> stored(m + 1, 0);
  std::int32_t tail_value = 0;
  std::size_t tail_pos = m + 1;  // inactive
  auto truev = [&](std::size_t p) {
    return p >= tail_pos ? std::max(stored[p], tail_value) : stored[p];
  };

  std::size_t jlo = 0, jhi = 0;
  std::vector<std::int32_t> fresh;
  for (std::size_t i = 0; i < n; ++i) {
    const Cue& x = A[i];
    while (jlo < m && shifted(B[jlo], delta).start < x.start_ms - tolerance) ++jlo;
    if (jhi < jlo) jhi = jlo;
    while (jhi < m && shifted(B[jhi], delta).start <= x.start_ms + tolerance) ++jhi;
    if (KeepRows) rows->emplace_back();
    if (jlo >= jhi) continue;  // no compatible cues: row changes nothing

    fresh.assign(jhi - jlo + 1, 0);
    fresh[0] = truev(jlo);
    for (std::size_t p = jlo + 1; p <= jhi; ++p) {
      std::int32_t v = std::max(truev(p), fresh[p - 1 - jlo]);
      if (qualifies(x, B[p - 1], delta, tolerance)) {
        v = std::max(v, truev(p - 1) + 1);
      }
      fresh[p - jlo] = v;
    }
    for (std::size_t p = jlo; p <= jhi; ++p) stored[p] = fresh[p - jlo];
    tail_value = fresh[jhi - jlo];
    tail_pos = jhi + 1;
    if (KeepRows) {
      rows->back().jlo = jlo;
      rows->back().jhi = jhi;
      rows->back().values = fresh;
    }
  }
  return m >= tail_pos ? std::max(stored[m], tail_value) : stored[m];
}

std::size_t count_matches(const SubtitleDocument& a, const SubtitleDocument& b,
                          std::int64_t tolerance, std::int64_t delta) {
  return static_cast<std::size_t>(
      run_band_sweep<false>(a, b, tolerance, delta, nullptr));
}

// F(i, p) reconstructed from the stored band rows.
std::int32_t value_at(const std::vector<BandRow>& rows, std::size_t i, std::size_t p) {
  std::int32_t best_tail = 0;
  while (i > 0) {
    const BandRow& row = rows[i - 1];
    if (row.values.empty() || p < row.jlo) {
      --i;
      continue;
    }
    if (p <= row.jhi) return std::max(row.values[p - row.jlo], best_tail);
    best_tail = std::max(best_tail, row.values.back());
    --i;
  }
  return best_tail;
}

SyncVerdict make_verdict(std::size_t matched, std::size_t na, std::size_t nb,
                         const SyncPolicy& policy, std::int64_t shift) {
  SyncVerdict v;
  v.matched_count = matched;
  const std::size_t denom = std::min(na, nb);
  v.match_fraction = denom == 0 ? 0.0 : static_cast<double>(matched) / denom;
  v.synchronized = denom != 0 && v.match_fraction >= policy.min_match_fraction;
  v.applied_shift_ms = shift;
  return v;
}

}  // namespace

std::vector<CueMatch> match_cues(const SubtitleDocument& a, const SubtitleDocument& b,
                                 std::int64_t tolerance_ms) {
  std::vector<BandRow> rows;
  rows.reserve(a.cues.size());
  std::int32_t cur = run_band_sweep<true>(a, b, tolerance_ms, 0, &rows);

  // Backtrace, preferring to leave the latest cues unmatched so the matches
  // sit as early as possible.
  std::vector<CueMatch> matches;
  matches.reserve(static_cast<std::size_t>(cur));
  std::size_t i = a.cues.size(), p = b.cues.size();
  while (i > 0 && p > 0 && cur > 0) {
    if (value_at(rows, i - 1, p) == cur) {
      --i;
    } else if (value_at(rows, i, p - 1) == cur) {
      --p;
    } else {
      matches.emplace_back(i - 1, p - 1);
      --i;
      --p;
      --cur;
    }
  }
  std::reverse(matches.begin(), matches.end());
  return matches;
}

SyncVerdict check_sync(const SubtitleDocument& a, const SubtitleDocument& b,
                       const SyncPolicy& policy) {
  const std::size_t matched = count_matches(a, b, policy.tolerance_ms, 0);
  return make_verdict(matched, a.cues.size(), b.cues.size(), policy, 0);
}

ShiftRecovery recover_shift(const SubtitleDocument& a, const SubtitleDocument& b,
                            const SyncPolicy& policy) {
  if (a.cues.empty() || b.cues.empty()) {
    throw std::invalid_argument("recover_shift: no candidate offsets for an empty document");
  }
  if (policy.max_shift_ms <= 0 || policy.shift_step_ms <= 0 ||
      policy.shift_step_ms > policy.max_shift_ms) {
    throw std::invalid_argument("recover_shift: invalid shift search policy");
  }

  const std::int64_t step = policy.shift_step_ms;
  const std::int64_t k_max = policy.max_shift_ms / step;  // grid: delta = k*step, |k| <= k_max

  // (count desc, votes desc, |delta| asc, delta asc) — a total order, so the
  // result is independent of candidate evaluation order. The vote count
  // separates the true offset from its within-tolerance neighbors, which all
  // reach the same matched count.
  std::size_t best_count = 0;
  std::uint64_t best_votes = 0;
  std::int64_t best_delta = 0;
  bool have_best = false;
  auto consider = [&](std::int64_t delta, std::uint64_t delta_votes) {
    const std::size_t count = count_matches(a, b, policy.tolerance_ms, delta);
    auto better = [&] {
      if (!have_best) return true;
      if (count != best_count) return count > best_count;
      if (delta_votes != best_votes) return delta_votes > best_votes;
      if (std::llabs(delta) != std::llabs(best_delta)) {
        return std::llabs(delta) < std::llabs(best_delta);
      }
      return delta < best_delta;
    };
    if (better()) {
      best_count = count;
      best_votes = delta_votes;
      best_delta = delta;
      have_best = true;
    }
  };

  if (policy.exhaustive_search) {
    for (std::int64_t k = -k_max; k <= k_max; ++k) consider(k * step, 0);
  } else {
    // Phase 1: every in-range start-time difference votes for a grid
    // bucket.
    const std::size_t buckets = static_cast<std::size_t>(2 * k_max + 1);
    std::vector<std::uint32_t> votes(buckets, 0);
    std::size_t lo = 0, hi = 0;
    for (const Cue& x : a.cues) {
      while (lo < b.cues.size() && b.cues[lo].start_ms < x.start_ms - policy.max_shift_ms) ++lo;
      if (hi < lo) hi = lo;
      while (hi < b.cues.size() && b.cues[hi].start_ms <= x.start_ms + policy.max_shift_ms) ++hi;
      for (std::size_t j = lo; j < hi; ++j) {
        const std::int64_t diff = x.start_ms - b.cues[j].start_ms;
        std::int64_t k = std::llround(static_cast<double>(diff) / static_cast<double>(step));
        k = std::clamp(k, -k_max, k_max);
        ++votes[static_cast<std::size_t>(k + k_max)];
      }
    }

    // A window sum of +-tolerance smooths the histogram so the whole
    // neighborhood of a strong offset survives into phase 2 (any delta that
    // could outscore it lies within tolerance of the dominant bucket).
    const std::int64_t radius = (policy.tolerance_ms + step - 1) / step;
    const std::int64_t nb = static_cast<std::int64_t>(buckets);
    std::vector<std::uint64_t> smoothed(buckets, 0);
    std::uint64_t window = 0;
    for (std::int64_t t = 0; t <= std::min(radius, nb - 1); ++t) window += votes[t];
    for (std::int64_t k = 0; k < nb; ++k) {
      smoothed[k] = window;
      if (k + radius + 1 < nb) window += votes[k + radius + 1];
      if (k - radius >= 0) window -= votes[k - radius];
    }

    // Phase 2: exact-score the top buckets. Keeping at least one full
    // smoothing window makes the voted optimum agree with the exhaustive
    // grid's matched count.
    const std::size_t keep = std::max<std::size_t>(
        static_cast<std::size_t>(std::max(policy.max_candidates, 1)),
        static_cast<std::size_t>(2 * radius + 1));
    std::vector<std::size_t> order;
    order.reserve(buckets);
    for (std::size_t k = 0; k < buckets; ++k) {
      if (smoothed[k] > 0) order.push_back(k);
    }
    auto rank = [&](std::size_t lhs, std::size_t rhs) {
      if (smoothed[lhs] != smoothed[rhs]) return smoothed[lhs] > smoothed[rhs];
      const std::int64_t dl = (static_cast<std::int64_t>(lhs) - k_max) * step;
      const std::int64_t dr = (static_cast<std::int64_t>(rhs) - k_max) * step;
      if (std::llabs(dl) != std::llabs(dr)) return std::llabs(dl) < std::llabs(dr);
      return dl < dr;
    };
    if (order.size() > keep) {
      std::partial_sort(order.begin(), order.begin() + keep, order.end(), rank);
      order.resize(keep);
    } else {
      std::sort(order.begin(), order.end(), rank);
    }
    consider(0, votes[static_cast<std::size_t>(k_max)]);  // baseline
    for (std::size_t k : order) {
      consider((static_cast<std::int64_t>(k) - k_max) * step, votes[k]);
    }
  }

  ShiftRecovery recovery;
  recovery.best_delta_ms = best_delta;
  recovery.verdict =
      make_verdict(best_count, a.cues.size(), b.cues.size(), policy, best_delta);
  return recovery;
}

}  // namespace subpair
