#include <doctest.h>

#include <cstdlib>
#include <random>

#include "generators.hpp"
#include "subpair/sync.hpp"

using namespace subpair;

namespace {

SubtitleDocument doc_from_starts(const std::vector<std::int64_t>& starts,
                                 std::int64_t duration = 1000) {
  SubtitleDocument doc{"en", "vid", {}};
  int index = 1;
  for (std::int64_t s : starts) {
    doc.cues.push_back({index++, s, s + duration, "cue"});
  }
  sort_cues(doc);
  return doc;
}

}  // namespace

TEST_CASE("match_cues: identical documents match fully at zero tolerance") {
  testgen::Rng rng(7);
  const SubtitleDocument doc = testgen::random_document(rng);
  const auto matches = match_cues(doc, doc, 0);
  CHECK(matches.size() == doc.cues.size());
}

TEST_CASE("match_cues: tolerance widens the match set") {
  const SubtitleDocument a = doc_from_starts({1000, 5000});
  const SubtitleDocument b = doc_from_starts({1200, 5000});
  CHECK(match_cues(a, b, 0).size() == 1);
  CHECK(match_cues(a, b, 250).size() == 2);
}

TEST_CASE("match_cues: count is symmetric") {
  testgen::Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const SubtitleDocument a = testgen::random_document(rng);
    const SubtitleDocument b = testgen::corrupt_document(rng, a, 0.3, 0.3);
    std::uniform_int_distribution<std::int64_t> eps(0, 800);
    const std::int64_t tolerance = eps(rng);
    CHECK(match_cues(a, b, tolerance).size() == match_cues(b, a, tolerance).size());
  }
}

TEST_CASE("match_cues: matched count grows with tolerance") {
  testgen::Rng rng(9);
  for (int trial = 0; trial < 400; ++trial) {
    const SubtitleDocument a = testgen::random_document(rng);
    const SubtitleDocument b = testgen::corrupt_document(rng, a, 0.25, 0.25);
    std::uniform_int_distribution<std::int64_t> eps(0, 600);
    std::int64_t e1 = eps(rng), e2 = eps(rng);
    if (e1 > e2) std::swap(e1, e2);
    CHECK(match_cues(a, b, e1).size() <= match_cues(a, b, e2).size());
  }
}

TEST_CASE("match_cues: matching is one-to-one and monotone") {
  testgen::Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const SubtitleDocument a = testgen::random_document(rng);
    const SubtitleDocument b = testgen::corrupt_document(rng, a, 0.2, 0.2);
    const auto matches = match_cues(a, b, 300);
    for (std::size_t k = 1; k < matches.size(); ++k) {
      CHECK(matches[k - 1].first < matches[k].first);
      CHECK(matches[k - 1].second < matches[k].second);
    }
  }
}

TEST_CASE("check_sync: identical documents synchronize") {
  testgen::Rng rng(11);
  const SubtitleDocument doc = testgen::random_document(rng);
  SyncPolicy policy;
  policy.min_match_fraction = 0.9;
  const SyncVerdict verdict = check_sync(doc, doc, policy);
  CHECK(verdict.synchronized);
  CHECK(verdict.match_fraction == doctest::Approx(1.0));
  CHECK(verdict.applied_shift_ms == 0);
}

TEST_CASE("check_sync: disjoint timelines do not synchronize") {
  const SubtitleDocument a = doc_from_starts({1000, 2000, 3000});
  const SubtitleDocument b = doc_from_starts({500000, 600000});
  const SyncVerdict verdict = check_sync(a, b, {});
  CHECK_FALSE(verdict.synchronized);
  CHECK(verdict.match_fraction == doctest::Approx(0.0));
}

TEST_CASE("check_sync: empty documents yield unsynchronized zero fraction") {
  const SubtitleDocument a = doc_from_starts({1000});
  const SubtitleDocument empty{"en", "vid", {}};
  CHECK_FALSE(check_sync(a, empty, {}).synchronized);
  CHECK_FALSE(check_sync(empty, empty, {}).synchronized);
}

TEST_CASE("check_sync: fraction uses the smaller document") {
  // 6 of 10 cues agree; the smaller side has 10.
  std::vector<std::int64_t> starts_a, starts_b;
  for (int i = 0; i < 10; ++i) starts_a.push_back(10000 + i * 5000);
  for (int i = 0; i < 6; ++i) starts_b.push_back(10000 + i * 5000);
  for (int i = 6; i < 10; ++i) starts_b.push_back(10000 + i * 5000 + 2000);
  const SubtitleDocument a = doc_from_starts(starts_a);
  const SubtitleDocument b = doc_from_starts(starts_b);
  SyncPolicy policy;
  policy.min_match_fraction = 0.5;
  const SyncVerdict verdict = check_sync(a, b, policy);
  CHECK(verdict.matched_count == 6);
  CHECK(verdict.match_fraction == doctest::Approx(0.6));
  CHECK(verdict.synchronized);
}

TEST_CASE("recover_shift: exact constant offset is recovered") {
  testgen::Rng rng(12);
  testgen::DocumentOptions opts;
  opts.min_cues = 20;
  opts.first_start_ms = 130000;
  const SubtitleDocument a = testgen::random_document(rng, opts);
  const SubtitleDocument b = shift_document(a, 500).document;
  const ShiftRecovery recovery = recover_shift(a, b, {});
  CHECK(recovery.best_delta_ms == -500);
  CHECK(recovery.verdict.match_fraction == doctest::Approx(1.0));
  CHECK(recovery.verdict.applied_shift_ms == -500);
  CHECK(recovery.verdict.synchronized);
}

TEST_CASE("recover_shift: identical documents prefer zero delta") {
  testgen::Rng rng(13);
  const SubtitleDocument a = testgen::random_document(rng);
  const ShiftRecovery recovery = recover_shift(a, a, {});
  CHECK(recovery.best_delta_ms == 0);
  CHECK(recovery.verdict.match_fraction == doctest::Approx(1.0));
}

TEST_CASE("recover_shift: empty document is an error") {
  const SubtitleDocument a = doc_from_starts({1000});
  const SubtitleDocument empty{"en", "vid", {}};
  CHECK_THROWS_AS(recover_shift(a, empty, {}), std::invalid_argument);
  CHECK_THROWS_AS(recover_shift(empty, a, {}), std::invalid_argument);
}

TEST_CASE("recover_shift: no in-range candidates yields an unsynchronized verdict") {
  const SubtitleDocument a = doc_from_starts({1000});
  const SubtitleDocument b = doc_from_starts({10000000});
  const ShiftRecovery recovery = recover_shift(a, b, {});
  CHECK_FALSE(recovery.verdict.synchronized);
  CHECK(recovery.verdict.matched_count == 0);
}

TEST_CASE("recover_shift: shift then recover inverts the offset") {
  testgen::Rng rng(14);
  SyncPolicy policy;
  for (int trial = 0; trial < 25; ++trial) {
    testgen::DocumentOptions opts;
    opts.min_cues = 10;
    opts.max_cues = 120;
    opts.first_start_ms = 125000;
    const SubtitleDocument a = testgen::random_document(rng, opts);
    std::uniform_int_distribution<std::int64_t> shift(-policy.max_shift_ms,
                                                      policy.max_shift_ms);
    const std::int64_t x = shift(rng);
    const ShiftOutcome shifted = shift_document(a, x);
    REQUIRE(shifted.clamped_cues == 0);
    const ShiftRecovery recovery = recover_shift(a, shifted.document, policy);
    CHECK(std::llabs(recovery.best_delta_ms + x) <=
          std::max(policy.tolerance_ms, policy.shift_step_ms));
    CHECK(recovery.verdict.match_fraction == doctest::Approx(1.0));
  }
}

TEST_CASE("recover_shift: corrupted documents still recover the offset") {
  testgen::Rng rng(15);
  SyncPolicy policy;
  int ok = 0;
  const int trials = 25;
  for (int trial = 0; trial < trials; ++trial) {
    testgen::DocumentOptions opts;
    opts.min_cues = 50;
    opts.max_cues = 300;
    opts.first_start_ms = 125000;
    const SubtitleDocument a = testgen::random_document(rng, opts);
    std::uniform_int_distribution<std::int64_t> shift(-120000, 120000);
    const std::int64_t x = shift(rng);
    const SubtitleDocument b =
        testgen::corrupt_document(rng, shift_document(a, x).document, 0.2, 0.1);
    const ShiftRecovery recovery = recover_shift(a, b, policy);
    if (std::llabs(recovery.best_delta_ms + x) <=
            std::max(policy.tolerance_ms, policy.shift_step_ms) &&
        recovery.verdict.match_fraction >= 0.7) {
      ++ok;
    }
  }
  CHECK(ok >= trials - 1);
}

TEST_CASE("recover_shift: voting matches the exhaustive grid score") {
  testgen::Rng rng(16);
  for (int trial = 0; trial < 8; ++trial) {
    testgen::DocumentOptions opts;
    opts.min_cues = 30;
    opts.max_cues = 90;
    opts.first_start_ms = 125000;
    const SubtitleDocument a = testgen::random_document(rng, opts);
    std::uniform_int_distribution<std::int64_t> shift(-30000, 30000);
    const SubtitleDocument b = testgen::corrupt_document(
        rng, shift_document(a, shift(rng)).document, 0.2, 0.1);
    SyncPolicy voting;
    voting.max_shift_ms = 30000;
    SyncPolicy grid = voting;
    grid.exhaustive_search = true;
    CHECK(recover_shift(a, b, voting).verdict.matched_count ==
          recover_shift(a, b, grid).verdict.matched_count);
  }
}
