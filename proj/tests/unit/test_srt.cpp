#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "subpair/srt.hpp"

using namespace subpair;

TEST_CASE("parse_srt: empty input yields an empty document") {
  ParseResult result = parse_srt("", "en", "vid");
  CHECK(result.document.cues.empty());
  CHECK(result.diagnostics.empty());
}

TEST_CASE("parse_srt: single well-formed block") {
  ParseResult result = parse_srt("1\n00:00:01,000 --> 00:00:02,500\nHello\n\n", "en", "vid");
  REQUIRE(result.document.cues.size() == 1);
  const Cue& cue = result.document.cues[0];
  CHECK(cue.index == 1);
  CHECK(cue.start_ms == 1000);
  CHECK(cue.end_ms == 2500);
  CHECK(cue.text == "Hello");
  CHECK(result.diagnostics.empty());
}

TEST_CASE("parse_srt: reversed timestamps drop the cue with a diagnostic") {
  ParseResult result =
      parse_srt("1\n00:00:02,500 --> 00:00:01,000\nHello\n\n", "en", "vid");
  CHECK(result.document.cues.empty());
  REQUIRE(result.diagnostics.size() == 1);
  CHECK(result.diagnostics[0].line == 2);
}

TEST_CASE("parse_srt: multi-line text, CRLF and dot separator") {
  const std::string input =
      "1\r\n00:00:01.000 --> 00:00:02.500\r\nline one\r\nline two\r\n\r\n";
  ParseResult result = parse_srt(input, "en", "vid");
  REQUIRE(result.document.cues.size() == 1);
  CHECK(result.document.cues[0].text == "line one\nline two");
}

TEST_CASE("parse_srt: BOM is tolerated") {
  ParseResult result =
      parse_srt("\xEF\xBB\xBF" "1\n00:00:00,100 --> 00:00:00,200\nx\n\n", "en", "vid");
  CHECK(result.document.cues.size() == 1);
}

TEST_CASE("parse_srt: hours may exceed two digits") {
  ParseResult result = parse_srt("1\n100:00:00,000 --> 100:00:01,000\nx\n\n", "en", "vid");
  REQUIRE(result.document.cues.size() == 1);
  CHECK(result.document.cues[0].start_ms == 100LL * 3600 * 1000);
}

TEST_CASE("parse_srt: malformed blocks are skipped, later blocks survive") {
  const std::string input =
      "garbage\nstill garbage\n\n"
      "1\nnot a timing line\ntext\n\n"
      "2\n00:00:05,000 --> 00:00:06,000\nok\n\n"
      "3\n00:00:07,000 --> 00:00:08,000\n\n";  // no text
  ParseResult result = parse_srt(input, "en", "vid");
  REQUIRE(result.document.cues.size() == 1);
  CHECK(result.document.cues[0].text == "ok");
  CHECK(result.diagnostics.size() == 3);
}

TEST_CASE("parse_srt: cues are re-sorted into timing order") {
  const std::string input =
      "1\n00:00:10,000 --> 00:00:11,000\nsecond\n\n"
      "2\n00:00:01,000 --> 00:00:02,000\nfirst\n\n";
  ParseResult result = parse_srt(input, "en", "vid");
  REQUIRE(result.document.cues.size() == 2);
  CHECK(result.document.cues[0].text == "first");
  CHECK(result.document.cues[1].text == "second");
}

TEST_CASE("parse_srt: invalid language code is rejected") {
  CHECK_THROWS_AS(parse_srt("", "EN", "vid"), std::invalid_argument);
  CHECK_THROWS_AS(parse_srt("", "eng", "vid"), std::invalid_argument);
}

TEST_CASE("parse_srt: undecodable bytes raise EncodingError with the offset") {
  const std::string input = "1\n00:00:01,000 --> 00:00:02,000\nbad \xFF byte\n\n";
  try {
    parse_srt(input, "en", "vid");
    FAIL("expected EncodingError");
  } catch (const EncodingError& e) {
    CHECK(e.offset() == input.find('\xFF'));
  }
}

TEST_CASE("parse_srt: windows-1252 fallback") {
  ParseOptions options;
  options.fallback = FallbackEncoding::windows1252;
  // 0x93/0x94 are curly quotes in cp1252
  const std::string input = "1\n00:00:01,000 --> 00:00:02,000\n\x93ok\x94\n\n";
  ParseResult result = parse_srt(input, "en", "vid", options);
  REQUIRE(result.document.cues.size() == 1);
  CHECK(result.document.cues[0].text == "“ok”");
}

TEST_CASE("parse_srt: windows-1256 fallback decodes Persian text") {
  ParseOptions options;
  options.fallback = FallbackEncoding::windows1256;
  // 0xD3 0xE1 0xC7 0xE3 = "سلام" in cp1256
  const std::string input = "1\n00:00:01,000 --> 00:00:02,000\n\xD3\xE1\xC7\xE3\n\n";
  ParseResult result = parse_srt(input, "fa", "vid", options);
  REQUIRE(result.document.cues.size() == 1);
  CHECK(result.document.cues[0].text == "سلام");
}

TEST_CASE("parse_srt: valid UTF-8 is untouched by the fallback switch") {
  ParseOptions options;
  options.fallback = FallbackEncoding::windows1256;
  ParseResult result =
      parse_srt("1\n00:00:01,000 --> 00:00:02,000\nhé\n\n", "en", "vid", options);
  REQUIRE(result.document.cues.size() == 1);
  CHECK(result.document.cues[0].text == "hé");
}

TEST_CASE("serialize_srt: empty document yields empty bytes") {
  CHECK(serialize_srt({"en", "vid", {}}) == "");
}

TEST_CASE("serialize_srt: canonical block form") {
  SubtitleDocument doc{"en", "vid", {{1, 1000, 2500, "Hello"}}};
  CHECK(serialize_srt(doc) == "1\n00:00:01,000 --> 00:00:02,500\nHello\n\n");
}

TEST_CASE("serialize_srt: blocks renumbered from one") {
  SubtitleDocument doc{"en", "vid", {{7, 0, 1, "a"}, {9, 2, 3, "b"}}};
  const std::string bytes = serialize_srt(doc);
  CHECK(bytes.substr(0, 2) == "1\n");
  CHECK(bytes.find("\n2\n") != std::string::npos);
}

TEST_CASE("round-trip: parse(serialize(doc)) preserves cues") {
  testgen::Rng rng(20240811);
  for (int trial = 0; trial < 200; ++trial) {
    const SubtitleDocument doc = testgen::random_document(rng);
    const ParseResult reparsed = parse_srt(serialize_srt(doc), "en", "vid");
    CHECK(reparsed.diagnostics.empty());
    CHECK(testgen::same_cues(doc, reparsed.document));
  }
}

TEST_CASE("shift_document: zero delta is identity") {
  testgen::Rng rng(1);
  const SubtitleDocument doc = testgen::random_document(rng);
  const ShiftOutcome outcome = shift_document(doc, 0);
  CHECK(outcome.document == doc);
  CHECK(outcome.clamped_cues == 0);
}

TEST_CASE("shift_document: positive delta moves both ends") {
  SubtitleDocument doc{"en", "vid", {{1, 1000, 2500, "x"}}};
  const ShiftOutcome outcome = shift_document(doc, 500);
  CHECK(outcome.document.cues[0].start_ms == 1500);
  CHECK(outcome.document.cues[0].end_ms == 3000);
}

TEST_CASE("shift_document: negative starts clamp to zero and are counted") {
  SubtitleDocument doc{"en", "vid", {{1, 100, 900, "x"}}};
  const ShiftOutcome outcome = shift_document(doc, -500);
  CHECK(outcome.document.cues[0].start_ms == 0);
  CHECK(outcome.document.cues[0].end_ms == 400);
  CHECK(outcome.clamped_cues == 1);
}

TEST_CASE("shift_document: shifting back is identity when nothing clamps") {
  testgen::Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    testgen::DocumentOptions opts;
    opts.first_start_ms = 10000;
    const SubtitleDocument doc = testgen::random_document(rng, opts);
    std::uniform_int_distribution<std::int64_t> delta(-9000, 9000);
    const std::int64_t d = delta(rng);
    const ShiftOutcome there = shift_document(doc, d);
    REQUIRE(there.clamped_cues == 0);
    CHECK(shift_document(there.document, -d).document == doc);
  }
}
