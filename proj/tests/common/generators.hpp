// Randomized fixtures shared by the unit and acceptance suites.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "subpair/srt.hpp"

namespace testgen {

using Rng = std::mt19937_64;

inline std::string random_text_line(Rng& rng) {
  static const std::vector<std::string> words = {
      "hello", "there", "stop", "now", "go",   "what", "why",  "tomorrow",
      "نه",    "آره",   "خوب", "برو", "بیا",  "Ça",   "über", "сейчас",
  };
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::string line;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    if (i) line += ' ';
    line += words[pick(rng)];
  }
  return line;
}

// Cue text: 1-3 non-blank lines without CR/LF or whitespace-only lines, so
// the document serializes and re-parses losslessly.
inline std::string random_cue_text(Rng& rng) {
  std::uniform_int_distribution<int> lines(1, 3);
  std::string text;
  const int n = lines(rng);
  for (int i = 0; i < n; ++i) {
    if (i) text += '\n';
    text += random_text_line(rng);
  }
  return text;
}

struct DocumentOptions {
  std::size_t min_cues = 1;
  std::size_t max_cues = 80;
  std::int64_t first_start_ms = 0;
  std::int64_t max_gap_ms = 5000;
  std::int64_t min_duration_ms = 500;
  std::int64_t max_duration_ms = 4000;
};

inline subpair::SubtitleDocument random_document(Rng& rng, const DocumentOptions& opts = {},
                                                 std::string language = "en",
                                                 std::string video_id = "vid") {
  std::uniform_int_distribution<std::size_t> cue_count(opts.min_cues, opts.max_cues);
  std::uniform_int_distribution<std::int64_t> gap(200, opts.max_gap_ms);
  std::uniform_int_distribution<std::int64_t> duration(opts.min_duration_ms,
                                                       opts.max_duration_ms);
  subpair::SubtitleDocument doc;
  doc.language = std::move(language);
  doc.video_id = std::move(video_id);
  std::int64_t t = opts.first_start_ms;
  const std::size_t n = cue_count(rng);
  for (std::size_t i = 0; i < n; ++i) {
    subpair::Cue cue;
    cue.index = static_cast<int>(i + 1);
    cue.start_ms = t;
    cue.end_ms = t + duration(rng);
    cue.text = random_cue_text(rng);
    doc.cues.push_back(std::move(cue));
    t = doc.cues.back().end_ms + gap(rng);
  }
  return doc;
}

// Deletes `delete_fraction` of the cues and inserts `insert_fraction`
// extras at random in-range times; re-sorts to keep the invariant.
inline subpair::SubtitleDocument corrupt_document(Rng& rng, const subpair::SubtitleDocument& doc,
                                                  double delete_fraction,
                                                  double insert_fraction) {
  subpair::SubtitleDocument out;
  out.language = doc.language;
  out.video_id = doc.video_id;
  std::bernoulli_distribution drop(delete_fraction);
  for (const subpair::Cue& cue : doc.cues) {
    if (!drop(rng)) out.cues.push_back(cue);
  }
  if (out.cues.empty()) out.cues.push_back(doc.cues.front());
  const std::size_t inserts =
      static_cast<std::size_t>(static_cast<double>(doc.cues.size()) * insert_fraction);
  const std::int64_t span_end = doc.cues.back().end_ms;
  std::uniform_int_distribution<std::int64_t> at(0, std::max<std::int64_t>(span_end, 1));
  std::uniform_int_distribution<std::int64_t> duration(500, 4000);
  for (std::size_t i = 0; i < inserts; ++i) {
    subpair::Cue cue;
    cue.index = static_cast<int>(1000 + i);
    cue.start_ms = at(rng);
    cue.end_ms = cue.start_ms + duration(rng);
    cue.text = random_cue_text(rng);
    out.cues.push_back(std::move(cue));
  }
  subpair::sort_cues(out);
  return out;
}

// start/end/text equality in order, ignoring block numbering.
inline bool same_cues(const subpair::SubtitleDocument& a, const subpair::SubtitleDocument& b) {
  if (a.cues.size() != b.cues.size()) return false;
  for (std::size_t i = 0; i < a.cues.size(); ++i) {
    if (a.cues[i].start_ms != b.cues[i].start_ms || a.cues[i].end_ms != b.cues[i].end_ms ||
        a.cues[i].text != b.cues[i].text) {
      return false;
    }
  }
  return true;
}

}  // namespace testgen
