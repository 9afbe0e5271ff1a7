#include "subpair/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "subpair/textutil.hpp"

namespace subpair {

std::string CorpusStats::render_ratio(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) return "undefined";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f",
                static_cast<double>(numerator) / static_cast<double>(denominator));
  return buf;
}

std::string CorpusStats::dialogues_per_movie() const {
  return render_ratio(dialogues_count, subtitle_pairs_found);
}
std::string CorpusStats::sentences_per_movie() const {
  return render_ratio(sentence_pairs_count, subtitle_pairs_found);
}
std::string CorpusStats::sentences_per_dialogue() const {
  return render_ratio(sentence_pairs_count, dialogues_count);
}

std::optional<SentencePair> final_clean(const SentencePair& pair) {
  SentencePair cleaned = pair;
  cleaned.source_text = text::collapse_whitespace(pair.source_text);
  cleaned.target_text = text::collapse_whitespace(pair.target_text);
  if (cleaned.source_text.empty() || cleaned.target_text.empty()) return std::nullopt;
  if (!text::has_letter_or_digit(cleaned.source_text) ||
      !text::has_letter_or_digit(cleaned.target_text)) {
    return std::nullopt;  // punctuation-only on either side drops both
  }
  return cleaned;
}

namespace {

class PendingFile {
 public:
  PendingFile(const std::filesystem::path& final_path)
      : final_path_(final_path), tmp_path_(final_path.string() + ".tmp") {
    out_.open(tmp_path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open output file: " + tmp_path_.string());
  }

  ~PendingFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_path_, ec);
    }
  }

  void write_line(const std::string& line) {
    out_ << line << '\n';
    if (!out_) throw std::runtime_error("write failed: " + tmp_path_.string());
  }

  void commit() {
    out_.flush();
    if (!out_) throw std::runtime_error("flush failed: " + tmp_path_.string());
    out_.close();
    std::filesystem::rename(tmp_path_, final_path_);
    committed_ = true;
  }

 private:
  std::filesystem::path final_path_;
  std::filesystem::path tmp_path_;
  std::ofstream out_;
  bool committed_ = false;
};

}  // namespace

CorpusStats emit_corpus(const SentenceSource& pairs, const std::filesystem::path& out_src,
                        const std::filesystem::path& out_dst, const EmitOptions& options) {
  CorpusStats stats;
  PendingFile src_file(out_src);
  PendingFile dst_file(out_dst);
  std::unordered_set<std::string> seen;

  while (auto pair = pairs()) {
    ++stats.sentence_pairs_count;
    std::optional<SentencePair> cleaned = final_clean(*pair);
    if (!cleaned) {
      ++stats.dropped_in_final_clean;
      continue;
    }
    if (options.dedup) {
      // \x1F never occurs in cleaned text, so the key is unambiguous.
      std::string key = cleaned->source_text + '\x1F' + cleaned->target_text;
      if (!seen.insert(std::move(key)).second) {
        ++stats.duplicates_dropped;
        continue;
      }
    }
    src_file.write_line(cleaned->source_text);
    dst_file.write_line(cleaned->target_text);
    ++stats.emitted_lines;
  }

  src_file.commit();
  dst_file.commit();
  return stats;
}

CorpusStats emit_corpus(const std::vector<SentencePair>& pairs,
                        const std::filesystem::path& out_src,
                        const std::filesystem::path& out_dst, const EmitOptions& options) {
  std::size_t i = 0;
  return emit_corpus(
      [&]() -> std::optional<SentencePair> {
        if (i >= pairs.size()) return std::nullopt;
        return pairs[i++];
      },
      out_src, out_dst, options);
}

CorpusStats compute_stats(const StageStore& store) {
  CorpusStats stats;
  stats.movies_considered = static_cast<std::int64_t>(store.count(Stage::catalog));
  stats.subtitle_pairs_found = static_cast<std::int64_t>(store.count(Stage::subtitle_pair));
  stats.dialogues_count = static_cast<std::int64_t>(store.count(Stage::dialogue));
  stats.sentence_pairs_count = static_cast<std::int64_t>(store.count(Stage::sentence));
  return stats;
}

std::string render_stats_table(const CorpusStats& stats,
                               const std::vector<FilterStage>& stages) {
  std::ostringstream os;
  auto row = [&](const std::string& label, const std::string& value) {
    os << "  " << std::left << std::setw(42) << label << std::right << std::setw(14)
       << value << "\n";
  };
  auto count_row = [&](const std::string& label, std::int64_t v) {
    row(label, std::to_string(v));
  };
  auto ratio_row = [&](const std::string& label, std::int64_t num, std::int64_t den) {
    std::string value = den == 0 ? "undefined"
                                 : std::to_string(num) + "/" + std::to_string(den) +
                                       " = " + CorpusStats::render_ratio(num, den);
    row(label, value);
  };

  if (!stages.empty()) {
    os << "Filtered movies\n";
    for (const FilterStage& stage : stages) {
      row(stage.label, std::to_string(stage.count));
    }
    os << "\n";
  }
  os << "Found subtitle pairs\n";
  count_row("subtitle pairs count", stats.subtitle_pairs_found);
  os << "\nFound dialogues\n";
  count_row("synchronous dialogues count", stats.dialogues_count);
  ratio_row("avg dialogues per movie", stats.dialogues_count, stats.subtitle_pairs_found);
  os << "\nFound sentences\n";
  count_row("sentence pairs count", stats.sentence_pairs_count);
  ratio_row("avg sentence pairs per movie", stats.sentence_pairs_count,
            stats.subtitle_pairs_found);
  ratio_row("sentences per dialogue", stats.sentence_pairs_count, stats.dialogues_count);
  if (stats.emitted_lines || stats.dropped_in_final_clean || stats.duplicates_dropped) {
    os << "\nEmitted corpus\n";
    count_row("emitted lines", stats.emitted_lines);
    count_row("dropped in final clean", stats.dropped_in_final_clean);
    if (stats.duplicates_dropped) count_row("duplicates dropped", stats.duplicates_dropped);
  }
  return os.str();
}

nlohmann::json stats_to_json(const CorpusStats& stats) {
  return {
      {"movies_considered", stats.movies_considered},
      {"subtitle_pairs_found", stats.subtitle_pairs_found},
      {"dialogues_count", stats.dialogues_count},
      {"sentence_pairs_count", stats.sentence_pairs_count},
      {"emitted_lines", stats.emitted_lines},
      {"dropped_in_final_clean", stats.dropped_in_final_clean},
      {"duplicates_dropped", stats.duplicates_dropped},
      {"dialogues_per_movie", stats.dialogues_per_movie()},
      {"sentences_per_movie", stats.sentences_per_movie()},
      {"sentences_per_dialogue", stats.sentences_per_dialogue()},
  };
}

}  // namespace subpair
