#include "subpair/pipeline.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "subpair/corpus.hpp"
#include "subpair/provider.hpp"
#include "subpair/store.hpp"

namespace subpair {

namespace {

using nlohmann::json;

std::string make_run_id() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::time(nullptr);
  }
  return "run-" + std::to_string(t);
}

bool check_langs(const std::string& src, const std::string& dst, const CommandIo& io) {
  if (!is_alpha2(src) || !is_alpha2(dst)) {
    io.err << "error: language codes must be lowercase alpha-2 (got \"" << src
           << "\" and \"" << dst << "\")\n";
    return false;
  }
  return true;
}

json movie_to_json(const MovieRecord& r) {
  json j = {{"id", r.id}, {"title", r.title}};
  if (r.year) j["year"] = *r.year;
  if (r.media_type) j["type"] = *r.media_type;
  if (r.rating) j["rating"] = *r.rating;
  if (r.rating_count) j["rating_count"] = *r.rating_count;
  if (r.duration_s) j["duration_s"] = *r.duration_s;
  if (!r.genres.empty()) j["genres"] = r.genres;
  return j;
}

MovieRecord movie_from_json(const json& j) {
  MovieRecord r;
  r.id = j.value("id", "");
  r.title = j.value("title", "");
  if (j.contains("year")) r.year = j["year"].get<int>();
  if (j.contains("type")) r.media_type = j["type"].get<std::string>();
  if (j.contains("rating")) r.rating = j["rating"].get<double>();
  if (j.contains("rating_count")) r.rating_count = j["rating_count"].get<std::int64_t>();
  if (j.contains("duration_s")) r.duration_s = j["duration_s"].get<std::int64_t>();
  if (j.contains("genres")) {
    for (const auto& g : j["genres"]) r.genres.insert(g.get<std::string>());
  }
  return r;
}

json document_to_json(const SubtitleDocument& doc) {
  json cues = json::array();
  for (const Cue& cue : doc.cues) {
    cues.push_back({cue.start_ms, cue.end_ms, cue.text});
  }
  return {{"language", doc.language}, {"cues", std::move(cues)}};
}

SubtitleDocument document_from_json(const json& j, const std::string& video_id) {
  SubtitleDocument doc;
  doc.language = j.value("language", "");
  doc.video_id = video_id;
  int index = 1;
  for (const auto& cue : j.at("cues")) {
    doc.cues.push_back({index++, cue.at(0).get<std::int64_t>(),
                        cue.at(1).get<std::int64_t>(), cue.at(2).get<std::string>()});
  }
  sort_cues(doc);
  return doc;
}

std::unique_ptr<SubtitleProvider> make_provider(const PipelineConfig& config) {
  if (config.provider_kind == "remote") {
    return make_remote_provider(config.remote);
  }
  return make_local_provider(config.provider_root);
}

// Shared guard: configuration and fatal storage problems map to exit 2.
template <typename Fn>
int guarded(const CommandIo& io, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return 2;
  }
}

std::vector<MovieRecord> catalog_from_store(const StageStore& store) {
  std::vector<MovieRecord> records;
  for (const StageRecord& record : store.read_all(Stage::catalog)) {
    records.push_back(movie_from_json(record.payload));
  }
  return records;
}

// The filter preview works off the ingested stage when present so it sees
// exactly what fetch will see; otherwise it reads the raw catalog file.
std::vector<MovieRecord> catalog_for_filter(const PipelineConfig& config,
                                            const StageStore& store) {
  if (store.stage_exists(Stage::catalog)) return catalog_from_store(store);
  if (config.catalog_path.empty()) {
    throw ConfigError("no catalog available: run init first or set catalog.path");
  }
  return load_catalog(config.catalog_path, config.mapping).records;
}

}  // namespace

int cmd_init(const PipelineConfig& config, const std::string& src_lang,
             const std::string& dst_lang, const CommandIo& io) {
  if (!check_langs(src_lang, dst_lang, io)) return 2;
  return guarded(io, [&] {
    if (config.catalog_path.empty()) {
      throw ConfigError("no catalog path configured (set catalog.path or pass --catalog)");
    }
    const CatalogLoad load = load_catalog(config.catalog_path, config.mapping);
    StageStore store(config.data_root, src_lang, dst_lang);
    StageStore::Writer writer =
        store.open_writer(Stage::catalog, /*truncate=*/true, make_run_id());
    for (const MovieRecord& record : load.records) writer.append(movie_to_json(record));
    writer.flush();
    if (io.porcelain) {
      io.out << "init\trecords=" << load.records.size() << "\tskipped=" << load.skipped
             << "\n";
    } else {
      io.out << "Loaded " << load.records.size() << " catalog records ("
             << load.skipped << " skipped)\n";
    }
    return 0;
  });
}

int cmd_filter(const PipelineConfig& config, const std::string& src_lang,
               const std::string& dst_lang, const CommandIo& io) {
  if (!check_langs(src_lang, dst_lang, io)) return 2;
  return guarded(io, [&] {
    StageStore store(config.data_root, src_lang, dst_lang);
    const std::vector<MovieRecord> records = catalog_for_filter(config, store);
    const std::vector<FilterStage> stages = filter_report(records, config.filter);
    if (io.porcelain) {
      for (const FilterStage& stage : stages) {
        io.out << "filter\tstage=" << stage.label << "\tcount=" << stage.count << "\n";
      }
    } else {
      std::size_t width = 0;
      for (const FilterStage& stage : stages) width = std::max(width, stage.label.size());
      for (const FilterStage& stage : stages) {
        io.out << "  " << std::left << std::setw(static_cast<int>(width) + 2)
               << stage.label << std::right << std::setw(10) << stage.count << "\n";
      }
    }
    return 0;
  });
}

int cmd_fetch(const PipelineConfig& config, const std::string& src_lang,
              const std::string& dst_lang, const CommandIo& io) {
  if (!check_langs(src_lang, dst_lang, io)) return 2;
  return guarded(io, [&] {
    StageStore store(config.data_root, src_lang, dst_lang);
    if (!store.stage_exists(Stage::catalog)) {
      throw ConfigError("catalog stage missing: run init first");
    }
    const std::vector<MovieRecord> filtered =
        apply_filter(catalog_from_store(store), config.filter);

    // Resume: videos with a stored pair are done for good.
    std::set<std::string> done;
    if (store.stage_exists(Stage::subtitle_pair)) {
      for (const StageRecord& record : store.read_all(Stage::subtitle_pair)) {
        done.insert(record.payload.value("video_id", ""));
      }
    }

    std::vector<MovieRecord> todo;
    for (const MovieRecord& video : filtered) {
      if (done.count(video.id)) continue;
      todo.push_back(video);
    }
    const std::size_t resumed = filtered.size() - todo.size();
    if (resumed > 0 && !io.porcelain) {
      io.err << "resuming: " << resumed << " video(s) already fetched\n";
    }

    StageStore::Writer writer =
        store.open_writer(Stage::subtitle_pair, /*truncate=*/false, make_run_id());
    std::unique_ptr<SubtitleProvider> provider = make_provider(config);

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> found{0}, failed{0};
    std::mutex sink_mutex;  // guards writer and io.err

    auto worker = [&] {
      for (;;) {
        const std::size_t idx = next.fetch_add(1);
        if (idx >= todo.size()) return;
        const MovieRecord& video = todo[idx];
        std::ostringstream log;
        SearchOptions options;
        options.parse = config.parse_options;
        options.budget = config.budget;
        options.log = &log;
        try {
          std::optional<PairResult> result = find_synchronized_pair(
              video, src_lang, dst_lang, *provider, config.sync, options);
          std::lock_guard lock(sink_mutex);
          io.err << log.str();
          if (result) {
            writer.append({
                {"video_id", video.id},
                {"verdict",
                 {{"matched", result->verdict.matched_count},
                  {"fraction", result->verdict.match_fraction},
                  {"shift_ms", result->verdict.applied_shift_ms}}},
                {"source", document_to_json(result->source)},
                {"target", document_to_json(result->target)},
            });
            found.fetch_add(1);
          } else {
            io.err << video.id << ": no synchronized subtitle pair\n";
          }
        } catch (const std::exception& e) {
          std::lock_guard lock(sink_mutex);
          io.err << log.str();
          io.err << video.id << ": failed: " << e.what() << "\n";
          failed.fetch_add(1);
        }
      }
    };

    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(config.jobs, todo.size()));
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w + 1 < workers; ++w) threads.emplace_back(worker);
    worker();
    for (std::thread& t : threads) t.join();
    writer.flush();

    if (io.porcelain) {
      io.out << "fetch\tvideos=" << filtered.size() << "\tpairs="
             << found.load() + resumed << "\tresumed=" << resumed
             << "\tfailed=" << failed.load() << "\n";
    } else {
      io.out << "Found " << found.load() + resumed << " subtitle pairs of "
             << filtered.size() << " videos (" << failed.load() << " failed)\n";
    }
    return failed.load() > 0 ? 1 : 0;
  });
}

int cmd_dialogues(const PipelineConfig& config, const std::string& src_lang,
                  const std::string& dst_lang, const CommandIo& io) {
  if (!check_langs(src_lang, dst_lang, io)) return 2;
  return guarded(io, [&] {
    StageStore store(config.data_root, src_lang, dst_lang);
    std::vector<StageRecord> pairs = store.read_all(Stage::subtitle_pair);
    // Fetch workers append in completion order; sort for determinism.
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const StageRecord& a, const StageRecord& b) {
                       return a.payload.value("video_id", "") <
                              b.payload.value("video_id", "");
                     });

    StageStore::Writer writer =
        store.open_writer(Stage::dialogue, /*truncate=*/true, make_run_id());
    std::uint64_t emitted = 0;
    for (const StageRecord& record : pairs) {
      const std::string video_id = record.payload.value("video_id", "");
      const SubtitleDocument source =
          document_from_json(record.payload.at("source"), video_id);
      const SubtitleDocument target =
          document_from_json(record.payload.at("target"), video_id);
      const std::vector<CueMatch> matching =
          match_cues(source, target, config.sync.tolerance_ms);
      for (const DialoguePair& pair :
           pair_dialogues(source, target, matching, config.cleaning)) {
        writer.append({
            {"video_id", pair.video_id},
            {"start_ms", pair.start_ms},
            {"end_ms", pair.end_ms},
            {"source_text", pair.source_text},
            {"target_text", pair.target_text},
        });
        ++emitted;
      }
    }
    writer.flush();
    if (io.porcelain) {
      io.out << "dialogues\tpairs=" << emitted << "\n";
    } else {
      io.out << "Extracted " << emitted << " dialogue pairs from " << pairs.size()
             << " subtitle pairs\n";
    }
    return 0;
  });
}

int cmd_match(const PipelineConfig& config, const std::string& src_lang,
              const std::string& dst_lang, const CommandIo& io) {
  if (!check_langs(src_lang, dst_lang, io)) return 2;
  return guarded(io, [&] {
    StageStore store(config.data_root, src_lang, dst_lang);
    StageStore::Reader reader = store.open_reader(Stage::dialogue);
    StageStore::Writer writer =
        store.open_writer(Stage::sentence, /*truncate=*/true, make_run_id());
    std::uint64_t dialogues = 0, emitted = 0;
    while (auto record = reader.next()) {
      ++dialogues;
      DialoguePair pair;
      pair.video_id = record->payload.value("video_id", "");
      pair.start_ms = record->payload.value("start_ms", std::int64_t{0});
      pair.end_ms = record->payload.value("end_ms", std::int64_t{0});
      pair.source_text = record->payload.value("source_text", "");
      pair.target_text = record->payload.value("target_text", "");
      pair.source_lang = src_lang;
      pair.target_lang = dst_lang;
      for (const SentencePair& sp : match_sentences(pair, config.split)) {
        writer.append({
            {"video_id", sp.video_id},
            {"source_text", sp.source_text},
            {"target_text", sp.target_text},
            {"start_ms", sp.dialogue_start_ms},
            {"ordinal", sp.ordinal},
        });
        ++emitted;
      }
    }
    writer.flush();
    if (io.porcelain) {
      io.out << "match\tsentences=" << emitted << "\n";
    } else {
      io.out << "Matched " << emitted << " sentence pairs from " << dialogues
             << " dialogues\n";
    }
    return 0;
  });
}

int cmd_generate(const PipelineConfig& config, const std::string& src_lang,
                 const std::string& dst_lang, const CommandIo& io) {
  if (!check_langs(src_lang, dst_lang, io)) return 2;
  return guarded(io, [&] {
    StageStore store(config.data_root, src_lang, dst_lang);
    const std::filesystem::path out_dir = config.output_dir.value_or(store.pair_dir());
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path out_src = out_dir / (config.output_prefix + "." + src_lang);
    const std::filesystem::path out_dst = out_dir / (config.output_prefix + "." + dst_lang);

    StageStore::Reader reader = store.open_reader(Stage::sentence);
    SentenceSource source = [&]() -> std::optional<SentencePair> {
      auto record = reader.next();
      if (!record) return std::nullopt;
      SentencePair sp;
      sp.video_id = record->payload.value("video_id", "");
      sp.source_text = record->payload.value("source_text", "");
      sp.target_text = record->payload.value("target_text", "");
      sp.dialogue_start_ms = record->payload.value("start_ms", std::int64_t{0});
      sp.ordinal = record->payload.value("ordinal", 0);
      return sp;
    };

    EmitOptions options;
    options.dedup = config.dedup;
    const CorpusStats emitted = emit_corpus(source, out_src, out_dst, options);

    CorpusStats stats = compute_stats(store);
    stats.emitted_lines = emitted.emitted_lines;
    stats.dropped_in_final_clean = emitted.dropped_in_final_clean;
    stats.duplicates_dropped = emitted.duplicates_dropped;

    if (io.porcelain) {
      io.out << "generate\temitted=" << stats.emitted_lines << "\tdropped="
             << stats.dropped_in_final_clean << "\tduplicates="
             << stats.duplicates_dropped << "\tsrc=" << out_src.string()
             << "\tdst=" << out_dst.string() << "\n";
    } else {
      io.out << "Wrote " << stats.emitted_lines << " aligned lines to "
             << out_src.string() << " and " << out_dst.string() << " ("
             << stats.dropped_in_final_clean << " dropped)\n";
    }
    return 0;
  });
}

int cmd_stats(const PipelineConfig& config, const std::string& src_lang,
              const std::string& dst_lang, const CommandIo& io) {
  if (!check_langs(src_lang, dst_lang, io)) return 2;
  return guarded(io, [&] {
    StageStore store(config.data_root, src_lang, dst_lang);
    const CorpusStats stats = compute_stats(store);
    std::vector<FilterStage> stages;
    if (store.stage_exists(Stage::catalog)) {
      stages = filter_report(catalog_from_store(store), config.filter);
    }
    if (io.porcelain) {
      json doc = stats_to_json(stats);
      json breakdown = json::array();
      for (const FilterStage& stage : stages) {
        breakdown.push_back({{"stage", stage.label}, {"count", stage.count}});
      }
      doc["filter_stages"] = std::move(breakdown);
      io.out << doc.dump() << "\n";
    } else {
      io.out << render_stats_table(stats, stages);
    }
    return 0;
  });
}

int cmd_run(const PipelineConfig& config, const std::string& src_lang,
            const std::string& dst_lang, const CommandIo& io) {
  int worst = 0;
  for (auto step : {cmd_init, cmd_filter, cmd_fetch, cmd_dialogues, cmd_match,
                    cmd_generate}) {
    const int code = step(config, src_lang, dst_lang, io);
    if (code == 2) return 2;  // fatal stops the pipeline
    worst = std::max(worst, code);
  }
  return worst;
}

}  // namespace subpair
