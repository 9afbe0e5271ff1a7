// subpair command line: one subcommand per pipeline step plus `run`.
#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "subpair/pipeline.hpp"

namespace {

struct GlobalFlags {
  std::string config_path;
  std::string data_root;
  std::string catalog_path;
  std::optional<int> jobs;
  std::optional<unsigned long long> seed;
  std::optional<std::int64_t> sync_tolerance_ms;
  std::optional<double> sync_min_fraction;
  std::optional<std::int64_t> max_shift_ms;
  std::optional<std::int64_t> shift_step_ms;
  std::optional<int> budget;
  bool no_shift = false;
  bool porcelain = false;
};

subpair::PipelineConfig build_config(const GlobalFlags& flags) {
  subpair::PipelineConfig config;
  if (!flags.config_path.empty()) {
    config = subpair::load_config(flags.config_path);
  }
  if (!flags.data_root.empty()) config.data_root = flags.data_root;
  if (!flags.catalog_path.empty()) config.catalog_path = flags.catalog_path;
  if (flags.jobs) config.jobs = *flags.jobs;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.budget) config.budget = *flags.budget;
  if (flags.sync_tolerance_ms) config.sync.tolerance_ms = *flags.sync_tolerance_ms;
  if (flags.sync_min_fraction) config.sync.min_match_fraction = *flags.sync_min_fraction;
  if (flags.max_shift_ms) config.sync.max_shift_ms = *flags.max_shift_ms;
  if (flags.shift_step_ms) config.sync.shift_step_ms = *flags.shift_step_ms;
  if (flags.no_shift) config.sync.shift_enabled = false;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subpair - builds line-aligned parallel corpora from movie subtitles"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "Configuration file (JSON)");
  app.add_option("--data-root", flags.data_root, "Stage store root directory");
  app.add_option("--jobs", flags.jobs, "Concurrent videos in the fetch stage");
  app.add_option("--seed", flags.seed, "Seed for randomized providers");
  app.add_option("--budget", flags.budget, "Max candidate combinations per video");
  app.add_option("--sync-tolerance-ms", flags.sync_tolerance_ms,
                 "Max cue timing discrepancy to count as matched");
  app.add_option("--sync-min-fraction", flags.sync_min_fraction,
                 "Matched fraction required to declare synchronization");
  app.add_option("--max-shift-ms", flags.max_shift_ms, "Offset search half-range");
  app.add_option("--shift-step-ms", flags.shift_step_ms, "Offset search granularity");
  app.add_flag("--no-shift", flags.no_shift,
               "Disable offset recovery (exact-timing matches only)");
  app.add_flag("--porcelain", flags.porcelain, "Machine-readable summaries on stdout");

  struct Sub {
    CLI::App* cmd;
    std::string src, dst;
    int (*fn)(const subpair::PipelineConfig&, const std::string&, const std::string&,
              const subpair::CommandIo&);
  };
  std::vector<Sub> subs;
  subs.reserve(8);  // CLI11 keeps pointers into Sub fields
  auto add = [&](const char* name, const char* help, auto fn) {
    CLI::App* cmd = app.add_subcommand(name, help);
    subs.push_back({cmd, "", "", fn});
    Sub& sub = subs.back();
    cmd->add_option("src_lang", sub.src, "Source language (alpha-2)")->required();
    cmd->add_option("dst_lang", sub.dst, "Target language (alpha-2)")->required();
    return cmd;
  };

  add("init", "Ingest the movie catalog into the stage store", subpair::cmd_init)
      ->add_option("--catalog", flags.catalog_path, "Catalog file (overrides config)");
  add("filter", "Show how many movies survive each filter", subpair::cmd_filter);
  add("fetch", "Find and store one synchronized subtitle pair per movie",
      subpair::cmd_fetch);
  add("dialogues", "Extract cleaned dialogue pairs from stored subtitle pairs",
      subpair::cmd_dialogues);
  add("match", "Derive sentence pairs from stored dialogues", subpair::cmd_match);
  add("generate", "Emit the aligned corpus files and statistics", subpair::cmd_generate);
  add("stats", "Print pipeline statistics", subpair::cmd_stats);
  add("run", "Run the whole pipeline", subpair::cmd_run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  subpair::CommandIo io{std::cout, std::cerr, flags.porcelain};
  try {
    for (const Sub& sub : subs) {
      if (sub.cmd->parsed()) {
        return sub.fn(build_config(flags), sub.src, sub.dst, io);
      }
    }
  } catch (const subpair::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
