// Pipeline commands, one per CLI subcommand. Each returns an exit status:
// 0 success, 1 partial (some videos failed), 2 usage/config error.
#pragma once

#include <iostream>
#include <string>

#include "subpair/config.hpp"

namespace subpair {

struct CommandIo {
  std::ostream& out = std::cout;  // summaries
  std::ostream& err = std::cerr;  // diagnostics
  bool porcelain = false;         // machine-readable summaries
};

int cmd_init(const PipelineConfig& config, const std::string& src_lang,
             const std::string& dst_lang, const CommandIo& io);
int cmd_filter(const PipelineConfig& config, const std::string& src_lang,
               const std::string& dst_lang, const CommandIo& io);
int cmd_fetch(const PipelineConfig& config, const std::string& src_lang,
              const std::string& dst_lang, const CommandIo& io);
int cmd_dialogues(const PipelineConfig& config, const std::string& src_lang,
                  const std::string& dst_lang, const CommandIo& io);
int cmd_match(const PipelineConfig& config, const std::string& src_lang,
              const std::string& dst_lang, const CommandIo& io);
int cmd_generate(const PipelineConfig& config, const std::string& src_lang,
                 const std::string& dst_lang, const CommandIo& io);
int cmd_stats(const PipelineConfig& config, const std::string& src_lang,
              const std::string& dst_lang, const CommandIo& io);

// init -> filter -> fetch -> dialogues -> match -> generate, stopping at the
// first fatal (exit 2) error; a partial fetch keeps going and the final
// status reflects it.
int cmd_run(const PipelineConfig& config, const std::string& src_lang,
            const std::string& dst_lang, const CommandIo& io);

}  // namespace subpair
