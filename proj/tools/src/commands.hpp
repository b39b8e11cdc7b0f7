// One function per subcommand; all throw ConfigError for input problems and
// let other exceptions surface as runtime failures.
#pragma once

#include <string>

#include "config.hpp"

namespace ranslice::cli {

// Prints the slice-type catalog, or exports it when out_file is set.
int cmd_catalog(const ToolConfig& cfg, const std::string& out_dir, const std::string& out_file);

// Writes scenario manifests (ids from config, or 0..count-1) and, when asked,
// their channel traces for the first grid_episodes episodes.
int cmd_gen(const ToolConfig& cfg, const std::string& out_dir, int count, bool grids,
            int grid_episodes);

// Runs the training protocol; finetune additionally loads base_checkpoint.
int cmd_train(const ToolConfig& cfg, const std::string& out_dir, bool finetune_mode);

// Deterministic evaluation of one controller over the test episode range.
int cmd_eval(const ToolConfig& cfg, const std::string& out_dir);

// Evaluates a set of controllers on the same episodes and writes combined
// summary tables.
int cmd_compare(const ToolConfig& cfg, const std::string& out_dir);

// Offered-load analysis for a single scenario.
int cmd_demand(const ToolConfig& cfg, const std::string& out_dir, int episode);

}  // namespace ranslice::cli
