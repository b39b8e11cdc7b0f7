// Run configuration for the command-line tool: a versioned JSON schema with
// strict key checking, plus flag overrides applied after parsing.
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranslice/channel.hpp"
#include "ranslice/ppo.hpp"
#include "ranslice/scenario.hpp"

namespace ranslice::cli {

// Configuration problems exit with code 2; runtime failures with 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ToolConfig {
  std::uint64_t seed = 1;
  int workers = 0;  // 0 means all available cores
  std::string output_dir;
  std::string catalog_path;

  ChannelParams channel;
  PPOConfig ppo;

  // Scenario sourcing: load manifests, or generate ids from seed + catalog.
  std::vector<std::string> scenario_paths;
  std::vector<std::int64_t> scenario_ids;
  int min_slices = kMinSlices;
  int max_slices = kMaxSlices;

  // Experiment protocol knobs shared by train/finetune/eval/compare.
  std::string controller = "proposed";
  std::vector<std::string> controllers;  // compare set; empty means all
  int epochs = 1;
  int episodes_train = 6;
  int episodes_val = 2;
  int episodes_test = 2;
  int steps = 1000;
  int val_every = 10;
  std::uint64_t max_env_steps = 0;
  bool overfit = false;
  std::uint64_t eval_seed = 9001;
  int episodes = 0;           // eval episode count; 0 falls back to episodes_test
  int first_episode_id = -1;  // -1 derives the test range from the split
  std::string checkpoint;
  std::string base_checkpoint;
  std::map<std::string, std::string> checkpoints;  // per-controller, compare
  bool step_csv = false;
};

// Parses and validates a config file; throws ConfigError on any schema or
// value problem, including keys the schema does not define.
ToolConfig load_tool_config(const std::string& path);

// Final output directory: flag beats RANSLICE_OUTPUT_ROOT beats config.
std::string resolve_output_dir(const std::string& flag_value, const ToolConfig& cfg);

}  // namespace ranslice::cli
