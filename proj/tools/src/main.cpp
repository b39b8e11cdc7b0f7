// Command-line entry point. Exit codes: 0 success, 1 runtime failure,
// 2 configuration error (bad flags, bad config file, missing inputs).
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace cli = ranslice::cli;

namespace {

// Flag values layered on top of the config file after parsing.
struct Overrides {
  std::string config_path, output, controller, checkpoint, base_checkpoint;
  std::string catalog_path;
  std::vector<std::string> scenario_paths;
  std::vector<std::int64_t> scenario_ids;
  std::uint64_t seed = 0, eval_seed = 0, max_env_steps = 0;
  int steps = 0, epochs = 0, episodes_train = 0, episodes_val = 0, episodes_test = 0;
  int episodes = 0, first_episode_id = -1, workers = -1, val_every = 0;
  bool overfit = false, step_csv = false;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--output", o.output, "output directory");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--catalog", o.catalog_path, "slice-type catalog JSON");
  cmd->add_option("--scenario", o.scenario_paths, "scenario manifest path (repeatable)");
  cmd->add_option("--scenario-id", o.scenario_ids, "scenario id to generate (repeatable)");
  cmd->add_option("--steps", o.steps, "steps per episode");
  cmd->add_option("--workers", o.workers, "parallel workers (0 = all cores)");
}

void add_protocol_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--controller", o.controller, "controller name");
  cmd->add_option("--epochs", o.epochs, "passes over the scenario pool");
  cmd->add_option("--episodes-train", o.episodes_train, "training episodes per scenario");
  cmd->add_option("--episodes-val", o.episodes_val, "validation episodes per scenario");
  cmd->add_option("--episodes-test", o.episodes_test, "test episodes per scenario");
  cmd->add_option("--val-every", o.val_every, "training episodes between validations");
  cmd->add_option("--max-env-steps", o.max_env_steps, "training step budget (0 = none)");
  cmd->add_option("--eval-seed", o.eval_seed, "validation/test traffic seed");
  cmd->add_flag("--overfit", o.overfit, "validate and test on the training episodes");
}

void apply_overrides(const CLI::App* cmd, const Overrides& o, cli::ToolConfig& cfg) {
  auto passed = [&](const std::string& name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (passed("--seed")) cfg.seed = o.seed;
  if (passed("--catalog")) cfg.catalog_path = o.catalog_path;
  if (passed("--scenario")) cfg.scenario_paths = o.scenario_paths;
  if (passed("--scenario-id")) cfg.scenario_ids = o.scenario_ids;
  if (passed("--steps")) cfg.steps = o.steps;
  if (passed("--workers")) cfg.workers = o.workers;
  if (passed("--controller")) cfg.controller = o.controller;
  if (passed("--epochs")) cfg.epochs = o.epochs;
  if (passed("--episodes-train")) cfg.episodes_train = o.episodes_train;
  if (passed("--episodes-val")) cfg.episodes_val = o.episodes_val;
  if (passed("--episodes-test")) cfg.episodes_test = o.episodes_test;
  if (passed("--val-every")) cfg.val_every = o.val_every;
  if (passed("--max-env-steps")) cfg.max_env_steps = o.max_env_steps;
  if (passed("--eval-seed")) cfg.eval_seed = o.eval_seed;
  if (passed("--overfit")) cfg.overfit = o.overfit;
  if (passed("--episodes")) cfg.episodes = o.episodes;
  if (passed("--first-episode")) cfg.first_episode_id = o.first_episode_id;
  if (passed("--checkpoint")) cfg.checkpoint = o.checkpoint;
  if (passed("--base-checkpoint")) cfg.base_checkpoint = o.base_checkpoint;
  if (passed("--step-csv")) cfg.step_csv = o.step_csv;
  if (cfg.steps <= 0 || cfg.workers < 0)
    throw cli::ConfigError("steps must be positive and workers nonnegative");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RAN slicing scheduler: simulation, training, and evaluation"};
  app.require_subcommand(1);

  Overrides o;
  std::string catalog_out;
  int gen_count = 0, grid_episodes = 1, demand_episode = 0;
  bool gen_grids = false;

  CLI::App* c_catalog = app.add_subcommand("catalog", "print or export the slice-type catalog");
  add_common_options(c_catalog, o);
  c_catalog->add_option("--out", catalog_out, "export to this file under the output directory");

  CLI::App* c_gen = app.add_subcommand("gen", "generate scenario manifests and channel traces");
  add_common_options(c_gen, o);
  c_gen->add_option("--count", gen_count, "number of scenarios (ids 0..count-1)");
  c_gen->add_flag("--grids", gen_grids, "also write channel traces");
  c_gen->add_option("--grid-episodes", grid_episodes, "episodes of channel trace per scenario");

  CLI::App* c_train = app.add_subcommand("train", "train a controller");
  add_common_options(c_train, o);
  add_protocol_options(c_train, o);

  CLI::App* c_finetune = app.add_subcommand("finetune", "train from a base checkpoint");
  add_common_options(c_finetune, o);
  add_protocol_options(c_finetune, o);
  c_finetune->add_option("--base-checkpoint", o.base_checkpoint, "starting weights");

  CLI::App* c_eval = app.add_subcommand("eval", "evaluate one controller deterministically");
  add_common_options(c_eval, o);
  add_protocol_options(c_eval, o);
  c_eval->add_option("--checkpoint", o.checkpoint, "weights to evaluate");
  c_eval->add_option("--episodes", o.episodes, "evaluation episodes per scenario");
  c_eval->add_option("--first-episode", o.first_episode_id, "first evaluation episode id");
  c_eval->add_flag("--step-csv", o.step_csv, "also write per-step metrics");

  CLI::App* c_compare = app.add_subcommand("compare", "evaluate several controllers");
  add_common_options(c_compare, o);
  add_protocol_options(c_compare, o);
  c_compare->add_option("--episodes", o.episodes, "evaluation episodes per scenario");
  c_compare->add_option("--first-episode", o.first_episode_id, "first evaluation episode id");

  CLI::App* c_demand = app.add_subcommand("demand", "offered-load analysis for one scenario");
  add_common_options(c_demand, o);
  c_demand->add_option("--episode", demand_episode, "episode id for the channel trace");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // bad flags are config errors; --help is success
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    cli::ToolConfig cfg = cli::load_tool_config(o.config_path);
    apply_overrides(cmd, o, cfg);
    const std::string out_dir = cli::resolve_output_dir(o.output, cfg);

    if (cmd == c_catalog) return cli::cmd_catalog(cfg, out_dir, catalog_out);
    if (cmd == c_gen) return cli::cmd_gen(cfg, out_dir, gen_count, gen_grids, grid_episodes);
    if (cmd == c_train) return cli::cmd_train(cfg, out_dir, false);
    if (cmd == c_finetune) return cli::cmd_train(cfg, out_dir, true);
    if (cmd == c_eval) return cli::cmd_eval(cfg, out_dir);
    if (cmd == c_compare) return cli::cmd_compare(cfg, out_dir);
    if (cmd == c_demand) return cli::cmd_demand(cfg, out_dir, demand_episode);
    std::cerr << "error: unknown command\n";
    return 2;
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
