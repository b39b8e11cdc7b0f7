#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <set>

#include "json.hpp"
#include "ranslice/controllers.hpp"

namespace ranslice::cli {

namespace {

using nlohmann::json;

constexpr int kConfigVersion = 1;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!ok.count(item.key())) fail(where, "unknown key \"" + item.key() + "\"");
  }
}

template <typename T>
T read(const json& obj, const std::string& where, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(where, std::string("key \"") + key + "\" has the wrong type");
  }
}

void read_channel(const json& obj, ChannelParams& ch) {
  const std::string where = "channel";
  reject_unknown_keys(obj, where,
                      {"carrier_freq_ghz", "bandwidth_mhz", "total_tx_power_w", "noise_figure_db",
                       "thermal_noise_dbm_hz", "ref_pathloss_db", "breakpoint_m",
                       "pl_exp_los_near", "pl_exp_los_far", "pl_exp_nlos_near", "pl_exp_nlos_far",
                       "shadow_sigma_los_db", "shadow_sigma_nlos_db", "shadow_decorr_m",
                       "rician_k_los_db", "doppler_c0", "freq_corr", "se_max", "disable_fading",
                       "disable_shadowing"});
  ch.carrier_freq_ghz = read(obj, where, "carrier_freq_ghz", ch.carrier_freq_ghz);
  ch.bandwidth_mhz = read(obj, where, "bandwidth_mhz", ch.bandwidth_mhz);
  ch.total_tx_power_w = read(obj, where, "total_tx_power_w", ch.total_tx_power_w);
  ch.noise_figure_db = read(obj, where, "noise_figure_db", ch.noise_figure_db);
  ch.thermal_noise_dbm_hz = read(obj, where, "thermal_noise_dbm_hz", ch.thermal_noise_dbm_hz);
  ch.ref_pathloss_db = read(obj, where, "ref_pathloss_db", ch.ref_pathloss_db);
  ch.breakpoint_m = read(obj, where, "breakpoint_m", ch.breakpoint_m);
  ch.pl_exp_los_near = read(obj, where, "pl_exp_los_near", ch.pl_exp_los_near);
  ch.pl_exp_los_far = read(obj, where, "pl_exp_los_far", ch.pl_exp_los_far);
  ch.pl_exp_nlos_near = read(obj, where, "pl_exp_nlos_near", ch.pl_exp_nlos_near);
  ch.pl_exp_nlos_far = read(obj, where, "pl_exp_nlos_far", ch.pl_exp_nlos_far);
  ch.shadow_sigma_los_db = read(obj, where, "shadow_sigma_los_db", ch.shadow_sigma_los_db);
  ch.shadow_sigma_nlos_db = read(obj, where, "shadow_sigma_nlos_db", ch.shadow_sigma_nlos_db);
  ch.shadow_decorr_m = read(obj, where, "shadow_decorr_m", ch.shadow_decorr_m);
  ch.rician_k_los_db = read(obj, where, "rician_k_los_db", ch.rician_k_los_db);
  ch.doppler_c0 = read(obj, where, "doppler_c0", ch.doppler_c0);
  ch.freq_corr = read(obj, where, "freq_corr", ch.freq_corr);
  ch.se_max = read(obj, where, "se_max", ch.se_max);
  ch.disable_fading = read(obj, where, "disable_fading", ch.disable_fading);
  ch.disable_shadowing = read(obj, where, "disable_shadowing", ch.disable_shadowing);
  if (ch.bandwidth_mhz <= 0) fail(where, "bandwidth_mhz must be positive");
  if (ch.se_max <= 0) fail(where, "se_max must be positive");
}

void read_ppo(const json& obj, PPOConfig& ppo) {
  const std::string where = "ppo";
  reject_unknown_keys(obj, where,
                      {"epochs", "minibatch", "clip", "vf_coef", "ent_coef", "learning_rate",
                       "max_grad_norm", "gamma", "lambda", "buffer_capacity"});
  ppo.epochs = read(obj, where, "epochs", ppo.epochs);
  ppo.minibatch = read(obj, where, "minibatch", ppo.minibatch);
  ppo.clip = read(obj, where, "clip", ppo.clip);
  ppo.vf_coef = read(obj, where, "vf_coef", ppo.vf_coef);
  ppo.ent_coef = read(obj, where, "ent_coef", ppo.ent_coef);
  ppo.learning_rate = read(obj, where, "learning_rate", ppo.learning_rate);
  ppo.max_grad_norm = read(obj, where, "max_grad_norm", ppo.max_grad_norm);
  ppo.gamma = read(obj, where, "gamma", ppo.gamma);
  ppo.lambda = read(obj, where, "lambda", ppo.lambda);
  ppo.buffer_capacity = read(obj, where, "buffer_capacity", ppo.buffer_capacity);
  if (ppo.epochs <= 0 || ppo.minibatch <= 0 || ppo.buffer_capacity <= 0)
    fail(where, "epochs, minibatch, and buffer_capacity must be positive");
  if (ppo.clip <= 0 || ppo.learning_rate <= 0) fail(where, "clip and learning_rate must be positive");
  if (ppo.gamma < 0 || ppo.gamma > 1 || ppo.lambda < 0 || ppo.lambda > 1)
    fail(where, "gamma and lambda must lie in [0, 1]");
}

void read_scenarios(const json& obj, ToolConfig& cfg) {
  const std::string where = "scenarios";
  reject_unknown_keys(obj, where, {"paths", "ids", "min_slices", "max_slices"});
  cfg.scenario_paths = read(obj, where, "paths", cfg.scenario_paths);
  cfg.scenario_ids = read(obj, where, "ids", cfg.scenario_ids);
  cfg.min_slices = read(obj, where, "min_slices", cfg.min_slices);
  cfg.max_slices = read(obj, where, "max_slices", cfg.max_slices);
  if (cfg.min_slices < 1 || cfg.max_slices > kMaxSlices || cfg.min_slices > cfg.max_slices)
    fail(where, "slice bounds must satisfy 1 <= min_slices <= max_slices <= 5");
}

void validate_controller_name(const std::string& name, const std::string& where) {
  const auto& names = controller_names();
  for (const auto& n : names)
    if (n == name) return;
  fail(where, "unknown controller \"" + name + "\"");
}

void read_experiment(const json& obj, ToolConfig& cfg) {
  const std::string where = "experiment";
  reject_unknown_keys(obj, where,
                      {"controller", "controllers", "epochs", "episodes_train", "episodes_val",
                       "episodes_test", "steps", "val_every", "max_env_steps", "overfit",
                       "eval_seed", "episodes", "first_episode_id", "checkpoint",
                       "base_checkpoint", "checkpoints", "step_csv"});
  cfg.controller = read(obj, where, "controller", cfg.controller);
  cfg.controllers = read(obj, where, "controllers", cfg.controllers);
  cfg.epochs = read(obj, where, "epochs", cfg.epochs);
  cfg.episodes_train = read(obj, where, "episodes_train", cfg.episodes_train);
  cfg.episodes_val = read(obj, where, "episodes_val", cfg.episodes_val);
  cfg.episodes_test = read(obj, where, "episodes_test", cfg.episodes_test);
  cfg.steps = read(obj, where, "steps", cfg.steps);
  cfg.val_every = read(obj, where, "val_every", cfg.val_every);
  cfg.max_env_steps = read(obj, where, "max_env_steps", cfg.max_env_steps);
  cfg.overfit = read(obj, where, "overfit", cfg.overfit);
  cfg.eval_seed = read(obj, where, "eval_seed", cfg.eval_seed);
  cfg.episodes = read(obj, where, "episodes", cfg.episodes);
  cfg.first_episode_id = read(obj, where, "first_episode_id", cfg.first_episode_id);
  cfg.checkpoint = read(obj, where, "checkpoint", cfg.checkpoint);
  cfg.base_checkpoint = read(obj, where, "base_checkpoint", cfg.base_checkpoint);
  cfg.checkpoints = read(obj, where, "checkpoints", cfg.checkpoints);
  cfg.step_csv = read(obj, where, "step_csv", cfg.step_csv);

  validate_controller_name(cfg.controller, where);
  for (const auto& c : cfg.controllers) validate_controller_name(c, where);
  for (const auto& [name, path] : cfg.checkpoints) {
    validate_controller_name(name, where + ".checkpoints");
    if (path.empty()) fail(where, "checkpoint path for \"" + name + "\" is empty");
  }
  if (cfg.epochs <= 0 || cfg.episodes_train <= 0 || cfg.steps <= 0 || cfg.val_every <= 0)
    fail(where, "epochs, episodes_train, steps, and val_every must be positive");
  if (cfg.episodes_val < 0 || cfg.episodes_test < 0 || cfg.episodes < 0)
    fail(where, "episode counts must be nonnegative");
}

}  // namespace

ToolConfig load_tool_config(const std::string& path) {
  ToolConfig cfg;
  if (path.empty()) return cfg;

  std::ifstream in(path);
  if (!in) fail("config", "cannot open \"" + path + "\"");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    fail("config", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("config", "top level must be an object");
  reject_unknown_keys(root, "config",
                      {"version", "seed", "workers", "output_dir", "catalog_path", "channel",
                       "scenarios", "experiment", "ppo"});
  if (!root.contains("version")) fail("config", "missing required key \"version\"");
  const int version = read(root, "config", "version", 0);
  if (version != kConfigVersion)
    fail("config", "unsupported version " + std::to_string(version) + " (expected " +
                       std::to_string(kConfigVersion) + ")");

  cfg.seed = read(root, "config", "seed", cfg.seed);
  cfg.workers = read(root, "config", "workers", cfg.workers);
  cfg.output_dir = read(root, "config", "output_dir", cfg.output_dir);
  cfg.catalog_path = read(root, "config", "catalog_path", cfg.catalog_path);
  if (cfg.workers < 0) fail("config", "workers must be nonnegative");

  if (root.contains("channel")) read_channel(root.at("channel"), cfg.channel);
  if (root.contains("ppo")) read_ppo(root.at("ppo"), cfg.ppo);
  if (root.contains("scenarios")) read_scenarios(root.at("scenarios"), cfg);
  if (root.contains("experiment")) read_experiment(root.at("experiment"), cfg);
  return cfg;
}

std::string resolve_output_dir(const std::string& flag_value, const ToolConfig& cfg) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("RANSLICE_OUTPUT_ROOT"); env && *env) return env;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return "out";
}

}  // namespace ranslice::cli
