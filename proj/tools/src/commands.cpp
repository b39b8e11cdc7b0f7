#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <thread>

#include "ranslice/catalog.hpp"
#include "ranslice/controllers.hpp"
#include "ranslice/csvio.hpp"
#include "ranslice/demand.hpp"
#include "ranslice/harness.hpp"

namespace ranslice::cli {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory \"" + dir + "\"");
}

std::vector<SliceSpec> resolve_catalog(const ToolConfig& cfg) {
  if (cfg.catalog_path.empty()) return default_catalog();
  try {
    return load_catalog(cfg.catalog_path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("catalog: ") + e.what());
  }
}

std::vector<NetworkScenario> resolve_scenarios(const ToolConfig& cfg) {
  std::vector<NetworkScenario> out;
  for (const auto& path : cfg.scenario_paths) {
    try {
      out.push_back(load_scenario(path));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("scenario \"") + path + "\": " + e.what());
    }
  }
  if (!cfg.scenario_ids.empty()) {
    const auto catalog = resolve_catalog(cfg);
    for (const auto id : cfg.scenario_ids)
      out.push_back(generate_scenario(cfg.seed, catalog, id, cfg.min_slices, cfg.max_slices));
  }
  if (out.empty())
    throw ConfigError("no scenarios configured; set scenarios.paths or scenarios.ids");
  return out;
}

bool is_trainable(const std::string& kind) {
  return kind == "proposed" || kind == "intent_aware" || kind == "sched_slicing";
}

PolicyCheckpoint load_checkpoint_checked(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("checkpoint \"" + path + "\" does not exist");
  return load_checkpoint(path);
}

TrainConfig make_train_config(const ToolConfig& cfg, std::vector<NetworkScenario> scenarios) {
  TrainConfig tc;
  tc.scenarios = std::move(scenarios);
  tc.channel = cfg.channel;
  tc.epochs = cfg.epochs;
  tc.episodes_train = cfg.episodes_train;
  tc.episodes_val = cfg.episodes_val;
  tc.episodes_test = cfg.episodes_test;
  tc.steps = cfg.steps;
  tc.master_seed = cfg.seed;
  tc.eval_seed = cfg.eval_seed;
  tc.val_every = cfg.val_every;
  tc.max_env_steps = cfg.max_env_steps;
  tc.overfit = cfg.overfit;
  return tc;
}

EvalConfig make_eval_config(const ToolConfig& cfg, std::vector<NetworkScenario> scenarios) {
  EvalConfig ec;
  ec.scenarios = std::move(scenarios);
  ec.channel = cfg.channel;
  ec.episodes = cfg.episodes > 0 ? cfg.episodes : cfg.episodes_test;
  ec.first_episode_id = cfg.first_episode_id >= 0
                            ? cfg.first_episode_id
                            : (cfg.overfit ? 0 : cfg.episodes_train + cfg.episodes_val);
  ec.steps = cfg.steps;
  ec.eval_seed = cfg.eval_seed;
  return ec;
}

std::string padded(const char* pattern, long value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, value);
  return buf;
}

void write_compare_episode_csv(const std::string& path,
                               const std::vector<std::string>& kinds,
                               const std::vector<std::vector<EpisodeStats>>& stats) {
  CsvWriter w(path, {"controller", "scenario", "episode", "steps", "n_active", "n_hp",
                     "distance_total", "distance_hp", "violations_total", "violations_hp",
                     "mean_score"});
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    for (const auto& ep : stats[k]) {
      w.row({kinds[k], CsvWriter::num(ep.scenario_id), CsvWriter::num(ep.episode_id),
             CsvWriter::num(static_cast<std::int64_t>(ep.steps)),
             CsvWriter::num(static_cast<std::int64_t>(ep.n_active)),
             CsvWriter::num(static_cast<std::int64_t>(ep.n_hp)),
             CsvWriter::num(ep.sum_distance_total), CsvWriter::num(ep.sum_distance_hp),
             CsvWriter::num(ep.violations_total), CsvWriter::num(ep.violations_hp),
             CsvWriter::num(ep.mean_score)});
    }
  }
}

}  // namespace

int cmd_catalog(const ToolConfig& cfg, const std::string& out_dir, const std::string& out_file) {
  const auto catalog = resolve_catalog(cfg);
  if (!out_file.empty()) {
    ensure_dir(out_dir);
    const std::string path =
        fs::path(out_file).is_absolute() ? out_file : join(out_dir, out_file);
    save_catalog(catalog, path);
    std::cout << "wrote " << catalog.size() << " slice types to " << path << "\n";
    return 0;
  }
  std::printf("%-22s %-4s %8s %8s %10s %8s %6s %8s %6s %9s %7s\n", "name", "hp", "thr_mbps",
              "lat_ms", "rel_pct", "buf_pkts", "l_max", "pkt_bits", "km/h", "traffic", "ues");
  for (const auto& s : catalog) {
    auto opt = [](const std::optional<double>& v) {
      return v ? std::to_string(*v).substr(0, 8) : std::string("-");
    };
    std::printf("%-22s %-4s %8s %8s %10s %8lld %6d %8d %6.1f %9.2f %d-%d\n", s.name.c_str(),
                s.high_priority ? "yes" : "no", opt(s.thr_req_mbps).c_str(),
                opt(s.lat_req_ms).c_str(), opt(s.rel_req_pct).c_str(),
                static_cast<long long>(s.buffer_capacity_pkts), s.max_buffer_latency_ms,
                s.packet_size_bits, s.speed_kmh, s.traffic_mean_mbps, s.ue_min, s.ue_max);
  }
  return 0;
}

int cmd_gen(const ToolConfig& cfg, const std::string& out_dir, int count, bool grids,
            int grid_episodes) {
  if (count <= 0 && cfg.scenario_ids.empty())
    throw ConfigError("gen needs --count or scenarios.ids");
  if (grids && grid_episodes <= 0) throw ConfigError("gen --grids needs --grid-episodes >= 1");
  const auto catalog = resolve_catalog(cfg);

  std::vector<std::int64_t> ids = cfg.scenario_ids;
  if (ids.empty())
    for (int i = 0; i < count; ++i) ids.push_back(i);

  ensure_dir(join(out_dir, "scenarios"));
  if (grids) ensure_dir(join(out_dir, "grids"));
  for (const auto id : ids) {
    const NetworkScenario sce =
        generate_scenario(cfg.seed, catalog, id, cfg.min_slices, cfg.max_slices);
    const std::string manifest =
        join(join(out_dir, "scenarios"), padded("scenario_%05ld.json", static_cast<long>(id)));
    save_scenario(sce, manifest);
    std::cout << "wrote " << manifest << " (" << sce.slices.size() << " slices, "
              << sce.total_ues() << " UEs)\n";
    if (!grids) continue;
    for (int ep = 0; ep < grid_episodes; ++ep) {
      const SEGrid grid = generate_episode_grid(sce, cfg.channel, ep, cfg.steps);
      const std::string trace =
          join(join(out_dir, "grids"),
               padded("sce%05ld", static_cast<long>(id)) + padded("_ep%03ld.grid", ep));
      save_se_grid(grid, trace);
      std::cout << "wrote " << trace << "\n";
    }
  }
  return 0;
}

int cmd_train(const ToolConfig& cfg, const std::string& out_dir, bool finetune_mode) {
  if (!is_trainable(cfg.controller))
    throw ConfigError("controller \"" + cfg.controller + "\" is not trainable");
  PolicyCheckpoint base;
  if (finetune_mode) {
    if (cfg.base_checkpoint.empty()) throw ConfigError("finetune needs experiment.base_checkpoint");
    base = load_checkpoint_checked(cfg.base_checkpoint);
  }
  const TrainConfig tc = make_train_config(cfg, resolve_scenarios(cfg));
  auto ctl = make_controller(cfg.controller, cfg.seed, cfg.ppo);

  ensure_dir(out_dir);
  const TrainResult result = finetune_mode ? finetune(*ctl, base, tc) : train(*ctl, tc);

  write_curve_csv(join(out_dir, cfg.controller + "_curve.csv"), cfg.controller, result.curve);
  write_episode_csv(join(out_dir, cfg.controller + "_train_episodes.csv"), cfg.controller,
                    result.episodes);
  save_checkpoint(ctl->snapshot(), join(out_dir, cfg.controller + "_final.ckpt"));
  if (result.has_best)
    save_checkpoint(result.best, join(out_dir, cfg.controller + "_best.ckpt"));

  std::cout << "controller: " << cfg.controller << "\n"
            << "train episodes run: " << result.episodes.size() << "\n"
            << "env steps used: " << result.env_steps_used << "\n"
            << "validation points: " << result.curve.size() << "\n";
  if (result.has_best)
    std::cout << "best validation score: " << result.best_score << " at "
              << result.best_env_steps << " env steps\n";
  std::cout << "diverged: " << (result.diverged ? "true" : "false") << "\n"
            << "budget exhausted: " << (result.budget_exhausted ? "true" : "false") << "\n";
  return 0;
}

int cmd_eval(const ToolConfig& cfg, const std::string& out_dir) {
  auto ctl = make_controller(cfg.controller, cfg.seed, cfg.ppo);
  if (!cfg.checkpoint.empty()) {
    if (!is_trainable(cfg.controller))
      throw ConfigError("controller \"" + cfg.controller + "\" takes no checkpoint");
    ctl->restore(load_checkpoint_checked(cfg.checkpoint));
  }
  const EvalConfig ec = make_eval_config(cfg, resolve_scenarios(cfg));

  ensure_dir(out_dir);
  std::unique_ptr<StepCsvLogger> logger;
  StepSink sink;
  if (cfg.step_csv) {
    logger = std::make_unique<StepCsvLogger>(join(out_dir, cfg.controller + "_steps.csv"),
                                             cfg.controller);
    sink = logger->sink();
  }
  const std::vector<EpisodeStats> stats = evaluate(*ctl, ec, sink);
  write_episode_csv(join(out_dir, cfg.controller + "_episodes.csv"), cfg.controller, stats);
  const auto rows = aggregate(cfg.controller, stats);
  write_summary_csv(join(out_dir, cfg.controller + "_summary.csv"), rows);

  if (!rows.empty()) {
    const auto& last = rows.back();
    std::cout << cfg.controller << ": " << stats.size() << " episodes, cumulative distance "
              << last.distance_total << " (hp " << last.distance_hp << "), violations "
              << last.violations_total << " (hp " << last.violations_hp << ")\n";
  }
  return 0;
}

int cmd_compare(const ToolConfig& cfg, const std::string& out_dir) {
  const std::vector<std::string> kinds =
      cfg.controllers.empty() ? controller_names() : cfg.controllers;
  for (const auto& [name, path] : cfg.checkpoints) {
    if (!is_trainable(name)) throw ConfigError("controller \"" + name + "\" takes no checkpoint");
    if (!fs::exists(path)) throw ConfigError("checkpoint \"" + path + "\" does not exist");
  }
  const auto scenarios = resolve_scenarios(cfg);

  auto run_one = [&](const std::string& kind) {
    auto ctl = make_controller(kind, cfg.seed, cfg.ppo);
    if (const auto it = cfg.checkpoints.find(kind); it != cfg.checkpoints.end())
      ctl->restore(load_checkpoint(it->second));
    return evaluate(*ctl, make_eval_config(cfg, scenarios));
  };

  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers = cfg.workers > 0 ? static_cast<std::size_t>(cfg.workers)
                                              : std::max(1u, hw);
  std::vector<std::vector<EpisodeStats>> stats(kinds.size());
  for (std::size_t base = 0; base < kinds.size(); base += workers) {
    const std::size_t end = std::min(base + workers, kinds.size());
    std::vector<std::future<std::vector<EpisodeStats>>> wave;
    for (std::size_t k = base; k < end; ++k)
      wave.push_back(std::async(std::launch::async, run_one, kinds[k]));
    for (std::size_t k = base; k < end; ++k) stats[k] = wave[k - base].get();
  }

  ensure_dir(out_dir);
  std::vector<SummaryRow> all_rows;
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    const auto rows = aggregate(kinds[k], stats[k]);
    all_rows.insert(all_rows.end(), rows.begin(), rows.end());
    if (!rows.empty()) {
      const auto& last = rows.back();
      std::cout << kinds[k] << ": cumulative distance " << last.distance_total << " (hp "
                << last.distance_hp << "), violations " << last.violations_total << " (hp "
                << last.violations_hp << ")\n";
    }
  }
  write_summary_csv(join(out_dir, "compare_summary.csv"), all_rows);
  write_compare_episode_csv(join(out_dir, "compare_episodes.csv"), kinds, stats);
  return 0;
}

int cmd_demand(const ToolConfig& cfg, const std::string& out_dir, int episode) {
  const auto scenarios = resolve_scenarios(cfg);
  if (scenarios.size() != 1) throw ConfigError("demand analyzes exactly one scenario");
  if (episode < 0) throw ConfigError("episode must be nonnegative");
  const NetworkScenario& sce = scenarios.front();

  const SEGrid grid = generate_episode_grid(sce, cfg.channel, episode, cfg.steps);
  const DemandSummary summary = demand_analysis(sce, grid, cfg.channel);

  ensure_dir(out_dir);
  CsvWriter w(join(out_dir, "demand.csv"), {"step", "rb_min_se", "rb_avg_se", "rb_max_se"});
  for (std::size_t n = 0; n < summary.steps.size(); ++n) {
    const auto& row = summary.steps[n];
    w.row({CsvWriter::num(static_cast<std::int64_t>(n)), CsvWriter::num(row.rb_min_se),
           CsvWriter::num(row.rb_avg_se), CsvWriter::num(row.rb_max_se)});
  }

  const double low_mark = 0.4 * kNumRbs;
  const char* klass = summary.mean_rb_avg_se < low_mark  ? "low-demand"
                      : summary.mean_rb_avg_se > kNumRbs ? "over-demand"
                                                         : "mid-demand";
  std::cout << "scenario " << sce.scenario_id << ", episode " << episode << ": mean required RBs "
            << summary.mean_rb_min_se << " (worst SE) / " << summary.mean_rb_avg_se
            << " (mean SE) / " << summary.mean_rb_max_se << " (best SE) of " << kNumRbs
            << " available; class: " << klass << "\n";
  return 0;
}

}  // namespace ranslice::cli
