#include "ranslice/harness.hpp"

#include <cmath>

#include "ranslice/rng.hpp"

namespace ranslice {

namespace {

std::uint64_t eval_traffic_seed(std::uint64_t eval_seed, const NetworkScenario& sce,
                                int episode_id) {
  return combine_seed(eval_seed, static_cast<std::uint64_t>(sce.scenario_id),
                      static_cast<std::uint64_t>(episode_id));
}

double per_slice(std::int64_t count, int group) {
  return group > 0 ? static_cast<double>(count) / group : 0.0;
}

}  // namespace

EpisodeStats run_episode(NetworkEnv& env, Controller& ctl, int steps, bool training,
                         std::int64_t episode_id, const StepSink& sink) {
  if (steps <= 0) throw HarnessError("episode length must be positive");
  if (steps > env.max_steps() - env.step_index())
    throw HarnessError("episode length exceeds the channel trace");

  EpisodeStats st;
  st.scenario_id = env.scenario().scenario_id;
  st.episode_id = episode_id;
  st.steps = steps;
  st.n_active = static_cast<int>(env.scenario().slices.size());
  st.n_hp = env.scenario().hp_slice_count();

  ctl.begin_episode(env, training);
  double score_sum = 0.0;
  for (int t = 0; t < steps; ++t) {
    const Allocation alloc = ctl.decide(env);
    const StepResult result = env.advance(alloc);
    ctl.post_step(env, result, t == steps - 1);
    score_sum += ctl.score(env, result);
    st.sum_distance_total += result.distance_total;
    st.sum_distance_hp += result.distance_hp;
    st.violations_total += result.violations_total;
    st.violations_hp += result.violations_hp;
    if (sink) sink(env, result, episode_id);
  }
  st.mean_score = score_sum / steps;
  return st;
}

GridCache::GridCache(std::size_t capacity) : capacity_(capacity > 0 ? capacity : 1) {}

const SEGrid& GridCache::get(const NetworkScenario& scenario, const ChannelParams& params,
                             int episode_id, int steps) {
  std::uint64_t key = combine_seed(scenario.seed, static_cast<std::uint64_t>(scenario.scenario_id),
                                   static_cast<std::uint64_t>(episode_id),
                                   static_cast<std::uint64_t>(steps));
  // Fold in the channel knobs that change the generated trace.
  key = combine_seed(key, static_cast<std::uint64_t>(params.bandwidth_mhz * 1e3),
                     static_cast<std::uint64_t>(params.carrier_freq_ghz * 1e3),
                     (params.disable_fading ? 1u : 0u) | (params.disable_shadowing ? 2u : 0u));
  for (auto it = entries_.begin(); it != entries_.end(); ++it) {
    if (it->key == key) {
      entries_.splice(entries_.begin(), entries_, it);
      return *entries_.front().grid;
    }
  }
  Entry fresh;
  fresh.key = key;
  fresh.grid = std::make_unique<SEGrid>(generate_episode_grid(scenario, params, episode_id, steps));
  entries_.push_front(std::move(fresh));
  while (entries_.size() > capacity_) entries_.pop_back();
  return *entries_.front().grid;
}

TrainResult train(Controller& ctl, const TrainConfig& cfg) {
  if (cfg.scenarios.empty()) throw HarnessError("training needs at least one scenario");
  if (cfg.epochs <= 0 || cfg.episodes_train <= 0 || cfg.steps <= 0)
    throw HarnessError("epochs, training episodes, and steps must be positive");
  if (cfg.val_every <= 0) throw HarnessError("validation cadence must be positive");

  GridCache cache(cfg.grid_cache_capacity);
  TrainResult out;

  const int first_val = cfg.overfit ? 0 : cfg.episodes_train;
  const int val_count = cfg.overfit ? std::min(cfg.episodes_val, cfg.episodes_train)
                                    : cfg.episodes_val;

  auto sweep = [&](int train_episodes_done) {
    if (val_count <= 0) return;
    ValPoint p;
    p.train_episodes = train_episodes_done;
    p.env_steps = ctl.env_steps();
    int n = 0;
    for (const auto& sce : cfg.scenarios) {
      for (int e = 0; e < val_count; ++e) {
        const int ep_id = first_val + e;
        const SEGrid& grid = cache.get(sce, cfg.channel, ep_id, cfg.steps);
        NetworkEnv env(sce, cfg.channel, &grid, eval_traffic_seed(cfg.eval_seed, sce, ep_id));
        const EpisodeStats st = run_episode(env, ctl, cfg.steps, false, ep_id);
        p.mean_score += st.mean_score;
        p.mean_distance_total += st.sum_distance_total;
        p.mean_distance_hp += st.sum_distance_hp;
        p.mean_violations_total += per_slice(st.violations_total, st.n_active);
        p.mean_violations_hp += per_slice(st.violations_hp, st.n_hp);
        ++n;
      }
    }
    p.mean_score /= n;
    p.mean_distance_total /= n;
    p.mean_distance_hp /= n;
    p.mean_violations_total /= n;
    p.mean_violations_hp /= n;
    out.curve.push_back(p);
    if (!out.has_best || p.mean_score > out.best_score) {
      out.has_best = true;
      out.best_score = p.mean_score;
      out.best = ctl.snapshot();
      out.best_env_steps = p.env_steps;
      out.best_train_episodes = p.train_episodes;
    }
  };

  sweep(0);
  int done = 0;
  bool stop = false;
  for (int epoch = 0; epoch < cfg.epochs && !stop; ++epoch) {
    for (int e = 0; e < cfg.episodes_train && !stop; ++e) {
      for (const auto& sce : cfg.scenarios) {
        if (cfg.max_env_steps > 0 &&
            ctl.env_steps() + static_cast<std::uint64_t>(cfg.steps) > cfg.max_env_steps) {
          out.budget_exhausted = true;
          stop = true;
          break;
        }
        const SEGrid& grid = cache.get(sce, cfg.channel, e, cfg.steps);
        NetworkEnv env(sce, cfg.channel, &grid,
                       combine_seed(cfg.master_seed, static_cast<std::uint64_t>(sce.scenario_id),
                                    static_cast<std::uint64_t>(e),
                                    static_cast<std::uint64_t>(epoch)));
        out.episodes.push_back(run_episode(env, ctl, cfg.steps, true, e));
        ++done;
        if (ctl.diverged()) {
          out.diverged = true;
          stop = true;
          break;
        }
        if (done % cfg.val_every == 0) sweep(done);
      }
    }
  }
  // Close the curve at the final weights unless the run diverged.
  if (!out.diverged && (out.curve.empty() || out.curve.back().train_episodes != done)) sweep(done);
  out.env_steps_used = ctl.env_steps();
  return out;
}

TrainResult finetune(Controller& ctl, const PolicyCheckpoint& base, const TrainConfig& cfg) {
  // The base checkpoint supplies initial parameters only; fine-tuning starts
  // with a fresh optimizer rather than resuming the pretraining run's state.
  ctl.restore(base, Controller::RestoreMode::kWeightsOnly);
  return train(ctl, cfg);
}

std::vector<EpisodeStats> evaluate(Controller& ctl, const EvalConfig& cfg, const StepSink& sink) {
  if (cfg.scenarios.empty()) throw HarnessError("evaluation needs at least one scenario");
  if (cfg.episodes <= 0 || cfg.steps <= 0)
    throw HarnessError("evaluation episodes and steps must be positive");

  GridCache cache(cfg.grid_cache_capacity);
  std::vector<EpisodeStats> out;
  out.reserve(cfg.scenarios.size() * static_cast<std::size_t>(cfg.episodes));
  for (const auto& sce : cfg.scenarios) {
    for (int e = 0; e < cfg.episodes; ++e) {
      const int ep_id = cfg.first_episode_id + e;
      const SEGrid& grid = cache.get(sce, cfg.channel, ep_id, cfg.steps);
      NetworkEnv env(sce, cfg.channel, &grid, eval_traffic_seed(cfg.eval_seed, sce, ep_id));
      out.push_back(run_episode(env, ctl, cfg.steps, false, ep_id, sink));
    }
  }
  return out;
}

EvalConfig test_config(const TrainConfig& cfg) {
  EvalConfig ev;
  ev.scenarios = cfg.scenarios;
  ev.channel = cfg.channel;
  ev.episodes = cfg.overfit ? std::min(cfg.episodes_test, cfg.episodes_train) : cfg.episodes_test;
  ev.first_episode_id = cfg.overfit ? 0 : cfg.episodes_train + cfg.episodes_val;
  ev.steps = cfg.steps;
  ev.eval_seed = cfg.eval_seed;
  ev.grid_cache_capacity = cfg.grid_cache_capacity;
  return ev;
}

std::vector<SummaryRow> aggregate(const std::string& controller,
                                  std::span<const EpisodeStats> episodes) {
  std::vector<SummaryRow> rows;
  rows.reserve(episodes.size());
  SummaryRow acc;
  acc.controller = controller;
  for (const auto& ep : episodes) {
    acc.distance_total += ep.sum_distance_total;
    acc.distance_hp += ep.sum_distance_hp;
    acc.violations_total += per_slice(ep.violations_total, ep.n_active);
    acc.violations_hp += per_slice(ep.violations_hp, ep.n_hp);
    rows.push_back(acc);
    acc.episode += 1;
  }
  return rows;
}

void write_summary_csv(const std::string& path, std::span<const SummaryRow> rows) {
  CsvWriter w(path, {"episode", "controller", "distance_total", "distance_hp", "violations_total",
                     "violations_hp"});
  for (const auto& r : rows) {
    w.row({CsvWriter::num(r.episode), r.controller, CsvWriter::num(r.distance_total),
           CsvWriter::num(r.distance_hp), CsvWriter::num(r.violations_total),
           CsvWriter::num(r.violations_hp)});
  }
}

void write_curve_csv(const std::string& path, const std::string& controller,
                     std::span<const ValPoint> curve) {
  CsvWriter w(path, {"controller", "train_episodes", "env_steps", "mean_score",
                     "mean_distance_total", "mean_distance_hp", "mean_violations_total",
                     "mean_violations_hp"});
  for (const auto& p : curve) {
    w.row({controller, CsvWriter::num(static_cast<std::int64_t>(p.train_episodes)),
           CsvWriter::num(static_cast<std::int64_t>(p.env_steps)), CsvWriter::num(p.mean_score),
           CsvWriter::num(p.mean_distance_total), CsvWriter::num(p.mean_distance_hp),
           CsvWriter::num(p.mean_violations_total), CsvWriter::num(p.mean_violations_hp)});
  }
}

void write_episode_csv(const std::string& path, const std::string& controller,
                       std::span<const EpisodeStats> episodes) {
  CsvWriter w(path, {"controller", "scenario", "episode", "steps", "n_active", "n_hp",
                     "distance_total", "distance_hp", "violations_total", "violations_hp",
                     "mean_score"});
  for (const auto& ep : episodes) {
    w.row({controller, CsvWriter::num(ep.scenario_id), CsvWriter::num(ep.episode_id),
           CsvWriter::num(static_cast<std::int64_t>(ep.steps)),
           CsvWriter::num(static_cast<std::int64_t>(ep.n_active)),
           CsvWriter::num(static_cast<std::int64_t>(ep.n_hp)),
           CsvWriter::num(ep.sum_distance_total), CsvWriter::num(ep.sum_distance_hp),
           CsvWriter::num(ep.violations_total), CsvWriter::num(ep.violations_hp),
           CsvWriter::num(ep.mean_score)});
  }
}

StepCsvLogger::StepCsvLogger(const std::string& path, const std::string& controller)
    : writer_(path, {"controller", "scenario", "episode", "step", "slot", "hp", "served_mbps",
                     "effective_mbps", "buffer_occ", "latency_ms", "loss_rate", "arrivals_mbps",
                     "mean_se", "drift_throughput", "drift_latency", "drift_loss", "intra_reward",
                     "reward_inter", "distance_total", "distance_hp"}),
      controller_(controller) {}

void StepCsvLogger::log(const NetworkEnv& env, const StepResult& result, std::int64_t episode_id) {
  const auto hp = env.hp_slots();
  for (const auto& slice : env.scenario().slices) {
    const int s = slice.slice_index;
    const auto& m = result.slice_mean[s];
    const auto& d = result.drift[s];
    writer_.row({controller_, CsvWriter::num(env.scenario().scenario_id),
                 CsvWriter::num(episode_id), CsvWriter::num(static_cast<std::int64_t>(result.step)),
                 CsvWriter::num(static_cast<std::int64_t>(s)),
                 CsvWriter::num(static_cast<std::int64_t>(hp[s] ? 1 : 0)),
                 CsvWriter::num(m.served_mbps), CsvWriter::num(m.effective_mbps),
                 CsvWriter::num(m.buffer_occ), CsvWriter::num(m.latency_ms),
                 CsvWriter::num(m.loss_rate), CsvWriter::num(m.arrivals_mbps),
                 CsvWriter::num(m.mean_se), CsvWriter::num(d.thr ? *d.thr : 0.0),
                 CsvWriter::num(d.lat ? *d.lat : 0.0), CsvWriter::num(d.loss ? *d.loss : 0.0),
                 CsvWriter::num(result.intra_rewards[s]), CsvWriter::num(result.reward_inter),
                 CsvWriter::num(result.distance_total), CsvWriter::num(result.distance_hp)});
  }
}

StepSink StepCsvLogger::sink() {
  return [this](const NetworkEnv& env, const StepResult& result, std::int64_t episode_id) {
    log(env, result, episode_id);
  };
}

}  // namespace ranslice
