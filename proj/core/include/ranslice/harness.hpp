// Experiment driver: episode rollouts, the train/validate/test protocol,
// transfer runs, and CSV emission for the study's metrics.
#pragma once

#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranslice/controllers.hpp"
#include "ranslice/csvio.hpp"
#include "ranslice/env.hpp"

namespace ranslice {

class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-episode roll-up of simulated outcomes. Distances are already normalized
// per step by the relevant group size; violation counts stay raw so callers
// can pick their own normalization.
struct EpisodeStats {
  std::int64_t scenario_id = 0;
  std::int64_t episode_id = 0;
  int steps = 0;
  int n_active = 0;
  int n_hp = 0;
  double sum_distance_total = 0.0;
  double sum_distance_hp = 0.0;
  std::int64_t violations_total = 0;
  std::int64_t violations_hp = 0;
  double mean_score = 0.0;  // the controller's own per-step objective
};

// Optional observer invoked after every simulated step.
using StepSink =
    std::function<void(const NetworkEnv&, const StepResult&, std::int64_t episode_id)>;

// Runs one episode on an already-seeded environment: begin_episode, then
// decide / advance / post_step for `steps` TTIs.
EpisodeStats run_episode(NetworkEnv& env, Controller& ctl, int steps, bool training,
                         std::int64_t episode_id = 0, const StepSink& sink = {});

// Small LRU cache over generated channel grids so validation sweeps do not
// regenerate the same episodes every time. Returned references stay valid
// until the entry is evicted, so do not hold them across further get() calls
// beyond the cache capacity.
class GridCache {
 public:
  explicit GridCache(std::size_t capacity = 16);

  const SEGrid& get(const NetworkScenario& scenario, const ChannelParams& params, int episode_id,
                    int steps);

 private:
  struct Entry {
    std::uint64_t key = 0;
    std::unique_ptr<SEGrid> grid;
  };
  std::list<Entry> entries_;  // front = most recently used
  std::size_t capacity_;
};

// Training protocol configuration. Episode identifiers partition into
// train [0, episodes_train), validation [episodes_train, +episodes_val) and
// test [episodes_train + episodes_val, +episodes_test); the overfit flag
// collapses validation and test onto the training identifiers.
struct TrainConfig {
  std::vector<NetworkScenario> scenarios;
  ChannelParams channel;
  int epochs = 1;
  int episodes_train = 6;  // per scenario, per epoch
  int episodes_val = 2;
  int episodes_test = 2;
  int steps = 1000;
  std::uint64_t master_seed = 1;   // drives training traffic
  std::uint64_t eval_seed = 9001;  // drives validation and test traffic
  int val_every = 10;              // training episodes between validation sweeps
  std::uint64_t max_env_steps = 0;  // 0 means no budget
  bool overfit = false;
  std::size_t grid_cache_capacity = 16;
};

// One validation sweep over all validation episodes.
struct ValPoint {
  int train_episodes = 0;  // completed when the sweep ran
  std::uint64_t env_steps = 0;
  double mean_score = 0.0;            // mean per-step controller objective
  double mean_distance_total = 0.0;   // mean per-episode cumulative distance
  double mean_distance_hp = 0.0;
  double mean_violations_total = 0.0;  // normalized by active-slice count
  double mean_violations_hp = 0.0;
};

struct TrainResult {
  std::vector<ValPoint> curve;
  std::vector<EpisodeStats> episodes;  // training episodes in execution order
  PolicyCheckpoint best;               // weights at the best validation sweep
  bool has_best = false;
  double best_score = 0.0;
  std::uint64_t best_env_steps = 0;
  int best_train_episodes = 0;
  std::uint64_t env_steps_used = 0;
  bool diverged = false;
  bool budget_exhausted = false;
};

// Epochs over the scenario pool with a validation sweep before training and
// after every `val_every` training episodes; keeps the weights from the best
// sweep. Aborts early on divergence or once the step budget is exhausted.
TrainResult train(Controller& ctl, const TrainConfig& cfg);

// Same protocol with initial parameters loaded from a base checkpoint.
TrainResult finetune(Controller& ctl, const PolicyCheckpoint& base, const TrainConfig& cfg);

// Deterministic evaluation over a fixed episode id range.
struct EvalConfig {
  std::vector<NetworkScenario> scenarios;
  ChannelParams channel;
  int episodes = 2;             // per scenario
  int first_episode_id = 0;     // start of the id range
  int steps = 1000;
  std::uint64_t eval_seed = 9001;
  std::size_t grid_cache_capacity = 16;
};

std::vector<EpisodeStats> evaluate(Controller& ctl, const EvalConfig& cfg,
                                   const StepSink& sink = {});

// The test id range implied by a training configuration.
EvalConfig test_config(const TrainConfig& cfg);

// Cumulative normalized metrics across an evaluation set, in row order.
struct SummaryRow {
  std::int64_t episode = 0;  // running index across the set
  std::string controller;
  double distance_total = 0.0;
  double distance_hp = 0.0;
  double violations_total = 0.0;
  double violations_hp = 0.0;
};

std::vector<SummaryRow> aggregate(const std::string& controller,
                                  std::span<const EpisodeStats> episodes);

// CSV emitters; columns are stable and documented in the README.
void write_summary_csv(const std::string& path, std::span<const SummaryRow> rows);
void write_curve_csv(const std::string& path, const std::string& controller,
                     std::span<const ValPoint> curve);
void write_episode_csv(const std::string& path, const std::string& controller,
                       std::span<const EpisodeStats> episodes);

// Streams one row per step and active slice into a per-step metrics CSV.
class StepCsvLogger {
 public:
  StepCsvLogger(const std::string& path, const std::string& controller);

  void log(const NetworkEnv& env, const StepResult& result, std::int64_t episode_id);
  StepSink sink();

 private:
  CsvWriter writer_;
  std::string controller_;
};

}  // namespace ranslice
