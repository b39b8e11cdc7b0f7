// The five schedulers under study: the trained priority-aware controller,
// equal-split and proportional-fair heuristics, and two trained baselines
// with alternative observations and rewards.
#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "ranslice/checkpoint.hpp"
#include "ranslice/env.hpp"
#include "ranslice/obs.hpp"
#include "ranslice/ppo.hpp"
#include "ranslice/sched.hpp"

namespace ranslice {

class Controller {
 public:
  virtual ~Controller() = default;

  virtual std::string name() const = 0;

  // Called before the first step of every episode. `training` turns on
  // stochastic actions and rollout collection for trained controllers.
  virtual void begin_episode(NetworkEnv& env, bool training);

  // Chooses the frame allocation for the environment's current step.
  virtual Allocation decide(NetworkEnv& env) = 0;

  // Receives the simulated outcome of the step `decide` acted on.
  virtual void post_step(NetworkEnv& env, const StepResult& result, bool last_step);

  // Per-step figure validation sweeps track; trained controllers report the
  // reward their own policy optimizes.
  virtual double score(NetworkEnv& env, const StepResult& result);

  virtual bool trainable() const { return false; }
  virtual bool diverged() const { return false; }

  // Environment steps consumed while training (evaluation steps excluded).
  virtual std::uint64_t env_steps() const { return steps_seen_; }

  // Parameter persistence; no-ops for heuristic controllers. kResume brings
  // back the optimizer state as well; kWeightsOnly treats the checkpoint as
  // initial parameters and keeps a fresh optimizer, the fine-tuning mode.
  enum class RestoreMode { kResume, kWeightsOnly };
  virtual PolicyCheckpoint snapshot() const { return {}; }
  virtual void restore(const PolicyCheckpoint&, RestoreMode = RestoreMode::kResume) {}

 protected:
  bool training_ = false;
  std::uint64_t steps_seen_ = 0;
};

// Equal split at both levels; remainders rotate with the step index.
class MarrController : public Controller {
 public:
  std::string name() const override { return "marr"; }
  Allocation decide(NetworkEnv& env) override;
};

// Proportional fair at both levels, routed through the action-factor mapping.
class MapfController : public Controller {
 public:
  MapfController();
  std::string name() const override { return "mapf"; }
  void begin_episode(NetworkEnv& env, bool training) override;
  Allocation decide(NetworkEnv& env) override;
  void post_step(NetworkEnv& env, const StepResult& result, bool last_step) override;

 private:
  PFTracker slice_tracker_;
  PFTracker ue_tracker_;
};

// Shared PPO plumbing for the trained controllers.
struct TrainedControllerState {
  PPOConfig cfg;
  std::uint64_t updates = 0;
  bool diverged = false;
};

// The proposed two-level agent: a Gaussian inter-slice policy over the
// priority-aware observation and a shared categorical intra-slice policy
// choosing among the RR/PF/MT kernels per slice.
class ProposedController : public Controller {
 public:
  explicit ProposedController(std::uint64_t seed, const PPOConfig& cfg = {});

  std::string name() const override { return "proposed"; }
  void begin_episode(NetworkEnv& env, bool training) override;
  Allocation decide(NetworkEnv& env) override;
  void post_step(NetworkEnv& env, const StepResult& result, bool last_step) override;

  bool trainable() const override { return true; }
  bool diverged() const override { return state_.diverged; }
  PolicyCheckpoint snapshot() const override;
  void restore(const PolicyCheckpoint& ckpt, RestoreMode mode = RestoreMode::kResume) override;

 private:
  void maybe_update_inter(std::span<const double> next_obs);
  void maybe_update_intra(const std::array<std::vector<double>, kMaxSlices>& next_obs,
                          const std::array<bool, kMaxSlices>& active);

  GaussianPolicy inter_;
  CategoricalPolicy intra_;
  Adam inter_opt_;
  Adam intra_opt_;
  RolloutBuffer inter_buf_;
  RolloutBuffer intra_buf_;
  PFTracker ue_tracker_;
  TrainedControllerState state_;
  std::mt19937_64 rng_;

  // Pending transition between decide() and post_step().
  struct PendingInter {
    std::vector<double> obs, raw;
    std::array<std::uint8_t, kMaxSlices> mask{};
    double log_prob = 0.0, value = 0.0;
    bool valid = false;
  } pending_inter_;
  struct PendingIntra {
    std::vector<double> obs;
    int choice = 0;
    double log_prob = 0.0, value = 0.0;
    bool valid = false;
  };
  std::array<PendingIntra, kMaxSlices> pending_intra_;
};

// Trained single-policy baselines: a Gaussian inter-slice agent with
// round-robin intra scheduling; subclasses choose the observation and reward.
class GaussianBaselineController : public Controller {
 public:
  GaussianBaselineController(std::uint64_t seed, const PPOConfig& cfg);

  void begin_episode(NetworkEnv& env, bool training) override;
  Allocation decide(NetworkEnv& env) override;
  void post_step(NetworkEnv& env, const StepResult& result, bool last_step) override;
  double score(NetworkEnv& env, const StepResult& result) override;

  bool trainable() const override { return true; }
  bool diverged() const override { return state_.diverged; }
  PolicyCheckpoint snapshot() const override;
  void restore(const PolicyCheckpoint& ckpt, RestoreMode mode = RestoreMode::kResume) override;

 protected:
  virtual std::vector<double> build_obs(NetworkEnv& env) = 0;
  virtual double reward(NetworkEnv& env, const StepResult& result) = 0;

 private:
  GaussianPolicy policy_;
  Adam opt_;
  RolloutBuffer buffer_;
  TrainedControllerState state_;
  std::mt19937_64 rng_;
  struct Pending {
    std::vector<double> obs, raw;
    std::array<std::uint8_t, kMaxSlices> mask{};
    double log_prob = 0.0, value = 0.0;
    bool valid = false;
  } pending_;
};

// Weighted-drift baseline over raw slice metrics.
class IntentAwareController : public GaussianBaselineController {
 public:
  explicit IntentAwareController(std::uint64_t seed, const PPOConfig& cfg = {});
  std::string name() const override { return "intent_aware"; }

 protected:
  std::vector<double> build_obs(NetworkEnv& env) override;
  double reward(NetworkEnv& env, const StepResult& result) override;
};

// Throughput-versus-queues baseline with the eMBB/URLLC split.
class SchedSlicingController : public GaussianBaselineController {
 public:
  explicit SchedSlicingController(std::uint64_t seed, const PPOConfig& cfg = {});
  std::string name() const override { return "sched_slicing"; }

 protected:
  std::vector<double> build_obs(NetworkEnv& env) override;
  double reward(NetworkEnv& env, const StepResult& result) override;
};

// Factory over the controller names used by the command line.
std::unique_ptr<Controller> make_controller(const std::string& kind, std::uint64_t seed,
                                            const PPOConfig& cfg = {});
const std::vector<std::string>& controller_names();

}  // namespace ranslice
