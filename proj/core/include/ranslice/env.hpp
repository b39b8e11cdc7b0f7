// Episode environment: ties a scenario, a spectral-efficiency trace, traffic
// arrivals, and per-UE buffers into a steppable network simulator.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ranslice/channel.hpp"
#include "ranslice/intent.hpp"
#include "ranslice/scenario.hpp"
#include "ranslice/simnet.hpp"

namespace ranslice {

// Everything produced by one simulated TTI.
struct StepResult {
  int step = 0;
  std::array<IntentDrift, kMaxSlices> drift{};         // per slot, active only
  std::array<double, kMaxSlices> intra_rewards{};      // min active drift per slot
  std::vector<UeStepMetrics> ue;                       // per global UE index
  std::array<UeStepMetrics, kMaxSlices> slice_mean{};  // per slot, active only
  double cv_active = 0.0;  // sum of negative worst drifts, all active slices
  double cv_hp = 0.0;      // same over the high-priority group
  int violations_total = 0;
  int violations_hp = 0;
  double distance_total = 0.0;  // cv normalized by group size, 0 if empty
  double distance_hp = 0.0;
  double reward_inter = 0.0;  // priority-aware inter-slice reward
};

class NetworkEnv {
 public:
  // The grid is borrowed and must outlive the environment; it fixes the
  // episode's channel while `traffic_seed` drives the arrival processes.
  NetworkEnv(const NetworkScenario& scenario, const ChannelParams& params, const SEGrid* grid,
             std::uint64_t traffic_seed);

  void reset(std::uint64_t traffic_seed);

  const NetworkScenario& scenario() const { return scenario_; }
  const ChannelParams& channel_params() const { return params_; }
  int step_index() const { return step_; }
  int max_steps() const { return grid_->step_count; }
  double total_bandwidth_hz() const { return params_.bandwidth_mhz * 1e6; }

  std::array<bool, kMaxSlices> active_slots() const;
  std::array<bool, kMaxSlices> hp_slots() const;

  // Pre-decision views of the current step.
  std::int64_t ue_buffer_pkts(int ue) const;
  double ue_buffer_bits(int ue) const;
  double ue_buffer_occ(int ue) const;
  double ue_mean_se(int ue) const;  // over all RBs at the current step
  double ue_mean_se_rbgs(int ue, std::span<const int> rbgs) const;
  double slice_mean_se(int slot) const;

  // Concrete RBG indices for an inter-slice count vector: contiguous blocks
  // in slot order.
  std::array<std::vector<int>, kMaxSlices> assign_rbgs(
      const std::array<int, kMaxSlices>& inter) const;

  // Drifts observed so far (zero before the first step of an episode).
  std::array<IntentDrift, kMaxSlices> current_drifts() const;

  const StepResult* last_result() const { return last_ ? &*last_ : nullptr; }

  StepResult advance(const Allocation& alloc);

 private:
  const ScenarioSlice& slice_of_ue(int ue) const;

  NetworkScenario scenario_;
  ChannelParams params_;
  const SEGrid* grid_;
  int step_ = 0;
  std::vector<UEBufferState> buffers_;          // per global UE
  std::vector<std::mt19937_64> traffic_rng_;    // per global UE
  std::vector<std::vector<std::int64_t>> arrivals_hist_, drops_hist_, occ_end_hist_;
  std::optional<StepResult> last_;
};

}  // namespace ranslice
