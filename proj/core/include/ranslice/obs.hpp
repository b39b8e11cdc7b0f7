// Observation encoding and reward signals for the scheduling agents.
#pragma once

#include <array>
#include <span>
#include <vector>

#include "ranslice/intent.hpp"
#include "ranslice/scenario.hpp"
#include "ranslice/types.hpp"

namespace ranslice {

// Normalization constants shared by all observation builders.
struct ObsNormalizers {
  double thr_req_max_mbps = kThrReqMaxMbps;
  double ue_max = static_cast<double>(kMaxUes);
  double se_max = kSeMaxDefault;
};

inline constexpr int kInterObsSliceBlock = 10;
inline constexpr int kInterObsDim = kInterObsSliceBlock * kMaxSlices;
inline constexpr int kIntraObsDim = 19;

// Inter-slice observation: one 10-entry block per slice, active blocks first,
// sorted by descending throughput requirement (ties by slice slot), inactive
// blocks zero-filled. Block layout: masked drifts (thr, lat, loss), intent
// masks (thr, lat, loss), priority flag, thr_req, UE count and mean slice SE,
// the last three normalized.
std::vector<double> build_inter_obs(const NetworkScenario& scenario,
                                    std::span<const IntentDrift> drifts,
                                    std::span<const double> slice_mean_se,
                                    const ObsNormalizers& norm = {});

// Intra-slice observation for one slice: masked drifts, intent masks, the
// inter-slice grant normalized by the RBG budget, normalized thr_req and UE
// count, then per-UE buffer occupancy and normalized mean SE padded to the
// maximum UE count per slice.
std::vector<double> build_intra_obs(const ScenarioSlice& slice, const IntentDrift& drift,
                                    int grant_rbgs, std::span<const double> ue_buffer_occ,
                                    std::span<const double> ue_mean_se,
                                    const ObsNormalizers& norm = {});

// Raw-metric observation used by the intent-aware baseline: one 10-entry
// block per slice slot in slot order (no sorting), zero-filled when inactive.
// Block layout: thr_req, lat_req, loss_req, mean SE, served, effective,
// buffer occupancy, buffer latency, loss rate, arrival rate; all unnormalized.
struct SliceRawMetrics {
  double mean_se = 0.0;
  double served_mbps = 0.0;
  double effective_mbps = 0.0;
  double buffer_occ = 0.0;
  double latency_ms = 0.0;
  double loss_rate = 0.0;
  double arrivals_mbps = 0.0;
};
std::vector<double> build_raw_obs(const NetworkScenario& scenario,
                                  std::span<const SliceRawMetrics> metrics);

// Reward of one intra-slice agent: the worst drift among the slice's active
// intents.
double intra_reward(const IntentDrift& drift);

// Reward of the inter-slice agent. Three regimes: every slice fulfilled
// (mean intra reward over active slices, in [0, 1]); any high-priority slice
// unfulfilled (mean intra reward over unfulfilled high-priority slices minus
// one, in [-2, -1]); otherwise mean intra reward over unfulfilled active
// slices, in [-1, 0).
double inter_reward(std::span<const IntentDrift> drifts, std::span<const double> intra_rewards,
                    const std::array<bool, kMaxSlices>& active,
                    std::span<const bool> high_priority);

}  // namespace ranslice
