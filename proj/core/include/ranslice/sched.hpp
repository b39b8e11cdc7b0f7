// Resource allocation kernels: action-to-RBG mapping, equal-split and
// proportional-fair inter-slice schedulers, and the intra-slice kernels.
#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "ranslice/catalog.hpp"
#include "ranslice/intent.hpp"
#include "ranslice/types.hpp"

namespace ranslice {

struct SchedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-slot action factors in [-1, 1]; inactive slots are forced to -1 and
// never receive resources.
struct ActionFactors {
  std::array<double, kMaxSlices> value{};
  std::array<bool, kMaxSlices> active{};

  ActionFactors() {
    value.fill(-1.0);
    active.fill(false);
  }
};

// Proportional integer split of `total` units across `shares` (nonnegative
// weights): raw share s_i/sum * total, round half-up, then fix up one unit at
// a time per slot in descending-count order (ties broken by lowest index)
// until the counts sum to `total`. All-zero shares fall back to an equal
// split with the remainder going to the lowest indexes.
std::vector<int> share_allocate(std::span<const double> shares, int total);

// Maps inter-slice action factors to RBG counts via shares (a+1)/sum(a+1).
std::array<int, kMaxSlices> chi_allocate(const ActionFactors& factors, int total_rbgs = kNumRbgs);

// Equal split across active slices; the remainder rotates with the step
// index so long-run shares equalize.
std::array<int, kMaxSlices> inter_marr(const std::array<bool, kMaxSlices>& active,
                                       int total_rbgs = kNumRbgs, long step = 0);

// Exponential moving average of served throughput, one slot per entity.
// Initialized to a small positive floor so proportional-fair weights are
// defined before the first update.
class PFTracker {
 public:
  explicit PFTracker(int slots, double coeff = 0.01, double init_mbps = 1e-6);

  void update(int slot, double throughput_mbps);
  double mean(int slot) const;
  int slots() const { return static_cast<int>(mean_.size()); }

 private:
  std::vector<double> mean_;
  double coeff_;
};

// Proportional-fair weight: queued packets over smoothed service rate.
double pf_weight(double occupied_pkts, double mean_throughput_mbps);

// Inter-slice proportional fair: per-slice PF weights rescaled into the
// action-factor domain (a = 2*share - 1) and routed through chi_allocate.
// All-zero weights degrade to an equal split.
ActionFactors inter_mapf(std::span<const double> occupied_pkts,
                         const std::array<bool, kMaxSlices>& active, const PFTracker& tracker);

// Intra-slice round robin with a step-rotating remainder.
std::vector<int> intra_rr(int rbgs, int ue_count, long step = 0);

// Intra-slice maximum throughput: greedy by descending mean spectral
// efficiency, each UE capped at the RBGs its backlog can consume; leftover
// grants go to the best-channel UE so the slice total is preserved.
std::vector<int> intra_mt(int rbgs, std::span<const double> ue_mean_se,
                          std::span<const double> ue_buffer_bits, double bandwidth_hz);

// Intra-slice proportional fair: per-UE PF weights through the same
// share-allocation rounding used by chi_allocate.
std::vector<int> intra_pf(int rbgs, std::span<const double> ue_weights);

// Reward for the intent-aware baseline: priority-weighted sum of negative
// drift components, normalized by the total weight of active slices.
// `drifts`, `active` and `high_priority` are indexed by slice slot.
double reward_weighted_drift(std::span<const IntentDrift> drifts,
                             const std::array<bool, kMaxSlices>& active,
                             std::span<const bool> high_priority);

// Traffic-class split used by the hard-slicing baseline.
struct TrafficClass {
  bool embb = false;
  bool urllc = false;
};

// URLLC: latency requirement below 20 ms. eMBB: throughput requirement above
// 20 Mbps. A slice can be in both classes or in neither.
TrafficClass classify_slice(const SliceSpec& spec);

// Reward for the hard-slicing baseline: served throughput summed over eMBB
// slices minus queued bits summed over URLLC slices. Arrays are parallel and
// cover active slices only.
double reward_throughput_buffer(std::span<const SliceSpec> specs,
                                std::span<const double> served_mbps,
                                std::span<const double> buffer_occ_frac);

}  // namespace ranslice
