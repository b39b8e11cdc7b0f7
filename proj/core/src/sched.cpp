#include "ranslice/sched.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ranslice {

namespace {

// Slot order for the fix-up passes: descending count, ties to lowest index.
std::vector<int> order_by_count(const std::vector<int>& counts) {
  std::vector<int> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return counts[a] > counts[b]; });
  return order;
}

std::vector<int> equal_split_rotating(int slots, int total, long step) {
  if (slots <= 0) throw SchedError("equal split requires at least one slot");
  std::vector<int> counts(slots, total / slots);
  const int remainder = total % slots;
  const int head = static_cast<int>(((step % slots) + slots) % slots);
  for (int j = 0; j < remainder; ++j) counts[(head + j) % slots] += 1;
  return counts;
}

}  // namespace

std::vector<int> share_allocate(std::span<const double> shares, int total) {
  const int n = static_cast<int>(shares.size());
  if (n == 0) throw SchedError("share_allocate requires at least one slot");
  if (total < 0) throw SchedError("share_allocate total must be nonnegative");
  double sum = 0.0;
  for (double s : shares) {
    if (!(s >= 0.0)) throw SchedError("share_allocate weights must be nonnegative");
    sum += s;
  }
  if (sum <= 0.0) return equal_split_rotating(n, total, 0);

  std::vector<int> counts(n);
  for (int i = 0; i < n; ++i) {
    counts[i] = static_cast<int>(std::floor(shares[i] / sum * total + 0.5));
  }
  int assigned = std::accumulate(counts.begin(), counts.end(), 0);
  while (assigned != total) {
    // One pass adds or removes a single unit per slot, highest count first,
    // re-sorting between passes. Each pass makes progress because at least
    // one slot can absorb or release a unit.
    const std::vector<int> order = order_by_count(counts);
    for (int idx : order) {
      if (assigned == total) break;
      if (assigned > total) {
        if (counts[idx] > 0) {
          counts[idx] -= 1;
          assigned -= 1;
        }
      } else {
        counts[idx] += 1;
        assigned += 1;
      }
    }
  }
  return counts;
}

std::array<int, kMaxSlices> chi_allocate(const ActionFactors& factors, int total_rbgs) {
  std::array<int, kMaxSlices> counts{};
  std::vector<int> slots;
  std::vector<double> shares;
  for (int s = 0; s < kMaxSlices; ++s) {
    if (!factors.active[s]) continue;
    const double a = factors.value[s];
    if (a < -1.0 || a > 1.0) throw SchedError("action factor outside [-1, 1]");
    slots.push_back(s);
    shares.push_back(a + 1.0);
  }
  if (slots.empty()) return counts;
  const std::vector<int> grants = share_allocate(shares, total_rbgs);
  for (size_t i = 0; i < slots.size(); ++i) counts[slots[i]] = grants[i];
  return counts;
}

std::array<int, kMaxSlices> inter_marr(const std::array<bool, kMaxSlices>& active, int total_rbgs,
                                       long step) {
  std::array<int, kMaxSlices> counts{};
  std::vector<int> slots;
  for (int s = 0; s < kMaxSlices; ++s) {
    if (active[s]) slots.push_back(s);
  }
  if (slots.empty()) return counts;
  const std::vector<int> grants =
      equal_split_rotating(static_cast<int>(slots.size()), total_rbgs, step);
  for (size_t i = 0; i < slots.size(); ++i) counts[slots[i]] = grants[i];
  return counts;
}

PFTracker::PFTracker(int slots, double coeff, double init_mbps)
    : mean_(static_cast<size_t>(slots), init_mbps), coeff_(coeff) {
  if (slots <= 0) throw SchedError("PFTracker requires at least one slot");
  if (coeff <= 0.0 || coeff > 1.0) throw SchedError("PFTracker coefficient must be in (0, 1]");
  if (init_mbps <= 0.0) throw SchedError("PFTracker floor must be positive");
}

void PFTracker::update(int slot, double throughput_mbps) {
  auto& m = mean_.at(static_cast<size_t>(slot));
  m = (1.0 - coeff_) * m + coeff_ * throughput_mbps;
}

double PFTracker::mean(int slot) const { return mean_.at(static_cast<size_t>(slot)); }

double pf_weight(double occupied_pkts, double mean_throughput_mbps) {
  // Floor the denominator well above zero so a slot with no transmission
  // history cannot capture the whole grant on its first queued packet.
  const double floor_mbps = 0.1;
  return occupied_pkts / std::max(mean_throughput_mbps, floor_mbps);
}

ActionFactors inter_mapf(std::span<const double> occupied_pkts,
                         const std::array<bool, kMaxSlices>& active, const PFTracker& tracker) {
  if (occupied_pkts.size() != kMaxSlices) throw SchedError("inter_mapf expects one entry per slot");
  ActionFactors factors;
  factors.active = active;
  double sum = 0.0;
  std::array<double, kMaxSlices> weight{};
  for (int s = 0; s < kMaxSlices; ++s) {
    if (!active[s]) continue;
    weight[s] = pf_weight(occupied_pkts[s], tracker.mean(s));
    sum += weight[s];
  }
  for (int s = 0; s < kMaxSlices; ++s) {
    if (!active[s]) continue;
    // Zero total weight leaves every factor at -1, which chi_allocate turns
    // into an equal split.
    factors.value[s] = sum > 0.0 ? 2.0 * (weight[s] / sum) - 1.0 : -1.0;
  }
  return factors;
}

std::vector<int> intra_rr(int rbgs, int ue_count, long step) {
  if (ue_count <= 0) throw SchedError("intra_rr requires at least one UE");
  if (rbgs < 0) throw SchedError("intra_rr grant must be nonnegative");
  return equal_split_rotating(ue_count, rbgs, step);
}

std::vector<int> intra_mt(int rbgs, std::span<const double> ue_mean_se,
                          std::span<const double> ue_buffer_bits, double bandwidth_hz) {
  const int n = static_cast<int>(ue_mean_se.size());
  if (n == 0) throw SchedError("intra_mt requires at least one UE");
  if (ue_buffer_bits.size() != ue_mean_se.size())
    throw SchedError("intra_mt input spans must have equal length");
  if (rbgs < 0) throw SchedError("intra_mt grant must be nonnegative");

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return ue_mean_se[a] > ue_mean_se[b]; });

  std::vector<int> counts(static_cast<size_t>(n), 0);
  int remaining = rbgs;
  for (int u : order) {
    if (remaining == 0) break;
    const double per_rbg_bits =
        ue_mean_se[u] * (bandwidth_hz / kNumRbs) * kRbsPerRbg * kTtiSec;
    if (per_rbg_bits <= 0.0 || ue_buffer_bits[u] <= 0.0) continue;
    const int cap = static_cast<int>(std::ceil(ue_buffer_bits[u] / per_rbg_bits));
    const int take = std::min(cap, remaining);
    counts[u] += take;
    remaining -= take;
  }
  // Demand ran out before the grant did; park the rest on the best channel
  // so the slice total is preserved.
  if (remaining > 0) counts[order.front()] += remaining;
  return counts;
}

std::vector<int> intra_pf(int rbgs, std::span<const double> ue_weights) {
  if (ue_weights.empty()) throw SchedError("intra_pf requires at least one UE");
  if (rbgs < 0) throw SchedError("intra_pf grant must be nonnegative");
  return share_allocate(ue_weights, rbgs);
}

double reward_weighted_drift(std::span<const IntentDrift> drifts,
                             const std::array<bool, kMaxSlices>& active,
                             std::span<const bool> high_priority) {
  if (drifts.size() != kMaxSlices || high_priority.size() != kMaxSlices)
    throw SchedError("reward_weighted_drift expects one entry per slot");
  double penalty = 0.0;
  double weight_sum = 0.0;
  for (int s = 0; s < kMaxSlices; ++s) {
    if (!active[s]) continue;
    const double w = high_priority[s] ? 2.0 : 1.0;
    weight_sum += w;
    const auto& d = drifts[s];
    if (d.thr) penalty += w * std::min(*d.thr, 0.0);
    if (d.lat) penalty += w * std::min(*d.lat, 0.0);
    if (d.loss) penalty += w * std::min(*d.loss, 0.0);
  }
  if (weight_sum <= 0.0) return 0.0;
  return penalty / weight_sum;
}

TrafficClass classify_slice(const SliceSpec& spec) {
  TrafficClass tc;
  tc.urllc = spec.has_lat() && *spec.lat_req_ms < 20.0;
  tc.embb = spec.has_thr() && *spec.thr_req_mbps > 20.0;
  return tc;
}

double reward_throughput_buffer(std::span<const SliceSpec> specs,
                                std::span<const double> served_mbps,
                                std::span<const double> buffer_occ_frac) {
  if (specs.size() != served_mbps.size() || specs.size() != buffer_occ_frac.size())
    throw SchedError("reward_throughput_buffer input spans must have equal length");
  double reward = 0.0;
  for (size_t i = 0; i < specs.size(); ++i) {
    const TrafficClass tc = classify_slice(specs[i]);
    if (tc.embb) reward += served_mbps[i];
    if (tc.urllc) {
      reward -= buffer_occ_frac[i] * static_cast<double>(specs[i].buffer_capacity_pkts) *
                static_cast<double>(specs[i].packet_size_bits);
    }
  }
  return reward;
}

}  // namespace ranslice
