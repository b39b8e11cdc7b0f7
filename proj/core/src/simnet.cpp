#include "ranslice/simnet.hpp"

#include <algorithm>
#include <cmath>

namespace ranslice {

UEBufferState UEBufferState::make(const SliceSpec& spec) {
  UEBufferState b;
  b.age_hist.assign(static_cast<std::size_t>(spec.max_buffer_latency_ms) + 1, 0);
  b.capacity_pkts = spec.buffer_capacity_pkts;
  b.packet_size_bits = spec.packet_size_bits;
  return b;
}

std::int64_t UEBufferState::total_pkts() const {
  std::int64_t total = 0;
  for (auto c : age_hist) total += c;
  return total;
}

double UEBufferState::occupancy() const {
  return static_cast<double>(total_pkts()) / static_cast<double>(capacity_pkts);
}

BufferStepResult step_buffer(UEBufferState& buffer, std::int64_t arrivals_pkts,
                             std::int64_t sent_bits) {
  if (arrivals_pkts < 0 || sent_bits < 0) {
    throw SimnetError("negative arrivals or sent bits");
  }
  BufferStepResult res;

  // Transmit oldest-first, whole packets only.
  std::int64_t budget = sent_bits / buffer.packet_size_bits;
  for (int age = static_cast<int>(buffer.age_hist.size()) - 1; age >= 0 && budget > 0;
       --age) {
    const std::int64_t take = std::min(budget, buffer.age_hist[age]);
    buffer.age_hist[age] -= take;
    budget -= take;
    res.sent_pkts += take;
  }
  res.leftover_pkts = buffer.total_pkts();

  // Age every remaining packet by one TTI; the oldest bin falls off.
  const int l_max = static_cast<int>(buffer.age_hist.size()) - 1;
  res.dropped_pkts += buffer.age_hist[l_max];
  for (int age = l_max; age > 0; --age) buffer.age_hist[age] = buffer.age_hist[age - 1];
  buffer.age_hist[0] = 0;

  // Admit arrivals, dropping whatever exceeds the capacity.
  const std::int64_t space = buffer.capacity_pkts - buffer.total_pkts();
  const std::int64_t admitted = std::min(arrivals_pkts, space);
  buffer.age_hist[0] += admitted;
  res.dropped_pkts += arrivals_pkts - admitted;
  return res;
}

std::int64_t draw_arrivals(std::mt19937_64& rng, const SliceSpec& spec) {
  const double mean_pkts =
      spec.traffic_mean_mbps * 1e6 * kTtiSec / spec.packet_size_bits;
  if (mean_pkts <= 0.0) return 0;
  std::poisson_distribution<std::int64_t> dist(mean_pkts);
  return dist(rng);
}

std::int64_t served_packet_budget(std::span<const int> rbg_indices, const SEGrid& grid, int step,
                                  int ue, double bandwidth_hz, int packet_size_bits) {
  if (packet_size_bits <= 0) throw SimnetError("packet size must be positive");
  double se_sum = 0.0;
  for (int g : rbg_indices) {
    for (int rb : rbg_to_rbs(g)) se_sum += grid.at(step, ue, rb);
  }
  // Each RB carries SE * B/G bits/s; the TTI's capacity is floored to whole
  // packets.
  const double bits_per_tti = bandwidth_hz * se_sum * kTtiSec / kNumRbs;
  return static_cast<std::int64_t>(std::floor(bits_per_tti / packet_size_bits));
}

double served_throughput(std::span<const int> rbg_indices, const SEGrid& grid, int step,
                         int ue, double bandwidth_hz, int packet_size_bits) {
  const std::int64_t packets =
      served_packet_budget(rbg_indices, grid, step, ue, bandwidth_hz, packet_size_bits);
  return static_cast<double>(packets) * packet_size_bits / (kTtiSec * 1e6);
}

double effective_throughput(double served_mbps, std::int64_t buffer_bits, double tti_sec) {
  if (served_mbps < 0.0) throw SimnetError("served throughput must be nonnegative");
  const double buffer_rate_mbps = static_cast<double>(buffer_bits) / (tti_sec * 1e6);
  return std::min(served_mbps, buffer_rate_mbps);
}

double packet_loss_rate(std::span<const std::int64_t> arrivals,
                        std::span<const std::int64_t> drops,
                        std::span<const std::int64_t> occupancy_end, int n, int w) {
  if (n < 0 || n >= static_cast<int>(arrivals.size()) ||
      arrivals.size() != drops.size() || arrivals.size() != occupancy_end.size()) {
    throw SimnetError("packet_loss_rate history bounds");
  }
  const int start = std::max(0, n - w);
  std::int64_t dropped = 0, arrived = 0;
  for (int i = start; i <= n; ++i) {
    dropped += drops[i];
    arrived += arrivals[i];
  }
  const std::int64_t initial = start > 0 ? occupancy_end[start - 1] : 0;
  const std::int64_t denom = initial + arrived;
  if (denom == 0) return 0.0;
  return static_cast<double>(dropped) / static_cast<double>(denom);
}

double avg_buffer_latency(std::span<const std::int64_t> age_hist) {
  std::int64_t pkts = 0, weighted = 0;
  for (std::size_t age = 0; age < age_hist.size(); ++age) {
    if (age_hist[age] < 0) throw SimnetError("negative age histogram bin");
    pkts += age_hist[age];
    weighted += static_cast<std::int64_t>(age) * age_hist[age];
  }
  if (pkts == 0) return 0.0;
  return static_cast<double>(weighted) / static_cast<double>(pkts);
}

std::array<int, kRbsPerRbg> rbg_to_rbs(int rbg_index) {
  if (rbg_index < 0 || rbg_index >= kNumRbgs) {
    throw SimnetError("RBG index out of range: " + std::to_string(rbg_index));
  }
  std::array<int, kRbsPerRbg> rbs{};
  for (int i = 0; i < kRbsPerRbg; ++i) rbs[i] = rbg_index * kRbsPerRbg + i;
  return rbs;
}

UeStepMetrics slice_aggregate(std::span<const UeStepMetrics> ue_metrics) {
  if (ue_metrics.empty()) throw SimnetError("slice_aggregate over an empty slice");
  UeStepMetrics mean;
  for (const auto& m : ue_metrics) {
    mean.served_mbps += m.served_mbps;
    mean.effective_mbps += m.effective_mbps;
    mean.buffer_occ += m.buffer_occ;
    mean.leftover_occ += m.leftover_occ;
    mean.latency_ms += m.latency_ms;
    mean.loss_rate += m.loss_rate;
    mean.arrivals_mbps += m.arrivals_mbps;
    mean.mean_se += m.mean_se;
  }
  const double n = static_cast<double>(ue_metrics.size());
  mean.served_mbps /= n;
  mean.effective_mbps /= n;
  mean.buffer_occ /= n;
  mean.leftover_occ /= n;
  mean.latency_ms /= n;
  mean.loss_rate /= n;
  mean.arrivals_mbps /= n;
  mean.mean_se /= n;
  return mean;
}

}  // namespace ranslice
