// The per-TTI network core: Poisson arrivals, an aging packet buffer with
// deadline drops, packet-quantized throughput under an RBG allocation, and
// windowed loss/latency metrics.
#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "ranslice/catalog.hpp"
#include "ranslice/channel.hpp"
#include "ranslice/types.hpp"

namespace ranslice {

class SimnetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Packet buffer keyed by waiting age in TTIs. Bin i holds packets that have
// waited i TTIs; aging past max_latency drops the packet.
struct UEBufferState {
  std::vector<std::int64_t> age_hist;  // size max_latency + 1
  std::int64_t capacity_pkts = 0;
  int packet_size_bits = 0;

  static UEBufferState make(const SliceSpec& spec);
  std::int64_t total_pkts() const;
  double occupancy() const;  // fraction of capacity
};

struct BufferStepResult {
  std::int64_t sent_pkts = 0;
  std::int64_t dropped_pkts = 0;   // deadline drops + admission overflow
  std::int64_t leftover_pkts = 0;  // unserved backlog right after transmission
};

// One TTI of buffer dynamics: transmit oldest-first, age (dropping packets
// past their deadline), then admit this step's arrivals at age zero.
BufferStepResult step_buffer(UEBufferState& buffer, std::int64_t arrivals_pkts,
                             std::int64_t sent_bits);

// Poisson packet arrivals with mean traffic_mean * TTI / packet_size.
std::int64_t draw_arrivals(std::mt19937_64& rng, const SliceSpec& spec);

// Whole packets an allocation can carry in one TTI.
std::int64_t served_packet_budget(std::span<const int> rbg_indices, const SEGrid& grid, int step,
                                  int ue, double bandwidth_hz, int packet_size_bits);

// Capacity of an allocation in Mbps, floored to whole packets per TTI.
double served_throughput(std::span<const int> rbg_indices, const SEGrid& grid, int step,
                         int ue, double bandwidth_hz, int packet_size_bits);

// What actually leaves the buffer: served capacity capped by the backlog
// expressed as an equivalent one-TTI rate.
double effective_throughput(double served_mbps, std::int64_t buffer_bits,
                            double tti_sec = kTtiSec);

// Loss rate over the trailing window [n-w, n]: drops in the window over
// (occupancy entering the window + arrivals in the window); 0/0 is 0.
// occupancy_end[k] is the buffer's packet count at the end of step k.
double packet_loss_rate(std::span<const std::int64_t> arrivals,
                        std::span<const std::int64_t> drops,
                        std::span<const std::int64_t> occupancy_end, int n,
                        int w = kLossWindow);

// Mean waiting age of buffered packets in TTIs (= ms); empty buffer -> 0.
double avg_buffer_latency(std::span<const std::int64_t> age_hist);

// RBG g covers RBs [5g, 5g+5).
std::array<int, kRbsPerRbg> rbg_to_rbs(int rbg_index);

struct UeStepMetrics {
  double served_mbps = 0.0;
  double effective_mbps = 0.0;
  double buffer_occ = 0.0;       // end of step, arrivals included
  double leftover_occ = 0.0;     // post-transmission backlog (drives drift)
  double latency_ms = 0.0;
  double loss_rate = 0.0;
  double arrivals_mbps = 0.0;
  double mean_se = 0.0;
};

// Arithmetic mean of each metric over a slice's UEs.
UeStepMetrics slice_aggregate(std::span<const UeStepMetrics> ue_metrics);

// Full per-frame allocation.
struct Allocation {
  std::array<int, kMaxSlices> inter{};            // RBG count per slice position
  std::array<std::vector<int>, kMaxSlices> intra; // per-UE RBG counts per slice
};

}  // namespace ranslice
