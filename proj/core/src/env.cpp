#include "ranslice/env.hpp"

#include <numeric>

#include "ranslice/obs.hpp"
#include "ranslice/rng.hpp"

namespace ranslice {

NetworkEnv::NetworkEnv(const NetworkScenario& scenario, const ChannelParams& params,
                       const SEGrid* grid, std::uint64_t traffic_seed)
    : scenario_(scenario), params_(params), grid_(grid) {
  if (grid_ == nullptr) throw SimnetError("environment needs a spectral-efficiency trace");
  if (grid_->ue_count != scenario_.total_ues())
    throw SimnetError("spectral-efficiency trace does not cover the scenario's UEs");
  reset(traffic_seed);
}

void NetworkEnv::reset(std::uint64_t traffic_seed) {
  step_ = 0;
  last_.reset();
  const int n = scenario_.total_ues();
  buffers_.clear();
  traffic_rng_.clear();
  for (const auto& slice : scenario_.slices) {
    for (int u = 0; u < slice.ue_count; ++u) buffers_.push_back(UEBufferState::make(slice.spec));
  }
  for (int g = 0; g < n; ++g) {
    traffic_rng_.push_back(make_stream(traffic_seed, StreamTag::kTraffic, g));
  }
  arrivals_hist_.assign(static_cast<size_t>(n), {});
  drops_hist_.assign(static_cast<size_t>(n), {});
  occ_end_hist_.assign(static_cast<size_t>(n), {});
}

std::array<bool, kMaxSlices> NetworkEnv::active_slots() const {
  std::array<bool, kMaxSlices> a{};
  for (const auto& s : scenario_.slices) a[static_cast<size_t>(s.slice_index)] = true;
  return a;
}

std::array<bool, kMaxSlices> NetworkEnv::hp_slots() const {
  std::array<bool, kMaxSlices> a{};
  for (const auto& s : scenario_.slices)
    a[static_cast<size_t>(s.slice_index)] = s.spec.high_priority;
  return a;
}

const ScenarioSlice& NetworkEnv::slice_of_ue(int ue) const {
  for (const auto& s : scenario_.slices) {
    const int off = scenario_.ue_offset(s.slice_index);
    if (ue >= off && ue < off + s.ue_count) return s;
  }
  throw SimnetError("UE index outside the scenario");
}

std::int64_t NetworkEnv::ue_buffer_pkts(int ue) const {
  return buffers_.at(static_cast<size_t>(ue)).total_pkts();
}

double NetworkEnv::ue_buffer_bits(int ue) const {
  const auto& b = buffers_.at(static_cast<size_t>(ue));
  return static_cast<double>(b.total_pkts()) * b.packet_size_bits;
}

double NetworkEnv::ue_buffer_occ(int ue) const {
  return buffers_.at(static_cast<size_t>(ue)).occupancy();
}

double NetworkEnv::ue_mean_se(int ue) const {
  double sum = 0.0;
  for (int rb = 0; rb < grid_->rb_count; ++rb) sum += grid_->at(step_, ue, rb);
  return sum / grid_->rb_count;
}

double NetworkEnv::ue_mean_se_rbgs(int ue, std::span<const int> rbgs) const {
  if (rbgs.empty()) return 0.0;
  double sum = 0.0;
  int cells = 0;
  for (int g : rbgs) {
    for (int rb : rbg_to_rbs(g)) {
      sum += grid_->at(step_, ue, rb);
      cells += 1;
    }
  }
  return sum / cells;
}

double NetworkEnv::slice_mean_se(int slot) const {
  const ScenarioSlice* slice = scenario_.slice_at(slot);
  if (slice == nullptr) return 0.0;
  const int off = scenario_.ue_offset(slot);
  double sum = 0.0;
  for (int u = 0; u < slice->ue_count; ++u) sum += ue_mean_se(off + u);
  return sum / slice->ue_count;
}

std::array<std::vector<int>, kMaxSlices> NetworkEnv::assign_rbgs(
    const std::array<int, kMaxSlices>& inter) const {
  const int total = std::accumulate(inter.begin(), inter.end(), 0);
  if (total != kNumRbgs) throw SimnetError("inter-slice allocation must cover every RBG");
  std::array<std::vector<int>, kMaxSlices> out;
  int cursor = 0;
  for (int s = 0; s < kMaxSlices; ++s) {
    if (inter[static_cast<size_t>(s)] < 0) throw SimnetError("negative RBG count");
    if (inter[static_cast<size_t>(s)] > 0 && !scenario_.slice_active(s))
      throw SimnetError("RBGs granted to an inactive slice");
    for (int k = 0; k < inter[static_cast<size_t>(s)]; ++k)
      out[static_cast<size_t>(s)].push_back(cursor++);
  }
  return out;
}

std::array<IntentDrift, kMaxSlices> NetworkEnv::current_drifts() const {
  if (last_) return last_->drift;
  return {};
}

StepResult NetworkEnv::advance(const Allocation& alloc) {
  if (step_ >= grid_->step_count) throw SimnetError("episode ran past its channel trace");

  const auto rbg_lists = assign_rbgs(alloc.inter);
  const double bandwidth = total_bandwidth_hz();

  StepResult result;
  result.step = step_;
  result.ue.assign(static_cast<size_t>(scenario_.total_ues()), UeStepMetrics{});

  for (const auto& slice : scenario_.slices) {
    const int slot = slice.slice_index;
    const auto& grant = rbg_lists[static_cast<size_t>(slot)];
    const auto& ue_counts = alloc.intra[static_cast<size_t>(slot)];
    if (static_cast<int>(ue_counts.size()) != slice.ue_count)
      throw SimnetError("intra-slice allocation does not cover the slice's UEs");
    const int counted = std::accumulate(ue_counts.begin(), ue_counts.end(), 0);
    if (counted != static_cast<int>(grant.size()))
      throw SimnetError("intra-slice allocation does not match the slice grant");

    const int off = scenario_.ue_offset(slot);
    size_t grant_cursor = 0;
    for (int u = 0; u < slice.ue_count; ++u) {
      const int take = ue_counts[static_cast<size_t>(u)];
      if (take < 0) throw SimnetError("negative RBG count");
      const std::span<const int> ue_rbgs(grant.data() + grant_cursor,
                                         static_cast<size_t>(take));
      grant_cursor += static_cast<size_t>(take);

      const int g = off + u;
      auto& buffer = buffers_[static_cast<size_t>(g)];
      const int ps = slice.spec.packet_size_bits;

      const std::int64_t budget_pkts =
          served_packet_budget(ue_rbgs, *grid_, step_, g, bandwidth, ps);
      const std::int64_t sent_pkts = std::min<std::int64_t>(budget_pkts, buffer.total_pkts());

      const std::int64_t arrivals = draw_arrivals(traffic_rng_[static_cast<size_t>(g)],
                                                  slice.spec);
      const BufferStepResult br = step_buffer(buffer, arrivals, sent_pkts * ps);

      arrivals_hist_[static_cast<size_t>(g)].push_back(arrivals);
      drops_hist_[static_cast<size_t>(g)].push_back(br.dropped_pkts);
      occ_end_hist_[static_cast<size_t>(g)].push_back(buffer.total_pkts());

      auto& m = result.ue[static_cast<size_t>(g)];
      m.served_mbps = static_cast<double>(budget_pkts) * ps / (kTtiSec * 1e6);
      m.effective_mbps = static_cast<double>(sent_pkts) * ps / (kTtiSec * 1e6);
      m.buffer_occ = buffer.occupancy();
      m.leftover_occ =
          static_cast<double>(br.leftover_pkts) / static_cast<double>(buffer.capacity_pkts);
      m.latency_ms = avg_buffer_latency(buffer.age_hist);
      m.loss_rate = packet_loss_rate(arrivals_hist_[static_cast<size_t>(g)],
                                     drops_hist_[static_cast<size_t>(g)],
                                     occ_end_hist_[static_cast<size_t>(g)], step_);
      m.arrivals_mbps = static_cast<double>(arrivals) * ps / (kTtiSec * 1e6);
      m.mean_se = ue_mean_se(g);
    }
  }

  // Slice aggregates and intent drifts.
  std::vector<const IntentDrift*> active_drifts;
  for (const auto& slice : scenario_.slices) {
    const int slot = slice.slice_index;
    const int off = scenario_.ue_offset(slot);
    const std::span<const UeStepMetrics> ue_metrics(result.ue.data() + off,
                                                    static_cast<size_t>(slice.ue_count));
    const UeStepMetrics agg = slice_aggregate(ue_metrics);
    result.slice_mean[static_cast<size_t>(slot)] = agg;

    // Drift is graded per UE against the slice requirement and the slice
    // value is the mean of the UE drifts, not the drift of the mean metric.
    IntentDrift d;
    const auto& spec = slice.spec;
    std::vector<double> per_ue(static_cast<size_t>(slice.ue_count));
    if (spec.has_thr()) {
      for (int u = 0; u < slice.ue_count; ++u) {
        const auto& m = ue_metrics[static_cast<size_t>(u)];
        per_ue[static_cast<size_t>(u)] = drift_throughput(
            m.effective_mbps, *spec.thr_req_mbps, kOverFulfillRate, m.leftover_occ);
      }
      d.thr = slice_drift(per_ue);
    }
    if (spec.has_lat()) {
      for (int u = 0; u < slice.ue_count; ++u) {
        per_ue[static_cast<size_t>(u)] =
            drift_latency(ue_metrics[static_cast<size_t>(u)].latency_ms, *spec.lat_req_ms,
                          spec.max_buffer_latency_ms, kOverFulfillRate);
      }
      d.lat = slice_drift(per_ue);
    }
    if (spec.has_loss()) {
      for (int u = 0; u < slice.ue_count; ++u) {
        per_ue[static_cast<size_t>(u)] = drift_packet_loss(
            ue_metrics[static_cast<size_t>(u)].loss_rate, spec.loss_req(), kOverFulfillRate);
      }
      d.loss = slice_drift(per_ue);
    }
    result.drift[static_cast<size_t>(slot)] = d;
    result.intra_rewards[static_cast<size_t>(slot)] = intra_reward(d);

    const double worst = std::min(d.min_active(), 0.0);
    result.cv_active += worst;
    if (d.violated()) result.violations_total += 1;
    if (spec.high_priority) {
      result.cv_hp += worst;
      if (d.violated()) result.violations_hp += 1;
    }
  }

  const int n_active = static_cast<int>(scenario_.slices.size());
  const int n_hp = scenario_.hp_slice_count();
  result.distance_total = n_active > 0 ? result.cv_active / n_active : 0.0;
  result.distance_hp = n_hp > 0 ? result.cv_hp / n_hp : 0.0;

  const std::array<bool, kMaxSlices> hp_mask = hp_slots();
  const std::array<bool, kMaxSlices> act_mask = active_slots();
  result.reward_inter = inter_reward(result.drift, result.intra_rewards, act_mask,
                                     std::span<const bool>(hp_mask.data(), kMaxSlices));

  step_ += 1;
  last_ = result;
  return result;
}

}  // namespace ranslice
