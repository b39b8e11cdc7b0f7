#include "ranslice/obs.hpp"

#include <algorithm>
#include <stdexcept>

namespace ranslice {

namespace {

void check_slot_span(size_t n, const char* what) {
  if (n != kMaxSlices) throw std::invalid_argument(std::string(what) + " expects one entry per slot");
}

}  // namespace

std::vector<double> build_inter_obs(const NetworkScenario& scenario,
                                    std::span<const IntentDrift> drifts,
                                    std::span<const double> slice_mean_se,
                                    const ObsNormalizers& norm) {
  check_slot_span(drifts.size(), "build_inter_obs drifts");
  check_slot_span(slice_mean_se.size(), "build_inter_obs slice_mean_se");

  // Active slices first, ordered by descending throughput requirement so the
  // same policy sees structurally similar inputs across scenarios. Slices
  // without a throughput intent sort as zero; ties fall back to slot order.
  std::vector<int> order;
  for (const auto& sl : scenario.slices) order.push_back(sl.slice_index);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ta = scenario.slice_at(a)->spec.thr_req_mbps.value_or(0.0);
    const double tb = scenario.slice_at(b)->spec.thr_req_mbps.value_or(0.0);
    return ta > tb;
  });

  std::vector<double> obs(kInterObsDim, 0.0);
  for (size_t pos = 0; pos < order.size(); ++pos) {
    const int s = order[pos];
    const auto& slice = *scenario.slice_at(s);
    const auto& spec = slice.spec;
    const auto& d = drifts[static_cast<size_t>(s)];
    double* block = obs.data() + pos * kInterObsSliceBlock;
    const double m_thr = spec.has_thr() ? 1.0 : 0.0;
    const double m_lat = spec.has_lat() ? 1.0 : 0.0;
    const double m_loss = spec.has_loss() ? 1.0 : 0.0;
    block[0] = m_thr * d.thr.value_or(0.0);
    block[1] = m_lat * d.lat.value_or(0.0);
    block[2] = m_loss * d.loss.value_or(0.0);
    block[3] = m_thr;
    block[4] = m_lat;
    block[5] = m_loss;
    block[6] = spec.high_priority ? 1.0 : 0.0;
    block[7] = spec.thr_req_mbps.value_or(0.0) / norm.thr_req_max_mbps;
    block[8] = static_cast<double>(slice.ue_count) / norm.ue_max;
    block[9] = slice_mean_se[static_cast<size_t>(s)] / norm.se_max;
  }
  return obs;
}

std::vector<double> build_intra_obs(const ScenarioSlice& slice, const IntentDrift& drift,
                                    int grant_rbgs, std::span<const double> ue_buffer_occ,
                                    std::span<const double> ue_mean_se,
                                    const ObsNormalizers& norm) {
  if (ue_buffer_occ.size() != ue_mean_se.size())
    throw std::invalid_argument("build_intra_obs UE spans must have equal length");
  if (ue_buffer_occ.size() != static_cast<size_t>(slice.ue_count))
    throw std::invalid_argument("build_intra_obs UE spans must cover the slice");
  if (slice.ue_count > kMaxUesPerSlice)
    throw std::invalid_argument("build_intra_obs slice exceeds the per-slice UE cap");

  const auto& spec = slice.spec;
  std::vector<double> obs(kIntraObsDim, 0.0);
  const double m_thr = spec.has_thr() ? 1.0 : 0.0;
  const double m_lat = spec.has_lat() ? 1.0 : 0.0;
  const double m_loss = spec.has_loss() ? 1.0 : 0.0;
  obs[0] = m_thr * drift.thr.value_or(0.0);
  obs[1] = m_lat * drift.lat.value_or(0.0);
  obs[2] = m_loss * drift.loss.value_or(0.0);
  obs[3] = m_thr;
  obs[4] = m_lat;
  obs[5] = m_loss;
  obs[6] = static_cast<double>(grant_rbgs) / kNumRbgs;
  obs[7] = spec.thr_req_mbps.value_or(0.0) / norm.thr_req_max_mbps;
  obs[8] = static_cast<double>(slice.ue_count) / norm.ue_max;
  for (int u = 0; u < slice.ue_count; ++u) {
    obs[9 + static_cast<size_t>(u)] = ue_buffer_occ[static_cast<size_t>(u)];
    obs[9 + kMaxUesPerSlice + static_cast<size_t>(u)] =
        ue_mean_se[static_cast<size_t>(u)] / norm.se_max;
  }
  return obs;
}

std::vector<double> build_raw_obs(const NetworkScenario& scenario,
                                  std::span<const SliceRawMetrics> metrics) {
  check_slot_span(metrics.size(), "build_raw_obs metrics");
  std::vector<double> obs(kInterObsDim, 0.0);
  for (const auto& slice : scenario.slices) {
    const int s = slice.slice_index;
    const auto& spec = slice.spec;
    const auto& m = metrics[static_cast<size_t>(s)];
    double* block = obs.data() + static_cast<size_t>(s) * kInterObsSliceBlock;
    block[0] = spec.thr_req_mbps.value_or(0.0);
    block[1] = spec.lat_req_ms.value_or(0.0);
    block[2] = spec.has_loss() ? spec.loss_req() : 0.0;
    block[3] = m.mean_se;
    block[4] = m.served_mbps;
    block[5] = m.effective_mbps;
    block[6] = m.buffer_occ;
    block[7] = m.latency_ms;
    block[8] = m.loss_rate;
    block[9] = m.arrivals_mbps;
  }
  return obs;
}

double intra_reward(const IntentDrift& drift) { return drift.min_active(); }

double inter_reward(std::span<const IntentDrift> drifts, std::span<const double> intra_rewards,
                    const std::array<bool, kMaxSlices>& active,
                    std::span<const bool> high_priority) {
  check_slot_span(drifts.size(), "inter_reward drifts");
  check_slot_span(intra_rewards.size(), "inter_reward intra_rewards");
  check_slot_span(high_priority.size(), "inter_reward high_priority");

  double sum_active = 0.0, sum_hp_bad = 0.0, sum_bad = 0.0;
  int n_active = 0, n_hp_bad = 0, n_bad = 0;
  for (int s = 0; s < kMaxSlices; ++s) {
    if (!active[s]) continue;
    const double r = intra_rewards[static_cast<size_t>(s)];
    const bool violated = drifts[static_cast<size_t>(s)].violated();
    n_active += 1;
    sum_active += r;
    if (violated) {
      n_bad += 1;
      sum_bad += r;
      if (high_priority[static_cast<size_t>(s)]) {
        n_hp_bad += 1;
        sum_hp_bad += r;
      }
    }
  }
  if (n_active == 0) return 0.0;
  if (n_hp_bad > 0) return sum_hp_bad / n_hp_bad - 1.0;
  if (n_bad > 0) return sum_bad / n_bad;
  return sum_active / n_active;
}

}  // namespace ranslice
