#include "ranslice/demand.hpp"

#include <algorithm>

namespace ranslice {

DemandSummary demand_analysis(const NetworkScenario& scenario, const SEGrid& grid,
                              const ChannelParams& params) {
  if (grid.ue_count != scenario.total_ues())
    throw ChannelError("spectral-efficiency trace does not cover the scenario's UEs");
  const double rb_bw = params.rb_bandwidth_hz();
  const double se_floor = 1e-6;  // keeps dead channels from producing infinities

  DemandSummary summary;
  summary.steps.resize(static_cast<size_t>(grid.step_count));
  for (int n = 0; n < grid.step_count; ++n) {
    auto& row = summary.steps[static_cast<size_t>(n)];
    for (const auto& slice : scenario.slices) {
      const int off = scenario.ue_offset(slice.slice_index);
      const double bits_per_step = slice.spec.traffic_mean_mbps * 1e6 * kTtiSec;
      if (bits_per_step <= 0.0) continue;
      for (int u = 0; u < slice.ue_count; ++u) {
        const int g = off + u;
        double se_min = grid.at(n, g, 0), se_max = se_min, se_sum = 0.0;
        for (int rb = 0; rb < grid.rb_count; ++rb) {
          const double se = grid.at(n, g, rb);
          se_min = std::min(se_min, se);
          se_max = std::max(se_max, se);
          se_sum += se;
        }
        const double se_avg = se_sum / grid.rb_count;
        const double rb_bits = rb_bw * kTtiSec;  // bits per RB per unit SE
        row.rb_min_se += bits_per_step / (std::max(se_min, se_floor) * rb_bits);
        row.rb_avg_se += bits_per_step / (std::max(se_avg, se_floor) * rb_bits);
        row.rb_max_se += bits_per_step / (std::max(se_max, se_floor) * rb_bits);
      }
    }
    summary.mean_rb_min_se += row.rb_min_se;
    summary.mean_rb_avg_se += row.rb_avg_se;
    summary.mean_rb_max_se += row.rb_max_se;
  }
  if (grid.step_count > 0) {
    summary.mean_rb_min_se /= grid.step_count;
    summary.mean_rb_avg_se /= grid.step_count;
    summary.mean_rb_max_se /= grid.step_count;
  }
  return summary;
}

}  // namespace ranslice
