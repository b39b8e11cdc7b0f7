// Offered-load analysis: how many resource blocks a scenario's traffic would
// need per step under pessimistic, mean, and optimistic channel readings.
#pragma once

#include <vector>

#include "ranslice/channel.hpp"
#include "ranslice/scenario.hpp"

namespace ranslice {

struct DemandStep {
  double rb_min_se = 0.0;  // RBs needed when every UE is stuck at its worst RB
  double rb_avg_se = 0.0;  // at its mean RB quality
  double rb_max_se = 0.0;  // at its best RB
};

struct DemandSummary {
  std::vector<DemandStep> steps;
  double mean_rb_min_se = 0.0;
  double mean_rb_avg_se = 0.0;
  double mean_rb_max_se = 0.0;
};

// Per step, per UE: requested bits over what one RB delivers at the UE's
// min/avg/max spectral efficiency, summed over all UEs. The average-SE column
// is the one demand classes are defined on.
DemandSummary demand_analysis(const NetworkScenario& scenario, const SEGrid& grid,
                              const ChannelParams& params);

}  // namespace ranslice
