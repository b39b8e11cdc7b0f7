// Randomized network scenarios: which slice types occupy which of the five
// slice positions, and how many UEs each one serves.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ranslice/catalog.hpp"
#include "ranslice/types.hpp"

namespace ranslice {

struct ScenarioSlice {
  int slice_index = 0;  // position 0..4 in the frame; stable over the episode
  SliceSpec spec;
  int ue_count = 0;
};

struct NetworkScenario {
  std::int64_t scenario_id = 0;
  std::uint64_t seed = 0;  // drives trajectories and fading for its episodes
  std::vector<ScenarioSlice> slices;  // sorted by slice_index

  int total_ues() const;
  int hp_slice_count() const;
  bool slice_active(int slice_index) const;
  const ScenarioSlice* slice_at(int slice_index) const;  // null when inactive
  // UEs are numbered contiguously slice-by-slice in slice_index order.
  int ue_offset(int slice_index) const;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Draws slice count, positions, types (all without replacement) and UE
// counts. Resamples only the UE counts when their total exceeds the cap.
NetworkScenario generate_scenario(std::uint64_t seed, const std::vector<SliceSpec>& catalog,
                                  std::int64_t scenario_id, int min_slices = kMinSlices,
                                  int max_slices = kMaxSlices);

// Manifest round-trip (JSON): scenario_id, seed, and the full slice specs so
// a manifest is self-contained even under a custom catalog.
void save_scenario(const NetworkScenario& scenario, const std::string& path);
NetworkScenario load_scenario(const std::string& path);

}  // namespace ranslice
