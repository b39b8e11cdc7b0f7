// Shared constants and small value types for the slicing simulator.
#pragma once

#include <cstdint>

namespace ranslice {

// Radio frame geometry: 135 resource blocks grouped into 27 RBGs of 5,
// scheduled once per 1 ms TTI.
inline constexpr int kNumRbs = 135;
inline constexpr int kNumRbgs = 27;
inline constexpr int kRbsPerRbg = kNumRbs / kNumRbgs;
inline constexpr double kTtiSec = 1e-3;

// Scenario limits.
inline constexpr int kMaxSlices = 5;
inline constexpr int kMinSlices = 3;
inline constexpr int kMaxUes = 25;
inline constexpr int kMaxUesPerSlice = 5;

// Intent evaluation.
inline constexpr double kOverFulfillRate = 0.1;  // zeta: graded band around a requirement
inline constexpr int kLossWindow = 10;           // packet-loss averaging window (steps)

// Observation normalizers.
inline constexpr double kThrReqMaxMbps = 100.0;  // largest catalog throughput requirement
inline constexpr double kSeMaxDefault = 20.0;    // bits/s/Hz, configurable in ChannelParams

static_assert(kNumRbs % kNumRbgs == 0, "RBGs must tile the RB axis exactly");

}  // namespace ranslice
