// Intent drift: signed, normalized distance of a metric from its requirement,
// graded inside an over-fulfillment band of width zeta and saturating at 1.
#pragma once

#include <optional>
#include <vector>

#include "ranslice/catalog.hpp"
#include "ranslice/types.hpp"

namespace ranslice {

// Throughput drift. buffer_occ is the unserved backlog left after this
// step's transmission: when the buffer ran dry the shortfall is the
// application's, not the scheduler's, and the intent counts as satisfied.
double drift_throughput(double e_mbps, double req_mbps, double zeta = kOverFulfillRate,
                        double buffer_occ = 1.0);

// Latency drift. Above req it is scaled by the remaining headroom to l_max;
// inside the band (req*(1-zeta), req] it grades toward 1; below, saturated.
double drift_latency(double lat_ms, double req_ms, double l_max_ms,
                     double zeta = kOverFulfillRate);

// Packet-loss drift, same shape with the headroom to certain loss (p = 1).
double drift_packet_loss(double p, double req, double zeta = kOverFulfillRate);

// Mean over a slice's per-UE drifts.
double slice_drift(const std::vector<double>& ue_drifts);

// Per-slice drift triple; a metric's slot is empty when the intent is
// inactive. violated <=> some present drift < 0.
struct IntentDrift {
  std::optional<double> thr;
  std::optional<double> lat;
  std::optional<double> loss;

  bool violated() const;
  bool fulfilled() const { return !violated(); }
  // Smallest present drift; identity for a single active intent.
  double min_active() const;
};

// Direct requirement check on slice-mean metrics (boundary inclusive).
struct FulfillmentCheck {
  bool fulfilled = false;
  bool violated = false;
};
FulfillmentCheck check_fulfillment(double mean_thr_mbps, double mean_lat_ms,
                                   double mean_loss, const SliceSpec& spec);

// Sum over a group of slices of min(worst active drift, 0): zero when every
// slice in the group is fulfilled, strictly negative otherwise.
double cv(const std::vector<IntentDrift>& group);

}  // namespace ranslice
