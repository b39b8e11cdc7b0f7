#include "ranslice/intent.hpp"

#include <algorithm>
#include <stdexcept>

namespace ranslice {

namespace {

double clamp_drift(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

double drift_throughput(double e_mbps, double req_mbps, double zeta, double buffer_occ) {
  if (!(req_mbps > 0.0)) throw std::invalid_argument("throughput requirement must be > 0");
  if (!(zeta > 0.0 && zeta <= 1.0)) throw std::invalid_argument("zeta must be in (0, 1]");
  if (buffer_occ <= 0.0) return 1.0;  // nothing left to send
  if (e_mbps < req_mbps) {
    return clamp_drift((e_mbps - req_mbps) / req_mbps);
  }
  if (e_mbps < req_mbps * (1.0 + zeta)) {
    return clamp_drift((e_mbps - req_mbps) / (req_mbps * zeta));
  }
  return 1.0;
}

double drift_latency(double lat_ms, double req_ms, double l_max_ms, double zeta) {
  if (!(req_ms > 0.0 && req_ms < l_max_ms)) {
    throw std::invalid_argument("latency requirement must satisfy 0 < req < l_max");
  }
  if (!(zeta > 0.0 && zeta <= 1.0)) throw std::invalid_argument("zeta must be in (0, 1]");
  if (lat_ms > req_ms) {
    return clamp_drift((req_ms - lat_ms) / (l_max_ms - req_ms));
  }
  if (lat_ms > req_ms * (1.0 - zeta)) {
    return clamp_drift((req_ms - lat_ms) / (req_ms * zeta));
  }
  return 1.0;
}

double drift_packet_loss(double p, double req, double zeta) {
  if (!(req > 0.0 && req < 1.0)) {
    throw std::invalid_argument("loss requirement must lie in (0, 1)");
  }
  if (!(zeta > 0.0 && zeta <= 1.0)) throw std::invalid_argument("zeta must be in (0, 1]");
  if (p > req) {
    return clamp_drift((req - p) / (1.0 - req));
  }
  if (p > req * (1.0 - zeta)) {
    return clamp_drift((req - p) / (req * zeta));
  }
  return 1.0;
}

double slice_drift(const std::vector<double>& ue_drifts) {
  if (ue_drifts.empty()) throw std::invalid_argument("slice_drift over an empty slice");
  double sum = 0.0;
  for (double d : ue_drifts) sum += d;
  return sum / static_cast<double>(ue_drifts.size());
}

bool IntentDrift::violated() const {
  if (thr && *thr < 0.0) return true;
  if (lat && *lat < 0.0) return true;
  if (loss && *loss < 0.0) return true;
  return false;
}

double IntentDrift::min_active() const {
  double m = 1.0;
  bool any = false;
  for (const auto& d : {thr, lat, loss}) {
    if (d) {
      m = any ? std::min(m, *d) : *d;
      any = true;
    }
  }
  if (!any) throw std::logic_error("IntentDrift with no active intent");
  return m;
}

FulfillmentCheck check_fulfillment(double mean_thr_mbps, double mean_lat_ms, double mean_loss,
                                   const SliceSpec& spec) {
  bool ok = true;
  if (spec.has_thr() && !(mean_thr_mbps >= *spec.thr_req_mbps)) ok = false;
  if (spec.has_lat() && !(mean_lat_ms <= *spec.lat_req_ms)) ok = false;
  if (spec.has_loss() && !(mean_loss <= spec.loss_req())) ok = false;
  return {ok, !ok};
}

double cv(const std::vector<IntentDrift>& group) {
  double total = 0.0;
  for (const auto& d : group) total += std::min(d.min_active(), 0.0);
  return total;
}

}  // namespace ranslice
