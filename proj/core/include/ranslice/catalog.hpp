// Slice-type catalog: the service classes a scenario can instantiate, each
// with its intent requirements and traffic model.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ranslice {

struct SliceSpec {
  std::string name;
  bool high_priority = false;
  std::optional<double> thr_req_mbps;    // throughput intent: slice mean >= req
  std::optional<double> lat_req_ms;      // latency intent: slice mean <= req
  std::optional<double> rel_req_pct;     // reliability intent, as a percentage
  std::int64_t buffer_capacity_pkts = 0; // per-UE buffer size
  int max_buffer_latency_ms = 0;         // packets older than this are dropped
  int packet_size_bits = 0;
  double speed_kmh = 0.0;
  double traffic_mean_mbps = 0.0;        // Poisson arrival mean, as a rate
  int ue_min = 0;
  int ue_max = 0;

  bool has_thr() const { return thr_req_mbps.has_value(); }
  bool has_lat() const { return lat_req_ms.has_value(); }
  bool has_loss() const { return rel_req_pct.has_value(); }
  // Loss-rate requirement derived from the reliability percentage.
  double loss_req() const;
};

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Maps a reliability percentage (e.g. 99.999) to the tolerated loss fraction.
double reliability_to_loss_req(double rel_pct);

// The built-in ten-row catalog.
const std::vector<SliceSpec>& default_catalog();

// Structured-text (JSON) catalog file; absent intents are nulls.
std::vector<SliceSpec> load_catalog(const std::string& path);
void save_catalog(const std::vector<SliceSpec>& catalog, const std::string& path);

// Field-level sanity checks shared by the built-in table and file loads.
void validate_spec(const SliceSpec& spec, const std::string& context);

}  // namespace ranslice
