#include "ranslice/catalog.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ranslice {

using nlohmann::json;

double reliability_to_loss_req(double rel_pct) {
  if (!(rel_pct > 0.0) || !(rel_pct < 100.0)) {
    throw CatalogError("reliability percentage must lie in (0, 100), got " +
                       std::to_string(rel_pct));
  }
  return 1.0 - rel_pct / 100.0;
}

double SliceSpec::loss_req() const {
  if (!rel_req_pct) {
    throw CatalogError("slice '" + name + "' has no reliability requirement");
  }
  return reliability_to_loss_req(*rel_req_pct);
}

void validate_spec(const SliceSpec& spec, const std::string& context) {
  auto fail = [&](const std::string& what) {
    throw CatalogError(context + ": " + what);
  };
  if (spec.name.empty()) fail("missing name");
  if (!spec.has_thr() && !spec.has_lat() && !spec.has_loss()) {
    fail("slice '" + spec.name + "' declares no intent at all");
  }
  if (spec.ue_min <= 0 || spec.ue_min > spec.ue_max) {
    fail("slice '" + spec.name + "' has invalid UE bounds");
  }
  if (spec.packet_size_bits <= 0) fail("slice '" + spec.name + "' has invalid packet size");
  if (spec.buffer_capacity_pkts <= 0) fail("slice '" + spec.name + "' has invalid buffer size");
  if (spec.max_buffer_latency_ms <= 0) {
    fail("slice '" + spec.name + "' has invalid max buffer latency");
  }
  if (spec.has_lat() && !(*spec.lat_req_ms < spec.max_buffer_latency_ms)) {
    fail("slice '" + spec.name + "' latency requirement must be below max buffer latency");
  }
  if (spec.has_loss()) reliability_to_loss_req(*spec.rel_req_pct);  // throws when out of range
  if (spec.traffic_mean_mbps < 0.0) fail("slice '" + spec.name + "' has negative traffic mean");
  if (spec.speed_kmh < 0.0) fail("slice '" + spec.name + "' has negative speed");
}

const std::vector<SliceSpec>& default_catalog() {
  static const std::vector<SliceSpec> table = [] {
    auto row = [](const char* name, bool hp, std::optional<double> thr,
                  std::optional<double> lat, std::optional<double> rel, std::int64_t buf,
                  int lmax, int ps, double speed, double traffic, int umin,
                  int umax) {
      SliceSpec s;
      s.name = name;
      s.high_priority = hp;
      s.thr_req_mbps = thr;
      s.lat_req_ms = lat;
      s.rel_req_pct = rel;
      s.buffer_capacity_pkts = buf;
      s.max_buffer_latency_ms = lmax;
      s.packet_size_bits = ps;
      s.speed_kmh = speed;
      s.traffic_mean_mbps = traffic;
      s.ue_min = umin;
      s.ue_max = umax;
      return s;
    };
    const std::optional<double> none;
    std::vector<SliceSpec> t = {
        row("control_case_2", true, none, 50.0, 99.999999, 10240, 100, 8192, 0.0, 5.0, 4, 5),
        row("monitoring_case_1", false, 10.0, none, none, 10240, 100, 8192, 72.0, 10.0, 4, 5),
        row("robotic_surgery_case_1", true, 20.0, 20.0, 99.9999, 1024000, 40, 16000, 0.0, 30.0,
            4, 5),
        row("robotic_diagnosis", false, 15.0, 20.0, 99.999, 1024000, 40, 640, 0.0, 15.0, 4, 5),
        row("medical_monitoring", false, 10.0, 100.0, 99.9999, 10240, 200, 8000, 0.0, 10.0, 4,
            5),
        row("uav_app_case_1", true, 100.0, 200.0, none, 1024000, 400, 65536, 30.0, 100.0, 2, 4),
        row("uav_control_non_vlos", true, 20.0, 140.0, 99.99, 10240, 300, 65536, 30.0, 20.0, 4,
            5),
        row("vr_gaming", false, 100.0, 10.0, 99.99, 1024000, 20, 65536, 0.0, 100.0, 2, 4),
        row("cloud_gaming", false, 50.0, 80.0, none, 10240, 160, 65536, 0.0, 50.0, 2, 5),
        row("video_streaming_4k", false, 30.0, none, none, 10240, 100, 65536, 0.0, 30.0, 2, 5),
    };
    for (const auto& s : t) validate_spec(s, "builtin catalog");
    return t;
  }();
  return table;
}

namespace {

json spec_to_json(const SliceSpec& s) {
  json j;
  j["name"] = s.name;
  j["high_priority"] = s.high_priority;
  j["thr_req_mbps"] = s.thr_req_mbps ? json(*s.thr_req_mbps) : json(nullptr);
  j["lat_req_ms"] = s.lat_req_ms ? json(*s.lat_req_ms) : json(nullptr);
  j["rel_req_pct"] = s.rel_req_pct ? json(*s.rel_req_pct) : json(nullptr);
  j["buffer_capacity_pkts"] = s.buffer_capacity_pkts;
  j["max_buffer_latency_ms"] = s.max_buffer_latency_ms;
  j["packet_size_bits"] = s.packet_size_bits;
  j["speed_kmh"] = s.speed_kmh;
  j["traffic_mean_mbps"] = s.traffic_mean_mbps;
  j["ue_min"] = s.ue_min;
  j["ue_max"] = s.ue_max;
  return j;
}

std::optional<double> opt_number(const json& j, const std::string& key,
                                 const std::string& context) {
  if (!j.contains(key)) {
    throw CatalogError(context + ": missing field '" + key + "'");
  }
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) {
    throw CatalogError(context + ": field '" + key + "' must be a number or null");
  }
  return v.get<double>();
}

template <typename T>
T req_value(const json& j, const std::string& key, const std::string& context) {
  if (!j.contains(key)) {
    throw CatalogError(context + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw CatalogError(context + ": field '" + key + "' has the wrong type");
  }
}

SliceSpec spec_from_json(const json& j, int row) {
  const std::string context = "catalog row " + std::to_string(row);
  if (!j.is_object()) throw CatalogError(context + ": expected an object");
  SliceSpec s;
  s.name = req_value<std::string>(j, "name", context);
  s.high_priority = req_value<bool>(j, "high_priority", context);
  s.thr_req_mbps = opt_number(j, "thr_req_mbps", context);
  s.lat_req_ms = opt_number(j, "lat_req_ms", context);
  s.rel_req_pct = opt_number(j, "rel_req_pct", context);
  s.buffer_capacity_pkts = req_value<std::int64_t>(j, "buffer_capacity_pkts", context);
  s.max_buffer_latency_ms = req_value<int>(j, "max_buffer_latency_ms", context);
  s.packet_size_bits = req_value<int>(j, "packet_size_bits", context);
  s.speed_kmh = req_value<double>(j, "speed_kmh", context);
  s.traffic_mean_mbps = req_value<double>(j, "traffic_mean_mbps", context);
  s.ue_min = req_value<int>(j, "ue_min", context);
  s.ue_max = req_value<int>(j, "ue_max", context);
  validate_spec(s, context);
  return s;
}

}  // namespace

std::vector<SliceSpec> load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CatalogError("cannot open catalog file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw CatalogError("catalog file " + path + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("slices") || !doc["slices"].is_array()) {
    throw CatalogError("catalog file " + path + " must hold an object with a 'slices' array");
  }
  std::vector<SliceSpec> out;
  int row = 0;
  for (const auto& item : doc["slices"]) {
    out.push_back(spec_from_json(item, row));
    ++row;
  }
  if (out.empty()) throw CatalogError("catalog file " + path + " lists no slices");
  return out;
}

void save_catalog(const std::vector<SliceSpec>& catalog, const std::string& path) {
  json doc;
  doc["slices"] = json::array();
  for (const auto& s : catalog) doc["slices"].push_back(spec_to_json(s));
  std::ofstream out(path);
  if (!out) throw CatalogError("cannot write catalog file: " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace ranslice
