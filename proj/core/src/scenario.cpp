#include "ranslice/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ranslice/rng.hpp"

namespace ranslice {

using nlohmann::json;

int NetworkScenario::total_ues() const {
  int total = 0;
  for (const auto& s : slices) total += s.ue_count;
  return total;
}

int NetworkScenario::hp_slice_count() const {
  int n = 0;
  for (const auto& s : slices) n += s.spec.high_priority ? 1 : 0;
  return n;
}

bool NetworkScenario::slice_active(int slice_index) const {
  return slice_at(slice_index) != nullptr;
}

const ScenarioSlice* NetworkScenario::slice_at(int slice_index) const {
  for (const auto& s : slices) {
    if (s.slice_index == slice_index) return &s;
  }
  return nullptr;
}

int NetworkScenario::ue_offset(int slice_index) const {
  int offset = 0;
  for (const auto& s : slices) {
    if (s.slice_index == slice_index) return offset;
    offset += s.ue_count;
  }
  throw ScenarioError("ue_offset asked for inactive slice index " +
                      std::to_string(slice_index));
}

namespace {

// First k entries of a Fisher-Yates shuffle; uniform draw without replacement.
std::vector<int> sample_without_replacement(std::mt19937_64& rng, int n, int k) {
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

NetworkScenario generate_scenario(std::uint64_t seed, const std::vector<SliceSpec>& catalog,
                                  std::int64_t scenario_id, int min_slices, int max_slices) {
  if (min_slices < 1 || min_slices > max_slices || max_slices > kMaxSlices) {
    throw ScenarioError("slice-count bounds out of range");
  }
  if (static_cast<int>(catalog.size()) < max_slices) {
    throw ScenarioError("catalog smaller than the maximum slice count");
  }
  auto rng = make_stream(seed, StreamTag::kScenario, static_cast<std::uint64_t>(scenario_id));

  std::uniform_int_distribution<int> count_dist(min_slices, max_slices);
  const int n_slices = count_dist(rng);
  const std::vector<int> positions =
      sample_without_replacement(rng, kMaxSlices, n_slices);
  const std::vector<int> types =
      sample_without_replacement(rng, static_cast<int>(catalog.size()), n_slices);

  NetworkScenario scenario;
  scenario.scenario_id = scenario_id;
  scenario.seed = seed;
  for (int i = 0; i < n_slices; ++i) {
    ScenarioSlice s;
    s.slice_index = positions[i];
    s.spec = catalog[types[i]];
    scenario.slices.push_back(std::move(s));
  }
  std::sort(scenario.slices.begin(), scenario.slices.end(),
            [](const ScenarioSlice& a, const ScenarioSlice& b) {
              return a.slice_index < b.slice_index;
            });

  // UE counts; the slice-type draw is kept, only counts are resampled when
  // the scenario-wide cap is exceeded.
  for (int attempt = 0; attempt < 10000; ++attempt) {
    int total = 0;
    for (auto& s : scenario.slices) {
      std::uniform_int_distribution<int> ue_dist(s.spec.ue_min, s.spec.ue_max);
      s.ue_count = ue_dist(rng);
      total += s.ue_count;
    }
    if (total <= kMaxUes) return scenario;
  }
  throw ScenarioError("could not satisfy the total-UE cap for scenario " +
                      std::to_string(scenario_id));
}

void save_scenario(const NetworkScenario& scenario, const std::string& path) {
  json doc;
  doc["scenario_id"] = scenario.scenario_id;
  doc["seed"] = scenario.seed;
  doc["slices"] = json::array();
  for (const auto& s : scenario.slices) {
    json js;
    js["slice_index"] = s.slice_index;
    js["ue_count"] = s.ue_count;
    js["name"] = s.spec.name;
    js["high_priority"] = s.spec.high_priority;
    js["thr_req_mbps"] = s.spec.thr_req_mbps ? json(*s.spec.thr_req_mbps) : json(nullptr);
    js["lat_req_ms"] = s.spec.lat_req_ms ? json(*s.spec.lat_req_ms) : json(nullptr);
    js["rel_req_pct"] = s.spec.rel_req_pct ? json(*s.spec.rel_req_pct) : json(nullptr);
    js["buffer_capacity_pkts"] = s.spec.buffer_capacity_pkts;
    js["max_buffer_latency_ms"] = s.spec.max_buffer_latency_ms;
    js["packet_size_bits"] = s.spec.packet_size_bits;
    js["speed_kmh"] = s.spec.speed_kmh;
    js["traffic_mean_mbps"] = s.spec.traffic_mean_mbps;
    js["ue_min"] = s.spec.ue_min;
    js["ue_max"] = s.spec.ue_max;
    doc["slices"].push_back(std::move(js));
  }
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario manifest: " + path);
  out << doc.dump(2) << '\n';
}

NetworkScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario manifest: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ScenarioError("scenario manifest " + path + " is not valid JSON: " + e.what());
  }
  NetworkScenario scenario;
  try {
    scenario.scenario_id = doc.at("scenario_id").get<std::int64_t>();
    scenario.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& js : doc.at("slices")) {
      ScenarioSlice s;
      s.slice_index = js.at("slice_index").get<int>();
      s.ue_count = js.at("ue_count").get<int>();
      s.spec.name = js.at("name").get<std::string>();
      s.spec.high_priority = js.at("high_priority").get<bool>();
      auto opt = [&](const char* key) -> std::optional<double> {
        const auto& v = js.at(key);
        if (v.is_null()) return std::nullopt;
        return v.get<double>();
      };
      s.spec.thr_req_mbps = opt("thr_req_mbps");
      s.spec.lat_req_ms = opt("lat_req_ms");
      s.spec.rel_req_pct = opt("rel_req_pct");
      s.spec.buffer_capacity_pkts = js.at("buffer_capacity_pkts").get<std::int64_t>();
      s.spec.max_buffer_latency_ms = js.at("max_buffer_latency_ms").get<int>();
      s.spec.packet_size_bits = js.at("packet_size_bits").get<int>();
      s.spec.speed_kmh = js.at("speed_kmh").get<double>();
      s.spec.traffic_mean_mbps = js.at("traffic_mean_mbps").get<double>();
      s.spec.ue_min = js.at("ue_min").get<int>();
      s.spec.ue_max = js.at("ue_max").get<int>();
      validate_spec(s.spec, "scenario manifest slice " + std::to_string(s.slice_index));
      scenario.slices.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ScenarioError("scenario manifest " + path + " is malformed: " + e.what());
  }
  std::sort(scenario.slices.begin(), scenario.slices.end(),
            [](const ScenarioSlice& a, const ScenarioSlice& b) {
              return a.slice_index < b.slice_index;
            });
  return scenario;
}

}  // namespace ranslice
