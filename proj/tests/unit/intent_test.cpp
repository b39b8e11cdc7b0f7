// Drift functions: golden values, exact boundaries, and shape properties.
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ranslice/catalog.hpp"
#include "ranslice/intent.hpp"

using namespace ranslice;

namespace {
constexpr double kTol = 1e-9;
}

TEST_CASE("throughput drift golden values") {
  CHECK(drift_throughput(50.0, 100.0, 0.1, 1.0) == doctest::Approx(-0.5).epsilon(kTol));
  CHECK(drift_throughput(105.0, 100.0, 0.1, 1.0) == doctest::Approx(0.5).epsilon(kTol));
  CHECK(drift_throughput(3.0, 100.0, 0.1, 0.0) == 1.0);  // empty buffer absolves the shortfall
}

TEST_CASE("latency drift golden values") {
  CHECK(drift_latency(30.0, 20.0, 40.0) == doctest::Approx(-0.5).epsilon(kTol));
  CHECK(drift_latency(19.0, 20.0, 40.0, 0.1) == doctest::Approx(0.5).epsilon(kTol));
  CHECK(drift_latency(10.0, 20.0, 40.0, 0.1) == 1.0);  // raw value 5 clamps to 1
}

TEST_CASE("packet loss drift golden values") {
  CHECK(drift_packet_loss(0.55, 0.1) == doctest::Approx(-0.5).epsilon(kTol));
  CHECK(drift_packet_loss(0.095, 0.1, 0.1) == doctest::Approx(0.5).epsilon(kTol));
  CHECK(drift_packet_loss(1.0, 0.1) == -1.0);
}

TEST_CASE("drift is exactly zero at the requirement") {
  CHECK(drift_throughput(100.0, 100.0, 0.1, 1.0) == 0.0);
  CHECK(drift_latency(20.0, 20.0, 40.0, 0.1) == 0.0);
  CHECK(drift_packet_loss(0.1, 0.1, 0.1) == 0.0);
}

TEST_CASE("drift is exactly minus one at the worst admissible value") {
  CHECK(drift_throughput(0.0, 100.0, 0.1, 1.0) == -1.0);
  CHECK(drift_latency(40.0, 20.0, 40.0, 0.1) == -1.0);
  CHECK(drift_packet_loss(1.0, 0.1, 0.1) == -1.0);
}

TEST_CASE("drift saturates at one beyond the over-fulfillment bound") {
  CHECK(drift_throughput(110.0, 100.0, 0.1, 1.0) == 1.0);
  CHECK(drift_throughput(500.0, 100.0, 0.1, 1.0) == 1.0);
  CHECK(drift_latency(18.0, 20.0, 40.0, 0.1) == 1.0);
  CHECK(drift_packet_loss(0.09, 0.1, 0.1) == 1.0);
}

TEST_CASE("drift is monotone in its metric") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(rng), b = u(rng);
    const double lo = std::min(a, b), hi = std::max(a, b);
    CHECK(drift_throughput(lo * 200.0, 100.0, 0.1, 1.0) <=
          drift_throughput(hi * 200.0, 100.0, 0.1, 1.0));
    CHECK(drift_latency(1.0 + lo * 39.0, 20.0, 40.0, 0.1) >=
          drift_latency(1.0 + hi * 39.0, 20.0, 40.0, 0.1));
    CHECK(drift_packet_loss(lo, 0.1, 0.1) >= drift_packet_loss(hi, 0.1, 0.1));
  }
}

TEST_CASE("drift stays within the unit interval") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double thr = drift_throughput(u(rng) * 300.0, 1.0 + u(rng) * 99.0, 0.1, u(rng));
    const double lat = drift_latency(u(rng) * 40.0 + 0.001, 20.0, 40.0, 0.1);
    const double loss = drift_packet_loss(u(rng), 0.05 + u(rng) * 0.9, 0.1);
    CHECK(thr >= -1.0);
    CHECK(thr <= 1.0);
    CHECK(lat >= -1.0);
    CHECK(lat <= 1.0);
    CHECK(loss >= -1.0);
    CHECK(loss <= 1.0);
  }
}

TEST_CASE("drift precondition violations throw") {
  CHECK_THROWS_AS(drift_throughput(10.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(drift_throughput(10.0, 5.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(drift_latency(10.0, 20.0, 20.0), std::invalid_argument);
  CHECK_THROWS_AS(drift_packet_loss(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("slice drift is the arithmetic mean of per-UE drifts") {
  CHECK(slice_drift({0.4}) == 0.4);
  CHECK(slice_drift({-1.0, 1.0}) == 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> d(5);
  double sum = 0.0;
  for (auto& v : d) {
    v = u(rng);
    sum += v;
  }
  CHECK(slice_drift(d) == doctest::Approx(sum / 5.0).epsilon(1e-15));
  CHECK_THROWS_AS(slice_drift({}), std::invalid_argument);
}

TEST_CASE("violation flag means some present drift is negative") {
  IntentDrift d;
  d.thr = 0.0;
  d.lat = 1.0;
  CHECK(d.fulfilled());
  d.lat = -1e-12;
  CHECK(d.violated());
  d.lat.reset();
  d.loss = -0.5;
  CHECK(d.violated());
  d.loss.reset();
  CHECK(d.fulfilled());  // only the zero throughput drift remains
}

TEST_CASE("min_active picks the smallest present drift") {
  IntentDrift d;
  d.thr = 0.3;
  CHECK(d.min_active() == 0.3);
  d.loss = -0.2;
  CHECK(d.min_active() == -0.2);
  IntentDrift empty;
  CHECK_THROWS_AS(empty.min_active(), std::logic_error);
}

TEST_CASE("fulfillment check is boundary inclusive and skips inactive intents") {
  SliceSpec spec;
  spec.thr_req_mbps = 50.0;
  spec.lat_req_ms = 20.0;
  spec.rel_req_pct = 90.0;  // tolerated loss fraction 0.1
  CHECK(check_fulfillment(50.0, 20.0, 0.1, spec).fulfilled);
  CHECK(check_fulfillment(49.999, 20.0, 0.1, spec).violated);
  CHECK(check_fulfillment(50.0, 20.001, 0.1, spec).violated);
  CHECK(check_fulfillment(50.0, 20.0, 0.100001, spec).violated);

  SliceSpec lat_only;
  lat_only.lat_req_ms = 20.0;
  CHECK(check_fulfillment(0.0, 19.0, 1.0, lat_only).fulfilled);
  CHECK(check_fulfillment(1e9, 21.0, 0.0, lat_only).violated);
}

TEST_CASE("fulfillment agrees with drift signs on single-UE slices") {
  // With one UE the slice mean equals the UE metric, so the direct
  // requirement check and the drift signs must agree exactly.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    SliceSpec spec;
    spec.thr_req_mbps = 1.0 + u(rng) * 99.0;
    spec.lat_req_ms = 1.0 + u(rng) * 30.0;
    spec.rel_req_pct = 50.0 + u(rng) * 49.0;
    spec.max_buffer_latency_ms = static_cast<int>(*spec.lat_req_ms) + 2 +
                                 static_cast<int>(u(rng) * 50.0);
    const double thr = u(rng) * 2.0 * *spec.thr_req_mbps;
    const double lat = u(rng) * spec.max_buffer_latency_ms;
    const double loss = u(rng);

    IntentDrift d;
    d.thr = drift_throughput(thr, *spec.thr_req_mbps, kOverFulfillRate, 1.0);
    d.lat = drift_latency(lat, *spec.lat_req_ms, spec.max_buffer_latency_ms, kOverFulfillRate);
    d.loss = drift_packet_loss(loss, spec.loss_req(), kOverFulfillRate);
    const FulfillmentCheck fc = check_fulfillment(thr, lat, loss, spec);
    CHECK(fc.fulfilled == d.fulfilled());
    CHECK(fc.violated == d.violated());
  }
}

TEST_CASE("cv sums clipped slice minima") {
  IntentDrift good;
  good.thr = 0.2;
  IntentDrift bad;
  bad.thr = 0.9;
  bad.lat = -0.4;
  IntentDrift worst;
  worst.loss = -1.0;
  CHECK(cv({good}) == 0.0);
  CHECK(cv({good, bad}) == doctest::Approx(-0.4).epsilon(kTol));
  CHECK(cv({bad, worst}) == doctest::Approx(-1.4).epsilon(kTol));
  CHECK(cv({worst, worst}) == doctest::Approx(-2.0).epsilon(kTol));
}
