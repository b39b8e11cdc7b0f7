// Buffer dynamics, packet conservation, quantized throughput, and the
// windowed loss rate checked against brute-force recounts.
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "ranslice/catalog.hpp"
#include "ranslice/channel.hpp"
#include "ranslice/simnet.hpp"
#include "ranslice/types.hpp"

using namespace ranslice;

namespace {

SliceSpec tiny_spec(std::int64_t capacity, int max_latency_ms, int packet_bits) {
  SliceSpec spec;
  spec.name = "tiny";
  spec.buffer_capacity_pkts = capacity;
  spec.max_buffer_latency_ms = max_latency_ms;
  spec.packet_size_bits = packet_bits;
  spec.traffic_mean_mbps = 1.0;
  return spec;
}

}  // namespace

TEST_CASE("step_buffer admits arrivals at age zero") {
  auto buf = UEBufferState::make(tiny_spec(10, 3, 100));
  const auto res = step_buffer(buf, 5, 0);
  CHECK(res.sent_pkts == 0);
  CHECK(res.dropped_pkts == 0);
  CHECK(res.leftover_pkts == 0);
  CHECK(buf.age_hist[0] == 5);
  CHECK(buf.total_pkts() == 5);
}

TEST_CASE("step_buffer transmits oldest packets first") {
  auto buf = UEBufferState::make(tiny_spec(20, 3, 100));
  buf.age_hist[3] = 2;
  buf.age_hist[0] = 5;
  const auto res = step_buffer(buf, 0, 300);  // 3 whole packets
  CHECK(res.sent_pkts == 3);
  CHECK(res.dropped_pkts == 0);
  CHECK(res.leftover_pkts == 4);
  // Both age-3 packets left, then one of the age-0 packets; survivors aged.
  CHECK(buf.age_hist[1] == 4);
  CHECK(buf.total_pkts() == 4);
}

TEST_CASE("step_buffer drops packets that age past the deadline") {
  auto buf = UEBufferState::make(tiny_spec(10, 2, 100));
  buf.age_hist[2] = 3;  // already at the deadline
  const auto res = step_buffer(buf, 1, 0);
  CHECK(res.sent_pkts == 0);
  CHECK(res.dropped_pkts == 3);
  CHECK(res.leftover_pkts == 3);  // counted before the aging pass
  CHECK(buf.age_hist[0] == 1);
  CHECK(buf.total_pkts() == 1);
}

TEST_CASE("step_buffer drops arrivals beyond capacity") {
  auto buf = UEBufferState::make(tiny_spec(4, 3, 100));
  buf.age_hist[0] = 2;
  const auto res = step_buffer(buf, 10, 0);
  // The two resident packets age to bin 1; only two arrival slots remain.
  CHECK(res.sent_pkts == 0);
  CHECK(res.dropped_pkts == 8);
  CHECK(buf.age_hist[0] == 2);
  CHECK(buf.age_hist[1] == 2);
  CHECK(buf.total_pkts() == 4);
}

TEST_CASE("step_buffer ignores partial packets in the sent budget") {
  auto buf = UEBufferState::make(tiny_spec(10, 3, 100));
  buf.age_hist[1] = 4;
  const auto res = step_buffer(buf, 0, 199);  // one whole packet only
  CHECK(res.sent_pkts == 1);
  CHECK(res.leftover_pkts == 3);
}

TEST_CASE("step_buffer rejects negative inputs") {
  auto buf = UEBufferState::make(tiny_spec(10, 3, 100));
  CHECK_THROWS_AS(step_buffer(buf, -1, 0), SimnetError);
  CHECK_THROWS_AS(step_buffer(buf, 0, -1), SimnetError);
}

TEST_CASE("buffer packet counts are conserved over random traces") {
  std::mt19937_64 rng(20240817);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::int64_t> cap_dist(4, 200);
    std::uniform_int_distribution<int> lat_dist(1, 12);
    const int packet_bits = 64 << (trial % 4);
    auto buf = UEBufferState::make(
        tiny_spec(cap_dist(rng), lat_dist(rng), packet_bits));

    std::int64_t arrived = 0, sent = 0, dropped = 0;
    std::uniform_int_distribution<std::int64_t> arr_dist(0, 30);
    std::uniform_int_distribution<std::int64_t> bits_dist(0, 20 * packet_bits);
    const int steps = 200 + trial;
    for (int t = 0; t < steps; ++t) {
      const std::int64_t arrivals = arr_dist(rng);
      const auto res = step_buffer(buf, arrivals, bits_dist(rng));
      arrived += arrivals;
      sent += res.sent_pkts;
      dropped += res.dropped_pkts;
    }
    CHECK(arrived == sent + dropped + buf.total_pkts());
  }
}

TEST_CASE("windowed loss rate matches a brute-force recount") {
  std::mt19937_64 rng(77001);
  std::uniform_int_distribution<std::int64_t> arr_dist(0, 12);
  std::uniform_int_distribution<std::int64_t> bits_dist(0, 10 * 100);
  const int w = kLossWindow;
  REQUIRE(w == 10);

  for (int trial = 0; trial < 1000; ++trial) {
    auto buf = UEBufferState::make(tiny_spec(15, 4, 100));
    const int steps = 25;
    std::vector<std::int64_t> arrivals, drops, occ_end;
    for (int t = 0; t < steps; ++t) {
      const std::int64_t a = arr_dist(rng);
      const auto res = step_buffer(buf, a, bits_dist(rng));
      arrivals.push_back(a);
      drops.push_back(res.dropped_pkts);
      occ_end.push_back(buf.total_pkts());
    }
    for (int n = 0; n < steps; ++n) {
      // Independent recount of the definition: drops over the window divided
      // by the packets that were in play (carried in + arrived).
      const int start = std::max(0, n - w);
      std::int64_t win_drops = 0, win_arrivals = 0;
      for (int i = start; i <= n; ++i) {
        win_drops += drops[i];
        win_arrivals += arrivals[i];
      }
      const std::int64_t carried = start > 0 ? occ_end[start - 1] : 0;
      const std::int64_t denom = carried + win_arrivals;
      const double expected =
          denom == 0 ? 0.0
                     : static_cast<double>(win_drops) / static_cast<double>(denom);
      const double got = packet_loss_rate(arrivals, drops, occ_end, n, w);
      CHECK(got == expected);
      CHECK(got >= 0.0);
      CHECK(got <= 1.0);
    }
  }
}

TEST_CASE("loss rate handles the empty-window and bounds cases") {
  std::vector<std::int64_t> arrivals{0, 0, 5}, drops{0, 0, 1}, occ{0, 0, 4};
  CHECK(packet_loss_rate(arrivals, drops, occ, 1) == 0.0);  // 0/0 window
  CHECK(packet_loss_rate(arrivals, drops, occ, 2) == doctest::Approx(0.2));
  CHECK_THROWS_AS(packet_loss_rate(arrivals, drops, occ, 3), SimnetError);
  CHECK_THROWS_AS(packet_loss_rate(arrivals, drops, occ, -1), SimnetError);
}

TEST_CASE("average buffer latency weights bins by age") {
  std::vector<std::int64_t> hist{2, 0, 2, 0};
  CHECK(avg_buffer_latency(hist) == doctest::Approx(1.0));
  std::vector<std::int64_t> empty{0, 0, 0};
  CHECK(avg_buffer_latency(empty) == 0.0);
  std::vector<std::int64_t> bad{1, -1};
  CHECK_THROWS_AS(avg_buffer_latency(bad), SimnetError);
}

TEST_CASE("rbg_to_rbs maps group g to five consecutive blocks") {
  const auto rbs = rbg_to_rbs(3);
  CHECK(rbs == std::array<int, kRbsPerRbg>{15, 16, 17, 18, 19});
  CHECK(rbg_to_rbs(0)[0] == 0);
  CHECK(rbg_to_rbs(kNumRbgs - 1)[kRbsPerRbg - 1] == kNumRbs - 1);
  CHECK_THROWS_AS(rbg_to_rbs(-1), SimnetError);
  CHECK_THROWS_AS(rbg_to_rbs(kNumRbgs), SimnetError);
}

TEST_CASE("served throughput floors capacity to whole packets") {
  SEGrid grid;
  grid.ue_count = 1;
  grid.rb_count = kNumRbs;
  grid.step_count = 1;
  grid.values.assign(static_cast<std::size_t>(kNumRbs), 2.0f);

  // One RBG: 5 RBs * SE 2.0 * (100 MHz / 135) per RB over 1 ms.
  const double bandwidth_hz = 100e6;
  const std::vector<int> one_rbg{0};
  const double bits = bandwidth_hz * 2.0 * 5.0 * kTtiSec / kNumRbs;
  const int packet_bits = 4096;
  const auto expected_pkts = static_cast<std::int64_t>(bits / packet_bits);
  CHECK(served_packet_budget(one_rbg, grid, 0, 0, bandwidth_hz, packet_bits) ==
        expected_pkts);
  CHECK(served_throughput(one_rbg, grid, 0, 0, bandwidth_hz, packet_bits) ==
        doctest::Approx(expected_pkts * packet_bits / (kTtiSec * 1e6)));

  // No allocation carries nothing; a packet too large for the grant is lost
  // to quantization.
  CHECK(served_packet_budget({}, grid, 0, 0, bandwidth_hz, packet_bits) == 0);
  const int huge_packet = 10'000'000;
  CHECK(served_packet_budget(one_rbg, grid, 0, 0, bandwidth_hz, huge_packet) == 0);
  CHECK_THROWS_AS(served_packet_budget(one_rbg, grid, 0, 0, bandwidth_hz, 0),
                  SimnetError);
}

TEST_CASE("effective throughput is capped by the backlog") {
  // 8000 bits over 1 ms is an 8 Mbps equivalent rate.
  CHECK(effective_throughput(50.0, 8000) == doctest::Approx(8.0));
  CHECK(effective_throughput(5.0, 8000) == doctest::Approx(5.0));
  CHECK(effective_throughput(5.0, 0) == 0.0);
  CHECK_THROWS_AS(effective_throughput(-1.0, 100), SimnetError);
}

TEST_CASE("slice_aggregate averages every metric") {
  UeStepMetrics a, b;
  a.served_mbps = 10.0;
  b.served_mbps = 30.0;
  a.latency_ms = 2.0;
  b.latency_ms = 4.0;
  a.loss_rate = 0.0;
  b.loss_rate = 0.5;
  const std::vector<UeStepMetrics> ues{a, b};
  const auto mean = slice_aggregate(ues);
  CHECK(mean.served_mbps == doctest::Approx(20.0));
  CHECK(mean.latency_ms == doctest::Approx(3.0));
  CHECK(mean.loss_rate == doctest::Approx(0.25));
  CHECK_THROWS_AS(slice_aggregate(std::vector<UeStepMetrics>{}), SimnetError);
}

TEST_CASE("poisson arrivals follow the configured mean") {
  std::mt19937_64 rng(5);
  auto spec = tiny_spec(100, 5, 1000);
  spec.traffic_mean_mbps = 8.0;  // mean 8 packets per TTI
  double total = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) total += static_cast<double>(draw_arrivals(rng, spec));
  CHECK(total / n == doctest::Approx(8.0).epsilon(0.02));

  spec.traffic_mean_mbps = 0.0;
  CHECK(draw_arrivals(rng, spec) == 0);
}
