// Allocation kernels: exact coverage, share mapping, and baseline behavior.
#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "ranslice/sched.hpp"

using namespace ranslice;

namespace {

int total(const std::array<int, kMaxSlices>& counts) {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

}  // namespace

TEST_CASE("chi allocation worked examples") {
  ActionFactors f;
  f.active = {true, true, true, false, false};
  f.value = {0.0, 0.0, 0.0, -1.0, -1.0};
  CHECK(chi_allocate(f) == std::array<int, kMaxSlices>{9, 9, 9, 0, 0});

  f.value = {1.0, -1.0, 0.0, -1.0, -1.0};
  CHECK(chi_allocate(f) == std::array<int, kMaxSlices>{18, 0, 9, 0, 0});

  f.value = {-1.0, -1.0, -1.0, -1.0, -1.0};
  CHECK(chi_allocate(f) == std::array<int, kMaxSlices>{9, 9, 9, 0, 0});
}

TEST_CASE("chi allocation properties over random factors") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> uf(-1.0, 1.0);
  std::uniform_int_distribution<int> un(1, kMaxSlices);
  for (int trial = 0; trial < 10000; ++trial) {
    ActionFactors f;
    const int n_active = un(rng);
    std::vector<int> slots(kMaxSlices);
    std::iota(slots.begin(), slots.end(), 0);
    std::shuffle(slots.begin(), slots.end(), rng);
    for (int i = 0; i < n_active; ++i) {
      f.active[static_cast<size_t>(slots[static_cast<size_t>(i)])] = true;
      f.value[static_cast<size_t>(slots[static_cast<size_t>(i)])] = uf(rng);
    }
    const auto counts = chi_allocate(f);
    CHECK(total(counts) == kNumRbgs);
    for (int s = 0; s < kMaxSlices; ++s) {
      CHECK(counts[static_cast<size_t>(s)] >= 0);
      if (!f.active[static_cast<size_t>(s)]) CHECK(counts[static_cast<size_t>(s)] == 0);
    }
  }
}

TEST_CASE("chi is share consistent") {
  // Factor vectors with identical normalized shares allocate identically.
  ActionFactors a;
  a.active = {true, true, true, false, false};
  a.value = {0.0, 0.0, 0.0, -1.0, -1.0};  // shares (1,1,1)/3
  ActionFactors b = a;
  b.value = {-0.5, -0.5, -0.5, -1.0, -1.0};  // shares (0.5,0.5,0.5)/1.5
  CHECK(chi_allocate(a) == chi_allocate(b));
}

TEST_CASE("share allocate covers the total with the fix-up rule") {
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> shares(1 + static_cast<size_t>(trial % 7));
    for (auto& s : shares) s = u(rng);
    const auto counts = share_allocate(shares, 27);
    CHECK(std::accumulate(counts.begin(), counts.end(), 0) == 27);
    for (int c : counts) CHECK(c >= 0);
  }
  CHECK(share_allocate(std::vector<double>{0.0, 0.0, 0.0}, 27) ==
        std::vector<int>{9, 9, 9});
}

TEST_CASE("equal split rotates its remainder across steps") {
  const std::array<bool, kMaxSlices> active = {true, true, true, true, false};
  std::array<long, kMaxSlices> sums{};
  for (long step = 0; step < 4; ++step) {
    const auto counts = inter_marr(active, kNumRbgs, step);
    CHECK(total(counts) == kNumRbgs);
    CHECK(counts[4] == 0);
    for (int s = 0; s < 4; ++s) {
      CHECK(counts[static_cast<size_t>(s)] >= 6);
      CHECK(counts[static_cast<size_t>(s)] <= 7);
      sums[static_cast<size_t>(s)] += counts[static_cast<size_t>(s)];
    }
  }
  // 27 = 4*6 + 3, so over 4 steps each slice gets the extra RBG 3 times.
  for (int s = 0; s < 4; ++s) CHECK(sums[static_cast<size_t>(s)] == 27);
}

TEST_CASE("equal split handles three and five slices") {
  const std::array<bool, kMaxSlices> three = {true, true, true, false, false};
  CHECK(inter_marr(three) == std::array<int, kMaxSlices>{9, 9, 9, 0, 0});
  const std::array<bool, kMaxSlices> five = {true, true, true, true, true};
  const auto counts = inter_marr(five);
  CHECK(total(counts) == kNumRbgs);
  for (int s = 0; s < kMaxSlices; ++s) {
    CHECK(counts[static_cast<size_t>(s)] >= 5);
    CHECK(counts[static_cast<size_t>(s)] <= 6);
  }
}

TEST_CASE("proportional fair weights scale with queue and inverse service") {
  CHECK(pf_weight(20.0, 1.0) == doctest::Approx(2.0 * pf_weight(10.0, 1.0)));
  CHECK(pf_weight(10.0, 4.0) == doctest::Approx(0.5 * pf_weight(10.0, 2.0)));
  // The denominator is floored so an empty service history cannot blow up.
  CHECK(pf_weight(10.0, 0.0) == pf_weight(10.0, 1e-12));
  CHECK(pf_weight(0.0, 0.0) == 0.0);
}

TEST_CASE("proportional fair inter scheduler degenerates to equal split") {
  const std::array<bool, kMaxSlices> active = {true, true, true, false, false};
  PFTracker tracker(kMaxSlices);
  const std::vector<double> empty(kMaxSlices, 0.0);
  const auto f = inter_mapf(empty, active, tracker);
  CHECK(chi_allocate(f) == std::array<int, kMaxSlices>{9, 9, 9, 0, 0});
}

TEST_CASE("proportional fair inter scheduler favors the backlogged slice") {
  const std::array<bool, kMaxSlices> active = {true, true, false, false, false};
  PFTracker tracker(kMaxSlices);
  tracker.update(0, 10.0);
  tracker.update(1, 10.0);
  std::vector<double> occupied(kMaxSlices, 0.0);
  occupied[0] = 40.0;
  occupied[1] = 10.0;
  const auto f = inter_mapf(occupied, active, tracker);
  const auto counts = chi_allocate(f);
  CHECK(total(counts) == kNumRbgs);
  CHECK(counts[0] > counts[1]);
}

TEST_CASE("pf tracker is an exponential moving average") {
  PFTracker t(1, 0.5, 1.0);
  CHECK(t.mean(0) == 1.0);
  t.update(0, 3.0);
  CHECK(t.mean(0) == doctest::Approx(2.0));
  t.update(0, 2.0);
  CHECK(t.mean(0) == doctest::Approx(2.0));
}

TEST_CASE("intra round robin splits as equally as possible") {
  CHECK(intra_rr(9, 3) == std::vector<int>{3, 3, 3});
  CHECK(intra_rr(10, 3, 0) == std::vector<int>{4, 3, 3});
  CHECK(intra_rr(10, 3, 1) == std::vector<int>{3, 4, 3});
  CHECK(intra_rr(0, 4) == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("intra maximum throughput is greedy with a demand cap") {
  const double bw = 135.0 * 0.2e6;  // hertz per RBG times count, scale only
  SUBCASE("single backlogged user takes the grant") {
    const auto counts = intra_mt(7, std::vector<double>{3.0}, std::vector<double>{1e9}, bw);
    CHECK(counts == std::vector<int>{7});
  }
  SUBCASE("better channel wins when both are backlogged") {
    const auto counts =
        intra_mt(6, std::vector<double>{4.0, 2.0}, std::vector<double>{1e9, 1e9}, bw);
    CHECK(counts == std::vector<int>{6, 0});
  }
  SUBCASE("satisfied demand spills to the next user") {
    // First UE needs very little; the leftover goes to the second.
    const auto counts =
        intra_mt(6, std::vector<double>{4.0, 2.0}, std::vector<double>{1.0, 1e9}, bw);
    CHECK(counts[0] >= 1);
    CHECK(counts[0] + counts[1] == 6);
    CHECK(counts[1] > 0);
  }
  SUBCASE("no allocation to empty buffers while a backlog exists") {
    const auto counts =
        intra_mt(5, std::vector<double>{9.0, 1.0}, std::vector<double>{0.0, 1e9}, bw);
    CHECK(counts[0] == 0);
    CHECK(counts[1] == 5);
  }
}

TEST_CASE("intra proportional fair splits by weight with exact coverage") {
  CHECK(intra_pf(9, std::vector<double>{1.0, 1.0, 1.0}) == std::vector<int>{3, 3, 3});
  CHECK(intra_pf(8, std::vector<double>{0.0, 5.0}) == std::vector<int>{0, 8});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> w(1 + static_cast<size_t>(trial % 5));
    for (auto& x : w) x = u(rng);
    const auto counts = intra_pf(trial % 28, w);
    CHECK(std::accumulate(counts.begin(), counts.end(), 0) == trial % 28);
    for (int c : counts) CHECK(c >= 0);
  }
}
