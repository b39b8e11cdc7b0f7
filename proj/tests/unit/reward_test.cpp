// Reward-regime properties: the inter-slice reward lands in the band the
// violation state dictates, cross-checked against an independent enumerator.
#include <doctest.h>

#include <array>
#include <optional>
#include <random>
#include <vector>

#include "ranslice/intent.hpp"
#include "ranslice/obs.hpp"
#include "ranslice/types.hpp"

using namespace ranslice;

namespace {

struct SliceCase {
  bool active = false;
  bool hp = false;
  IntentDrift drift;
};

// Straight-line restatement of the three reward regimes, written against the
// definition rather than the production code path.
double enumerate_reward(const std::vector<SliceCase>& slices) {
  double sum_ok = 0.0, sum_hp_bad = 0.0, sum_bad = 0.0;
  int n_act = 0, n_hp_bad = 0, n_bad = 0;
  for (const auto& sc : slices) {
    if (!sc.active) continue;
    const double worst = sc.drift.min_active();
    n_act += 1;
    sum_ok += worst;
    if (worst < 0.0) {
      n_bad += 1;
      sum_bad += worst;
      if (sc.hp) {
        n_hp_bad += 1;
        sum_hp_bad += worst;
      }
    }
  }
  if (n_act == 0) return 0.0;
  if (n_hp_bad > 0) return sum_hp_bad / n_hp_bad - 1.0;
  if (n_bad > 0) return sum_bad / n_bad;
  return sum_ok / n_act;
}

double call_inter_reward(const std::vector<SliceCase>& slices) {
  std::vector<IntentDrift> drifts(kMaxSlices);
  std::vector<double> intra(kMaxSlices, 0.0);
  std::array<bool, kMaxSlices> active{};
  std::vector<bool> hp(kMaxSlices, false);
  for (std::size_t s = 0; s < slices.size(); ++s) {
    active[s] = slices[s].active;
    hp[s] = slices[s].hp;
    if (slices[s].active) {
      drifts[s] = slices[s].drift;
      intra[s] = intra_reward(slices[s].drift);
    }
  }
  return inter_reward(drifts, intra, active, hp);
}

IntentDrift thr_only(double d) {
  IntentDrift drift;
  drift.thr = d;
  return drift;
}

}  // namespace

TEST_CASE("hand-worked two-slice reward cases") {
  using S = SliceCase;
  // Both fulfilled: mean of the worst drifts.
  CHECK(call_inter_reward({S{true, false, thr_only(0.5)},
                           S{true, true, thr_only(0.1)}}) == doctest::Approx(0.3));
  // High-priority slice violated: its worst drift minus one.
  CHECK(call_inter_reward({S{true, true, thr_only(-0.5)},
                           S{true, false, thr_only(0.5)}}) == doctest::Approx(-1.5));
  // Only a regular slice violated: mean over the violated ones.
  CHECK(call_inter_reward({S{true, false, thr_only(-0.5)},
                           S{true, true, thr_only(0.5)}}) == doctest::Approx(-0.5));
  // Two violated regular slices average together.
  CHECK(call_inter_reward({S{true, false, thr_only(-0.5)},
                           S{true, false, thr_only(-1.0)}}) == doctest::Approx(-0.75));
  // Two violated high-priority slices average before the shift.
  CHECK(call_inter_reward({S{true, true, thr_only(-0.5)},
                           S{true, true, thr_only(-1.0)}}) == doctest::Approx(-1.75));
  // A violated high-priority slice masks a violated regular one.
  CHECK(call_inter_reward({S{true, true, thr_only(-0.2)},
                           S{true, false, thr_only(-1.0)}}) == doctest::Approx(-1.2));
  // Nothing scheduled scores zero.
  CHECK(call_inter_reward({S{false, false, thr_only(0.0)},
                           S{false, true, thr_only(0.0)}}) == 0.0);
  // A lone fulfilled slice passes its drift through.
  CHECK(call_inter_reward({S{true, false, thr_only(1.0)}}) == doctest::Approx(1.0));
}

TEST_CASE("exhaustive two-slice enumeration agrees with the implementation") {
  // Each slice ranges over inactive plus (hp x drift-grid) states; drifts use
  // a grid that covers the violated, boundary, and fulfilled branches.
  const std::vector<double> grid{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<SliceCase> states;
  states.push_back(SliceCase{});  // inactive
  for (bool hp : {false, true}) {
    for (double d : grid) {
      states.push_back(SliceCase{true, hp, thr_only(d)});
    }
  }
  int checked = 0;
  for (const auto& a : states) {
    for (const auto& b : states) {
      const std::vector<SliceCase> sys{a, b};
      CHECK(call_inter_reward(sys) == doctest::Approx(enumerate_reward(sys)).epsilon(1e-12));
      ++checked;
    }
  }
  CHECK(checked == 121);
}

TEST_CASE("reward bands track the violation state over random configurations") {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> drift_dist(-1.0, 1.0);
  std::uniform_int_distribution<int> count_dist(0, kMaxSlices);
  std::uniform_int_distribution<int> coin(0, 1);

  for (int trial = 0; trial < 100000; ++trial) {
    const int n_active = count_dist(rng);
    std::vector<SliceCase> slices(kMaxSlices);
    std::vector<IntentDrift> act_group, hp_group;
    for (int s = 0; s < n_active; ++s) {
      auto& sc = slices[static_cast<size_t>(s)];
      sc.active = true;
      sc.hp = coin(rng) == 1;
      // At least one intent present; each metric joins independently.
      do {
        sc.drift = IntentDrift{};
        if (coin(rng)) sc.drift.thr = drift_dist(rng);
        if (coin(rng)) sc.drift.lat = drift_dist(rng);
        if (coin(rng)) sc.drift.loss = drift_dist(rng);
      } while (!sc.drift.thr && !sc.drift.lat && !sc.drift.loss);
      act_group.push_back(sc.drift);
      if (sc.hp) hp_group.push_back(sc.drift);
    }

    const double cv_act = cv(act_group);
    const double cv_hp = cv(hp_group);
    const double r = call_inter_reward(slices);

    const bool in_top = r >= 0.0 && r <= 1.0;
    const bool in_bottom = r >= -2.0 && r < -1.0;
    const bool in_middle = r >= -1.0 && r < 0.0;
    REQUIRE(in_top + in_bottom + in_middle == 1);
    CHECK(in_top == (cv_act == 0.0));
    CHECK(in_bottom == (cv_hp < 0.0));
    CHECK(in_middle == (cv_act < 0.0 && cv_hp == 0.0));
    CHECK(r == doctest::Approx(enumerate_reward(slices)).epsilon(1e-12));
  }
}

TEST_CASE("intra reward is the worst active drift") {
  IntentDrift d;
  d.thr = 0.4;
  d.lat = -0.2;
  CHECK(intra_reward(d) == doctest::Approx(-0.2));
  d.loss = -0.9;
  CHECK(intra_reward(d) == doctest::Approx(-0.9));
  IntentDrift lone;
  lone.lat = 0.7;
  CHECK(intra_reward(lone) == doctest::Approx(0.7));
}

TEST_CASE("inter_reward validates span lengths") {
  std::vector<IntentDrift> drifts(2);
  std::vector<double> intra(kMaxSlices, 0.0);
  std::array<bool, kMaxSlices> active{};
  std::vector<bool> hp(kMaxSlices, false);
  CHECK_THROWS_AS(inter_reward(drifts, intra, active, hp), std::invalid_argument);
}
