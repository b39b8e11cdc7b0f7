// Advantage-estimation and PPO-loss oracles: brute-force GAE sums, clipped
// surrogate hand checks, and finite-difference gradient verification.
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "ranslice/policy.hpp"
#include "ranslice/ppo.hpp"

using namespace ranslice;

namespace {

// Direct evaluation of the advantage series: sum of (gamma*lambda)^k deltas
// along the trajectory, cut at episode boundaries.
std::vector<double> brute_gae(const std::vector<double>& rewards,
                              const std::vector<double>& values,
                              const std::vector<std::uint8_t>& dones, double bootstrap,
                              double gamma, double lambda) {
  const int n = static_cast<int>(rewards.size());
  std::vector<double> adv(rewards.size(), 0.0);
  for (int t = 0; t < n; ++t) {
    double coef = 1.0;
    for (int k = t; k < n; ++k) {
      const double next_v = k + 1 < n ? values[static_cast<size_t>(k) + 1] : bootstrap;
      const double not_done = dones[static_cast<size_t>(k)] ? 0.0 : 1.0;
      const double delta =
          rewards[static_cast<size_t>(k)] + gamma * next_v * not_done - values[static_cast<size_t>(k)];
      adv[static_cast<size_t>(t)] += coef * delta;
      if (dones[static_cast<size_t>(k)]) break;
      coef *= gamma * lambda;
    }
  }
  return adv;
}

double frand(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

TEST_CASE("gae matches the brute-force discounted-delta sum") {
  std::mt19937_64 rng(6060);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 10;
    std::vector<double> rewards(n), values(n);
    std::vector<std::uint8_t> dones(n, 0);
    for (int t = 0; t < n; ++t) {
      rewards[static_cast<size_t>(t)] = frand(rng, -2.0, 2.0);
      values[static_cast<size_t>(t)] = frand(rng, -2.0, 2.0);
      dones[static_cast<size_t>(t)] = frand(rng, 0.0, 1.0) < 0.2 ? 1 : 0;
    }
    const double bootstrap = frand(rng, -2.0, 2.0);
    const double gamma = 0.99, lambda = 0.95;

    std::vector<double> adv(static_cast<size_t>(n), 0.0), ret(static_cast<size_t>(n), 0.0);
    gae(rewards, values, dones, bootstrap, gamma, lambda, adv, ret);
    const auto expected = brute_gae(rewards, values, dones, bootstrap, gamma, lambda);
    for (int t = 0; t < n; ++t) {
      CHECK(std::abs(adv[static_cast<size_t>(t)] - expected[static_cast<size_t>(t)]) < 1e-12);
      CHECK(std::abs(ret[static_cast<size_t>(t)] -
                     (expected[static_cast<size_t>(t)] + values[static_cast<size_t>(t)])) < 1e-12);
    }
  }
}

TEST_CASE("gae with lambda zero reduces to one-step temporal differences") {
  const std::vector<double> rewards{1.0, -0.5, 2.0};
  const std::vector<double> values{0.3, 0.7, -0.2};
  const std::vector<std::uint8_t> dones{0, 0, 0};
  const double bootstrap = 0.5, gamma = 0.9;
  std::vector<double> adv(3, 0.0), ret(3, 0.0);
  gae(rewards, values, dones, bootstrap, gamma, 0.0, adv, ret);
  CHECK(adv[0] == doctest::Approx(1.0 + 0.9 * 0.7 - 0.3).epsilon(1e-14));
  CHECK(adv[1] == doctest::Approx(-0.5 + 0.9 * -0.2 - 0.7).epsilon(1e-14));
  CHECK(adv[2] == doctest::Approx(2.0 + 0.9 * 0.5 + 0.2).epsilon(1e-14));
}

TEST_CASE("a done flag stops credit from flowing backwards") {
  const std::vector<double> rewards{1.0, 1.0};
  const std::vector<double> values{0.0, 0.0};
  const std::vector<std::uint8_t> dones{1, 0};
  std::vector<double> adv(2, 0.0), ret(2, 0.0);
  gae(rewards, values, dones, 10.0, 0.99, 0.95, adv, ret);
  // Step 0 ends an episode: no bootstrap, no coupling to step 1.
  CHECK(adv[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(adv[1] == doctest::Approx(1.0 + 0.99 * 10.0).epsilon(1e-14));
}

TEST_CASE("compute_gae chains interleaved streams independently") {
  RolloutBuffer buffer(1, 1, false);
  std::mt19937_64 rng(808);
  const int per_stream = 6;
  std::vector<std::vector<double>> rewards(2), values(2);
  std::vector<std::vector<std::uint8_t>> dones(2);
  for (int t = 0; t < per_stream; ++t) {
    for (int s = 0; s < 2; ++s) {
      const double r = frand(rng, -1.0, 1.0);
      const double v = frand(rng, -1.0, 1.0);
      const std::uint8_t d = (s == 0 && t == 2) ? 1 : 0;
      rewards[static_cast<size_t>(s)].push_back(r);
      values[static_cast<size_t>(s)].push_back(v);
      dones[static_cast<size_t>(s)].push_back(d);
      const std::vector<double> obs{static_cast<double>(t)};
      const std::vector<double> act{0.0};
      buffer.push(obs, act, {}, 0.0, v, r, d != 0, s);
    }
  }
  const std::vector<double> bootstrap{0.4, -0.7};
  std::vector<double> adv, ret;
  compute_gae(buffer, bootstrap, 0.99, 0.95, adv, ret);

  for (int s = 0; s < 2; ++s) {
    std::vector<double> sadv(per_stream, 0.0), sret(per_stream, 0.0);
    gae(rewards[static_cast<size_t>(s)], values[static_cast<size_t>(s)],
        dones[static_cast<size_t>(s)], bootstrap[static_cast<size_t>(s)], 0.99, 0.95, sadv,
        sret);
    for (int t = 0; t < per_stream; ++t) {
      const int idx = 2 * t + s;  // push order interleaves the two streams
      CHECK(adv[static_cast<size_t>(idx)] == doctest::Approx(sadv[static_cast<size_t>(t)]).epsilon(1e-15));
      CHECK(ret[static_cast<size_t>(idx)] == doctest::Approx(sret[static_cast<size_t>(t)]).epsilon(1e-15));
    }
  }
}

TEST_CASE("rollout buffer stores and clears entries") {
  RolloutBuffer buffer(2, 1, true);
  const std::vector<double> obs{0.1, 0.2};
  const std::vector<double> act{0.5};
  const std::vector<std::uint8_t> mask{1, 0};
  buffer.push(obs, act, mask, -1.5, 0.25, 0.0, false, 3);
  buffer.set_last_reward(2.0);
  REQUIRE(buffer.size() == 1);
  CHECK(buffer.obs_at(0)[1] == 0.2);
  CHECK(buffer.action_at(0)[0] == 0.5);
  CHECK(buffer.mask_at(0)[0] == 1);
  CHECK(buffer.log_prob_at(0) == -1.5);
  CHECK(buffer.value_at(0) == 0.25);
  CHECK(buffer.reward_at(0) == 2.0);
  CHECK(buffer.done_at(0) == false);
  CHECK(buffer.stream_at(0) == 3);
  buffer.clear();
  CHECK(buffer.size() == 0);
}

TEST_CASE("clipped surrogate matches hand-worked single-sample values") {
  GaussianPolicy policy(3, 2, 4);
  std::mt19937_64 rng(11);
  policy.init(rng);

  const std::vector<double> obs{0.2, -0.4, 0.9};
  const std::vector<std::uint8_t> mask{1, 1};
  auto sample = policy.act(obs, mask, &rng);
  const auto eval = policy.evaluate(obs, sample.raw, mask);

  PPOConfig cfg;
  cfg.clip = 0.2;
  cfg.vf_coef = 0.5;
  cfg.ent_coef = 0.01;
  const std::vector<int> indices{0};
  const std::vector<double> returns{eval.value - 0.3};

  // Ratio 1.5 with positive advantage: the clipped branch caps the gain.
  {
    RolloutBuffer buffer(3, 2, true);
    buffer.push(obs, sample.raw, mask, eval.log_prob - std::log(1.5), eval.value, 0.0, false, 0);
    const std::vector<double> adv{1.0};
    LossParts parts;
    const double loss =
        ppo_minibatch_loss(policy, buffer, indices, adv, returns, cfg, {}, &parts);
    CHECK(parts.policy == doctest::Approx(-1.2).epsilon(1e-9));
    CHECK(parts.value == doctest::Approx(0.09).epsilon(1e-9));
    CHECK(parts.entropy == doctest::Approx(eval.entropy).epsilon(1e-12));
    CHECK(loss == doctest::Approx(-1.2 + 0.5 * 0.09 - 0.01 * eval.entropy).epsilon(1e-9));
  }
  // Ratio 0.5 with negative advantage: clipping caps the apparent improvement.
  {
    RolloutBuffer buffer(3, 2, true);
    buffer.push(obs, sample.raw, mask, eval.log_prob + std::log(2.0), eval.value, 0.0, false, 0);
    const std::vector<double> adv{-1.0};
    LossParts parts;
    ppo_minibatch_loss(policy, buffer, indices, adv, returns, cfg, {}, &parts);
    // surr1 = -0.5, surr2 = -0.8: the minimum is the clipped branch.
    CHECK(parts.policy == doctest::Approx(0.8).epsilon(1e-9));
  }
}

namespace {

template <typename Policy>
void check_loss_gradient(Policy& policy, const RolloutBuffer& buffer,
                         const std::vector<int>& indices, const std::vector<double>& adv,
                         const std::vector<double>& returns, const PPOConfig& cfg) {
  std::vector<double> analytic(policy.param_count(), 0.0);
  ppo_minibatch_loss(policy, buffer, indices, adv, returns, cfg, analytic, nullptr);

  const auto base = policy.get_params();
  const double eps = 1e-5;
  double worst_rel = 0.0;
  for (size_t i = 0; i < base.size(); ++i) {
    auto p = base;
    p[i] += eps;
    policy.set_params(p);
    const double f_plus = ppo_minibatch_loss(policy, buffer, indices, adv, returns, cfg, {}, nullptr);
    p[i] = base[i] - eps;
    policy.set_params(p);
    const double f_minus = ppo_minibatch_loss(policy, buffer, indices, adv, returns, cfg, {}, nullptr);
    const double fd = (f_plus - f_minus) / (2.0 * eps);
    const double rel = std::abs(analytic[i] - fd) / std::max({std::abs(fd), std::abs(analytic[i]), 1e-3});
    worst_rel = std::max(worst_rel, rel);
  }
  policy.set_params(base);
  CHECK(worst_rel < 1e-5);
}

}  // namespace

TEST_CASE("gaussian-head loss gradient matches central finite differences") {
  GaussianPolicy policy(4, 3, 8);
  std::mt19937_64 rng(2024);
  policy.init(rng);

  RolloutBuffer buffer(4, 3, true);
  // Spread the stored log-probs so ratios land on both sides of the clip
  // band, with both advantage signs.
  const std::vector<double> offsets{-0.5, -0.1, 0.0, 0.1, 0.5, 0.3};
  std::vector<double> adv{1.3, -0.7, 0.5, -1.1, 0.9, -0.4};
  std::vector<double> returns;
  for (size_t k = 0; k < offsets.size(); ++k) {
    std::vector<double> obs{frand(rng, -1, 1), frand(rng, -1, 1), frand(rng, -1, 1),
                            frand(rng, -1, 1)};
    std::vector<std::uint8_t> mask{1, 1, 1};
    if (k % 3 == 0) mask[2] = 0;  // exercise inactive slots
    auto sample = policy.act(obs, mask, &rng);
    const auto eval = policy.evaluate(obs, sample.raw, mask);
    buffer.push(obs, sample.raw, mask, eval.log_prob + offsets[k], eval.value, 0.0, false, 0);
    returns.push_back(eval.value + frand(rng, -0.5, 0.5));
  }
  const std::vector<int> indices{0, 1, 2, 3, 4, 5};
  check_loss_gradient(policy, buffer, indices, adv, returns, PPOConfig{});
}

TEST_CASE("categorical-head loss gradient matches central finite differences") {
  CategoricalPolicy policy(5, 3, 8);
  std::mt19937_64 rng(4048);
  policy.init(rng);

  RolloutBuffer buffer(5, 1, false);
  const std::vector<double> offsets{-0.4, 0.0, 0.2, 0.6, -0.2, 0.1};
  std::vector<double> adv{0.8, -1.2, 1.0, -0.3, 0.6, -0.9};
  std::vector<double> returns;
  for (size_t k = 0; k < offsets.size(); ++k) {
    std::vector<double> obs{frand(rng, -1, 1), frand(rng, -1, 1), frand(rng, -1, 1),
                            frand(rng, -1, 1), frand(rng, -1, 1)};
    auto sample = policy.act(obs, &rng);
    const auto eval = policy.evaluate(obs, sample.choice);
    const std::vector<double> act{static_cast<double>(sample.choice)};
    buffer.push(obs, act, {}, eval.log_prob + offsets[k], eval.value, 0.0, false, 0);
    returns.push_back(eval.value + frand(rng, -0.5, 0.5));
  }
  const std::vector<int> indices{0, 1, 2, 3, 4, 5};
  check_loss_gradient(policy, buffer, indices, adv, returns, PPOConfig{});
}

TEST_CASE("ppo_update applies minibatches and reports progress") {
  GaussianPolicy policy(3, 2, 4);
  std::mt19937_64 rng(17);
  policy.init(rng);
  const auto before = policy.get_params();

  RolloutBuffer buffer(3, 2, true);
  for (int k = 0; k < 16; ++k) {
    std::vector<double> obs{frand(rng, -1, 1), frand(rng, -1, 1), frand(rng, -1, 1)};
    const std::vector<std::uint8_t> mask{1, 1};
    auto sample = policy.act(obs, mask, &rng);
    buffer.push(obs, sample.raw, mask, sample.log_prob, sample.value, frand(rng, -1, 1),
                k % 8 == 7, 0);
  }
  Adam opt(policy.param_count());
  PPOConfig cfg;
  cfg.epochs = 2;
  cfg.minibatch = 8;
  const std::vector<double> bootstrap{0.0};
  const auto report = ppo_update(policy, opt, buffer, bootstrap, cfg, rng);
  CHECK(report.ok);
  CHECK_FALSE(report.aborted);
  CHECK(report.minibatches == 4);
  bool moved = false;
  const auto after = policy.get_params();
  for (size_t i = 0; i < after.size(); ++i) moved = moved || after[i] != before[i];
  CHECK(moved);
}

TEST_CASE("a non-finite reward aborts the update without stepping") {
  GaussianPolicy policy(3, 2, 4);
  std::mt19937_64 rng(18);
  policy.init(rng);
  const auto before = policy.get_params();

  RolloutBuffer buffer(3, 2, true);
  for (int k = 0; k < 4; ++k) {
    std::vector<double> obs{0.1, 0.2, 0.3};
    const std::vector<std::uint8_t> mask{1, 1};
    auto sample = policy.act(obs, mask, &rng);
    const double reward = k == 2 ? std::numeric_limits<double>::quiet_NaN() : 0.5;
    buffer.push(obs, sample.raw, mask, sample.log_prob, sample.value, reward, false, 0);
  }
  Adam opt(policy.param_count());
  PPOConfig cfg;
  cfg.epochs = 1;
  cfg.minibatch = 4;
  const std::vector<double> bootstrap{0.0};
  const auto report = ppo_update(policy, opt, buffer, bootstrap, cfg, rng);
  CHECK(report.aborted);
  CHECK_FALSE(report.ok);
  const auto after = policy.get_params();
  for (size_t i = 0; i < after.size(); ++i) CHECK(after[i] == before[i]);
}
