// On-policy rollout storage, generalized advantage estimation, and the
// clipped PPO update for both policy heads.
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ranslice/policy.hpp"

namespace ranslice {

struct PPOConfig {
  int epochs = 10;
  int minibatch = 64;
  double clip = 0.2;
  double vf_coef = 0.5;
  double ent_coef = 0.01;
  double learning_rate = 3e-4;
  double max_grad_norm = 0.5;
  double gamma = 0.99;
  double lambda = 0.95;
  double adv_eps = 1e-8;
  int buffer_capacity = 2048;
};

// Flat column-per-field rollout storage. Entries from several agent streams
// may interleave; `stream` keys them apart so GAE can chain each stream in
// push order. Gaussian entries carry a per-slot active mask, categorical
// entries a single choice index in action[0].
class RolloutBuffer {
 public:
  RolloutBuffer(int obs_dim, int act_dim, bool has_mask);

  void push(std::span<const double> obs, std::span<const double> action,
            std::span<const uint8_t> mask, double log_prob, double value, double reward,
            bool done, int stream);
  void clear();

  int size() const { return count_; }
  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return act_dim_; }
  bool has_mask() const { return has_mask_; }

  std::span<const double> obs_at(int i) const;
  std::span<const double> action_at(int i) const;
  std::span<const uint8_t> mask_at(int i) const;
  double log_prob_at(int i) const { return log_prob_[static_cast<size_t>(i)]; }
  double value_at(int i) const { return value_[static_cast<size_t>(i)]; }
  double reward_at(int i) const { return reward_[static_cast<size_t>(i)]; }
  bool done_at(int i) const { return done_[static_cast<size_t>(i)] != 0; }
  int stream_at(int i) const { return stream_[static_cast<size_t>(i)]; }

  // Overwrites the reward of the most recently pushed entry; the inter-slice
  // reward is only known after the environment advances.
  void set_last_reward(double reward);

 private:
  int obs_dim_, act_dim_;
  bool has_mask_;
  int count_ = 0;
  std::vector<double> obs_, action_, log_prob_, value_, reward_;
  std::vector<uint8_t> mask_, done_;
  std::vector<int> stream_;
};

// Single-trajectory GAE exactly as specified: delta_t = r_t + gamma *
// V(s_{t+1}) * (1 - done_t) - V(s_t), A_t = delta_t + gamma * lambda *
// (1 - done_t) * A_{t+1}, with `bootstrap_value` standing in for V(s_T).
// Returns advantages; `returns` (A + V) is filled when non-empty.
void gae(std::span<const double> rewards, std::span<const double> values,
         std::span<const uint8_t> dones, double bootstrap_value, double gamma, double lambda,
         std::span<double> advantages, std::span<double> returns);

// Buffer-wide GAE: each stream is chained independently in push order and
// bootstrapped with bootstrap_values[stream] when it does not end in a done
// flag. Outputs are aligned with buffer indices.
void compute_gae(const RolloutBuffer& buffer, std::span<const double> bootstrap_values,
                 double gamma, double lambda, std::vector<double>& advantages,
                 std::vector<double>& returns);

struct LossParts {
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
};

// Mean clipped-surrogate PPO loss over `indices`, with gradient accumulation
// into `grad` when non-empty. `advantages` must already be normalized;
// `returns` are the value targets. Exposed separately so the analytic
// gradient can be checked against finite differences.
double ppo_minibatch_loss(const GaussianPolicy& policy, const RolloutBuffer& buffer,
                          std::span<const int> indices, std::span<const double> advantages,
                          std::span<const double> returns, const PPOConfig& cfg,
                          std::span<double> grad, LossParts* parts = nullptr);
double ppo_minibatch_loss(const CategoricalPolicy& policy, const RolloutBuffer& buffer,
                          std::span<const int> indices, std::span<const double> advantages,
                          std::span<const double> returns, const PPOConfig& cfg,
                          std::span<double> grad, LossParts* parts = nullptr);

struct UpdateReport {
  bool ok = false;       // at least one minibatch step was applied
  bool aborted = false;  // a non-finite loss stopped the update
  int minibatches = 0;
  double mean_loss = 0.0;
  double mean_policy_loss = 0.0;
  double mean_value_loss = 0.0;
  double mean_entropy = 0.0;
  double mean_grad_norm = 0.0;
};

// Full PPO update: GAE over the buffer, then `epochs` passes of shuffled
// minibatches with per-minibatch advantage normalization, gradient clipping,
// and Adam steps. The buffer is left untouched; callers clear it afterwards.
UpdateReport ppo_update(GaussianPolicy& policy, Adam& opt, const RolloutBuffer& buffer,
                        std::span<const double> bootstrap_values, const PPOConfig& cfg,
                        std::mt19937_64& rng);
UpdateReport ppo_update(CategoricalPolicy& policy, Adam& opt, const RolloutBuffer& buffer,
                        std::span<const double> bootstrap_values, const PPOConfig& cfg,
                        std::mt19937_64& rng);

}  // namespace ranslice
