#include "ranslice/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ranslice {

RolloutBuffer::RolloutBuffer(int obs_dim, int act_dim, bool has_mask)
    : obs_dim_(obs_dim), act_dim_(act_dim), has_mask_(has_mask) {
  if (obs_dim <= 0 || act_dim <= 0) throw MlpError("rollout dimensions must be positive");
}

void RolloutBuffer::push(std::span<const double> obs, std::span<const double> action,
                         std::span<const uint8_t> mask, double log_prob, double value,
                         double reward, bool done, int stream) {
  if (obs.size() != static_cast<size_t>(obs_dim_)) throw MlpError("rollout obs length mismatch");
  if (action.size() != static_cast<size_t>(act_dim_))
    throw MlpError("rollout action length mismatch");
  if (has_mask_ && mask.size() != static_cast<size_t>(act_dim_))
    throw MlpError("rollout mask length mismatch");
  obs_.insert(obs_.end(), obs.begin(), obs.end());
  action_.insert(action_.end(), action.begin(), action.end());
  if (has_mask_) mask_.insert(mask_.end(), mask.begin(), mask.end());
  log_prob_.push_back(log_prob);
  value_.push_back(value);
  reward_.push_back(reward);
  done_.push_back(done ? 1 : 0);
  stream_.push_back(stream);
  count_ += 1;
}

void RolloutBuffer::clear() {
  obs_.clear();
  action_.clear();
  mask_.clear();
  log_prob_.clear();
  value_.clear();
  reward_.clear();
  done_.clear();
  stream_.clear();
  count_ = 0;
}

std::span<const double> RolloutBuffer::obs_at(int i) const {
  return {obs_.data() + static_cast<size_t>(i) * obs_dim_, static_cast<size_t>(obs_dim_)};
}

std::span<const double> RolloutBuffer::action_at(int i) const {
  return {action_.data() + static_cast<size_t>(i) * act_dim_, static_cast<size_t>(act_dim_)};
}

std::span<const uint8_t> RolloutBuffer::mask_at(int i) const {
  if (!has_mask_) return {};
  return {mask_.data() + static_cast<size_t>(i) * act_dim_, static_cast<size_t>(act_dim_)};
}

void RolloutBuffer::set_last_reward(double reward) {
  if (count_ == 0) throw MlpError("set_last_reward on an empty buffer");
  reward_.back() = reward;
}

void gae(std::span<const double> rewards, std::span<const double> values,
         std::span<const uint8_t> dones, double bootstrap_value, double gamma, double lambda,
         std::span<double> advantages, std::span<double> returns) {
  const size_t n = rewards.size();
  if (values.size() != n || dones.size() != n || advantages.size() != n)
    throw MlpError("gae spans must have equal length");
  if (!returns.empty() && returns.size() != n) throw MlpError("gae returns length mismatch");
  double running = 0.0;
  for (size_t k = n; k-- > 0;) {
    const double nonterminal = dones[k] ? 0.0 : 1.0;
    const double next_value = (k + 1 < n) ? values[k + 1] : bootstrap_value;
    const double delta = rewards[k] + gamma * next_value * nonterminal - values[k];
    running = delta + gamma * lambda * nonterminal * running;
    advantages[k] = running;
    if (!returns.empty()) returns[k] = running + values[k];
  }
}

void compute_gae(const RolloutBuffer& buffer, std::span<const double> bootstrap_values,
                 double gamma, double lambda, std::vector<double>& advantages,
                 std::vector<double>& returns) {
  const int n = buffer.size();
  advantages.assign(static_cast<size_t>(n), 0.0);
  returns.assign(static_cast<size_t>(n), 0.0);

  // Group indices per stream, preserving push order.
  int max_stream = -1;
  for (int i = 0; i < n; ++i) max_stream = std::max(max_stream, buffer.stream_at(i));
  std::vector<std::vector<int>> per_stream(static_cast<size_t>(max_stream + 1));
  for (int i = 0; i < n; ++i) per_stream[static_cast<size_t>(buffer.stream_at(i))].push_back(i);

  for (size_t s = 0; s < per_stream.size(); ++s) {
    const auto& idx = per_stream[s];
    if (idx.empty()) continue;
    const double bootstrap = s < bootstrap_values.size() ? bootstrap_values[s] : 0.0;
    std::vector<double> r(idx.size()), v(idx.size()), adv(idx.size()), ret(idx.size());
    std::vector<uint8_t> d(idx.size());
    for (size_t k = 0; k < idx.size(); ++k) {
      r[k] = buffer.reward_at(idx[k]);
      v[k] = buffer.value_at(idx[k]);
      d[k] = buffer.done_at(idx[k]) ? 1 : 0;
    }
    gae(r, v, d, bootstrap, gamma, lambda, adv, ret);
    for (size_t k = 0; k < idx.size(); ++k) {
      advantages[static_cast<size_t>(idx[k])] = adv[k];
      returns[static_cast<size_t>(idx[k])] = ret[k];
    }
  }
}

namespace {

// Shared loss skeleton: the policy-specific part supplies log-prob, entropy,
// value and a backward hook for one sample.
template <typename EvalFn, typename BackwardFn>
double clipped_loss(std::span<const int> indices, std::span<const double> advantages,
                    std::span<const double> returns, const PPOConfig& cfg,
                    std::span<double> grad, LossParts* parts, EvalFn&& eval_one,
                    BackwardFn&& backward_one) {
  const double batch = static_cast<double>(indices.size());
  double policy_loss = 0.0, value_loss = 0.0, entropy_sum = 0.0;
  for (int i : indices) {
    const auto ev = eval_one(i);
    const double adv = advantages[static_cast<size_t>(i)];
    const double ret = returns[static_cast<size_t>(i)];
    const double ratio = std::exp(ev.log_prob - ev.old_log_prob);
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
    const double surr1 = ratio * adv;
    const double surr2 = clipped * adv;
    policy_loss -= std::min(surr1, surr2) / batch;
    const double verr = ev.value - ret;
    value_loss += verr * verr / batch;
    entropy_sum += ev.entropy / batch;

    if (!grad.empty()) {
      // Gradient of -min(surr1, surr2)/batch with respect to log-prob: active
      // only when the unclipped branch is selected or the ratio sits inside
      // the clip band (where both branches coincide).
      double d_log_prob = 0.0;
      const bool unclipped_active =
          surr1 <= surr2 || (ratio >= 1.0 - cfg.clip && ratio <= 1.0 + cfg.clip);
      if (unclipped_active) d_log_prob = -adv * ratio / batch;
      const double d_value = cfg.vf_coef * 2.0 * verr / batch;
      const double d_entropy = -cfg.ent_coef / batch;
      backward_one(i, ev, d_log_prob, d_entropy, d_value);
    }
  }
  if (parts != nullptr) {
    parts->policy = policy_loss;
    parts->value = value_loss;
    parts->entropy = entropy_sum;
  }
  return policy_loss + cfg.vf_coef * value_loss - cfg.ent_coef * entropy_sum;
}

struct GaussianSampleEval {
  double log_prob, old_log_prob, entropy, value;
  GaussianPolicy::Eval eval;
};

struct CategoricalSampleEval {
  double log_prob, old_log_prob, entropy, value;
  CategoricalPolicy::Eval eval;
};

}  // namespace

double ppo_minibatch_loss(const GaussianPolicy& policy, const RolloutBuffer& buffer,
                          std::span<const int> indices, std::span<const double> advantages,
                          std::span<const double> returns, const PPOConfig& cfg,
                          std::span<double> grad, LossParts* parts) {
  auto eval_one = [&](int i) {
    GaussianSampleEval ev{0.0, buffer.log_prob_at(i), 0.0, 0.0,
                          policy.evaluate(buffer.obs_at(i), buffer.action_at(i),
                                          buffer.mask_at(i))};
    ev.log_prob = ev.eval.log_prob;
    ev.entropy = ev.eval.entropy;
    ev.value = ev.eval.value;
    return ev;
  };
  auto backward_one = [&](int i, const GaussianSampleEval& ev, double d_log_prob,
                          double d_entropy, double d_value) {
    policy.backward(ev.eval, buffer.action_at(i), buffer.mask_at(i), d_log_prob, d_entropy,
                    d_value, grad);
  };
  return clipped_loss(indices, advantages, returns, cfg, grad, parts, eval_one, backward_one);
}

double ppo_minibatch_loss(const CategoricalPolicy& policy, const RolloutBuffer& buffer,
                          std::span<const int> indices, std::span<const double> advantages,
                          std::span<const double> returns, const PPOConfig& cfg,
                          std::span<double> grad, LossParts* parts) {
  auto eval_one = [&](int i) {
    const int choice = static_cast<int>(buffer.action_at(i)[0]);
    CategoricalSampleEval ev{0.0, buffer.log_prob_at(i), 0.0, 0.0,
                             policy.evaluate(buffer.obs_at(i), choice)};
    ev.log_prob = ev.eval.log_prob;
    ev.entropy = ev.eval.entropy;
    ev.value = ev.eval.value;
    return ev;
  };
  auto backward_one = [&](int i, const CategoricalSampleEval& ev, double d_log_prob,
                          double d_entropy, double d_value) {
    const int choice = static_cast<int>(buffer.action_at(i)[0]);
    policy.backward(ev.eval, choice, d_log_prob, d_entropy, d_value, grad);
  };
  return clipped_loss(indices, advantages, returns, cfg, grad, parts, eval_one, backward_one);
}

namespace {

// Shared update loop over both policy types.
template <typename Policy>
UpdateReport run_update(Policy& policy, Adam& opt, const RolloutBuffer& buffer,
                        std::span<const double> bootstrap_values, const PPOConfig& cfg,
                        std::mt19937_64& rng) {
  UpdateReport report;
  const int n = buffer.size();
  if (n < cfg.minibatch) return report;

  std::vector<double> advantages, returns;
  compute_gae(buffer, bootstrap_values, cfg.gamma, cfg.lambda, advantages, returns);

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(policy.param_count(), 0.0);
  std::vector<double> params = policy.get_params();
  std::vector<double> norm_adv(static_cast<size_t>(cfg.minibatch), 0.0);

  double loss_sum = 0.0, policy_sum = 0.0, value_sum = 0.0, ent_sum = 0.0, norm_sum = 0.0;
  std::vector<double> adv_view(advantages.size(), 0.0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start + cfg.minibatch <= n; start += cfg.minibatch) {
      std::span<const int> mb(order.data() + start, static_cast<size_t>(cfg.minibatch));

      // Normalize advantages within the minibatch.
      double mean = 0.0;
      for (int i : mb) mean += advantages[static_cast<size_t>(i)];
      mean /= cfg.minibatch;
      double var = 0.0;
      for (int i : mb) {
        const double d = advantages[static_cast<size_t>(i)] - mean;
        var += d * d;
      }
      const double sd = std::sqrt(var / cfg.minibatch) + cfg.adv_eps;
      for (int i : mb)
        adv_view[static_cast<size_t>(i)] = (advantages[static_cast<size_t>(i)] - mean) / sd;

      std::fill(grad.begin(), grad.end(), 0.0);
      LossParts parts;
      const double loss =
          ppo_minibatch_loss(policy, buffer, mb, adv_view, returns, cfg, grad, &parts);
      if (!std::isfinite(loss)) {
        report.aborted = true;
        report.mean_loss = loss;
        return report;
      }
      const double norm = clip_global_norm(grad, cfg.max_grad_norm);
      opt.step(params, grad);
      policy.set_params(params);

      report.minibatches += 1;
      loss_sum += loss;
      policy_sum += parts.policy;
      value_sum += parts.value;
      ent_sum += parts.entropy;
      norm_sum += norm;
    }
  }
  if (report.minibatches > 0) {
    report.ok = true;
    report.mean_loss = loss_sum / report.minibatches;
    report.mean_policy_loss = policy_sum / report.minibatches;
    report.mean_value_loss = value_sum / report.minibatches;
    report.mean_entropy = ent_sum / report.minibatches;
    report.mean_grad_norm = norm_sum / report.minibatches;
  }
  return report;
}

}  // namespace

UpdateReport ppo_update(GaussianPolicy& policy, Adam& opt, const RolloutBuffer& buffer,
                        std::span<const double> bootstrap_values, const PPOConfig& cfg,
                        std::mt19937_64& rng) {
  return run_update(policy, opt, buffer, bootstrap_values, cfg, rng);
}

UpdateReport ppo_update(CategoricalPolicy& policy, Adam& opt, const RolloutBuffer& buffer,
                        std::span<const double> bootstrap_values, const PPOConfig& cfg,
                        std::mt19937_64& rng) {
  return run_update(policy, opt, buffer, bootstrap_values, cfg, rng);
}

}  // namespace ranslice
