#include "ranslice/policy.hpp"

#include <algorithm>
#include <cmath>

namespace ranslice {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // log(2*pi)

double gaussian_log_density(double x, double mean, double log_sd) {
  const double sd = std::exp(log_sd);
  const double z = (x - mean) / sd;
  return -0.5 * z * z - log_sd - 0.5 * kLog2Pi;
}

}  // namespace

GaussianPolicy::GaussianPolicy(int obs_dim, int act_dim, int hidden_dim)
    : net_(obs_dim, hidden_dim, act_dim), extra_(static_cast<size_t>(act_dim), 0.0) {}

std::vector<double> GaussianPolicy::get_params() const {
  std::vector<double> p(net_.params().begin(), net_.params().end());
  p.insert(p.end(), extra_.begin(), extra_.end());
  return p;
}

void GaussianPolicy::set_params(std::span<const double> p) {
  if (p.size() != param_count()) throw MlpError("parameter vector has the wrong length");
  net_.set_params(p.subspan(0, net_.param_count()));
  std::copy(p.begin() + static_cast<long>(net_.param_count()), p.end(), extra_.begin());
}

void GaussianPolicy::init(std::mt19937_64& rng) {
  net_.init_orthogonal(rng);
  std::fill(extra_.begin(), extra_.end(), 0.0);
}

GaussianPolicy::Sample GaussianPolicy::act(std::span<const double> obs,
                                           std::span<const uint8_t> active,
                                           std::mt19937_64* rng) const {
  if (active.size() != static_cast<size_t>(act_dim()))
    throw MlpError("active mask has the wrong length");
  const DenseNet::Forward f = net_.forward(obs);
  Sample s;
  s.raw.assign(static_cast<size_t>(act_dim()), -1.0);
  s.factors.assign(static_cast<size_t>(act_dim()), -1.0);
  s.value = f.value;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < act_dim(); ++i) {
    if (!active[static_cast<size_t>(i)]) continue;
    const double mean = f.actor[static_cast<size_t>(i)];
    double draw = mean;
    if (rng != nullptr) draw = mean + std::exp(log_std(i)) * normal(*rng);
    s.raw[static_cast<size_t>(i)] = draw;
    s.factors[static_cast<size_t>(i)] = std::clamp(draw, -1.0, 1.0);
    s.log_prob += gaussian_log_density(draw, mean, log_std(i));
  }
  return s;
}

GaussianPolicy::Eval GaussianPolicy::evaluate(std::span<const double> obs,
                                              std::span<const double> action_raw,
                                              std::span<const uint8_t> active) const {
  if (action_raw.size() != static_cast<size_t>(act_dim()) ||
      active.size() != static_cast<size_t>(act_dim()))
    throw MlpError("action or mask has the wrong length");
  Eval e;
  e.cache = net_.forward(obs);
  e.value = e.cache.value;
  for (int i = 0; i < act_dim(); ++i) {
    if (!active[static_cast<size_t>(i)]) continue;
    e.log_prob += gaussian_log_density(action_raw[static_cast<size_t>(i)],
                                       e.cache.actor[static_cast<size_t>(i)], log_std(i));
    e.entropy += 0.5 * (1.0 + kLog2Pi) + log_std(i);
  }
  return e;
}

void GaussianPolicy::backward(const Eval& eval, std::span<const double> action_raw,
                              std::span<const uint8_t> active, double d_log_prob,
                              double d_entropy, double d_value, std::span<double> grad) const {
  if (grad.size() != param_count()) throw MlpError("gradient vector has the wrong length");
  std::vector<double> d_actor(static_cast<size_t>(act_dim()), 0.0);
  std::span<double> net_grad = grad.subspan(0, net_.param_count());
  std::span<double> std_grad = grad.subspan(net_.param_count());
  for (int i = 0; i < act_dim(); ++i) {
    if (!active[static_cast<size_t>(i)]) continue;
    const double mean = eval.cache.actor[static_cast<size_t>(i)];
    const double ls = log_std(i);
    const double inv_var = std::exp(-2.0 * ls);
    const double diff = action_raw[static_cast<size_t>(i)] - mean;
    // d logN / d mean = (a - mean)/sd^2; d logN / d log_sd = z^2 - 1.
    d_actor[static_cast<size_t>(i)] = d_log_prob * diff * inv_var;
    std_grad[static_cast<size_t>(i)] +=
        d_log_prob * (diff * diff * inv_var - 1.0) + d_entropy;
  }
  net_.backward(eval.cache, d_actor, d_value, net_grad);
}

double GaussianPolicy::value_of(std::span<const double> obs) const {
  return net_.forward(obs).value;
}

CategoricalPolicy::CategoricalPolicy(int obs_dim, int num_choices, int hidden_dim)
    : net_(obs_dim, hidden_dim, num_choices) {}

std::vector<double> CategoricalPolicy::get_params() const {
  return {net_.params().begin(), net_.params().end()};
}

void CategoricalPolicy::set_params(std::span<const double> p) { net_.set_params(p); }

void CategoricalPolicy::init(std::mt19937_64& rng) { net_.init_orthogonal(rng); }

CategoricalPolicy::Sample CategoricalPolicy::act(std::span<const double> obs,
                                                 std::mt19937_64* rng) const {
  const DenseNet::Forward f = net_.forward(obs);
  const auto& z = f.actor;
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  std::vector<double> p(z.size());
  for (size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - zmax);
    sum += p[i];
  }
  for (auto& x : p) x /= sum;

  Sample s;
  s.value = f.value;
  if (rng == nullptr) {
    s.choice = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
  } else {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    double u = uniform(*rng);
    int choice = static_cast<int>(p.size()) - 1;
    double acc = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
      acc += p[i];
      if (u < acc) {
        choice = static_cast<int>(i);
        break;
      }
    }
    s.choice = choice;
  }
  s.log_prob = std::log(p[static_cast<size_t>(s.choice)]);
  return s;
}

CategoricalPolicy::Eval CategoricalPolicy::evaluate(std::span<const double> obs,
                                                    int choice) const {
  if (choice < 0 || choice >= num_choices()) throw MlpError("choice index out of range");
  Eval e;
  e.cache = net_.forward(obs);
  e.value = e.cache.value;
  const auto& z = e.cache.actor;
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  e.probs.assign(z.size(), 0.0);
  for (size_t i = 0; i < z.size(); ++i) {
    e.probs[i] = std::exp(z[i] - zmax);
    sum += e.probs[i];
  }
  for (auto& x : e.probs) x /= sum;
  e.log_prob = std::log(e.probs[static_cast<size_t>(choice)]);
  for (double p : e.probs) {
    if (p > 0.0) e.entropy -= p * std::log(p);
  }
  return e;
}

void CategoricalPolicy::backward(const Eval& eval, int choice, double d_log_prob,
                                 double d_entropy, double d_value,
                                 std::span<double> grad) const {
  if (grad.size() != param_count()) throw MlpError("gradient vector has the wrong length");
  std::vector<double> d_logits(eval.probs.size(), 0.0);
  for (size_t i = 0; i < eval.probs.size(); ++i) {
    const double p = eval.probs[i];
    // d logp(choice) / d z_i = 1[i == choice] - p_i.
    d_logits[i] = d_log_prob * ((static_cast<int>(i) == choice ? 1.0 : 0.0) - p);
    // d H / d z_i = -p_i (log p_i + H).
    if (p > 0.0) d_logits[i] += d_entropy * (-p * (std::log(p) + eval.entropy));
  }
  net_.backward(eval.cache, d_logits, d_value, grad);
}

double CategoricalPolicy::value_of(std::span<const double> obs) const {
  return net_.forward(obs).value;
}

}  // namespace ranslice
