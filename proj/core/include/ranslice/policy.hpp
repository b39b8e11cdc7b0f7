// Actor-critic policies: a masked diagonal-Gaussian head for the inter-slice
// agent and a categorical head shared by the intra-slice agents.
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ranslice/mlp.hpp"

namespace ranslice {

// Continuous policy over per-slot factors in [-1, 1]. The network emits one
// mean per slot; log standard deviations are state-independent learnable
// parameters appended to the flat parameter vector. Inactive slots are forced
// to factor -1 and contribute nothing to log-probabilities, entropy, or
// gradients.
class GaussianPolicy {
 public:
  GaussianPolicy(int obs_dim, int act_dim, int hidden_dim = 64);

  int obs_dim() const { return net_.in_dim(); }
  int act_dim() const { return net_.actor_dim(); }
  int hidden_dim() const { return net_.hidden_dim(); }

  // Flat layout: network parameters followed by act_dim log-stds.
  size_t param_count() const { return net_.param_count() + static_cast<size_t>(act_dim()); }
  std::vector<double> get_params() const;
  void set_params(std::span<const double> p);
  void init(std::mt19937_64& rng);

  struct Sample {
    std::vector<double> raw;      // unclipped Gaussian draw, stored for updates
    std::vector<double> factors;  // clipped to [-1, 1], inactive slots at -1
    double log_prob = 0.0;
    double value = 0.0;
  };

  // rng == nullptr selects the deterministic mode (action = mean).
  Sample act(std::span<const double> obs, std::span<const uint8_t> active,
             std::mt19937_64* rng) const;

  struct Eval {
    double log_prob = 0.0;
    double entropy = 0.0;
    double value = 0.0;
    DenseNet::Forward cache;
  };

  Eval evaluate(std::span<const double> obs, std::span<const double> action_raw,
                std::span<const uint8_t> active) const;

  // Accumulates d(loss)/d(params) into `grad` given upstream gradients on the
  // evaluated log-probability, entropy, and value.
  void backward(const Eval& eval, std::span<const double> action_raw,
                std::span<const uint8_t> active, double d_log_prob, double d_entropy,
                double d_value, std::span<double> grad) const;

  double value_of(std::span<const double> obs) const;

  // Restores the initial exploration scale (log-std 0, unit sigma).
  void reset_exploration() { std::fill(extra_.begin(), extra_.end(), 0.0); }

 private:
  double log_std(int slot) const { return extra_[static_cast<size_t>(slot)]; }

  DenseNet net_;
  std::vector<double> extra_;  // log-stds
};

// Discrete policy over a small set of choices (the intra-slice kernels).
class CategoricalPolicy {
 public:
  CategoricalPolicy(int obs_dim, int num_choices, int hidden_dim = 64);

  int obs_dim() const { return net_.in_dim(); }
  int num_choices() const { return net_.actor_dim(); }
  int hidden_dim() const { return net_.hidden_dim(); }

  size_t param_count() const { return net_.param_count(); }
  std::vector<double> get_params() const;
  void set_params(std::span<const double> p);
  void init(std::mt19937_64& rng);

  struct Sample {
    int choice = 0;
    double log_prob = 0.0;
    double value = 0.0;
  };

  // rng == nullptr selects the deterministic mode (argmax logit).
  Sample act(std::span<const double> obs, std::mt19937_64* rng) const;

  struct Eval {
    double log_prob = 0.0;
    double entropy = 0.0;
    double value = 0.0;
    std::vector<double> probs;
    DenseNet::Forward cache;
  };

  Eval evaluate(std::span<const double> obs, int choice) const;

  void backward(const Eval& eval, int choice, double d_log_prob, double d_entropy,
                double d_value, std::span<double> grad) const;

  double value_of(std::span<const double> obs) const;

 private:
  DenseNet net_;
};

}  // namespace ranslice
