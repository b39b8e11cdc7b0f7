// Small dense actor-critic network with hand-written backprop, plus the Adam
// optimizer and gradient clipping used by the trainer. Everything runs in
// 64-bit floats so analytic gradients can be checked against finite
// differences tightly.
#pragma once

#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace ranslice {

struct MlpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two tanh hidden layers shared by a linear actor head and a linear critic
// head. Parameters live in one flat vector ordered (w1, b1, w2, b2, wa, ba,
// wc, bc); weight matrices are row-major [out][in].
class DenseNet {
 public:
  DenseNet(int in_dim, int hidden_dim, int actor_dim);

  int in_dim() const { return in_; }
  int hidden_dim() const { return hidden_; }
  int actor_dim() const { return actor_; }
  size_t param_count() const { return params_.size(); }

  std::span<const double> params() const { return params_; }
  void set_params(std::span<const double> p);

  // Orthogonal weight init with the usual actor-critic gains: sqrt(2) for the
  // trunk, a small actor gain for near-uniform initial policies, 1 for the
  // critic. Biases start at zero.
  void init_orthogonal(std::mt19937_64& rng, double actor_gain = 0.01, double critic_gain = 1.0);

  struct Forward {
    std::vector<double> input;
    std::vector<double> h1;  // post-tanh
    std::vector<double> h2;  // post-tanh
    std::vector<double> actor;
    double value = 0.0;
  };

  Forward forward(std::span<const double> input) const;

  // Accumulates d(loss)/d(params) into `grad` (same layout as params) given
  // upstream gradients on the actor outputs and the value.
  void backward(const Forward& f, std::span<const double> d_actor, double d_value,
                std::span<double> grad) const;

 private:
  int in_, hidden_, actor_;
  size_t off_w1_, off_b1_, off_w2_, off_b2_, off_wa_, off_ba_, off_wc_, off_bc_;
  std::vector<double> params_;
};

// Adam with bias correction; moments are exposed for checkpointing.
class Adam {
 public:
  explicit Adam(size_t n, double lr = 3e-4, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);

  size_t size() const { return m_.size(); }
  uint64_t steps() const { return t_; }
  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }

  std::span<const double> moment1() const { return m_; }
  std::span<const double> moment2() const { return v_; }
  void restore(std::span<const double> m, std::span<const double> v, uint64_t t);

 private:
  std::vector<double> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  uint64_t t_ = 0;
};

// Scales `grad` in place so its global L2 norm is at most `max_norm`;
// returns the pre-clip norm.
double clip_global_norm(std::span<double> grad, double max_norm);

}  // namespace ranslice
