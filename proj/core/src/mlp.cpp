#include "ranslice/mlp.hpp"

#include <cmath>

namespace ranslice {

namespace {

// y += W x + b for a row-major [rows][cols] matrix.
void affine(std::span<const double> w, std::span<const double> b, std::span<const double> x,
            std::span<double> y, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    double acc = b[static_cast<size_t>(r)];
    const double* row = w.data() + static_cast<size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) acc += row[c] * x[static_cast<size_t>(c)];
    y[static_cast<size_t>(r)] = acc;
  }
}

// Backprop through y = W x + b: accumulates dW, db and returns dx into `dx`.
void affine_backward(std::span<const double> w, std::span<const double> x,
                     std::span<const double> dy, std::span<double> dw, std::span<double> db,
                     std::span<double> dx, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const double g = dy[static_cast<size_t>(r)];
    if (g == 0.0) continue;
    db[static_cast<size_t>(r)] += g;
    const double* row = w.data() + static_cast<size_t>(r) * cols;
    double* drow = dw.data() + static_cast<size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) {
      drow[c] += g * x[static_cast<size_t>(c)];
      if (!dx.empty()) dx[static_cast<size_t>(c)] += g * row[c];
    }
  }
}

// Orthogonal rows (or columns when rows > cols) via modified Gram-Schmidt on
// a Gaussian draw, scaled by `gain`.
void fill_orthogonal(std::span<double> w, int rows, int cols, double gain,
                     std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool by_rows = rows <= cols;
  const int vecs = by_rows ? rows : cols;
  const int dim = by_rows ? cols : rows;
  std::vector<std::vector<double>> basis(static_cast<size_t>(vecs),
                                         std::vector<double>(static_cast<size_t>(dim)));
  for (auto& v : basis) {
    for (;;) {
      for (auto& x : v) x = normal(rng);
      // Remove projections on the vectors already fixed.
      for (size_t j = 0; j < basis.size() && &basis[j] != &v; ++j) {
        double dot = 0.0;
        for (int k = 0; k < dim; ++k) dot += v[static_cast<size_t>(k)] * basis[j][static_cast<size_t>(k)];
        for (int k = 0; k < dim; ++k) v[static_cast<size_t>(k)] -= dot * basis[j][static_cast<size_t>(k)];
      }
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > 1e-8) {
        for (auto& x : v) x /= norm;
        break;
      }
      // Degenerate draw; try again.
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = by_rows ? basis[static_cast<size_t>(r)][static_cast<size_t>(c)]
                               : basis[static_cast<size_t>(c)][static_cast<size_t>(r)];
      w[static_cast<size_t>(r) * cols + c] = gain * v;
    }
  }
}

}  // namespace

DenseNet::DenseNet(int in_dim, int hidden_dim, int actor_dim)
    : in_(in_dim), hidden_(hidden_dim), actor_(actor_dim) {
  if (in_dim <= 0 || hidden_dim <= 0 || actor_dim <= 0)
    throw MlpError("DenseNet dimensions must be positive");
  off_w1_ = 0;
  off_b1_ = off_w1_ + static_cast<size_t>(hidden_) * in_;
  off_w2_ = off_b1_ + static_cast<size_t>(hidden_);
  off_b2_ = off_w2_ + static_cast<size_t>(hidden_) * hidden_;
  off_wa_ = off_b2_ + static_cast<size_t>(hidden_);
  off_ba_ = off_wa_ + static_cast<size_t>(actor_) * hidden_;
  off_wc_ = off_ba_ + static_cast<size_t>(actor_);
  off_bc_ = off_wc_ + static_cast<size_t>(hidden_);
  params_.assign(off_bc_ + 1, 0.0);
}

void DenseNet::set_params(std::span<const double> p) {
  if (p.size() != params_.size()) throw MlpError("parameter vector has the wrong length");
  params_.assign(p.begin(), p.end());
}

void DenseNet::init_orthogonal(std::mt19937_64& rng, double actor_gain, double critic_gain) {
  const double trunk_gain = std::sqrt(2.0);
  std::span<double> p(params_);
  fill_orthogonal(p.subspan(off_w1_, static_cast<size_t>(hidden_) * in_), hidden_, in_,
                  trunk_gain, rng);
  fill_orthogonal(p.subspan(off_w2_, static_cast<size_t>(hidden_) * hidden_), hidden_, hidden_,
                  trunk_gain, rng);
  fill_orthogonal(p.subspan(off_wa_, static_cast<size_t>(actor_) * hidden_), actor_, hidden_,
                  actor_gain, rng);
  fill_orthogonal(p.subspan(off_wc_, static_cast<size_t>(hidden_)), 1, hidden_, critic_gain, rng);
  std::fill(params_.begin() + off_b1_, params_.begin() + off_w2_, 0.0);
  std::fill(params_.begin() + off_b2_, params_.begin() + off_wa_, 0.0);
  std::fill(params_.begin() + off_ba_, params_.begin() + off_wc_, 0.0);
  params_[off_bc_] = 0.0;
}

DenseNet::Forward DenseNet::forward(std::span<const double> input) const {
  if (input.size() != static_cast<size_t>(in_)) throw MlpError("input has the wrong length");
  Forward f;
  f.input.assign(input.begin(), input.end());
  f.h1.assign(static_cast<size_t>(hidden_), 0.0);
  f.h2.assign(static_cast<size_t>(hidden_), 0.0);
  f.actor.assign(static_cast<size_t>(actor_), 0.0);

  std::span<const double> p(params_);
  affine(p.subspan(off_w1_), p.subspan(off_b1_), input, f.h1, hidden_, in_);
  for (auto& x : f.h1) x = std::tanh(x);
  affine(p.subspan(off_w2_), p.subspan(off_b2_), f.h1, f.h2, hidden_, hidden_);
  for (auto& x : f.h2) x = std::tanh(x);
  affine(p.subspan(off_wa_), p.subspan(off_ba_), f.h2, f.actor, actor_, hidden_);
  double value = 0.0;
  affine(p.subspan(off_wc_), p.subspan(off_bc_), f.h2, std::span<double>(&value, 1), 1, hidden_);
  f.value = value;
  return f;
}

void DenseNet::backward(const Forward& f, std::span<const double> d_actor, double d_value,
                        std::span<double> grad) const {
  if (grad.size() != params_.size()) throw MlpError("gradient vector has the wrong length");
  if (d_actor.size() != static_cast<size_t>(actor_))
    throw MlpError("actor gradient has the wrong length");

  std::span<const double> p(params_);
  std::vector<double> dh2(static_cast<size_t>(hidden_), 0.0);

  affine_backward(p.subspan(off_wa_), f.h2, d_actor, grad.subspan(off_wa_),
                  grad.subspan(off_ba_), dh2, actor_, hidden_);
  affine_backward(p.subspan(off_wc_), f.h2, std::span<const double>(&d_value, 1),
                  grad.subspan(off_wc_), grad.subspan(off_bc_), dh2, 1, hidden_);

  // Through the second tanh.
  for (int i = 0; i < hidden_; ++i) {
    const double h = f.h2[static_cast<size_t>(i)];
    dh2[static_cast<size_t>(i)] *= 1.0 - h * h;
  }
  std::vector<double> dh1(static_cast<size_t>(hidden_), 0.0);
  affine_backward(p.subspan(off_w2_), f.h1, dh2, grad.subspan(off_w2_), grad.subspan(off_b2_),
                  dh1, hidden_, hidden_);
  for (int i = 0; i < hidden_; ++i) {
    const double h = f.h1[static_cast<size_t>(i)];
    dh1[static_cast<size_t>(i)] *= 1.0 - h * h;
  }
  affine_backward(p.subspan(off_w1_), f.input, dh1, grad.subspan(off_w1_), grad.subspan(off_b1_),
                  {}, hidden_, in_);
}

Adam::Adam(size_t n, double lr, double beta1, double beta2, double eps)
    : m_(n, 0.0), v_(n, 0.0), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (n == 0) throw MlpError("Adam requires at least one parameter");
}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw MlpError("Adam buffers do not match the parameter count");
  t_ += 1;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < m_.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double mh = m_[i] / bc1;
    const double vh = v_[i] / bc2;
    params[i] -= lr_ * mh / (std::sqrt(vh) + eps_);
  }
}

void Adam::restore(std::span<const double> m, std::span<const double> v, uint64_t t) {
  if (m.size() != m_.size() || v.size() != v_.size())
    throw MlpError("Adam state does not match the parameter count");
  m_.assign(m.begin(), m.end());
  v_.assign(v.begin(), v.end());
  t_ = t;
}

double clip_global_norm(std::span<double> grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto& g : grad) g *= scale;
  }
  return norm;
}

}  // namespace ranslice
