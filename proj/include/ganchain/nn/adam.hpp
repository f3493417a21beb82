#pragma once

#include <cmath>
#include <vector>

#include "ganchain/nn/layers.hpp"

namespace ganchain::nn {

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename S>
class Adam {
 public:
  Adam(std::vector<Param<S>*> params, AdamConfig cfg)
      : params_(std::move(params)), cfg_(cfg) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (auto* p : params_) {
      m_.emplace_back(p->v.shape());
      v_.emplace_back(p->v.shape());
    }
  }

  void zero_grad() {
    for (auto* p : params_) p->zero_grad();
  }

  void step() {
    t_++;
    const S b1 = S(cfg_.beta1), b2 = S(cfg_.beta2);
    const S c1 = S(1) - S(std::pow(cfg_.beta1, double(t_)));
    const S c2 = S(1) - S(std::pow(cfg_.beta2, double(t_)));
    const S lr = S(cfg_.lr), eps = S(cfg_.eps);
    for (size_t i = 0; i < params_.size(); i++) {
      Param<S>& p = *params_[i];
      Tensor<S>& m = m_[i];
      Tensor<S>& v = v_[i];
      for (int64_t j = 0; j < p.v.size(); j++) {
        const S g = p.g[j];
        m[j] = b1 * m[j] + (S(1) - b1) * g;
        v[j] = b2 * v[j] + (S(1) - b2) * g * g;
        const S mh = m[j] / c1;
        const S vh = v[j] / c2;
        p.v[j] -= lr * mh / (std::sqrt(vh) + eps);
      }
    }
  }

 private:
  std::vector<Param<S>*> params_;
  AdamConfig cfg_;
  std::vector<Tensor<S>> m_, v_;
  long t_ = 0;
};

}  // namespace ganchain::nn
