#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "ganchain/rng.hpp"
#include "ganchain/tensor.hpp"

namespace ganchain::nn {

enum class Mode { Train, Eval };

template <typename S>
using MatRM = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using MapM = Eigen::Map<MatRM<S>>;
template <typename S>
using CMapM = Eigen::Map<const MatRM<S>>;

template <typename S>
struct Param {
  std::string name;
  Tensor<S> v;
  Tensor<S> g;

  void init_shape(const std::vector<int64_t>& dims) {
    v.resize(dims);
    g.resize(dims);
  }
  void zero_grad() { g.fill(S(0)); }
};

template <typename S>
inline void fill_normal(Tensor<S>& t, Rng& rng, double stddev) {
  for (int64_t i = 0; i < t.size(); i++) t[i] = S(rng.normal() * stddev);
}

// ---------------------------------------------------------------------------
// Convolution geometry + im2col/col2im kernels. Transposed convolutions are
// expressed as the adjoint of a regular convolution with the same geometry,
// so the three GEMM-backed kernels below cover every case.
// ---------------------------------------------------------------------------

struct ConvGeom {
  int in_h = 0, in_w = 0, in_c = 0;
  int out_c = 0;
  int k = 0, stride = 1, pad = 0;

  int out_h() const { return (in_h + 2 * pad - k) / stride + 1; }
  int out_w() const { return (in_w + 2 * pad - k) / stride + 1; }
  int64_t patch() const { return int64_t(k) * k * in_c; }
};

// x: (N, in_h, in_w, in_c) -> cols: (N*out_h*out_w, k*k*in_c)
template <typename S>
void im2col(const ConvGeom& g, const Tensor<S>& x, Tensor<S>& cols) {
  const int64_t n = x.dim(0);
  const int oh = g.out_h(), ow = g.out_w();
  cols.resize({n * oh * ow, g.patch()});
  const int64_t row_stride = g.patch();
  const S* src = x.data();
  S* dst = cols.data();
  const int64_t in_row = int64_t(g.in_w) * g.in_c;
  const int64_t in_img = int64_t(g.in_h) * in_row;
  for (int64_t b = 0; b < n; b++) {
    for (int oy = 0; oy < oh; oy++) {
      for (int ox = 0; ox < ow; ox++) {
        S* out = dst + ((b * oh + oy) * ow + ox) * row_stride;
        for (int ky = 0; ky < g.k; ky++) {
          const int iy = oy * g.stride + ky - g.pad;
          if (iy < 0 || iy >= g.in_h) {
            std::memset(out + int64_t(ky) * g.k * g.in_c, 0,
                        size_t(g.k) * g.in_c * sizeof(S));
            continue;
          }
          for (int kx = 0; kx < g.k; kx++) {
            const int ix = ox * g.stride + kx - g.pad;
            S* o = out + (int64_t(ky) * g.k + kx) * g.in_c;
            if (ix < 0 || ix >= g.in_w) {
              std::memset(o, 0, size_t(g.in_c) * sizeof(S));
            } else {
              std::memcpy(o, src + b * in_img + iy * in_row + int64_t(ix) * g.in_c,
                          size_t(g.in_c) * sizeof(S));
            }
          }
        }
      }
    }
  }
}

// Scatter-add of cols back into an (N, in_h, in_w, in_c) tensor.
template <typename S>
void col2im(const ConvGeom& g, const Tensor<S>& cols, Tensor<S>& x, int64_t n) {
  x.resize({n, g.in_h, g.in_w, g.in_c});
  const int oh = g.out_h(), ow = g.out_w();
  const int64_t row_stride = g.patch();
  const S* src = cols.data();
  S* dst = x.data();
  const int64_t in_row = int64_t(g.in_w) * g.in_c;
  const int64_t in_img = int64_t(g.in_h) * in_row;
  for (int64_t b = 0; b < n; b++) {
    for (int oy = 0; oy < oh; oy++) {
      for (int ox = 0; ox < ow; ox++) {
        const S* in = src + ((b * oh + oy) * ow + ox) * row_stride;
        for (int ky = 0; ky < g.k; ky++) {
          const int iy = oy * g.stride + ky - g.pad;
          if (iy < 0 || iy >= g.in_h) continue;
          for (int kx = 0; kx < g.k; kx++) {
            const int ix = ox * g.stride + kx - g.pad;
            if (ix < 0 || ix >= g.in_w) continue;
            S* o = dst + b * in_img + iy * in_row + int64_t(ix) * g.in_c;
            const S* i = in + (int64_t(ky) * g.k + kx) * g.in_c;
            for (int c = 0; c < g.in_c; c++) o[c] += i[c];
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Layers. Each layer owns its parameters, scratch buffers and forward caches;
// a layer instance therefore belongs to exactly one training loop at a time.
// ---------------------------------------------------------------------------

template <typename S>
class Dense {
 public:
  Dense(std::string name, int in, int out, bool bias = true)
      : in_(in), out_(out), has_bias_(bias) {
    w_.name = name + ".w";
    w_.init_shape({in, out});
    if (bias) {
      b_.name = name + ".b";
      b_.init_shape({out});
    }
  }

  void init_normal(Rng& rng, double stddev) {
    fill_normal(w_.v, rng, stddev);
    if (has_bias_) b_.v.fill(S(0));
  }
  void init_he(Rng& rng) { init_normal(rng, std::sqrt(2.0 / in_)); }

  // x: (rows, in) in any shape whose total size is rows*in.
  Tensor<S> forward(const Tensor<S>& x, bool want_grad) {
    const int64_t rows = x.size() / in_;
    Tensor<S> y({rows, out_});
    CMapM<S> xm(x.data(), rows, in_);
    CMapM<S> wm(w_.v.data(), in_, out_);
    MapM<S> ym(y.data(), rows, out_);
    ym.noalias() = xm * wm;
    if (has_bias_) {
      Eigen::Map<const Eigen::RowVectorX<S>> bv(b_.v.data(), out_);
      ym.rowwise() += bv;
    }
    if (want_grad) x_cache_ = x;
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy, bool accum_param_grads) {
    const int64_t rows = gy.size() / out_;
    CMapM<S> gym(gy.data(), rows, out_);
    if (accum_param_grads) {
      CMapM<S> xm(x_cache_.data(), rows, in_);
      MapM<S> gwm(w_.g.data(), in_, out_);
      gwm.noalias() += xm.transpose() * gym;
      if (has_bias_) {
        Eigen::Map<Eigen::RowVectorX<S>> gb(b_.g.data(), out_);
        gb += gym.colwise().sum();
      }
    }
    Tensor<S> gx(x_cache_.shape());
    CMapM<S> wm(w_.v.data(), in_, out_);
    MapM<S> gxm(gx.data(), rows, in_);
    gxm.noalias() = gym * wm.transpose();
    return gx;
  }

  std::vector<Param<S>*> params() {
    std::vector<Param<S>*> p{&w_};
    if (has_bias_) p.push_back(&b_);
    return p;
  }

  int in_features() const { return in_; }
  int out_features() const { return out_; }

 private:
  int in_, out_;
  bool has_bias_;
  Param<S> w_, b_;
  Tensor<S> x_cache_;
};

template <typename S>
class Conv2d {
 public:
  Conv2d(std::string name, ConvGeom geom, bool bias = true)
      : g_(geom), has_bias_(bias) {
    w_.name = name + ".w";
    w_.init_shape({g_.patch(), g_.out_c});
    if (bias) {
      b_.name = name + ".b";
      b_.init_shape({g_.out_c});
    }
  }

  void init_normal(Rng& rng, double stddev) {
    fill_normal(w_.v, rng, stddev);
    if (has_bias_) b_.v.fill(S(0));
  }
  void init_he(Rng& rng) { init_normal(rng, std::sqrt(2.0 / double(g_.patch()))); }

  Tensor<S> forward(const Tensor<S>& x, bool want_grad) {
    const int64_t n = x.dim(0);
    im2col(g_, x, cols_);
    Tensor<S> y({n, g_.out_h(), g_.out_w(), g_.out_c});
    CMapM<S> cm(cols_.data(), cols_.dim(0), cols_.dim(1));
    CMapM<S> wm(w_.v.data(), g_.patch(), g_.out_c);
    MapM<S> ym(y.data(), cols_.dim(0), g_.out_c);
    ym.noalias() = cm * wm;
    if (has_bias_) {
      Eigen::Map<const Eigen::RowVectorX<S>> bv(b_.v.data(), g_.out_c);
      ym.rowwise() += bv;
    }
    want_grad_ = want_grad;
    if (!want_grad) cols_.resize({0});  // free scratch in eval paths
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy, bool accum_param_grads) {
    const int64_t n = gy.dim(0);
    const int64_t rows = n * g_.out_h() * g_.out_w();
    CMapM<S> gym(gy.data(), rows, g_.out_c);
    if (accum_param_grads) {
      CMapM<S> cm(cols_.data(), rows, g_.patch());
      MapM<S> gwm(w_.g.data(), g_.patch(), g_.out_c);
      gwm.noalias() += cm.transpose() * gym;
      if (has_bias_) {
        Eigen::Map<Eigen::RowVectorX<S>> gb(b_.g.data(), g_.out_c);
        gb += gym.colwise().sum();
      }
    }
    // grad wrt input: scatter gy * W^T back through the patches.
    gcols_.resize({rows, g_.patch()});
    MapM<S> gcm(gcols_.data(), rows, g_.patch());
    CMapM<S> wm(w_.v.data(), g_.patch(), g_.out_c);
    gcm.noalias() = gym * wm.transpose();
    Tensor<S> gx;
    col2im(g_, gcols_, gx, n);
    return gx;
  }

  std::vector<Param<S>*> params() {
    std::vector<Param<S>*> p{&w_};
    if (has_bias_) p.push_back(&b_);
    return p;
  }

  const ConvGeom& geom() const { return g_; }

 private:
  ConvGeom g_;
  bool has_bias_;
  bool want_grad_ = false;
  Param<S> w_, b_;
  Tensor<S> cols_, gcols_;
};

// Transposed convolution, defined as the adjoint of Conv2d with geometry g:
// input (N, g.out_h, g.out_w, g.out_c) -> output (N, g.in_h, g.in_w, g.in_c).
template <typename S>
class TConv2d {
 public:
  TConv2d(std::string name, ConvGeom geom, bool bias = true)
      : g_(geom), has_bias_(bias) {
    w_.name = name + ".w";
    w_.init_shape({g_.patch(), g_.out_c});
    if (bias) {
      b_.name = name + ".b";
      b_.init_shape({g_.in_c});  // bias per *output* channel of the tconv
    }
  }

  void init_normal(Rng& rng, double stddev) {
    fill_normal(w_.v, rng, stddev);
    if (has_bias_) b_.v.fill(S(0));
  }

  Tensor<S> forward(const Tensor<S>& t, bool want_grad) {
    const int64_t n = t.dim(0);
    const int64_t rows = n * g_.out_h() * g_.out_w();
    gcols_.resize({rows, g_.patch()});
    CMapM<S> tm(t.data(), rows, g_.out_c);
    CMapM<S> wm(w_.v.data(), g_.patch(), g_.out_c);
    MapM<S> gcm(gcols_.data(), rows, g_.patch());
    gcm.noalias() = tm * wm.transpose();
    Tensor<S> z;
    col2im(g_, gcols_, z, n);
    if (has_bias_) {
      S* p = z.data();
      const int64_t hw = int64_t(g_.in_h) * g_.in_w;
      for (int64_t b = 0; b < n; b++)
        for (int64_t i = 0; i < hw; i++)
          for (int c = 0; c < g_.in_c; c++) *p++ += b_.v[c];
    }
    if (want_grad) t_cache_ = t;
    return z;
  }

  Tensor<S> backward(const Tensor<S>& gz, bool accum_param_grads) {
    const int64_t n = gz.dim(0);
    const int64_t rows = n * g_.out_h() * g_.out_w();
    im2col(g_, gz, cols_);
    CMapM<S> cm(cols_.data(), rows, g_.patch());
    if (accum_param_grads) {
      CMapM<S> tm(t_cache_.data(), rows, g_.out_c);
      MapM<S> gwm(w_.g.data(), g_.patch(), g_.out_c);
      gwm.noalias() += cm.transpose() * tm;
      if (has_bias_) {
        const S* p = gz.data();
        const int64_t hw = int64_t(g_.in_h) * g_.in_w;
        for (int64_t b = 0; b < n; b++)
          for (int64_t i = 0; i < hw; i++)
            for (int c = 0; c < g_.in_c; c++) b_.g[c] += *p++;
      }
    }
    Tensor<S> gt({n, g_.out_h(), g_.out_w(), g_.out_c});
    CMapM<S> wm(w_.v.data(), g_.patch(), g_.out_c);
    MapM<S> gtm(gt.data(), rows, g_.out_c);
    gtm.noalias() = cm * wm;
    return gt;
  }

  std::vector<Param<S>*> params() {
    std::vector<Param<S>*> p{&w_};
    if (has_bias_) p.push_back(&b_);
    return p;
  }

 private:
  ConvGeom g_;
  bool has_bias_;
  Param<S> w_, b_;
  Tensor<S> t_cache_, cols_, gcols_;
};

// Per-feature batch normalization over all leading dimensions. Training mode
// uses batch statistics and updates running averages; eval mode uses the
// running averages only.
template <typename S>
class BatchNorm {
 public:
  BatchNorm(std::string name, int features, double momentum = 0.9, double eps = 1e-3)
      : f_(features), momentum_(S(momentum)), eps_(S(eps)) {
    gamma_.name = name + ".gamma";
    gamma_.init_shape({features});
    beta_.name = name + ".beta";
    beta_.init_shape({features});
    running_mean_.resize({features});
    running_var_.resize({features});
    reset();
    mean_.resize({features});
    var_.resize({features});
    inv_std_.resize({features});
  }

  void reset() {
    gamma_.v.fill(S(1));
    beta_.v.fill(S(0));
    running_mean_.fill(S(0));
    running_var_.fill(S(1));
  }

  Tensor<S> forward(const Tensor<S>& x, Mode mode, bool want_grad) {
    const int64_t rows = x.size() / f_;
    Tensor<S> y(x.shape());
    if (mode == Mode::Train) {
      CMapM<S> xm(x.data(), rows, f_);
      Eigen::Map<Eigen::RowVectorX<S>> mu(mean_.data(), f_);
      Eigen::Map<Eigen::RowVectorX<S>> var(var_.data(), f_);
      mu = xm.colwise().mean();
      var = (xm.rowwise() - mu).array().square().colwise().mean();
      for (int c = 0; c < f_; c++) inv_std_[c] = S(1) / std::sqrt(var_[c] + eps_);
      for (int c = 0; c < f_; c++) {
        running_mean_[c] = momentum_ * running_mean_[c] + (S(1) - momentum_) * mean_[c];
        running_var_[c] = momentum_ * running_var_[c] + (S(1) - momentum_) * var_[c];
      }
      if (want_grad) xhat_.resize({rows, f_});
      const S* xp = x.data();
      S* yp = y.data();
      S* hp = want_grad ? xhat_.data() : nullptr;
      for (int64_t r = 0; r < rows; r++) {
        for (int c = 0; c < f_; c++) {
          S h = (xp[c] - mean_[c]) * inv_std_[c];
          if (hp) hp[c] = h;
          yp[c] = gamma_.v[c] * h + beta_.v[c];
        }
        xp += f_;
        yp += f_;
        if (hp) hp += f_;
      }
      rows_cache_ = rows;
    } else {
      const S* xp = x.data();
      S* yp = y.data();
      for (int64_t r = 0; r < rows; r++) {
        for (int c = 0; c < f_; c++) {
          S inv = S(1) / std::sqrt(running_var_[c] + eps_);
          yp[c] = gamma_.v[c] * (xp[c] - running_mean_[c]) * inv + beta_.v[c];
        }
        xp += f_;
        yp += f_;
      }
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy, bool accum_param_grads) {
    const int64_t rows = rows_cache_;
    Tensor<S> gx(gy.shape());
    // Column means of gy and gy*xhat.
    std::vector<S> mg(size_t(f_), S(0)), mgh(size_t(f_), S(0));
    {
      const S* gp = gy.data();
      const S* hp = xhat_.data();
      for (int64_t r = 0; r < rows; r++) {
        for (int c = 0; c < f_; c++) {
          mg[size_t(c)] += gp[c];
          mgh[size_t(c)] += gp[c] * hp[c];
        }
        gp += f_;
        hp += f_;
      }
    }
    if (accum_param_grads) {
      for (int c = 0; c < f_; c++) {
        gamma_.g[c] += mgh[size_t(c)];
        beta_.g[c] += mg[size_t(c)];
      }
    }
    const S inv_rows = S(1) / S(rows);
    for (int c = 0; c < f_; c++) {
      mg[size_t(c)] *= inv_rows;
      mgh[size_t(c)] *= inv_rows;
    }
    const S* gp = gy.data();
    const S* hp = xhat_.data();
    S* op = gx.data();
    for (int64_t r = 0; r < rows; r++) {
      for (int c = 0; c < f_; c++) {
        op[c] = gamma_.v[c] * inv_std_[c] * (gp[c] - mg[size_t(c)] - hp[c] * mgh[size_t(c)]);
      }
      gp += f_;
      hp += f_;
      op += f_;
    }
    return gx;
  }

  std::vector<Param<S>*> params() { return {&gamma_, &beta_}; }
  std::vector<Tensor<S>*> state() { return {&running_mean_, &running_var_}; }

 private:
  int f_;
  S momentum_, eps_;
  Param<S> gamma_, beta_;
  Tensor<S> running_mean_, running_var_;
  Tensor<S> mean_, var_, inv_std_, xhat_;
  int64_t rows_cache_ = 0;
};

template <typename S>
class LeakyReLU {
 public:
  explicit LeakyReLU(double alpha) : alpha_(S(alpha)) {}

  Tensor<S> forward(const Tensor<S>& x, bool want_grad) {
    Tensor<S> y(x.shape());
    for (int64_t i = 0; i < x.size(); i++) y[i] = x[i] > S(0) ? x[i] : alpha_ * x[i];
    if (want_grad) x_cache_ = x;
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy) {
    Tensor<S> gx(gy.shape());
    for (int64_t i = 0; i < gy.size(); i++)
      gx[i] = x_cache_[i] > S(0) ? gy[i] : alpha_ * gy[i];
    return gx;
  }

 private:
  S alpha_;
  Tensor<S> x_cache_;
};

// Tanh output head. Values are nudged inside the open interval so that
// downstream [-1, 1] range invariants hold even when float tanh saturates.
template <typename S>
class TanhOut {
 public:
  Tensor<S> forward(const Tensor<S>& x, bool want_grad) {
    constexpr S kLim = S(1) - S(1e-7);
    Tensor<S> y(x.shape());
    for (int64_t i = 0; i < x.size(); i++) {
      S v = std::tanh(x[i]);
      y[i] = std::clamp(v, -kLim, kLim);
    }
    if (want_grad) y_cache_ = y;
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy) {
    Tensor<S> gx(gy.shape());
    for (int64_t i = 0; i < gy.size(); i++)
      gx[i] = gy[i] * (S(1) - y_cache_[i] * y_cache_[i]);
    return gx;
  }

 private:
  Tensor<S> y_cache_;
};

// Sigmoid head producing probabilities clamped to [eps, 1-eps] so that the
// log-losses stay finite.
template <typename S>
class SigmoidProb {
 public:
  static constexpr double kClamp = 1e-7;

  Tensor<S> forward(const Tensor<S>& x, bool want_grad) {
    Tensor<S> y(x.shape());
    for (int64_t i = 0; i < x.size(); i++) {
      S v = S(1) / (S(1) + std::exp(-x[i]));
      y[i] = std::clamp(v, S(kClamp), S(1) - S(kClamp));
    }
    if (want_grad) y_cache_ = y;
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy) {
    Tensor<S> gx(gy.shape());
    for (int64_t i = 0; i < gy.size(); i++)
      gx[i] = gy[i] * y_cache_[i] * (S(1) - y_cache_[i]);
    return gx;
  }

 private:
  Tensor<S> y_cache_;
};

template <typename S>
class ReLU {
 public:
  Tensor<S> forward(const Tensor<S>& x, bool want_grad) {
    Tensor<S> y(x.shape());
    for (int64_t i = 0; i < x.size(); i++) y[i] = x[i] > S(0) ? x[i] : S(0);
    if (want_grad) x_cache_ = x;
    return y;
  }
  Tensor<S> backward(const Tensor<S>& gy) {
    Tensor<S> gx(gy.shape());
    for (int64_t i = 0; i < gy.size(); i++) gx[i] = x_cache_[i] > S(0) ? gy[i] : S(0);
    return gx;
  }

 private:
  Tensor<S> x_cache_;
};

// 2x2 max pooling with stride 2.
template <typename S>
class MaxPool2 {
 public:
  Tensor<S> forward(const Tensor<S>& x, bool want_grad) {
    const int64_t n = x.dim(0), h = x.dim(1), w = x.dim(2), c = x.dim(3);
    const int64_t oh = h / 2, ow = w / 2;
    Tensor<S> y({n, oh, ow, c});
    if (want_grad) argmax_.assign(size_t(y.size()), 0);
    in_shape_ = x.shape();
    S* yp = y.data();
    size_t oi = 0;
    for (int64_t b = 0; b < n; b++) {
      for (int64_t py = 0; py < oh; py++) {
        for (int64_t px = 0; px < ow; px++) {
          for (int64_t ch = 0; ch < c; ch++) {
            S best = x.at(b, py * 2, px * 2, ch);
            int64_t best_idx = ((b * h + py * 2) * w + px * 2) * c + ch;
            for (int dy = 0; dy < 2; dy++) {
              for (int dx = 0; dx < 2; dx++) {
                int64_t iy = py * 2 + dy, ix = px * 2 + dx;
                S v = x.at(b, iy, ix, ch);
                if (v > best) {
                  best = v;
                  best_idx = ((b * h + iy) * w + ix) * c + ch;
                }
              }
            }
            *yp++ = best;
            if (want_grad) argmax_[oi] = best_idx;
            oi++;
          }
        }
      }
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy) {
    Tensor<S> gx(in_shape_);
    for (int64_t i = 0; i < gy.size(); i++) gx[argmax_[size_t(i)]] += gy[i];
    return gx;
  }

 private:
  std::vector<int64_t> argmax_;
  std::vector<int64_t> in_shape_;
};

}  // namespace ganchain::nn
