#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ganchain/nn/layers.hpp"

namespace ganchain {

inline constexpr int kImageSize = 28;
inline constexpr int kLatentDim = 100;

struct CapacityTier {
  double multiplier = 1.0;
  std::string name = "base";
};

inline void validate_tier(const CapacityTier& t) {
  if (!(t.multiplier > 0)) throw ArgumentError("capacity tier multiplier must be > 0");
}

inline int tier_channels(int base, const CapacityTier& t) {
  int c = int(std::llround(base * t.multiplier));
  return c < 1 ? 1 : c;
}

enum class ModelKind { Generator, Discriminator, Classifier };

namespace detail {
template <typename S>
inline void check_images(const Tensor<S>& x, const char* who) {
  if (x.rank() != 4 || x.dim(1) != kImageSize || x.dim(2) != kImageSize || x.dim(3) != 1)
    throw ShapeError(std::string(who) + ": expected [N,28,28,1] images, got " + x.shape_str());
}
}  // namespace detail

// DCGAN-style generator: dense 100->12544, reshape to 7x7x256, then four
// transposed convolutions (128, 64, 32, 1 channels, kernel 5, strides
// 1/2/2/1). Hidden layers are batch-normalized with LeakyReLU; the output
// head is tanh into [-1, 1].
template <typename S>
class GeneratorNet {
 public:
  GeneratorNet()
      : fc_("g.fc", kLatentDim, 7 * 7 * 256, /*bias=*/false),
        bn0_("g.bn0", 7 * 7 * 256),
        tc1_("g.tc1", {7, 7, 128, 256, 5, 1, 2}, false),
        bn1_("g.bn1", 128),
        tc2_("g.tc2", {14, 14, 64, 128, 5, 2, 2}, false),
        bn2_("g.bn2", 64),
        tc3_("g.tc3", {28, 28, 32, 64, 5, 2, 2}, false),
        bn3_("g.bn3", 32),
        tc4_("g.tc4", {28, 28, 1, 32, 5, 1, 2}, true) {}

  void init(uint64_t seed) {
    Rng rng(seed);
    // DCGAN convention: N(0, 0.02) everywhere.
    fc_.init_normal(rng, 0.02);
    tc1_.init_normal(rng, 0.02);
    tc2_.init_normal(rng, 0.02);
    tc3_.init_normal(rng, 0.02);
    tc4_.init_normal(rng, 0.02);
    for (auto* bn : {&bn0_, &bn1_, &bn2_, &bn3_}) bn->reset();
  }

  Tensor<S> forward(const Tensor<S>& z, nn::Mode mode, bool want_grad = false) {
    if (z.rank() != 2 || z.dim(1) != kLatentDim)
      throw ShapeError("generator: expected [N,100] latents, got " + z.shape_str());
    const int64_t n = z.dim(0);
    Tensor<S> h = fc_.forward(z, want_grad);
    h = bn0_.forward(h, mode, want_grad);
    h = act0_.forward(h, want_grad);
    h.reshape({n, 7, 7, 256});
    h = tc1_.forward(h, want_grad);
    h = bn1_.forward(h, mode, want_grad);
    h = act1_.forward(h, want_grad);
    h = tc2_.forward(h, want_grad);
    h = bn2_.forward(h, mode, want_grad);
    h = act2_.forward(h, want_grad);
    h = tc3_.forward(h, want_grad);
    h = bn3_.forward(h, mode, want_grad);
    h = act3_.forward(h, want_grad);
    h = tc4_.forward(h, want_grad);
    return tanh_.forward(h, want_grad);
  }

  // Accumulates parameter gradients from dL/d(images).
  void backward(const Tensor<S>& g_images) {
    Tensor<S> g = tanh_.backward(g_images);
    g = tc4_.backward(g, true);
    g = act3_.backward(g);
    g = bn3_.backward(g, true);
    g = tc3_.backward(g, true);
    g = act2_.backward(g);
    g = bn2_.backward(g, true);
    g = tc2_.backward(g, true);
    g = act1_.backward(g);
    g = bn1_.backward(g, true);
    g = tc1_.backward(g, true);
    const int64_t n = g.dim(0);
    g.reshape({n, 7 * 7 * 256});
    g = act0_.backward(g);
    g = bn0_.backward(g, true);
    fc_.backward(g, true);
  }

  std::vector<nn::Param<S>*> params() {
    std::vector<nn::Param<S>*> out;
    for (auto* p : fc_.params()) out.push_back(p);
    for (auto* bn : {&bn0_, &bn1_, &bn2_, &bn3_})
      for (auto* p : bn->params()) out.push_back(p);
    for (auto* p : tc1_.params()) out.push_back(p);
    for (auto* p : tc2_.params()) out.push_back(p);
    for (auto* p : tc3_.params()) out.push_back(p);
    for (auto* p : tc4_.params()) out.push_back(p);
    return out;
  }

  // Non-trainable tensors (batch-norm running stats), checkpointed by name.
  std::vector<std::pair<std::string, Tensor<S>*>> state() {
    std::vector<std::pair<std::string, Tensor<S>*>> out;
    const char* names[] = {"g.bn0", "g.bn1", "g.bn2", "g.bn3"};
    nn::BatchNorm<S>* bns[] = {&bn0_, &bn1_, &bn2_, &bn3_};
    for (int i = 0; i < 4; i++) {
      auto st = bns[i]->state();
      out.emplace_back(std::string(names[i]) + ".running_mean", st[0]);
      out.emplace_back(std::string(names[i]) + ".running_var", st[1]);
    }
    return out;
  }

  nn::Dense<S>& dense() { return fc_; }

 private:
  nn::Dense<S> fc_;
  nn::BatchNorm<S> bn0_;
  nn::LeakyReLU<S> act0_{0.2}, act1_{0.2}, act2_{0.2}, act3_{0.2};
  nn::TConv2d<S> tc1_;
  nn::BatchNorm<S> bn1_;
  nn::TConv2d<S> tc2_;
  nn::BatchNorm<S> bn2_;
  nn::TConv2d<S> tc3_;
  nn::BatchNorm<S> bn3_;
  nn::TConv2d<S> tc4_;
  nn::TanhOut<S> tanh_;
};

// Discriminator: strided-conv mirror of the classifier trunk with
// LeakyReLU(0.2), dense head to a single sigmoid probability.
template <typename S>
class DiscriminatorNet {
 public:
  DiscriminatorNet()
      : c1_("d.c1", {28, 28, 1, 32, 3, 2, 1}, true),
        c2_("d.c2", {14, 14, 32, 64, 3, 2, 1}, true),
        head_("d.head", 7 * 7 * 64, 1, true) {}

  void init(uint64_t seed) {
    Rng rng(seed);
    c1_.init_he(rng);
    c2_.init_he(rng);
    head_.init_he(rng);
  }

  // Returns per-image real-probabilities in [eps, 1-eps], shape [N].
  Tensor<S> forward(const Tensor<S>& images, nn::Mode, bool want_grad = false) {
    detail::check_images(images, "discriminator");
    Tensor<S> h = c1_.forward(images, want_grad);
    h = a1_.forward(h, want_grad);
    h = c2_.forward(h, want_grad);
    h = a2_.forward(h, want_grad);
    const int64_t n = h.dim(0);
    h.reshape({n, 7 * 7 * 64});
    h = head_.forward(h, want_grad);
    Tensor<S> p = sig_.forward(h, want_grad);
    p.reshape({n});
    return p;
  }

  // Backprop from dL/d(probabilities); returns dL/d(images).
  Tensor<S> backward(const Tensor<S>& g_prob, bool accum_param_grads) {
    Tensor<S> g = g_prob;
    const int64_t n = g.size();
    g.reshape({n, 1});
    g = sig_.backward(g);
    g = head_.backward(g, accum_param_grads);
    g.reshape({n, 7, 7, 64});
    g = a2_.backward(g);
    g = c2_.backward(g, accum_param_grads);
    g = a1_.backward(g);
    return c1_.backward(g, accum_param_grads);
  }

  std::vector<nn::Param<S>*> params() {
    std::vector<nn::Param<S>*> out;
    for (auto* p : c1_.params()) out.push_back(p);
    for (auto* p : c2_.params()) out.push_back(p);
    for (auto* p : head_.params()) out.push_back(p);
    return out;
  }
  std::vector<std::pair<std::string, Tensor<S>*>> state() { return {}; }

 private:
  nn::Conv2d<S> c1_, c2_;
  nn::LeakyReLU<S> a1_{0.2}, a2_{0.2};
  nn::Dense<S> head_;
  nn::SigmoidProb<S> sig_;
};

// GAN-image classifier: two 3x3 conv layers (32*tier / 64*tier channels),
// each ReLU + 2x2 max-pool, dense head to one sigmoid probability.
template <typename S>
class ClassifierNet {
 public:
  explicit ClassifierNet(CapacityTier tier = {})
      : tier_(tier),
        ch1_(tier_channels(32, tier)),
        ch2_(tier_channels(64, tier)),
        c1_("c.c1", {28, 28, 1, ch1_, 3, 1, 1}, true),
        c2_("c.c2", {14, 14, ch1_, ch2_, 3, 1, 1}, true),
        head_("c.head", 7 * 7 * ch2_, 1, true) {
    validate_tier(tier);
  }

  void init(uint64_t seed) {
    Rng rng(seed);
    c1_.init_he(rng);
    c2_.init_he(rng);
    head_.init_he(rng);
  }

  Tensor<S> forward(const Tensor<S>& images, nn::Mode, bool want_grad = false) {
    detail::check_images(images, "classifier");
    Tensor<S> h = c1_.forward(images, want_grad);
    h = a1_.forward(h, want_grad);
    h = p1_.forward(h, want_grad);
    h = c2_.forward(h, want_grad);
    h = a2_.forward(h, want_grad);
    h = p2_.forward(h, want_grad);
    const int64_t n = h.dim(0);
    h.reshape({n, 7 * 7 * ch2_});
    h = head_.forward(h, want_grad);
    Tensor<S> p = sig_.forward(h, want_grad);
    p.reshape({n});
    return p;
  }

  Tensor<S> backward(const Tensor<S>& g_prob, bool accum_param_grads) {
    Tensor<S> g = g_prob;
    const int64_t n = g.size();
    g.reshape({n, 1});
    g = sig_.backward(g);
    g = head_.backward(g, accum_param_grads);
    g.reshape({n, 7, 7, ch2_});
    g = p2_.backward(g);
    g = a2_.backward(g);
    g = c2_.backward(g, accum_param_grads);
    g = p1_.backward(g);
    g = a1_.backward(g);
    return c1_.backward(g, accum_param_grads);
  }

  std::vector<nn::Param<S>*> params() {
    std::vector<nn::Param<S>*> out;
    for (auto* p : c1_.params()) out.push_back(p);
    for (auto* p : c2_.params()) out.push_back(p);
    for (auto* p : head_.params()) out.push_back(p);
    return out;
  }
  std::vector<std::pair<std::string, Tensor<S>*>> state() { return {}; }

  const CapacityTier& tier() const { return tier_; }
  int conv1_channels() const { return ch1_; }
  int conv2_channels() const { return ch2_; }

 private:
  CapacityTier tier_;
  int ch1_, ch2_;
  nn::Conv2d<S> c1_, c2_;
  nn::ReLU<S> a1_, a2_;
  nn::MaxPool2<S> p1_, p2_;
  nn::Dense<S> head_;
  nn::SigmoidProb<S> sig_;
};

// Ten-class digit classifier whose 64-unit penultimate layer doubles as the
// feature embedding for the Frechet sample-quality metric.
template <typename S>
class EmbedderNet {
 public:
  static constexpr int kEmbedDim = 64;
  static constexpr int kClasses = 10;

  EmbedderNet()
      : c1_("e.c1", {28, 28, 1, 32, 3, 1, 1}, true),
        c2_("e.c2", {14, 14, 32, 64, 3, 1, 1}, true),
        fc_("e.fc", 7 * 7 * 64, kEmbedDim, true),
        head_("e.head", kEmbedDim, kClasses, true) {}

  void init(uint64_t seed) {
    Rng rng(seed);
    c1_.init_he(rng);
    c2_.init_he(rng);
    fc_.init_he(rng);
    head_.init_he(rng);
  }

  // Returns class logits, shape [N, 10].
  Tensor<S> forward_logits(const Tensor<S>& images, bool want_grad = false) {
    Tensor<S> e = embed(images, want_grad);
    return head_.forward(e, want_grad);
  }

  // Penultimate-layer features, shape [N, 64].
  Tensor<S> embed(const Tensor<S>& images, bool want_grad = false) {
    detail::check_images(images, "embedder");
    Tensor<S> h = c1_.forward(images, want_grad);
    h = a1_.forward(h, want_grad);
    h = p1_.forward(h, want_grad);
    h = c2_.forward(h, want_grad);
    h = a2_.forward(h, want_grad);
    h = p2_.forward(h, want_grad);
    const int64_t n = h.dim(0);
    h.reshape({n, 7 * 7 * 64});
    h = fc_.forward(h, want_grad);
    return a3_.forward(h, want_grad);
  }

  void backward_logits(const Tensor<S>& g_logits) {
    Tensor<S> g = head_.backward(g_logits, true);
    g = a3_.backward(g);
    g = fc_.backward(g, true);
    const int64_t n = g.dim(0);
    g.reshape({n, 7, 7, 64});
    g = p2_.backward(g);
    g = a2_.backward(g);
    g = c2_.backward(g, true);
    g = p1_.backward(g);
    g = a1_.backward(g);
    c1_.backward(g, true);
  }

  std::vector<nn::Param<S>*> params() {
    std::vector<nn::Param<S>*> out;
    for (auto* p : c1_.params()) out.push_back(p);
    for (auto* p : c2_.params()) out.push_back(p);
    for (auto* p : fc_.params()) out.push_back(p);
    for (auto* p : head_.params()) out.push_back(p);
    return out;
  }
  std::vector<std::pair<std::string, Tensor<S>*>> state() { return {}; }

 private:
  nn::Conv2d<S> c1_, c2_;
  nn::ReLU<S> a1_, a2_, a3_;
  nn::MaxPool2<S> p1_, p2_;
  nn::Dense<S> fc_, head_;
};

template <typename Net>
int64_t param_count(Net& net) {
  int64_t n = 0;
  for (auto* p : net.params()) n += p->v.size();
  return n;
}

// Seeded factory with the tier-presence precondition: tier must be supplied
// for classifiers and must be absent otherwise.
template <typename S>
std::variant<GeneratorNet<S>, DiscriminatorNet<S>, ClassifierNet<S>> init_model(
    ModelKind kind, uint64_t seed, const std::optional<CapacityTier>& tier = std::nullopt) {
  if (kind == ModelKind::Classifier) {
    if (!tier) throw ArgumentError("classifier init requires a capacity tier");
    ClassifierNet<S> c(*tier);
    c.init(seed);
    return c;
  }
  if (tier) throw ArgumentError("capacity tier only applies to classifiers");
  if (kind == ModelKind::Generator) {
    GeneratorNet<S> g;
    g.init(seed);
    return g;
  }
  DiscriminatorNet<S> d;
  d.init(seed);
  return d;
}

}  // namespace ganchain
