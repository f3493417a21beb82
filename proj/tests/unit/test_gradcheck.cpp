#include <cstring>
#include <span>

#include "doctest.h"
#include "ganchain/data/dataset.hpp"
#include "ganchain/losses/losses.hpp"
#include "ganchain/models/gradcheck.hpp"
#include "ganchain/models/nets.hpp"

using namespace ganchain;
using namespace ganchain::losses;

namespace {

template <typename S>
std::span<const S> sp(const std::vector<S>& v) {
  return std::span<const S>(v.data(), v.size());
}

TensorD noise_images(int64_t n, uint64_t seed) {
  Rng rng(seed);
  TensorD t({n, 28, 28, 1});
  for (int64_t i = 0; i < t.size(); i++) t[i] = std::tanh(rng.normal());
  return t;
}

std::vector<int64_t> probe_coords(int64_t size) {
  if (size <= 2) return {0};
  return {size / 7, (5 * size) / 7};
}

}  // namespace

TEST_CASE("finite_difference_gradient on a closed-form function") {
  auto f = [](const std::vector<double>& p) {
    double acc = 0;
    for (double v : p) acc += v * v;
    return acc;
  };
  auto g = finite_difference_gradient(f, {1.0, 2.0}, 1e-5);
  CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(g[1] == doctest::Approx(4.0).epsilon(1e-6));

  CHECK_THROWS_AS(finite_difference_gradient(f, {1.0}, 0.0), ArgumentError);
  CHECK_THROWS_AS(finite_difference_gradient(f, {1.0}, -1e-3), ArgumentError);
}

TEST_CASE("loss-level gradients match finite differences for all variants") {
  Rng rng(77);
  std::vector<double> d(6), c1(6), c2(6);
  for (auto* v : {&d, &c1, &c2})
    for (auto& x : *v) x = rng.uniform(0.05, 0.95);

  auto check_cfg = [&](LossConfig cfg, int n_cls) {
    std::vector<std::span<const double>> cs;
    if (n_cls >= 1) cs.push_back(sp(c1));
    if (n_cls >= 2) cs.push_back(sp(c2));
    auto res = gen_loss_with_grads<double>(cfg, sp(d), cs);
    for (size_t i = 0; i < d.size(); i++) {
      const double fd = central_difference_at(
          [&] { return double(gen_loss_with_grads<double>(cfg, sp(d), cs).value); }, d[i],
          1e-7);
      CHECK(grad_rel_err(res.d[i], fd) < 1e-3);
    }
    for (int j = 0; j < n_cls; j++) {
      auto& cv = j == 0 ? c1 : c2;
      for (size_t i = 0; i < cv.size(); i++) {
        const double fd = central_difference_at(
            [&] { return double(gen_loss_with_grads<double>(cfg, sp(d), cs).value); }, cv[i],
            1e-7);
        CHECK(grad_rel_err(res.cs[size_t(j)][i], fd) < 1e-3);
      }
    }
  };

  check_cfg({Variant::Standard, 0.0, 1}, 0);
  check_cfg({Variant::FoolAll, 0.4, 1}, 2);
  check_cfg({Variant::Memoryless, 0.7, 1}, 1);
  check_cfg({Variant::Normalized, 2.5, 1}, 1);
  check_cfg({Variant::MultiClassifier, 0.9, 2}, 2);

  auto dres = disc_loss_with_grads<double>(sp(d), sp(c1));
  for (size_t i = 0; i < d.size(); i++) {
    const double fd = central_difference_at(
        [&] { return double(disc_loss(sp(d), sp(c1))); }, d[i], 1e-7);
    CHECK(grad_rel_err(dres.d_real[i], fd) < 1e-3);
    const double fdf = central_difference_at(
        [&] { return double(disc_loss(sp(d), sp(c1))); }, c1[i], 1e-7);
    CHECK(grad_rel_err(dres.d_fake[i], fdf) < 1e-3);
  }

  std::vector<double> labels{1, 0, 1, 1, 0, 0};
  auto bres = classifier_bce_with_grads<double>(sp(d), sp(labels));
  for (size_t i = 0; i < d.size(); i++) {
    const double fd = central_difference_at(
        [&] { return double(classifier_bce(sp(d), sp(labels))); }, d[i], 1e-7);
    CHECK(grad_rel_err(bres.p[i], fd) < 1e-3);
  }
}

TEST_CASE("end-to-end generator gradients match finite differences (64-bit)") {
  GeneratorNet<double> g;
  g.init(21);
  DiscriminatorNet<double> d;
  d.init(22);
  ClassifierNet<double> c0(CapacityTier{0.25, "q"});
  c0.init(23);
  ClassifierNet<double> c1(CapacityTier{0.25, "q"});
  c1.init(24);

  TensorD z({2, 100});
  Rng rng(25);
  for (int64_t i = 0; i < z.size(); i++) z[i] = rng.normal();

  auto eval_loss = [&](const LossConfig& cfg, int n_cls) -> double {
    TensorD fake = g.forward(z, nn::Mode::Train, false);
    TensorD pd = d.forward(fake, nn::Mode::Eval, false);
    std::vector<TensorD> pcs;
    if (n_cls >= 1) pcs.push_back(c0.forward(fake, nn::Mode::Eval, false));
    if (n_cls >= 2) pcs.push_back(c1.forward(fake, nn::Mode::Eval, false));
    std::vector<std::span<const double>> cs;
    for (auto& pc : pcs) cs.emplace_back(pc.data(), size_t(pc.size()));
    return double(
        gen_loss_with_grads<double>(cfg, std::span<const double>(pd.data(), size_t(pd.size())), cs)
            .value);
  };

  auto run_check = [&](const LossConfig& cfg, int n_cls) {
    CAPTURE(variant_name(cfg.variant));
    // Analytic pass.
    TensorD fake = g.forward(z, nn::Mode::Train, true);
    TensorD pd = d.forward(fake, nn::Mode::Eval, true);
    std::vector<TensorD> pcs;
    if (n_cls >= 1) pcs.push_back(c0.forward(fake, nn::Mode::Eval, true));
    if (n_cls >= 2) pcs.push_back(c1.forward(fake, nn::Mode::Eval, true));
    std::vector<std::span<const double>> cs;
    for (auto& pc : pcs) cs.emplace_back(pc.data(), size_t(pc.size()));
    auto res = gen_loss_with_grads<double>(
        cfg, std::span<const double>(pd.data(), size_t(pd.size())), cs);

    TensorD gd({2});
    std::memcpy(gd.data(), res.d.data(), 2 * sizeof(double));
    TensorD g_img = d.backward(gd, false);
    ClassifierNet<double>* cls_nets[2] = {&c0, &c1};
    for (int j = 0; j < n_cls; j++) {
      TensorD gc({2});
      std::memcpy(gc.data(), res.cs[size_t(j)].data(), 2 * sizeof(double));
      TensorD gi = cls_nets[j]->backward(gc, false);
      for (int64_t i = 0; i < g_img.size(); i++) g_img[i] += gi[i];
    }
    for (auto* p : g.params()) p->zero_grad();
    g.backward(g_img);

    // Probe a few coordinates on representative tensors.
    auto params = g.params();
    std::vector<nn::Param<double>*> chosen{params[0], params[1], params.back()};
    chosen.push_back(params[params.size() / 2]);
    for (auto* p : chosen) {
      for (int64_t i : probe_coords(p->v.size())) {
        const double analytic = p->g[i];
        const double fd = central_difference_at([&] { return eval_loss(cfg, n_cls); },
                                                p->v[i], 1e-5);
        if (std::abs(analytic) < 1e-10 && std::abs(fd) < 1e-7) continue;
        CAPTURE(p->name);
        CAPTURE(i);
        CHECK(grad_rel_err(analytic, fd) < 1e-3);
      }
    }
  };

  run_check({Variant::Standard, 0.0, 1}, 0);
  run_check({Variant::FoolAll, 0.5, 1}, 2);
  run_check({Variant::Memoryless, 0.8, 1}, 1);
  run_check({Variant::Normalized, 3.0, 1}, 1);
  run_check({Variant::MultiClassifier, 0.25, 2}, 2);
}

TEST_CASE("end-to-end discriminator and classifier loss gradients (64-bit)") {
  DiscriminatorNet<double> d;
  d.init(31);
  TensorD real = noise_images(2, 32);
  TensorD fake = noise_images(2, 33);
  TensorD cat({4, 28, 28, 1});
  std::memcpy(cat.data(), real.data(), size_t(real.size()) * sizeof(double));
  std::memcpy(cat.data() + real.size(), fake.data(), size_t(fake.size()) * sizeof(double));

  auto disc_value = [&]() {
    TensorD p = d.forward(cat, nn::Mode::Eval, false);
    return double(disc_loss(std::span<const double>(p.data(), 2),
                            std::span<const double>(p.data() + 2, 2)));
  };
  {
    TensorD p = d.forward(cat, nn::Mode::Eval, true);
    auto res = disc_loss_with_grads<double>(std::span<const double>(p.data(), 2),
                                            std::span<const double>(p.data() + 2, 2));
    TensorD gp({4});
    gp[0] = res.d_real[0];
    gp[1] = res.d_real[1];
    gp[2] = res.d_fake[0];
    gp[3] = res.d_fake[1];
    for (auto* pp : d.params()) pp->zero_grad();
    d.backward(gp, true);
    for (auto* pp : d.params()) {
      for (int64_t i : probe_coords(pp->v.size())) {
        const double fd = central_difference_at(disc_value, pp->v[i], 1e-5);
        if (std::abs(pp->g[i]) < 1e-10 && std::abs(fd) < 1e-7) continue;
        CHECK(grad_rel_err(pp->g[i], fd) < 1e-3);
      }
    }
  }

  ClassifierNet<double> c(CapacityTier{0.5, "h"});
  c.init(34);
  TensorD imgs = noise_images(4, 35);
  std::vector<double> labels{1, 0, 0, 1};
  auto bce_value = [&]() {
    TensorD p = c.forward(imgs, nn::Mode::Eval, false);
    return double(
        classifier_bce(std::span<const double>(p.data(), 4), sp(labels)));
  };
  {
    TensorD p = c.forward(imgs, nn::Mode::Eval, true);
    auto res = classifier_bce_with_grads<double>(std::span<const double>(p.data(), 4),
                                                 sp(labels));
    TensorD gp({4});
    for (int i = 0; i < 4; i++) gp[i] = res.p[size_t(i)];
    for (auto* pp : c.params()) pp->zero_grad();
    c.backward(gp, true);
    for (auto* pp : c.params()) {
      for (int64_t i : probe_coords(pp->v.size())) {
        const double fd = central_difference_at(bce_value, pp->v[i], 1e-5);
        if (std::abs(pp->g[i]) < 1e-10 && std::abs(fd) < 1e-7) continue;
        CHECK(grad_rel_err(pp->g[i], fd) < 1e-3);
      }
    }
  }
}
