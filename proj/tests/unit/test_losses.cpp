#include <vector>

#include "doctest.h"
#include "ganchain/losses/losses.hpp"
#include "ganchain/rng.hpp"

using namespace ganchain;
using namespace ganchain::losses;

namespace {

template <typename S>
std::span<const S> sp(const std::vector<S>& v) {
  return std::span<const S>(v.data(), v.size());
}

std::vector<double> random_probs(uint64_t seed, size_t n) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(1e-6, 1.0 - 1e-6);
  return v;
}

}  // namespace

TEST_CASE("standard loss closed forms") {
  std::vector<double> half{0.5};
  CHECK(gen_loss_standard(sp(half)) == doctest::Approx(0.693147).epsilon(1e-5));
  std::vector<double> near_one{1.0 - 1e-12};
  CHECK(gen_loss_standard(sp(near_one)) == doctest::Approx(0.0).epsilon(1e-9));
  std::vector<double> batch{0.25, 0.75};
  CHECK(gen_loss_standard(sp(batch)) == doctest::Approx(0.83699).epsilon(1e-4));
}

TEST_CASE("fool_all closed form and phi=0 collapse") {
  std::vector<double> d{0.5};
  std::vector<double> c1{0.5}, c2{0.5};
  std::vector<std::span<const double>> cs{sp(c1), sp(c2)};
  CHECK(gen_loss_fool_all(sp(d), cs, 0.001) == doctest::Approx(0.694533).epsilon(1e-5));

  // phi = 0 collapse is exact, bit for bit, on arbitrary batches.
  for (uint64_t seed = 0; seed < 30; seed++) {
    auto dd = random_probs(seed, 9);
    auto cc1 = random_probs(seed + 100, 9);
    auto cc2 = random_probs(seed + 200, 9);
    std::vector<std::span<const double>> cls{sp(cc1), sp(cc2)};
    CHECK(gen_loss_fool_all(sp(dd), cls, 0.0) == gen_loss_standard(sp(dd)));
    CHECK(gen_loss_memoryless(sp(dd), sp(cc1), 0.0) == gen_loss_standard(sp(dd)));
    CHECK(gen_loss_normalized(sp(dd), sp(cc1), 0.0) == gen_loss_standard(sp(dd)));
  }
}

TEST_CASE("single-classifier identity: fool_all == memoryless == multi(t=1), exactly") {
  for (uint64_t seed = 0; seed < 30; seed++) {
    auto d = random_probs(seed, 7);
    auto c = random_probs(seed + 1000, 7);
    std::vector<std::span<const double>> cs{sp(c)};
    const double phi = Rng(seed).uniform(0.0, 3.0);
    const double fa = gen_loss_fool_all(sp(d), cs, phi);
    const double ml = gen_loss_memoryless(sp(d), sp(c), phi);
    const double mu = gen_loss_multi(sp(d), cs, phi);
    CHECK(fa == ml);
    CHECK(fa == mu);
  }
}

TEST_CASE("memoryless closed forms") {
  std::vector<double> d{0.9}, c{0.1};
  CHECK(gen_loss_memoryless(sp(d), sp(c), 1.0) == doctest::Approx(2.40795).epsilon(1e-5));
  std::vector<double> dc{0.37};
  CHECK(gen_loss_memoryless(sp(dc), sp(dc), 1.0) ==
        doctest::Approx(2.0 * -std::log(0.37)).epsilon(1e-12));
}

TEST_CASE("normalized loss is a convex combination") {
  std::vector<double> d{0.5}, c{0.5};
  for (double phi : {0.0, 0.3, 1.0, 100.0, 1e4})
    CHECK(gen_loss_normalized(sp(d), sp(c), phi) == doctest::Approx(0.693147).epsilon(1e-6));
  // phi -> infinity limit: only the classifier term remains.
  std::vector<double> d2{0.9}, c2{0.2};
  CHECK(gen_loss_normalized(sp(d2), sp(c2), 1e12) ==
        doctest::Approx(-std::log(0.2)).epsilon(1e-6));
}

TEST_CASE("multi-classifier closed form and permutation symmetry") {
  std::vector<double> d{0.5};
  std::vector<double> a{0.5}, b{0.5}, c{0.5};
  std::vector<std::span<const double>> cs{sp(a), sp(b), sp(c)};
  CHECK(gen_loss_multi(sp(d), cs, 0.001) == doctest::Approx(0.695227).epsilon(1e-5));

  auto x = random_probs(1, 5), y = random_probs(2, 5), z = random_probs(3, 5);
  auto dd = random_probs(4, 5);
  std::vector<std::span<const double>> p1{sp(x), sp(y), sp(z)};
  std::vector<std::span<const double>> p2{sp(z), sp(x), sp(y)};
  CHECK(gen_loss_multi(sp(dd), p1, 0.7) ==
        doctest::Approx(gen_loss_multi(sp(dd), p2, 0.7)).epsilon(1e-12));

  CHECK_THROWS_AS(gen_loss_multi(sp(dd), {}, 0.7), ArgumentError);
}

TEST_CASE("discriminator loss closed forms and monotonicity") {
  std::vector<double> r{1.0 - 1e-7}, f{1e-7};
  CHECK(disc_loss(sp(r), sp(f)) == doctest::Approx(0.0).epsilon(1e-5));
  std::vector<double> h{0.5};
  CHECK(disc_loss(sp(h), sp(h)) == doctest::Approx(1.386294).epsilon(1e-5));

  double prev = -1;
  for (double fake = 0.1; fake < 0.95; fake += 0.1) {
    std::vector<double> ff{fake};
    const double v = disc_loss(sp(h), sp(ff));
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("classifier bce closed forms and a hand-computed batch") {
  std::vector<double> p{0.5, 0.5};
  std::vector<double> y{1.0, 0.0};
  CHECK(classifier_bce(sp(p), sp(y)) == doctest::Approx(0.693147).epsilon(1e-5));

  std::vector<double> perfect{1.0 - 1e-7, 1e-7};
  CHECK(classifier_bce(sp(perfect), sp(y)) == doctest::Approx(0.0).epsilon(1e-5));

  // Independent scalar computation for a 4-sample batch.
  std::vector<double> p4{0.9, 0.2, 0.6, 0.35};
  std::vector<double> y4{1.0, 0.0, 1.0, 0.0};
  const double expect = -(std::log(0.9) + std::log(0.8) + std::log(0.6) + std::log(0.65)) / 4.0;
  CHECK(classifier_bce(sp(p4), sp(y4)) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("every generator loss strictly decreases in each probability argument") {
  auto d = random_probs(11, 6);
  auto c = random_probs(12, 6);
  auto c2 = random_probs(13, 6);
  const double phi = 0.37;

  auto bump = [](std::vector<double> v, size_t i) {
    v[i] = std::min(1.0 - 1e-9, v[i] + 1e-4);
    return v;
  };

  for (size_t i = 0; i < d.size(); i++) {
    std::vector<std::span<const double>> cs{sp(c), sp(c2)};
    auto dp = bump(d, i);
    CHECK(gen_loss_standard(sp(dp)) < gen_loss_standard(sp(d)));
    CHECK(gen_loss_fool_all(sp(dp), cs, phi) < gen_loss_fool_all(sp(d), cs, phi));
    CHECK(gen_loss_memoryless(sp(dp), sp(c), phi) < gen_loss_memoryless(sp(d), sp(c), phi));
    CHECK(gen_loss_normalized(sp(dp), sp(c), phi) < gen_loss_normalized(sp(d), sp(c), phi));

    auto cp = bump(c, i);
    std::vector<std::span<const double>> csp{sp(cp), sp(c2)};
    CHECK(gen_loss_fool_all(sp(d), csp, phi) < gen_loss_fool_all(sp(d), cs, phi));
    CHECK(gen_loss_memoryless(sp(d), sp(cp), phi) < gen_loss_memoryless(sp(d), sp(c), phi));
    CHECK(gen_loss_normalized(sp(d), sp(cp), phi) < gen_loss_normalized(sp(d), sp(c), phi));
  }
}

TEST_CASE("losses are non-negative on clamped probabilities") {
  for (uint64_t seed = 50; seed < 60; seed++) {
    auto d = random_probs(seed, 8);
    auto c = random_probs(seed + 5, 8);
    std::vector<std::span<const double>> cs{sp(c)};
    CHECK(gen_loss_standard(sp(d)) >= 0.0);
    CHECK(gen_loss_fool_all(sp(d), cs, 0.5) >= 0.0);
    CHECK(gen_loss_memoryless(sp(d), sp(c), 0.5) >= 0.0);
    CHECK(gen_loss_normalized(sp(d), sp(c), 0.5) >= 0.0);
    CHECK(disc_loss(sp(d), sp(c)) >= 0.0);
    std::vector<double> y(8, 1.0);
    CHECK(classifier_bce(sp(d), sp(y)) >= 0.0);
  }
}

TEST_CASE("loss config validation") {
  LossConfig bad;
  bad.phi = -0.1;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  LossConfig multi;
  multi.variant = Variant::MultiClassifier;
  multi.t = 0;
  CHECK_THROWS_AS(multi.validate(), ArgumentError);
  CHECK(variant_from_name("normalized") == Variant::Normalized);
  CHECK_THROWS_AS(variant_from_name("bogus"), ArgumentError);

  LossConfig fa;
  fa.variant = Variant::FoolAll;
  CHECK(fa.expected_classifiers(0) == 0);
  CHECK(fa.expected_classifiers(3) == 3);
  LossConfig ml;
  ml.variant = Variant::Memoryless;
  CHECK(ml.expected_classifiers(2) == 1);
}
