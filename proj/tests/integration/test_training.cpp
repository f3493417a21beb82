#include <filesystem>

#include "doctest.h"
#include "ganchain/data/synth.hpp"
#include "ganchain/eval/metrics.hpp"
#include "ganchain/models/checkpoint.hpp"
#include "ganchain/train/train.hpp"

using namespace ganchain;
namespace fs = std::filesystem;

namespace {

const data::DatasetSplit& shared_split() {
  static data::DatasetSplit split = [] {
    const auto dir = fs::temp_directory_path() / "ganchain_train_corpus";
    fs::remove_all(dir);
    data::synth_corpus(dir.string(), 3000, 9001);
    return data::load_dataset(dir.string(), 0.8, 17);
  }();
  return split;
}

train::TrainSpec tiny_spec(long steps, int batch = 16) {
  train::TrainSpec s;
  s.steps = steps;
  s.batch_size = batch;
  s.eval_every = 50;
  return s;
}

std::vector<float> flatten_params(GeneratorInstance& g) {
  std::vector<float> out;
  for (auto* p : g.net.params()) out.insert(out.end(), p->v.vec().begin(), p->v.vec().end());
  for (auto* p : g.disc.params()) out.insert(out.end(), p->v.vec().begin(), p->v.vec().end());
  return out;
}

}  // namespace

TEST_CASE("train_gan validates loss/lineage consistency") {
  const auto& split = shared_split();
  ClassifierInstance cls(CapacityTier{0.25, "q"});
  cls.id = "c0";
  cls.iteration = 0;
  cls.net.init(5);

  losses::LossConfig standard;
  CHECK_THROWS_AS(train::train_gan(split, {&cls}, standard, tiny_spec(5), 1),
                  ConfigurationError);

  losses::LossConfig foolall;
  foolall.variant = losses::Variant::FoolAll;
  foolall.phi = 0.5;
  CHECK_THROWS_AS(train::train_gan(split, {}, foolall, tiny_spec(5), 1), ConfigurationError);

  losses::LossConfig memoryless;
  memoryless.variant = losses::Variant::Memoryless;
  memoryless.phi = 0.5;
  CHECK_THROWS_AS(train::train_gan(split, {&cls, &cls}, memoryless, tiny_spec(5), 1),
                  ConfigurationError);
}

TEST_CASE("train_classifier rejects mixed-iteration sources and empty source lists") {
  const auto& split = shared_split();
  GeneratorInstance a, b;
  a.id = "ga";
  a.iteration = 0;
  a.net.init(1);
  a.disc.init(2);
  b.id = "gb";
  b.iteration = 1;
  b.net.init(3);
  b.disc.init(4);
  CHECK_THROWS_AS(
      train::train_classifier(split, {&a, &b}, CapacityTier{0.25, "q"}, tiny_spec(5), 1, 32),
      ConfigurationError);
  CHECK_THROWS_AS(
      train::train_classifier(split, {}, CapacityTier{0.25, "q"}, tiny_spec(5), 1, 32),
      ArgumentError);
}

TEST_CASE("gan training is bit-deterministic in (data, spec, seed)") {
  const auto& split = shared_split();
  losses::LossConfig cfg;  // standard
  auto g1 = train::train_gan(split, {}, cfg, tiny_spec(8), 4242);
  auto g2 = train::train_gan(split, {}, cfg, tiny_spec(8), 4242);
  CHECK(flatten_params(g1) == flatten_params(g2));
  CHECK(g1.iteration == 0);
  CHECK(g1.lineage.empty());
  CHECK(g1.step_count == 8);

  auto g3 = train::train_gan(split, {}, cfg, tiny_spec(8), 4243);
  CHECK(flatten_params(g1) != flatten_params(g3));
}

TEST_CASE("generator loss decreases over a short standard training run") {
  const auto& split = shared_split();
  losses::LossConfig cfg;
  std::vector<train::TrainLogEntry> logs;
  train::TrainSpec spec = tiny_spec(240, 32);
  spec.eval_every = 10;
  auto gen = train::train_gan(split, {}, cfg, spec, 99,
                              [&](const train::TrainLogEntry& e) { logs.push_back(e); });
  REQUIRE(logs.size() >= 8);
  double head = 0, tail = 0;
  const size_t k = 4;
  for (size_t i = 0; i < k; i++) {
    head += logs[i].loss_g;
    tail += logs[logs.size() - 1 - i].loss_g;
  }
  // The discriminator catches up fast at init, so the generator loss should
  // drop from its early values as G learns to push back.
  CHECK(tail / double(k) < head / double(k));
}

TEST_CASE("frozen classifiers are bit-identical across train_gan and finetune_gan") {
  const auto& split = shared_split();
  const std::string dir = (fs::temp_directory_path() / "ganchain_frozen").string();
  fs::remove_all(dir);

  losses::LossConfig std_cfg;
  auto base = train::train_gan(split, {}, std_cfg, tiny_spec(30), 7);
  base.id = "it0_gen";

  ClassifierInstance cls =
      train::train_classifier(split, {&base}, CapacityTier{1.0, "base"}, tiny_spec(40), 8, 64);
  cls.id = "it0_cls";
  models::save_classifier(dir, cls);
  const std::string hash_before = models::weights_hash(dir, cls.id);

  losses::LossConfig ml;
  ml.variant = losses::Variant::Memoryless;
  ml.phi = 1.0;
  auto g1 = train::train_gan(split, {&cls}, ml, tiny_spec(25), 9);
  CHECK(g1.iteration == 1);
  CHECK(g1.lineage == std::vector<std::string>{"it0_cls"});

  auto g2 = train::finetune_gan(base, {&cls}, ml, tiny_spec(25), 10);
  CHECK(g2.lineage == std::vector<std::string>{"it0_cls"});

  models::save_classifier(dir, cls);
  CHECK(models::weights_hash(dir, cls.id) == hash_before);
}

TEST_CASE("finetune with zero steps is a no-op on the weights") {
  const auto& split = shared_split();
  losses::LossConfig std_cfg;
  auto base = train::train_gan(split, {}, std_cfg, tiny_spec(10), 11);
  base.id = "base";
  ClassifierInstance cls(CapacityTier{0.25, "q"});
  cls.id = "c";
  cls.iteration = 0;
  cls.net.init(12);

  losses::LossConfig ml;
  ml.variant = losses::Variant::Memoryless;
  ml.phi = 0.5;
  auto tuned = train::finetune_gan(base, {&cls}, ml, tiny_spec(0), 13);
  CHECK(flatten_params(tuned) == flatten_params(base));
  CHECK(tuned.lineage == std::vector<std::string>{"c"});
  CHECK(tuned.iteration == 1);

  losses::LossConfig std_loss;
  CHECK_THROWS_AS(train::finetune_gan(base, {}, std_loss, tiny_spec(5), 13),
                  ConfigurationError);
}

TEST_CASE("checkpoint round trip preserves generator and classifier state") {
  const auto& split = shared_split();
  const std::string dir = (fs::temp_directory_path() / "ganchain_ckpt").string();
  fs::remove_all(dir);

  losses::LossConfig cfg;
  auto gen = train::train_gan(split, {}, cfg, tiny_spec(12), 21);
  gen.id = "gen_rt";
  models::save_generator(dir, gen);
  auto back = models::load_generator(dir, "gen_rt");
  CHECK(flatten_params(back) == flatten_params(gen));
  CHECK(back.iteration == gen.iteration);
  CHECK(back.seed == gen.seed);
  CHECK(back.step_count == gen.step_count);

  // Sampling from the reloaded instance is identical.
  TensorF a = sample_images(gen, 8, 55);
  TensorF b = sample_images(back, 8, 55);
  CHECK(a.vec() == b.vec());

  models::verify_checkpoint(dir, "gen_rt");
  CHECK_THROWS_AS(models::load_generator(dir, "missing"), DependencyError);
}
