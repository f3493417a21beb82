#include "ganchain/train/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

namespace ganchain::train {

namespace {

// Derives the iteration index implied by a loss config + frozen classifier
// list, validating consistency.
int derive_iteration(const losses::LossConfig& cfg,
                     const std::vector<const ClassifierInstance*>& frozen) {
  cfg.validate();
  switch (cfg.variant) {
    case losses::Variant::Standard:
      if (!frozen.empty())
        throw ConfigurationError("standard loss takes no frozen classifiers");
      return 0;
    case losses::Variant::FoolAll: {
      if (frozen.empty())
        throw ConfigurationError("fool_all at iteration >= 1 needs one classifier per "
                                 "preceding iteration; got none");
      std::set<int> its;
      for (auto* c : frozen) its.insert(c->iteration);
      if (its.size() != frozen.size())
        throw ConfigurationError("fool_all wants exactly one classifier per iteration");
      int expect = 0;
      for (int it : its) {
        if (it != expect)
          throw ConfigurationError("fool_all classifiers must cover iterations 0..i-1 "
                                   "without gaps");
        expect++;
      }
      return int(frozen.size());
    }
    case losses::Variant::Memoryless:
    case losses::Variant::Normalized:
      if (frozen.size() != 1)
        throw ConfigurationError(std::string(losses::variant_name(cfg.variant)) +
                                 " loss needs exactly one frozen classifier");
      return frozen[0]->iteration + 1;
    case losses::Variant::MultiClassifier: {
      if (int(frozen.size()) != cfg.t)
        throw ConfigurationError("multi_classifier loss needs exactly t=" +
                                 std::to_string(cfg.t) + " classifiers, got " +
                                 std::to_string(frozen.size()));
      for (auto* c : frozen)
        if (c->iteration != frozen[0]->iteration)
          throw ConfigurationError("multi_classifier classifiers must share an iteration");
      return frozen[0]->iteration + 1;
    }
  }
  throw ConfigurationError("unknown loss variant");
}

TensorF gather_real(const data::ImageBatch& pool, const std::vector<int64_t>& idx) {
  TensorF out({int64_t(idx.size()), 28, 28, 1});
  for (size_t i = 0; i < idx.size(); i++)
    std::memcpy(&out[int64_t(i) * 784], &pool.pixels[idx[i] * 784], 784 * sizeof(float));
  return out;
}

TensorF draw_latents(Rng& rng, int64_t batch) {
  TensorF z({batch, 100});
  for (int64_t i = 0; i < z.size(); i++) z[i] = float(rng.normal());
  return z;
}

GeneratorInstance run_gan_training(GeneratorInstance gen,
                                   const data::DatasetSplit& data,
                                   const std::vector<const ClassifierInstance*>& frozen,
                                   const losses::LossConfig& cfg, const TrainSpec& spec,
                                   uint64_t seed, const LogSink& log) {
  spec.validate();
  if (data.train.empty()) throw ArgumentError("training split is empty");

  // Local copies of frozen classifiers: forward caches live inside the nets,
  // so sharing instances across concurrent pool members is not safe.
  std::vector<ClassifierNet<float>> cls;
  cls.reserve(frozen.size());
  for (auto* c : frozen) cls.push_back(c->net);

  nn::Adam<float> opt_g(gen.net.params(), spec.optimizer);
  nn::AdamConfig dcfg = spec.optimizer;
  dcfg.lr *= spec.disc_lr_scale;
  nn::Adam<float> opt_d(gen.disc.params(), dcfg);

  Rng rng(derive_seed(seed, "gan.train", 0));
  const int64_t b = spec.batch_size;
  int nonfinite_streak = 0;

  auto disc_update = [&](const TensorF& fake) {
    std::vector<int64_t> ridx(static_cast<size_t>(b));
    for (auto& i : ridx) i = int64_t(rng.below(uint64_t(data.train.count())));
    TensorF real = gather_real(data.train, ridx);

    TensorF cat({2 * b, 28, 28, 1});
    std::memcpy(cat.data(), real.data(), size_t(real.size()) * sizeof(float));
    std::memcpy(cat.data() + real.size(), fake.data(), size_t(fake.size()) * sizeof(float));

    TensorF p = gen.disc.forward(cat, nn::Mode::Train, true);
    auto dres = losses::disc_loss_with_grads<float>(
        std::span<const float>(p.data(), size_t(b)),
        std::span<const float>(p.data() + b, size_t(b)));
    TensorF gp({2 * b});
    for (int64_t i = 0; i < b; i++) gp[i] = dres.d_real[size_t(i)];
    for (int64_t i = 0; i < b; i++) gp[b + i] = dres.d_fake[size_t(i)];
    opt_d.zero_grad();
    gen.disc.backward(gp, /*accum_param_grads=*/true);
    opt_d.step();
    return dres.value;
  };

  for (long step = 0; step < spec.disc_warmup_steps; step++) {
    TensorF z = draw_latents(rng, b);
    TensorF fake = gen.net.forward(z, nn::Mode::Train, false);
    disc_update(fake);
  }

  for (long step = 0; step < spec.steps; step++) {
    // Stage A: one discriminator update on a real+fake batch.
    TensorF z = draw_latents(rng, b);
    TensorF fake = gen.net.forward(z, nn::Mode::Train, /*want_grad=*/true);
    const float dloss = disc_update(fake);

    // Stage B: one generator update against the refreshed discriminator and
    // the frozen classifiers, reusing this step's fake batch.
    TensorF pf = gen.disc.forward(fake, nn::Mode::Train, true);
    std::vector<TensorF> cprobs;
    cprobs.reserve(cls.size());
    for (auto& c : cls) cprobs.push_back(c.forward(fake, nn::Mode::Eval, true));

    std::vector<std::span<const float>> cspans;
    for (auto& cp : cprobs) cspans.emplace_back(cp.data(), size_t(cp.size()));
    auto gres = losses::gen_loss_with_grads<float>(
        cfg, std::span<const float>(pf.data(), size_t(pf.size())), cspans);

    TensorF gd({b});
    std::memcpy(gd.data(), gres.d.data(), size_t(b) * sizeof(float));
    TensorF g_img = gen.disc.backward(gd, /*accum_param_grads=*/false);
    for (size_t j = 0; j < cls.size(); j++) {
      TensorF gc({b});
      std::memcpy(gc.data(), gres.cs[j].data(), size_t(b) * sizeof(float));
      TensorF gi = cls[j].backward(gc, /*accum_param_grads=*/false);
      for (int64_t i = 0; i < g_img.size(); i++) g_img[i] += gi[i];
    }
    opt_g.zero_grad();
    gen.net.backward(g_img);
    opt_g.step();

    const double lg = double(gres.value), ld = double(dloss);
    if (!std::isfinite(lg) || !std::isfinite(ld)) {
      if (++nonfinite_streak >= 10)
        throw DivergenceError("non-finite losses for 10 consecutive steps, last at step " +
                              std::to_string(step));
    } else {
      nonfinite_streak = 0;
    }

    if (log && (step % spec.eval_every == 0 || step + 1 == spec.steps)) {
      TrainLogEntry e;
      e.step = step;
      e.loss_g = lg;
      e.loss_d = ld;
      double td = 0;
      for (int64_t i = 0; i < b; i++) td += -std::log(double(pf[i]));
      e.term_d = td / double(b);
      for (auto& cp : cprobs) {
        double tc = 0;
        for (int64_t i = 0; i < b; i++) tc += -std::log(double(cp[i]));
        e.term_c.push_back(tc / double(b));
      }
      log(e);
    }
  }
  gen.step_count += spec.steps;
  return gen;
}

}  // namespace

GeneratorInstance train_gan(const data::DatasetSplit& data,
                            const std::vector<const ClassifierInstance*>& frozen,
                            const losses::LossConfig& loss_config, const TrainSpec& spec,
                            uint64_t seed, const LogSink& log) {
  const int iteration = derive_iteration(loss_config, frozen);
  GeneratorInstance gen;
  gen.iteration = iteration;
  gen.loss = loss_config;
  gen.seed = seed;
  for (auto* c : frozen) gen.lineage.push_back(c->id);
  gen.net.init(derive_seed(seed, "gan.init.g", 0));
  gen.disc.init(derive_seed(seed, "gan.init.d", 0));
  return run_gan_training(std::move(gen), data, frozen, loss_config, spec, seed, log);
}

// Finetuning updates only the generator: the co-trained discriminator stays
// frozen alongside the classifiers, so no dataset is needed.
GeneratorInstance finetune_gan(const GeneratorInstance& base,
                               const std::vector<const ClassifierInstance*>& frozen,
                               const losses::LossConfig& loss_config, const TrainSpec& spec,
                               uint64_t seed, const LogSink& log) {
  if (loss_config.variant == losses::Variant::Standard)
    throw ConfigurationError("finetuning uses a modified loss, not the standard one");
  const int iteration = derive_iteration(loss_config, frozen);
  GeneratorInstance gen = base;  // warm start from the base weights
  gen.iteration = iteration;
  gen.loss = loss_config;
  gen.seed = seed;
  for (auto* c : frozen) gen.lineage.push_back(c->id);
  if (spec.steps == 0) return gen;  // explicit no-op bound
  spec.validate();

  std::vector<ClassifierNet<float>> cls;
  for (auto* c : frozen) cls.push_back(c->net);

  nn::Adam<float> opt_g(gen.net.params(), spec.optimizer);
  Rng rng(derive_seed(seed, "finetune", 0));
  const int64_t b = spec.batch_size;
  int nonfinite_streak = 0;

  for (long step = 0; step < spec.steps; step++) {
    TensorF z = draw_latents(rng, b);
    TensorF fake = gen.net.forward(z, nn::Mode::Train, true);
    TensorF pf = gen.disc.forward(fake, nn::Mode::Eval, true);
    std::vector<TensorF> cprobs;
    for (auto& c : cls) cprobs.push_back(c.forward(fake, nn::Mode::Eval, true));
    std::vector<std::span<const float>> cspans;
    for (auto& cp : cprobs) cspans.emplace_back(cp.data(), size_t(cp.size()));
    auto gres = losses::gen_loss_with_grads<float>(
        loss_config, std::span<const float>(pf.data(), size_t(pf.size())), cspans);

    TensorF gd({b});
    std::memcpy(gd.data(), gres.d.data(), size_t(b) * sizeof(float));
    TensorF g_img = gen.disc.backward(gd, false);
    for (size_t j = 0; j < cls.size(); j++) {
      TensorF gc({b});
      std::memcpy(gc.data(), gres.cs[j].data(), size_t(b) * sizeof(float));
      TensorF gi = cls[j].backward(gc, false);
      for (int64_t i = 0; i < g_img.size(); i++) g_img[i] += gi[i];
    }
    opt_g.zero_grad();
    gen.net.backward(g_img);
    opt_g.step();

    if (!std::isfinite(double(gres.value))) {
      if (++nonfinite_streak >= 10)
        throw DivergenceError("non-finite losses for 10 consecutive steps, last at step " +
                              std::to_string(step));
    } else {
      nonfinite_streak = 0;
    }
    if (log && (step % spec.eval_every == 0 || step + 1 == spec.steps)) {
      TrainLogEntry e;
      e.step = step;
      e.loss_g = double(gres.value);
      double td = 0;
      for (int64_t i = 0; i < b; i++) td += -std::log(double(pf[i]));
      e.term_d = td / double(b);
      for (auto& cp : cprobs) {
        double tc = 0;
        for (int64_t i = 0; i < b; i++) tc += -std::log(double(cp[i]));
        e.term_c.push_back(tc / double(b));
      }
      log(e);
    }
  }
  gen.step_count += spec.steps;
  return gen;
}

ClassifierInstance train_classifier(const data::DatasetSplit& real,
                                    const std::vector<const GeneratorInstance*>& sources,
                                    const CapacityTier& tier, const TrainSpec& spec,
                                    uint64_t seed, int64_t samples_per_generator,
                                    const LogSink& log) {
  spec.validate();
  if (sources.empty()) throw ArgumentError("classifier needs at least one source generator");
  for (auto* g : sources)
    if (g->iteration != sources[0]->iteration)
      throw ConfigurationError("classifier source generators must share an iteration");

  std::vector<data::SampleSource> samplers;
  for (auto* g : sources) samplers.push_back(as_sample_source(*g));
  data::LabeledImageSet set = data::build_balanced_set(
      real.train, samplers, samples_per_generator, derive_seed(seed, "cls.set", 0));

  ClassifierInstance cls(tier);
  cls.iteration = sources[0]->iteration;
  cls.seed = seed;
  for (auto* g : sources) cls.source_generator_ids.push_back(g->id);
  cls.net.init(derive_seed(seed, "cls.init", 0));

  nn::Adam<float> opt(cls.net.params(), spec.optimizer);
  Rng rng(derive_seed(seed, "cls.train", 0));
  const int64_t b = spec.batch_size;
  const int64_t total = set.images.count();

  TensorF batch({b, 28, 28, 1});
  std::vector<float> labels(static_cast<size_t>(b));
  for (long step = 0; step < spec.steps; step++) {
    for (int64_t i = 0; i < b; i++) {
      const int64_t src = int64_t(rng.below(uint64_t(total)));
      std::memcpy(&batch[i * 784], &set.images.pixels[src * 784], 784 * sizeof(float));
      labels[size_t(i)] = set.labels[size_t(src)];
    }
    TensorF p = cls.net.forward(batch, nn::Mode::Train, true);
    auto res = losses::classifier_bce_with_grads<float>(
        std::span<const float>(p.data(), size_t(b)),
        std::span<const float>(labels.data(), size_t(b)));
    TensorF gp({b});
    std::memcpy(gp.data(), res.p.data(), size_t(b) * sizeof(float));
    opt.zero_grad();
    cls.net.backward(gp, true);
    opt.step();

    if (log && (step % spec.eval_every == 0 || step + 1 == spec.steps)) {
      TrainLogEntry e;
      e.step = step;
      e.loss_g = double(res.value);
      log(e);
    }
  }
  cls.step_count = spec.steps;
  return cls;
}

EmbedderInstance train_embedder(const data::DatasetSplit& real, const TrainSpec& spec,
                                uint64_t seed) {
  spec.validate();
  if (!real.labeled())
    throw ConfigurationError("embedder training requires a labeled corpus");
  EmbedderInstance emb;
  emb.seed = seed;
  emb.corpus_hash = real.corpus_hash;
  emb.net.init(derive_seed(seed, "emb.init", 0));

  nn::Adam<float> opt(emb.net.params(), spec.optimizer);
  Rng rng(derive_seed(seed, "emb.train", 0));
  const int64_t b = spec.batch_size;

  TensorF batch({b, 28, 28, 1});
  std::vector<int> labels(static_cast<size_t>(b));
  for (long step = 0; step < spec.steps; step++) {
    for (int64_t i = 0; i < b; i++) {
      const int64_t src = int64_t(rng.below(uint64_t(real.train.count())));
      std::memcpy(&batch[i * 784], &real.train.pixels[src * 784], 784 * sizeof(float));
      labels[size_t(i)] = real.train_labels[size_t(src)];
    }
    TensorF logits = emb.net.forward_logits(batch, true);
    // Softmax cross-entropy; gradient is (softmax - onehot)/batch.
    TensorF glog({b, 10});
    for (int64_t i = 0; i < b; i++) {
      float mx = logits[i * 10];
      for (int k = 1; k < 10; k++) mx = std::max(mx, logits[i * 10 + k]);
      float denom = 0;
      for (int k = 0; k < 10; k++) denom += std::exp(logits[i * 10 + k] - mx);
      for (int k = 0; k < 10; k++) {
        const float sm = std::exp(logits[i * 10 + k] - mx) / denom;
        glog[i * 10 + k] = (sm - (k == labels[size_t(i)] ? 1.0f : 0.0f)) / float(b);
      }
    }
    opt.zero_grad();
    emb.net.backward_logits(glog);
    opt.step();
  }
  emb.step_count = spec.steps;
  return emb;
}

}  // namespace ganchain::train
