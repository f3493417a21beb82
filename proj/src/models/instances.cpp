#include "ganchain/models/instances.hpp"

#include <cstring>

namespace ganchain {

TensorF sample_images(const GeneratorInstance& gen, int64_t n, uint64_t seed) {
  if (n <= 0) throw ArgumentError("sample count must be > 0");
  GeneratorNet<float> net = gen.net;  // local copy: forward caches are not shared
  TensorF out({n, 28, 28, 1});
  constexpr int64_t kChunk = 256;
  Rng rng(seed);
  int64_t at = 0;
  while (at < n) {
    const int64_t take = std::min(kChunk, n - at);
    TensorF z({take, 100});
    for (int64_t i = 0; i < z.size(); i++) z[i] = float(rng.normal());
    TensorF imgs = net.forward(z, nn::Mode::Eval, false);
    std::memcpy(&out[at * 784], imgs.data(), size_t(imgs.size()) * sizeof(float));
    at += take;
  }
  return out;
}

data::SampleSource as_sample_source(const GeneratorInstance& gen) {
  data::SampleSource src;
  src.id = gen.id;
  const GeneratorInstance* p = &gen;
  src.sample = [p](int64_t count, uint64_t seed) { return sample_images(*p, count, seed); };
  return src;
}

}  // namespace ganchain
