#include "ganchain/data/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "ganchain/data/idx.hpp"
#include "ganchain/data/png_io.hpp"
#include "ganchain/error.hpp"
#include "ganchain/rng.hpp"
#include "ganchain/sha256.hpp"

namespace fs = std::filesystem;

namespace ganchain::data {

ImageBatch make_image_batch(int64_t n) {
  ImageBatch b;
  b.pixels.resize({n, 28, 28, 1});
  return b;
}

void validate_image_batch(const ImageBatch& b) {
  if (b.pixels.rank() != 4 || b.pixels.dim(1) != 28 || b.pixels.dim(2) != 28 ||
      b.pixels.dim(3) != 1)
    throw ShapeError("image batch must be [N,28,28,1], got " + b.pixels.shape_str());
  for (int64_t i = 0; i < b.pixels.size(); i++) {
    const float v = b.pixels[i];
    if (!(v >= -1.0f && v <= 1.0f))
      throw ArgumentError("image batch contains values outside [-1, 1]");
  }
}

LatentBatch sample_latents(uint64_t seed, int64_t batch) {
  if (batch <= 0) throw ArgumentError("latent batch size must be > 0");
  LatentBatch out;
  out.seed = seed;
  out.vectors.resize({batch, 100});
  Rng rng(seed);
  for (int64_t i = 0; i < out.vectors.size(); i++)
    out.vectors[i] = float(rng.normal());
  return out;
}

namespace {

struct RawCorpus {
  std::vector<uint8_t> pixels;  // n*784
  std::vector<int> labels;      // empty when unlabeled
  int64_t count = 0;
};

bool name_contains(const fs::path& p, const char* needle) {
  return p.filename().string().find(needle) != std::string::npos;
}

RawCorpus load_idx_corpus(const std::string& images_path, const std::string& labels_path) {
  RawCorpus out;
  IdxImages imgs = read_idx_images(images_path);
  if (imgs.rows != 28 || imgs.cols != 28)
    throw IngestionError("corpus images must be 28x28, got " + std::to_string(imgs.rows) +
                         "x" + std::to_string(imgs.cols));
  out.count = imgs.count;
  out.pixels = std::move(imgs.pixels);
  if (!labels_path.empty() && fs::exists(labels_path)) {
    auto lab = read_idx_labels(labels_path);
    if (int64_t(lab.size()) != out.count)
      throw IngestionError("label count does not match image count");
    out.labels.assign(lab.begin(), lab.end());
  }
  return out;
}

RawCorpus load_png_corpus(const std::string& dir) {
  RawCorpus out;
  std::vector<std::pair<std::string, int>> files;  // path, label (-1 unknown)
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
    int label = -1;
    const std::string parent = entry.path().parent_path().filename().string();
    if (parent.size() == 1 && parent[0] >= '0' && parent[0] <= '9') label = parent[0] - '0';
    files.emplace_back(entry.path().string(), label);
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IngestionError("no PNG files under " + dir);
  bool all_labeled = true;
  for (auto& [path, label] : files) {
    GrayImage img = read_png_gray(path);
    if (img.width != 28 || img.height != 28)
      throw IngestionError("PNG corpus images must be 28x28: " + path);
    out.pixels.insert(out.pixels.end(), img.pixels.begin(), img.pixels.end());
    out.labels.push_back(label);
    if (label < 0) all_labeled = false;
  }
  out.count = int64_t(files.size());
  if (!all_labeled) out.labels.clear();
  return out;
}

RawCorpus load_raw_corpus(const std::string& corpus_path) {
  fs::path p(corpus_path);
  if (!fs::exists(p)) throw IngestionError("corpus path does not exist: " + corpus_path);
  if (fs::is_directory(p)) {
    std::string images, labels;
    bool has_png = false;
    for (const auto& entry : fs::directory_iterator(p)) {
      if (!entry.is_regular_file()) continue;
      const auto& ep = entry.path();
      if (name_contains(ep, "images") && (name_contains(ep, "ubyte") || name_contains(ep, "idx3")))
        images = ep.string();
      else if (name_contains(ep, "labels") &&
               (name_contains(ep, "ubyte") || name_contains(ep, "idx1")))
        labels = ep.string();
      else if (ep.extension() == ".png")
        has_png = true;
    }
    if (!images.empty()) return load_idx_corpus(images, labels);
    if (has_png || fs::exists(p)) {
      // Fall back to a recursive PNG scan (class subdirectories included).
      for (const auto& entry : fs::recursive_directory_iterator(p))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
          return load_png_corpus(corpus_path);
    }
    throw IngestionError("no IDX or PNG corpus found under " + corpus_path);
  }
  // Single file: IDX images; look for a sibling labels file by convention.
  std::string labels;
  std::string name = p.filename().string();
  auto try_sibling = [&](std::string candidate) {
    fs::path lp = p.parent_path() / candidate;
    if (fs::exists(lp)) labels = lp.string();
  };
  size_t pos = name.find("images");
  if (pos != std::string::npos) {
    std::string cand = name;
    cand.replace(pos, 6, "labels");
    size_t p3 = cand.find("idx3");
    if (p3 != std::string::npos) cand.replace(p3, 4, "idx1");
    try_sibling(cand);
  }
  return load_idx_corpus(p.string(), labels);
}

std::vector<int64_t> split_order(int64_t n, uint64_t seed) {
  std::vector<int64_t> order(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; i++) order[size_t(i)] = i;
  Rng rng(seed);
  for (int64_t i = n - 1; i > 0; i--) {
    const int64_t j = int64_t(rng.below(uint64_t(i + 1)));
    std::swap(order[size_t(i)], order[size_t(j)]);
  }
  return order;
}

}  // namespace

DatasetSplit load_dataset(const std::string& corpus_path, double split_ratio,
                          uint64_t split_seed) {
  if (!(split_ratio > 0.0 && split_ratio < 1.0))
    throw ArgumentError("split ratio must be in (0, 1)");
  RawCorpus raw = load_raw_corpus(corpus_path);
  if (raw.count == 0) throw IngestionError("empty corpus: " + corpus_path);

  DatasetSplit out;
  out.split_seed = split_seed;
  out.split_ratio = split_ratio;
  {
    Sha256 h;
    h.update(raw.pixels.data(), raw.pixels.size());
    if (!raw.labels.empty())
      h.update(raw.labels.data(), raw.labels.size() * sizeof(int));
    out.corpus_hash = to_hex(h.digest());
  }

  const auto order = split_order(raw.count, split_seed);
  const int64_t n_train = int64_t(double(raw.count) * split_ratio);
  if (n_train == 0 || n_train == raw.count)
    throw ArgumentError("split ratio leaves one side empty");

  out.train = make_image_batch(n_train);
  out.eval = make_image_batch(raw.count - n_train);
  const bool labeled = !raw.labels.empty();
  if (labeled) {
    out.train_labels.resize(size_t(n_train));
    out.eval_labels.resize(size_t(raw.count - n_train));
  }
  for (int64_t i = 0; i < raw.count; i++) {
    const int64_t src = order[size_t(i)];
    float* dst = (i < n_train) ? &out.train.pixels[i * 784]
                               : &out.eval.pixels[(i - n_train) * 784];
    const uint8_t* sp = raw.pixels.data() + src * 784;
    for (int j = 0; j < 784; j++) dst[j] = float(sp[j]) / 127.5f - 1.0f;
    if (labeled) {
      if (i < n_train)
        out.train_labels[size_t(i)] = raw.labels[size_t(src)];
      else
        out.eval_labels[size_t(i - n_train)] = raw.labels[size_t(src)];
    }
  }
  return out;
}

namespace {
std::string cache_file(const std::string& dir, const std::string& hash, double ratio,
                       uint64_t seed) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "_%.6f_%llu.split", ratio, (unsigned long long)seed);
  return dir + "/" + hash.substr(0, 16) + buf;
}
}  // namespace

bool load_split_cache(const std::string& cache_dir, const std::string& corpus_hash,
                      double ratio, uint64_t seed, std::vector<int64_t>& order) {
  const std::string path = cache_file(cache_dir, corpus_hash, ratio, seed);
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  char hash_buf[64];
  f.read(hash_buf, 64);
  if (!f || std::string(hash_buf, 64) != corpus_hash) return false;
  int64_t n = 0;
  f.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!f || n <= 0) return false;
  order.resize(size_t(n));
  f.read(reinterpret_cast<char*>(order.data()), std::streamsize(size_t(n) * sizeof(int64_t)));
  return bool(f);
}

void save_split_cache(const std::string& cache_dir, const std::string& corpus_hash,
                      double ratio, uint64_t seed, const std::vector<int64_t>& order) {
  fs::create_directories(cache_dir);
  const std::string path = cache_file(cache_dir, corpus_hash, ratio, seed);
  std::ofstream f(path + ".tmp", std::ios::binary | std::ios::trunc);
  f.write(corpus_hash.data(), 64);
  const int64_t n = int64_t(order.size());
  f.write(reinterpret_cast<const char*>(&n), sizeof(n));
  f.write(reinterpret_cast<const char*>(order.data()),
          std::streamsize(order.size() * sizeof(int64_t)));
  f.close();
  fs::rename(path + ".tmp", path);
}

BalancedCounts balanced_set_counts(int64_t n_generators, int64_t samples_per_generator,
                                   int64_t real_pool) {
  if (n_generators <= 0) throw ArgumentError("balanced set requires at least one generator");
  if (samples_per_generator <= 0) throw ArgumentError("samples_per_generator must be > 0");
  if (real_pool <= 0) throw ArgumentError("real pool is empty");
  BalancedCounts c;
  c.generated = n_generators * samples_per_generator;
  c.real = c.generated;
  c.repetition_factor = (c.real + real_pool - 1) / real_pool;
  return c;
}

LabeledImageSet build_balanced_set(const ImageBatch& real,
                                   const std::vector<SampleSource>& generators,
                                   int64_t samples_per_generator, uint64_t seed) {
  const auto counts = balanced_set_counts(int64_t(generators.size()),
                                          samples_per_generator, real.count());
  LabeledImageSet out;
  const int64_t total = counts.generated + counts.real;
  out.images = make_image_batch(total);
  out.labels.resize(size_t(total));
  out.provenance.resize(size_t(total));

  int64_t at = 0;
  for (size_t g = 0; g < generators.size(); g++) {
    const uint64_t gseed = derive_seed(seed, "balanced.gen", uint64_t(g));
    TensorF imgs = generators[g].sample(samples_per_generator, gseed);
    if (imgs.dim(0) != samples_per_generator)
      throw ArgumentError("generator sampler returned wrong count");
    std::memcpy(&out.images.pixels[at * 784], imgs.data(),
                size_t(imgs.size()) * sizeof(float));
    for (int64_t i = 0; i < samples_per_generator; i++) {
      out.labels[size_t(at + i)] = 0.0f;
      out.provenance[size_t(at + i)] = generators[g].id;
    }
    at += samples_per_generator;
  }

  // Real side: a seeded order over the pool, cycled as often as needed so the
  // counts match exactly.
  const auto order = split_order(real.count(), derive_seed(seed, "balanced.real", 0));
  for (int64_t i = 0; i < counts.real; i++) {
    const int64_t src = order[size_t(i % real.count())];
    std::memcpy(&out.images.pixels[at * 784], &real.pixels[src * 784], 784 * sizeof(float));
    out.labels[size_t(at)] = 1.0f;
    out.provenance[size_t(at)] = "corpus";
    at++;
  }
  return out;
}

ImageBatch draw_images(const ImageBatch& from, int64_t n, uint64_t seed) {
  if (n <= 0) throw ArgumentError("sample count must be > 0");
  if (from.empty()) throw ArgumentError("cannot draw from an empty batch");
  ImageBatch out = make_image_batch(n);
  const auto order = split_order(from.count(), seed);
  for (int64_t i = 0; i < n; i++) {
    const int64_t src = order[size_t(i % from.count())];
    std::memcpy(&out.pixels[i * 784], &from.pixels[src * 784], 784 * sizeof(float));
  }
  return out;
}

}  // namespace ganchain::data
