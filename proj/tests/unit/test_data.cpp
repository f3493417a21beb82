#include <filesystem>
#include <set>

#include "doctest.h"
#include "ganchain/data/dataset.hpp"
#include "ganchain/data/idx.hpp"
#include "ganchain/data/png_io.hpp"
#include "ganchain/data/synth.hpp"
#include "ganchain/sha256.hpp"

using namespace ganchain;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("ganchain_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string row_hash(const float* row) {
  return Sha256::hex(row, 784 * sizeof(float));
}

}  // namespace

TEST_CASE("idx round trip preserves bytes and magic validation works") {
  const std::string dir = temp_dir("idx");
  std::vector<uint8_t> pixels(3 * 28 * 28);
  for (size_t i = 0; i < pixels.size(); i++) pixels[i] = uint8_t(i % 251);
  data::write_idx_images(dir + "/im", pixels, 3, 28, 28);
  auto back = data::read_idx_images(dir + "/im");
  CHECK(back.count == 3);
  CHECK(back.rows == 28);
  CHECK(back.pixels == pixels);

  std::vector<uint8_t> labels{1, 7, 3};
  data::write_idx_labels(dir + "/lab", labels);
  CHECK(data::read_idx_labels(dir + "/lab") == labels);

  // Labels file is not a valid images file.
  CHECK_THROWS_AS(data::read_idx_images(dir + "/lab"), IngestionError);
  CHECK_THROWS_AS(data::read_idx_images(dir + "/missing"), IngestionError);
}

TEST_CASE("synthetic corpus loads, splits deterministically and partitions fully") {
  const std::string dir = temp_dir("corpus");
  data::synth_corpus(dir, 500, 11);

  auto split = data::load_dataset(dir, 0.8, 17);
  CHECK(split.train.count() == 400);
  CHECK(split.eval.count() == 100);
  CHECK(split.labeled());
  data::validate_image_batch(split.train);
  data::validate_image_batch(split.eval);

  // Deterministic: same (corpus, seed) twice gives identical member sets.
  auto split2 = data::load_dataset(dir, 0.8, 17);
  CHECK(split2.train.pixels.vec() == split.train.pixels.vec());
  CHECK(split2.eval.pixels.vec() == split.eval.pixels.vec());
  CHECK(split2.corpus_hash == split.corpus_hash);

  // Partition: every corpus image lands in exactly one side.
  std::multiset<std::string> all;
  for (int64_t i = 0; i < split.train.count(); i++)
    all.insert(row_hash(&split.train.pixels[i * 784]));
  for (int64_t i = 0; i < split.eval.count(); i++)
    all.insert(row_hash(&split.eval.pixels[i * 784]));
  CHECK(all.size() == 500);

  auto raw = data::read_idx_images(dir + "/images-idx3-ubyte");
  std::multiset<std::string> orig;
  for (int64_t i = 0; i < raw.count; i++) {
    std::vector<float> norm(784);
    for (int j = 0; j < 784; j++) norm[size_t(j)] = float(raw.pixels[size_t(i * 784 + j)]) / 127.5f - 1.0f;
    orig.insert(row_hash(norm.data()));
  }
  CHECK(orig == all);

  // A different seed reshuffles membership.
  auto split3 = data::load_dataset(dir, 0.8, 18);
  CHECK(split3.train.pixels.vec() != split.train.pixels.vec());
}

TEST_CASE("load_dataset rejects bad ratios and missing corpora") {
  const std::string dir = temp_dir("corpus_bad");
  data::synth_corpus(dir, 50, 1);
  CHECK_THROWS_AS(data::load_dataset(dir, 0.0, 1), ArgumentError);
  CHECK_THROWS_AS(data::load_dataset(dir, 1.0, 1), ArgumentError);
  CHECK_THROWS_AS(data::load_dataset(dir + "/nope", 0.8, 1), IngestionError);
}

TEST_CASE("png fallback corpus with class directories") {
  const std::string dir = temp_dir("png");
  Rng rng(5);
  for (int cls = 0; cls < 3; cls++) {
    fs::create_directories(dir + "/" + std::to_string(cls));
    for (int i = 0; i < 4; i++) {
      data::GrayImage img;
      img.width = img.height = 28;
      img.pixels = data::render_glyph(cls, rng);
      data::write_png_gray(dir + "/" + std::to_string(cls) + "/s" + std::to_string(i) + ".png",
                           img);
    }
  }
  auto split = data::load_dataset(dir, 0.75, 3);
  CHECK(split.train.count() == 9);
  CHECK(split.eval.count() == 3);
  CHECK(split.labeled());
  data::validate_image_batch(split.train);
}

TEST_CASE("balanced set counts match the protocol at full scale") {
  auto c = data::balanced_set_counts(15, 56000, 56000);
  CHECK(c.generated == 840000);
  CHECK(c.real == 840000);
  CHECK(c.repetition_factor == 15);

  auto c1 = data::balanced_set_counts(1, 56000, 56000);
  CHECK(c1.generated == 56000);
  CHECK(c1.repetition_factor == 1);

  CHECK_THROWS_AS(data::balanced_set_counts(0, 10, 10), ArgumentError);
}

TEST_CASE("build_balanced_set balances labels exactly and records provenance") {
  data::ImageBatch real = data::make_image_batch(40);
  for (int64_t i = 0; i < real.pixels.size(); i++) real.pixels[i] = 0.25f;

  auto make_source = [](const std::string& id, float fill) {
    data::SampleSource s;
    s.id = id;
    s.sample = [fill](int64_t n, uint64_t) {
      TensorF t({n, 28, 28, 1});
      t.fill(fill);
      return t;
    };
    return s;
  };
  std::vector<data::SampleSource> gens{make_source("g0", -0.5f), make_source("g1", 0.5f),
                                       make_source("g2", 0.9f)};

  auto set = data::build_balanced_set(real, gens, 30, 99);
  const int64_t total = set.images.count();
  CHECK(total == 180);  // 3*30 generated + 90 real (40-image pool cycled)
  int64_t real_count = 0, gen_count = 0;
  for (int64_t i = 0; i < total; i++) {
    if (set.labels[size_t(i)] == 1.0f) {
      real_count++;
      CHECK(set.provenance[size_t(i)] == "corpus");
    } else {
      gen_count++;
    }
  }
  CHECK(real_count == gen_count);
  CHECK(set.provenance[0] == "g0");
  CHECK(set.provenance[89] == "g2");

  CHECK_THROWS_AS(data::build_balanced_set(real, {}, 30, 99), ArgumentError);
}

TEST_CASE("split cache stores and validates the permutation") {
  const std::string dir = temp_dir("cache");
  std::vector<int64_t> order{3, 1, 4, 1, 5, 9, 2, 6};
  std::string hash(64, 'a');
  data::save_split_cache(dir, hash, 0.8, 7, order);
  std::vector<int64_t> back;
  CHECK(data::load_split_cache(dir, hash, 0.8, 7, back));
  CHECK(back == order);
  std::vector<int64_t> miss;
  CHECK_FALSE(data::load_split_cache(dir, std::string(64, 'b'), 0.8, 7, miss));
}
