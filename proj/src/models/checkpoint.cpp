#include "ganchain/models/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "ganchain/error.hpp"
#include "ganchain/sha256.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace ganchain::models {

namespace {

constexpr char kMagic[4] = {'G', 'C', 'W', '1'};

struct NamedTensor {
  std::string name;
  TensorF* t;
};

std::vector<NamedTensor> generator_tensors(GeneratorInstance& g) {
  std::vector<NamedTensor> out;
  for (auto* p : g.net.params()) out.push_back({p->name, &p->v});
  for (auto& [name, t] : g.net.state()) out.push_back({name, t});
  for (auto* p : g.disc.params()) out.push_back({p->name, &p->v});
  return out;
}

std::vector<NamedTensor> classifier_tensors(ClassifierInstance& c) {
  std::vector<NamedTensor> out;
  for (auto* p : c.net.params()) out.push_back({p->name, &p->v});
  return out;
}

std::vector<NamedTensor> embedder_tensors(EmbedderInstance& e) {
  std::vector<NamedTensor> out;
  for (auto* p : e.net.params()) out.push_back({p->name, &p->v});
  return out;
}

void write_blob(const std::string& path, const std::vector<NamedTensor>& tensors) {
  std::ofstream f(path + ".tmp", std::ios::binary | std::ios::trunc);
  if (!f) throw IntegrityError("cannot write checkpoint blob: " + path);
  f.write(kMagic, 4);
  uint32_t version = kCheckpointFormatVersion;
  f.write(reinterpret_cast<const char*>(&version), 4);
  uint32_t count = uint32_t(tensors.size());
  f.write(reinterpret_cast<const char*>(&count), 4);
  for (const auto& nt : tensors) {
    uint32_t name_len = uint32_t(nt.name.size());
    f.write(reinterpret_cast<const char*>(&name_len), 4);
    f.write(nt.name.data(), name_len);
    uint32_t rank = uint32_t(nt.t->rank());
    f.write(reinterpret_cast<const char*>(&rank), 4);
    for (int i = 0; i < nt.t->rank(); i++) {
      int64_t d = nt.t->dim(i);
      f.write(reinterpret_cast<const char*>(&d), 8);
    }
    f.write(reinterpret_cast<const char*>(nt.t->data()),
            std::streamsize(size_t(nt.t->size()) * sizeof(float)));
  }
  f.close();
  fs::rename(path + ".tmp", path);
}

void read_blob(const std::string& path, const std::vector<NamedTensor>& tensors) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DependencyError("missing checkpoint blob: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw IntegrityError("bad checkpoint magic: " + path);
  uint32_t version = 0, count = 0;
  f.read(reinterpret_cast<char*>(&version), 4);
  f.read(reinterpret_cast<char*>(&count), 4);
  if (version != kCheckpointFormatVersion)
    throw IntegrityError("unsupported checkpoint version in " + path);
  if (count != tensors.size())
    throw IntegrityError("checkpoint tensor count mismatch in " + path);
  for (const auto& nt : tensors) {
    uint32_t name_len = 0;
    f.read(reinterpret_cast<char*>(&name_len), 4);
    std::string name(name_len, '\0');
    f.read(name.data(), name_len);
    if (name != nt.name)
      throw IntegrityError("checkpoint tensor order mismatch: expected " + nt.name +
                           ", found " + name);
    uint32_t rank = 0;
    f.read(reinterpret_cast<char*>(&rank), 4);
    std::vector<int64_t> dims(rank);
    for (auto& d : dims) f.read(reinterpret_cast<char*>(&d), 8);
    Tensor<float> expect_shape;
    if (int(rank) != nt.t->rank())
      throw IntegrityError("checkpoint tensor rank mismatch for " + name);
    int64_t n = 1;
    for (uint32_t i = 0; i < rank; i++) {
      if (dims[i] != nt.t->dim(int(i)))
        throw IntegrityError("checkpoint tensor shape mismatch for " + name);
      n *= dims[i];
    }
    f.read(reinterpret_cast<char*>(nt.t->data()), std::streamsize(size_t(n) * sizeof(float)));
    if (!f) throw IntegrityError("truncated checkpoint blob: " + path);
  }
}

std::string blob_path(const std::string& dir, const std::string& id) {
  return dir + "/" + id + ".gcw";
}
std::string meta_path(const std::string& dir, const std::string& id) {
  return dir + "/" + id + ".json";
}

void write_meta(const std::string& dir, const std::string& id, json meta) {
  meta["format_version"] = kCheckpointFormatVersion;
  meta["weights_file"] = id + ".gcw";
  meta["weights_sha256"] = Sha256::hex_of_file(blob_path(dir, id));
  const std::string path = meta_path(dir, id);
  std::ofstream f(path + ".tmp", std::ios::trunc);
  f << meta.dump(2) << "\n";
  f.close();
  fs::rename(path + ".tmp", path);
}

json read_meta(const std::string& dir, const std::string& id, const std::string& kind) {
  const std::string path = meta_path(dir, id);
  std::ifstream f(path);
  if (!f) throw DependencyError("missing checkpoint sidecar: " + path);
  json meta = json::parse(f, nullptr, /*allow_exceptions=*/false);
  if (meta.is_discarded()) throw IntegrityError("corrupt checkpoint sidecar: " + path);
  if (meta.value("format_version", -1) != kCheckpointFormatVersion)
    throw IntegrityError("unsupported sidecar format version in " + path);
  if (meta.value("kind", "") != kind)
    throw IntegrityError("checkpoint kind mismatch in " + path + ": expected " + kind);
  return meta;
}

}  // namespace

void save_generator(const std::string& dir, GeneratorInstance& gen) {
  fs::create_directories(dir);
  write_blob(blob_path(dir, gen.id), generator_tensors(gen));
  json meta;
  meta["kind"] = "generator";
  meta["id"] = gen.id;
  meta["iteration"] = gen.iteration;
  meta["seed"] = gen.seed;
  meta["step_count"] = gen.step_count;
  meta["lineage"] = gen.lineage;
  meta["loss"] = {{"variant", losses::variant_name(gen.loss.variant)},
                  {"phi", gen.loss.phi},
                  {"t", gen.loss.t}};
  write_meta(dir, gen.id, std::move(meta));
}

GeneratorInstance load_generator(const std::string& dir, const std::string& id) {
  json meta = read_meta(dir, id, "generator");
  GeneratorInstance g;
  g.id = id;
  g.iteration = meta.at("iteration").get<int>();
  g.seed = meta.at("seed").get<uint64_t>();
  g.step_count = meta.at("step_count").get<long>();
  g.lineage = meta.at("lineage").get<std::vector<std::string>>();
  g.loss.variant = losses::variant_from_name(meta.at("loss").at("variant").get<std::string>());
  g.loss.phi = meta.at("loss").at("phi").get<double>();
  g.loss.t = meta.at("loss").at("t").get<int>();
  read_blob(blob_path(dir, id), generator_tensors(g));
  return g;
}

void save_classifier(const std::string& dir, ClassifierInstance& cls) {
  fs::create_directories(dir);
  write_blob(blob_path(dir, cls.id), classifier_tensors(cls));
  json meta;
  meta["kind"] = "classifier";
  meta["id"] = cls.id;
  meta["iteration"] = cls.iteration;
  meta["seed"] = cls.seed;
  meta["step_count"] = cls.step_count;
  meta["tier"] = {{"multiplier", cls.tier.multiplier}, {"name", cls.tier.name}};
  meta["source_generator_ids"] = cls.source_generator_ids;
  write_meta(dir, cls.id, std::move(meta));
}

ClassifierInstance load_classifier(const std::string& dir, const std::string& id) {
  json meta = read_meta(dir, id, "classifier");
  CapacityTier tier{meta.at("tier").at("multiplier").get<double>(),
                    meta.at("tier").at("name").get<std::string>()};
  ClassifierInstance c(tier);
  c.id = id;
  c.iteration = meta.at("iteration").get<int>();
  c.seed = meta.at("seed").get<uint64_t>();
  c.step_count = meta.at("step_count").get<long>();
  c.source_generator_ids = meta.at("source_generator_ids").get<std::vector<std::string>>();
  read_blob(blob_path(dir, id), classifier_tensors(c));
  return c;
}

void save_embedder(const std::string& dir, EmbedderInstance& emb) {
  fs::create_directories(dir);
  write_blob(blob_path(dir, emb.id), embedder_tensors(emb));
  json meta;
  meta["kind"] = "embedder";
  meta["id"] = emb.id;
  meta["seed"] = emb.seed;
  meta["step_count"] = emb.step_count;
  meta["corpus_hash"] = emb.corpus_hash;
  write_meta(dir, emb.id, std::move(meta));
}

EmbedderInstance load_embedder(const std::string& dir, const std::string& id) {
  json meta = read_meta(dir, id, "embedder");
  EmbedderInstance e;
  e.id = id;
  e.seed = meta.at("seed").get<uint64_t>();
  e.step_count = meta.at("step_count").get<long>();
  e.corpus_hash = meta.value("corpus_hash", "");
  read_blob(blob_path(dir, id), embedder_tensors(e));
  return e;
}

bool checkpoint_exists(const std::string& dir, const std::string& id) {
  return fs::exists(blob_path(dir, id)) && fs::exists(meta_path(dir, id));
}

std::string weights_hash(const std::string& dir, const std::string& id) {
  return Sha256::hex_of_file(blob_path(dir, id));
}

void verify_checkpoint(const std::string& dir, const std::string& id) {
  const std::string path = meta_path(dir, id);
  std::ifstream f(path);
  if (!f) throw DependencyError("missing checkpoint sidecar: " + path);
  json meta = json::parse(f, nullptr, false);
  if (meta.is_discarded()) throw IntegrityError("corrupt checkpoint sidecar: " + path);
  if (meta.value("format_version", -1) != kCheckpointFormatVersion)
    throw IntegrityError("unsupported sidecar format version in " + path);
  const std::string expect = meta.value("weights_sha256", "");
  const std::string actual = weights_hash(dir, id);
  if (expect != actual)
    throw IntegrityError("checkpoint hash mismatch for " + id + ": sidecar " + expect +
                         " vs blob " + actual);
}

}  // namespace ganchain::models
