#include "ganchain/data/idx.hpp"

#include <fstream>

#include "ganchain/error.hpp"

namespace ganchain::data {

namespace {

constexpr uint32_t kImagesMagic = 0x00000803;
constexpr uint32_t kLabelsMagic = 0x00000801;

uint32_t read_be32(std::istream& in, const std::string& path) {
  uint8_t b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw IngestionError("truncated IDX header: " + path);
  return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) | (uint32_t(b[2]) << 8) | uint32_t(b[3]);
}

void write_be32(std::ostream& out, uint32_t v) {
  uint8_t b[4] = {uint8_t(v >> 24), uint8_t(v >> 16), uint8_t(v >> 8), uint8_t(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

IdxImages read_idx_images(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IngestionError("cannot open corpus file: " + path);
  if (read_be32(f, path) != kImagesMagic)
    throw IngestionError("bad IDX image magic in " + path);
  IdxImages out;
  out.count = read_be32(f, path);
  out.rows = int(read_be32(f, path));
  out.cols = int(read_be32(f, path));
  if (out.count <= 0 || out.rows <= 0 || out.cols <= 0)
    throw IngestionError("empty or malformed IDX image file: " + path);
  out.pixels.resize(size_t(out.count) * out.rows * out.cols);
  f.read(reinterpret_cast<char*>(out.pixels.data()), std::streamsize(out.pixels.size()));
  if (size_t(f.gcount()) != out.pixels.size())
    throw IngestionError("truncated IDX image payload: " + path);
  return out;
}

std::vector<uint8_t> read_idx_labels(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IngestionError("cannot open labels file: " + path);
  if (read_be32(f, path) != kLabelsMagic)
    throw IngestionError("bad IDX label magic in " + path);
  const uint32_t count = read_be32(f, path);
  std::vector<uint8_t> labels(count);
  f.read(reinterpret_cast<char*>(labels.data()), std::streamsize(labels.size()));
  if (size_t(f.gcount()) != labels.size())
    throw IngestionError("truncated IDX label payload: " + path);
  return labels;
}

void write_idx_images(const std::string& path, const std::vector<uint8_t>& pixels,
                      int64_t count, int rows, int cols) {
  if (pixels.size() != size_t(count) * rows * cols)
    throw ArgumentError("pixel buffer does not match count*rows*cols");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IngestionError("cannot write " + path);
  write_be32(f, kImagesMagic);
  write_be32(f, uint32_t(count));
  write_be32(f, uint32_t(rows));
  write_be32(f, uint32_t(cols));
  f.write(reinterpret_cast<const char*>(pixels.data()), std::streamsize(pixels.size()));
}

void write_idx_labels(const std::string& path, const std::vector<uint8_t>& labels) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IngestionError("cannot write " + path);
  write_be32(f, kLabelsMagic);
  write_be32(f, uint32_t(labels.size()));
  f.write(reinterpret_cast<const char*>(labels.data()), std::streamsize(labels.size()));
}

}  // namespace ganchain::data
