#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ganchain::data {

// Grayscale 8-bit image buffer, row-major.
struct GrayImage {
  int width = 0, height = 0;
  std::vector<uint8_t> pixels;
};

// RGB 8-bit buffer for report renderings.
struct RgbImage {
  int width = 0, height = 0;
  std::vector<uint8_t> pixels;  // 3 bytes per pixel

  void resize(int w, int h) {
    width = w;
    height = h;
    pixels.assign(size_t(w) * h * 3, 255);
  }
  void set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    size_t i = (size_t(y) * width + x) * 3;
    pixels[i] = r;
    pixels[i + 1] = g;
    pixels[i + 2] = b;
  }
};

GrayImage read_png_gray(const std::string& path);
void write_png_gray(const std::string& path, const GrayImage& img);
void write_png_rgb(const std::string& path, const RgbImage& img);

}  // namespace ganchain::data
