#include "ganchain/data/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>

#include "ganchain/data/idx.hpp"
#include "ganchain/error.hpp"

namespace ganchain::data {

namespace {

struct Pt {
  double x, y;
};

// Strokes are quadratic beziers in a unit box (x right, y down); straight
// lines put the control point at the midpoint.
struct Stroke {
  Pt a, c, b;
};

Stroke line(Pt a, Pt b) { return {a, {(a.x + b.x) / 2, (a.y + b.y) / 2}, b}; }
Stroke bez(Pt a, Pt c, Pt b) { return {a, c, b}; }

// Quarter arcs with the control point at the box corner give a passable
// circle approximation for glyph work.
void add_ellipse(std::vector<Stroke>& s, double cx, double cy, double rx, double ry) {
  s.push_back(bez({cx + rx, cy}, {cx + rx, cy + ry}, {cx, cy + ry}));
  s.push_back(bez({cx, cy + ry}, {cx - rx, cy + ry}, {cx - rx, cy}));
  s.push_back(bez({cx - rx, cy}, {cx - rx, cy - ry}, {cx, cy - ry}));
  s.push_back(bez({cx, cy - ry}, {cx + rx, cy - ry}, {cx + rx, cy}));
}

std::vector<Stroke> glyph_strokes(int digit) {
  std::vector<Stroke> s;
  switch (digit) {
    case 0:
      add_ellipse(s, 0.5, 0.5, 0.26, 0.36);
      break;
    case 1:
      s.push_back(line({0.36, 0.3}, {0.53, 0.13}));
      s.push_back(line({0.53, 0.13}, {0.53, 0.87}));
      break;
    case 2:
      s.push_back(bez({0.28, 0.34}, {0.5, 0.02}, {0.72, 0.34}));
      s.push_back(bez({0.72, 0.34}, {0.7, 0.6}, {0.27, 0.86}));
      s.push_back(line({0.27, 0.86}, {0.75, 0.86}));
      break;
    case 3:
      s.push_back(bez({0.3, 0.2}, {0.82, 0.1}, {0.5, 0.46}));
      s.push_back(bez({0.5, 0.46}, {0.88, 0.62}, {0.31, 0.85}));
      break;
    case 4:
      s.push_back(line({0.63, 0.87}, {0.63, 0.13}));
      s.push_back(line({0.63, 0.13}, {0.26, 0.62}));
      s.push_back(line({0.26, 0.62}, {0.79, 0.62}));
      break;
    case 5:
      s.push_back(line({0.71, 0.14}, {0.33, 0.14}));
      s.push_back(line({0.33, 0.14}, {0.31, 0.45}));
      s.push_back(bez({0.31, 0.45}, {0.79, 0.37}, {0.71, 0.66}));
      s.push_back(bez({0.71, 0.66}, {0.64, 0.93}, {0.28, 0.8}));
      break;
    case 6:
      s.push_back(bez({0.64, 0.12}, {0.33, 0.22}, {0.31, 0.6}));
      add_ellipse(s, 0.5, 0.66, 0.2, 0.19);
      break;
    case 7:
      s.push_back(line({0.26, 0.16}, {0.75, 0.16}));
      s.push_back(line({0.75, 0.16}, {0.42, 0.86}));
      break;
    case 8:
      add_ellipse(s, 0.5, 0.31, 0.19, 0.17);
      add_ellipse(s, 0.5, 0.67, 0.23, 0.2);
      break;
    case 9:
      add_ellipse(s, 0.48, 0.33, 0.2, 0.19);
      s.push_back(bez({0.68, 0.35}, {0.66, 0.62}, {0.46, 0.87}));
      break;
    default:
      throw ArgumentError("digit class must be 0..9");
  }
  return s;
}

double seg_dist(double px, double py, Pt a, Pt b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double wx = px - a.x, wy = py - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? (wx * vx + wy * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - (a.x + t * vx), dy = py - (a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

std::vector<uint8_t> render_glyph(int digit, Rng& rng) {
  auto strokes = glyph_strokes(digit);

  // Per-sample jitter: small control-point noise plus an affine transform.
  const double rot = rng.uniform(-0.15, 0.15);
  const double sx = rng.uniform(0.85, 1.12), sy = rng.uniform(0.85, 1.12);
  const double shear = rng.uniform(-0.12, 0.12);
  const double tx = rng.uniform(-0.055, 0.055), ty = rng.uniform(-0.055, 0.055);
  const double thick = rng.uniform(0.040, 0.075);
  const double intensity = rng.uniform(0.75, 1.0);
  const double cr = std::cos(rot), sr = std::sin(rot);

  auto jitter = [&](Pt p) -> Pt {
    return {p.x + rng.uniform(-0.02, 0.02), p.y + rng.uniform(-0.02, 0.02)};
  };
  auto xform = [&](Pt p) -> Pt {
    double x = (p.x - 0.5) * sx, y = (p.y - 0.5) * sy;
    x += shear * y;
    const double xr = cr * x - sr * y, yr = sr * x + cr * y;
    return {xr + 0.5 + tx, yr + 0.5 + ty};
  };

  // Flatten beziers into segments.
  std::vector<std::pair<Pt, Pt>> segs;
  for (auto& st : strokes) {
    Pt a = xform(jitter(st.a)), c = xform(jitter(st.c)), b = xform(jitter(st.b));
    constexpr int kSamples = 8;
    Pt prev = a;
    for (int i = 1; i <= kSamples; i++) {
      const double t = double(i) / kSamples;
      const double u = 1.0 - t;
      Pt q{u * u * a.x + 2 * u * t * c.x + t * t * b.x,
           u * u * a.y + 2 * u * t * c.y + t * t * b.y};
      segs.emplace_back(prev, q);
      prev = q;
    }
  }

  // Per-segment bounding boxes let most pixels skip most segments.
  const double reach = thick + 0.02;
  std::vector<std::array<double, 4>> boxes;
  boxes.reserve(segs.size());
  for (auto& sg : segs)
    boxes.push_back({std::min(sg.first.x, sg.second.x) - reach,
                     std::max(sg.first.x, sg.second.x) + reach,
                     std::min(sg.first.y, sg.second.y) - reach,
                     std::max(sg.first.y, sg.second.y) + reach});

  std::vector<uint8_t> img(28 * 28, 0);
  constexpr double kAa = 0.025;  // anti-alias band width in unit coords
  for (int y = 0; y < 28; y++) {
    for (int x = 0; x < 28; x++) {
      const double px = (x + 0.5) / 28.0, py = (y + 0.5) / 28.0;
      double d = 1e9;
      for (size_t s = 0; s < segs.size(); s++) {
        const auto& bb = boxes[s];
        if (px < bb[0] || px > bb[1] || py < bb[2] || py > bb[3]) continue;
        d = std::min(d, seg_dist(px, py, segs[s].first, segs[s].second));
      }
      const double v = std::clamp((thick - d) / kAa + 0.5, 0.0, 1.0);
      img[size_t(y) * 28 + x] = uint8_t(std::lround(255.0 * intensity * v));
    }
  }
  return img;
}

SynthCorpusFiles synth_corpus(const std::string& dir, int64_t count, uint64_t seed) {
  if (count <= 0) throw ArgumentError("corpus size must be > 0");
  std::filesystem::create_directories(dir);
  std::vector<uint8_t> pixels;
  pixels.reserve(size_t(count) * 28 * 28);
  std::vector<uint8_t> labels(static_cast<size_t>(count));
  Rng rng(seed);
  for (int64_t i = 0; i < count; i++) {
    const int digit = int(rng.below(10));
    labels[size_t(i)] = uint8_t(digit);
    auto img = render_glyph(digit, rng);
    pixels.insert(pixels.end(), img.begin(), img.end());
  }
  SynthCorpusFiles out;
  out.images_path = dir + "/images-idx3-ubyte";
  out.labels_path = dir + "/labels-idx1-ubyte";
  write_idx_images(out.images_path, pixels, count, 28, 28);
  write_idx_labels(out.labels_path, labels);
  return out;
}

}  // namespace ganchain::data
