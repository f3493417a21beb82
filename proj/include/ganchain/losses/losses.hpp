#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ganchain/error.hpp"

namespace ganchain::losses {

// Generator loss variants. "standard" is the classical non-saturating GAN
// loss; the others add frozen-classifier terms weighted by phi:
//   fool_all         -log d - phi * sum_j log c_j   (one classifier per
//                    preceding iteration)
//   memoryless       -log d - phi * log c           (previous iteration only)
//   normalized       -(1/(1+phi)) log d - (phi/(1+phi)) log c
//   multi_classifier -log d - phi * sum_k log c_k   (t classifiers, one
//                    iteration)
enum class Variant { Standard, FoolAll, Memoryless, Normalized, MultiClassifier };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Standard: return "standard";
    case Variant::FoolAll: return "fool_all";
    case Variant::Memoryless: return "memoryless";
    case Variant::Normalized: return "normalized";
    case Variant::MultiClassifier: return "multi_classifier";
  }
  return "?";
}

inline Variant variant_from_name(const std::string& s) {
  if (s == "standard") return Variant::Standard;
  if (s == "fool_all") return Variant::FoolAll;
  if (s == "memoryless") return Variant::Memoryless;
  if (s == "normalized") return Variant::Normalized;
  if (s == "multi_classifier") return Variant::MultiClassifier;
  throw ArgumentError("unknown loss variant: " + s);
}

struct LossConfig {
  Variant variant = Variant::Standard;
  double phi = 0.0;
  int t = 1;  // classifier count, multi_classifier only

  void validate() const {
    if (phi < 0) throw ArgumentError("phi must be >= 0");
    if (variant == Variant::MultiClassifier && t < 1)
      throw ArgumentError("multi_classifier requires t >= 1");
  }

  // Number of frozen classifiers the generator loss consumes at iteration i.
  int expected_classifiers(int iteration) const {
    switch (variant) {
      case Variant::Standard: return 0;
      case Variant::FoolAll: return iteration;
      case Variant::Memoryless:
      case Variant::Normalized: return iteration > 0 ? 1 : 0;
      case Variant::MultiClassifier: return iteration > 0 ? t : 0;
    }
    return 0;
  }
};

namespace detail {
template <typename S>
inline void check_same_size(std::span<const S> a, std::span<const S> b, const char* who) {
  if (a.size() != b.size())
    throw ArgumentError(std::string(who) + ": mismatched batch sizes");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Batch-mean loss values. The per-sample expressions are shared between the
// variants so that the phi=0 and single-classifier identities hold exactly
// in floating point, not just mathematically.
// ---------------------------------------------------------------------------

template <typename S>
S gen_loss_standard(std::span<const S> d) {
  if (d.empty()) throw ArgumentError("empty batch");
  S acc = S(0);
  for (S v : d) acc += -(std::log(v));
  return acc / S(d.size());
}

template <typename S>
S gen_loss_fool_all(std::span<const S> d, const std::vector<std::span<const S>>& cs, S phi) {
  if (d.empty()) throw ArgumentError("empty batch");
  if (phi < S(0)) throw ArgumentError("phi must be >= 0");
  for (auto& c : cs) detail::check_same_size(d, c, "gen_loss_fool_all");
  S acc = S(0);
  for (size_t i = 0; i < d.size(); i++) {
    S inner = S(0);
    for (auto& c : cs) inner += std::log(c[i]);
    acc += -(std::log(d[i]) + phi * inner);
  }
  return acc / S(d.size());
}

template <typename S>
S gen_loss_memoryless(std::span<const S> d, std::span<const S> c, S phi) {
  if (d.empty()) throw ArgumentError("empty batch");
  if (phi < S(0)) throw ArgumentError("phi must be >= 0");
  detail::check_same_size(d, c, "gen_loss_memoryless");
  S acc = S(0);
  for (size_t i = 0; i < d.size(); i++) acc += -(std::log(d[i]) + phi * std::log(c[i]));
  return acc / S(d.size());
}

template <typename S>
S gen_loss_normalized(std::span<const S> d, std::span<const S> c, S phi) {
  if (d.empty()) throw ArgumentError("empty batch");
  if (phi < S(0)) throw ArgumentError("phi must be >= 0");
  detail::check_same_size(d, c, "gen_loss_normalized");
  const S a = S(1) / (S(1) + phi);
  const S b = phi / (S(1) + phi);
  S acc = S(0);
  for (size_t i = 0; i < d.size(); i++) acc += -(a * std::log(d[i]) + b * std::log(c[i]));
  return acc / S(d.size());
}

template <typename S>
S gen_loss_multi(std::span<const S> d, const std::vector<std::span<const S>>& cs, S phi) {
  if (cs.empty()) throw ArgumentError("multi_classifier loss needs at least one classifier");
  return gen_loss_fool_all(d, cs, phi);
}

template <typename S>
S disc_loss(std::span<const S> d_real, std::span<const S> d_fake) {
  if (d_real.empty() || d_fake.empty()) throw ArgumentError("empty batch");
  S acc = S(0);
  for (S v : d_real) acc += -std::log(v);
  S accf = S(0);
  for (S v : d_fake) accf += -std::log(S(1) - v);
  return acc / S(d_real.size()) + accf / S(d_fake.size());
}

template <typename S>
S classifier_bce(std::span<const S> p, std::span<const S> labels) {
  detail::check_same_size(p, labels, "classifier_bce");
  if (p.empty()) throw ArgumentError("empty batch");
  S acc = S(0);
  for (size_t i = 0; i < p.size(); i++)
    acc += -(labels[i] * std::log(p[i]) + (S(1) - labels[i]) * std::log(S(1) - p[i]));
  return acc / S(p.size());
}

// ---------------------------------------------------------------------------
// Values + per-probability gradients, for the training loops.
// ---------------------------------------------------------------------------

template <typename S>
struct GenLossGrads {
  S value = S(0);
  std::vector<S> d;                  // dL/dd per sample
  std::vector<std::vector<S>> cs;    // dL/dc per classifier, per sample
};

// Unified generator-loss evaluation for a LossConfig at a given iteration.
// `cs` must already have the length cfg.expected_classifiers(iteration).
template <typename S>
GenLossGrads<S> gen_loss_with_grads(const LossConfig& cfg, std::span<const S> d,
                                    const std::vector<std::span<const S>>& cs) {
  const size_t n = d.size();
  if (n == 0) throw ArgumentError("empty batch");
  GenLossGrads<S> out;
  out.d.assign(n, S(0));
  out.cs.assign(cs.size(), std::vector<S>(n, S(0)));
  const S phi = S(cfg.phi);
  const S inv_n = S(1) / S(n);

  S coef_d = S(1), coef_c = phi;
  if (cfg.variant == Variant::Normalized) {
    coef_d = S(1) / (S(1) + phi);
    coef_c = phi / (S(1) + phi);
  }

  switch (cfg.variant) {
    case Variant::Standard:
      out.value = gen_loss_standard(d);
      break;
    case Variant::FoolAll:
      out.value = gen_loss_fool_all(d, cs, phi);
      break;
    case Variant::MultiClassifier:
      out.value = gen_loss_multi(d, cs, phi);
      break;
    case Variant::Memoryless:
      if (cs.size() != 1) throw ConfigurationError("memoryless loss needs exactly one classifier");
      out.value = gen_loss_memoryless(d, cs[0], phi);
      break;
    case Variant::Normalized:
      if (cs.size() != 1) throw ConfigurationError("normalized loss needs exactly one classifier");
      out.value = gen_loss_normalized(d, cs[0], phi);
      break;
  }

  for (size_t i = 0; i < n; i++) out.d[i] = -coef_d * inv_n / d[i];
  for (size_t j = 0; j < cs.size(); j++)
    for (size_t i = 0; i < n; i++) out.cs[j][i] = -coef_c * inv_n / cs[j][i];
  return out;
}

template <typename S>
struct DiscLossGrads {
  S value = S(0);
  std::vector<S> d_real, d_fake;
};

template <typename S>
DiscLossGrads<S> disc_loss_with_grads(std::span<const S> d_real, std::span<const S> d_fake) {
  DiscLossGrads<S> out;
  out.value = disc_loss(d_real, d_fake);
  out.d_real.assign(d_real.size(), S(0));
  out.d_fake.assign(d_fake.size(), S(0));
  const S inv_r = S(1) / S(d_real.size());
  const S inv_f = S(1) / S(d_fake.size());
  for (size_t i = 0; i < d_real.size(); i++) out.d_real[i] = -inv_r / d_real[i];
  for (size_t i = 0; i < d_fake.size(); i++) out.d_fake[i] = inv_f / (S(1) - d_fake[i]);
  return out;
}

template <typename S>
struct BceGrads {
  S value = S(0);
  std::vector<S> p;
};

template <typename S>
BceGrads<S> classifier_bce_with_grads(std::span<const S> p, std::span<const S> labels) {
  BceGrads<S> out;
  out.value = classifier_bce(p, labels);
  out.p.assign(p.size(), S(0));
  const S inv_n = S(1) / S(p.size());
  for (size_t i = 0; i < p.size(); i++)
    out.p[i] = inv_n * (p[i] - labels[i]) / (p[i] * (S(1) - p[i]));
  return out;
}

}  // namespace ganchain::losses
