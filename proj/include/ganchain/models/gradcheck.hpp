#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ganchain/error.hpp"

namespace ganchain {

// Central finite-difference gradient of f at `params`. When `coords` is
// given, only those coordinates are estimated (others are returned as 0);
// this is what the sampled-coordinate gradient checks use.
inline std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> params, double epsilon,
    const std::optional<std::vector<size_t>>& coords = std::nullopt) {
  if (!(epsilon > 0)) throw ArgumentError("epsilon must be > 0");
  std::vector<double> grad(params.size(), 0.0);
  auto probe = [&](size_t i) {
    const double saved = params[i];
    params[i] = saved + epsilon;
    const double hi = f(params);
    params[i] = saved - epsilon;
    const double lo = f(params);
    params[i] = saved;
    grad[i] = (hi - lo) / (2.0 * epsilon);
  };
  if (coords) {
    for (size_t i : *coords) probe(i);
  } else {
    for (size_t i = 0; i < params.size(); i++) probe(i);
  }
  return grad;
}

// In-place variant for probing single coordinates of live model parameters.
inline double central_difference_at(const std::function<double()>& f, double& coord,
                                    double epsilon) {
  if (!(epsilon > 0)) throw ArgumentError("epsilon must be > 0");
  const double saved = coord;
  coord = saved + epsilon;
  const double hi = f();
  coord = saved - epsilon;
  const double lo = f();
  coord = saved;
  return (hi - lo) / (2.0 * epsilon);
}

// Relative error with an absolute floor, used by the gradient-fidelity tests.
inline double grad_rel_err(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

}  // namespace ganchain
