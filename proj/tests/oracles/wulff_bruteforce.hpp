#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "wulffspread/model.hpp"

namespace wulffspread::oracle {

/// min over `samples` equally spaced directions e with e.xi > 0 of c(e) / (e.xi),
/// evaluating c exactly (no table, no interpolation).
inline double brute_force_w(const std::function<double(Vec2)>& c, Vec2 xi, int samples = 1000000) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    double a = 2.0 * std::numbers::pi * k / samples;
    Vec2 e = {std::cos(a), std::sin(a)};
    double d = e[0] * xi[0] + e[1] * xi[1];
    if (d > 1e-9) best = std::min(best, c(e) / d);
  }
  return best;
}

}  // namespace wulffspread::oracle
