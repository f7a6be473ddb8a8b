#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sqz/errors.hpp"

namespace sqz {

enum class GridScale { linear, log };

/// Evenly spaced samples from start to stop inclusive, linear or logarithmic.
struct Grid {
  double start = 10.0;
  double stop = 10e3;
  std::size_t points = 200;
  GridScale scale = GridScale::log;

  std::vector<double> samples() const {
    if (points < 2) throw DomainError("grid needs at least 2 points");
    if (!(stop > start)) throw DomainError("grid must be ascending (stop > start)");
    if (scale == GridScale::log && !(start > 0.0))
      throw DomainError("logarithmic grid needs start > 0");
    std::vector<double> out(points);
    const double n = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
      const double t = static_cast<double>(i) / n;
      out[i] = scale == GridScale::log
                   ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
                   : start + t * (stop - start);
    }
    // pin the endpoints so exp(log(x)) round-off never leaks into output
    out.front() = start;
    out.back() = stop;
    return out;
  }
};

}  // namespace sqz
