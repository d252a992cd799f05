#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "inkmotion/preprocess.hpp"

namespace inkmotion {

// Per-dimension mean/std fitted on training rows (flattened 3N layout).
// Dimensions with (near-)zero variance keep std 1 so constant features pass
// through unchanged.
struct Standardizer {
  std::vector<double> mean, stdev;

  void fit(const std::vector<ResampledSequence>& rows) {
    if (rows.empty()) throw std::invalid_argument("standardizer: no rows");
    const std::size_t d = rows[0].values.size();
    mean.assign(d, 0.0);
    stdev.assign(d, 0.0);
    for (const auto& r : rows) {
      if (r.values.size() != d)
        throw std::invalid_argument("standardizer: inconsistent row widths");
      for (std::size_t i = 0; i < d; ++i) mean[i] += r.values[i];
    }
    const double n = static_cast<double>(rows.size());
    for (auto& m : mean) m /= n;
    for (const auto& r : rows)
      for (std::size_t i = 0; i < d; ++i) {
        const double c = r.values[i] - mean[i];
        stdev[i] += c * c;
      }
    for (auto& s : stdev) {
      s = std::sqrt(s / n);
      if (s < 1e-12) s = 1.0;
    }
  }

  std::vector<double> apply(const std::vector<double>& v) const {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean[i]) / stdev[i];
    return out;
  }

  bool fitted() const { return !mean.empty(); }
};

}  // namespace inkmotion
