#pragma once

#include <cstdint>
#include <random>

#include "wreach/measure.hpp"

namespace bench {

inline wreach::DiscreteMeasure cloud(std::size_t n, int d, std::uint64_t seed, bool uniform = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  wreach::Matrix X(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = u(rng);
  if (uniform) return wreach::DiscreteMeasure::uniform(std::move(X));
  wreach::Vector w(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = 1.0 + u(rng);
  return wreach::DiscreteMeasure::make(std::move(X), std::move(w));
}

}  // namespace bench
