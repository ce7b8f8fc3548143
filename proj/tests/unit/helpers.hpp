#pragma once

#include <initializer_list>
#include <vector>

#include "ihse/core.hpp"

namespace ihse::test {

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v(k++) = x;
  return v;
}

// cfg({{x1...}, {x2...}}, {{v1...}, {v2...}})
inline Configuration cfg(std::vector<std::vector<double>> xs, std::vector<std::vector<double>> vs) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  const auto d = static_cast<Eigen::Index>(xs.front().size());
  Mat x(n, d);
  Mat v(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index l = 0; l < d; ++l) {
      x(i, l) = xs[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)];
      v(i, l) = vs[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)];
    }
  }
  return Configuration(std::move(x), std::move(v));
}

// The head-on pair used throughout: contact at t = 2.
inline Configuration head_on() { return cfg({{0, 0}, {3, 0}}, {{1, 0}, {0, 0}}); }

}  // namespace ihse::test
