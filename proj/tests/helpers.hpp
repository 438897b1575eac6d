#pragma once

#include "advparam/network.hpp"
#include "advparam/params.hpp"

#include <random>
#include <vector>

namespace testing {

using advparam::Index;
using advparam::Layer;
using advparam::Matrix;
using advparam::ModelParams;
using advparam::Vector;

inline ModelParams make_net(std::vector<Matrix> ws, std::vector<Vector> bs) {
  ModelParams p;
  for (std::size_t i = 0; i < ws.size(); ++i) p.layers.push_back({ws[i], bs[i]});
  return p;
}

inline Matrix mat(Index r, Index c, std::initializer_list<double> v) {
  Matrix m(r, c);
  auto it = v.begin();
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = *it++;
  return m;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline Vector uniform_point(Index n, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x(i) = u(rng);
  return x;
}

/// Random MLP with 1..3 hidden layers and widths in [2, max_width].
inline ModelParams random_mlp(std::mt19937_64& rng, Index max_width = 32, Index classes = 3) {
  std::uniform_int_distribution<int> depth(1, 3);
  std::uniform_int_distribution<Index> width(2, max_width);
  std::vector<Index> dims{width(rng)};
  const int hidden = depth(rng);
  for (int l = 0; l < hidden; ++l) dims.push_back(width(rng));
  dims.push_back(classes);
  return ModelParams::random_init(dims, rng());
}

/// Smallest |pre-activation| over all hidden units at x.
inline double boundary_distance(const ModelParams& p, const Vector& x) {
  const auto t = advparam::forward(p, x);
  double d = 1e300;
  for (const auto& z : t.pre_activations) d = std::min(d, z.cwiseAbs().minCoeff());
  return d;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace testing
