#include "advparam/errors.hpp"
#include "advparam/theory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace advparam {

namespace {

Partition exhaustive(const std::vector<Index>& items, const Vector& mag) {
  const std::size_t n = items.size();
  // The largest item is pinned to side S; each flip of the Gray code moves one
  // of the others, so a full sweep is 2^(n-1) updates.
  double best_diff = std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = 0;
  double diff = 0.0;  // sum over S minus sum over the complement
  for (std::size_t i = 0; i < n; ++i) diff += (i == 0 ? 1.0 : -1.0) * mag(items[i]);
  std::uint64_t mask = 1;  // bit i set means items[i] in S
  const std::uint64_t sweeps = std::uint64_t{1} << (n - 1);
  for (std::uint64_t g = 0;; ++g) {
    if (std::abs(diff) < best_diff) {
      best_diff = std::abs(diff);
      best_mask = mask;
    }
    if (g + 1 == sweeps) break;
    const int bit = std::countr_zero(g + 1) + 1;
    mask ^= std::uint64_t{1} << bit;
    diff += ((mask >> bit) & 1 ? 2.0 : -2.0) * mag(items[bit]);
  }
  // Recompute the sums exactly from the mask to avoid drift.
  double in = 0.0, out = 0.0;
  for (std::size_t i = 0; i < n; ++i) ((best_mask >> i) & 1 ? in : out) += mag(items[i]);
  const bool flip = out > in;
  Partition p;
  p.exhaustive = true;
  p.k = std::abs(in - out);
  double best_j = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if ((((best_mask >> i) & 1) != 0) == flip) continue;
    p.set.push_back(items[i]);
    if (mag(items[i]) > best_j) {
      best_j = mag(items[i]);
      p.j = items[i];
    }
  }
  std::sort(p.set.begin(), p.set.end());
  return p;
}

Partition greedy(std::vector<Index> items, const Vector& mag) {
  std::stable_sort(items.begin(), items.end(),
                   [&](Index a, Index b) { return mag(a) > mag(b); });
  std::vector<Index> side[2];
  double sum[2] = {0.0, 0.0};
  Index last[2] = {-1, -1};
  for (Index i : items) {
    const int s = sum[0] <= sum[1] ? 0 : 1;
    side[s].push_back(i);
    sum[s] += mag(i);
    last[s] = i;
  }
  const int heavy = sum[0] >= sum[1] ? 0 : 1;
  Partition p;
  p.set = side[heavy];
  std::sort(p.set.begin(), p.set.end());
  p.k = sum[heavy] - sum[1 - heavy];
  // Everything after `last` went to the other side, so k <= |v_last|.
  p.j = last[heavy];
  return p;
}

}  // namespace

Partition balanced_partition(const Vector& magnitudes) {
  std::vector<Index> items;
  for (Index i = 0; i < magnitudes.size(); ++i) {
    if (!(magnitudes(i) >= 0.0) || std::isinf(magnitudes(i)))
      throw UsageError("partition weights must be finite and >= 0");
    if (magnitudes(i) > 0.0) items.push_back(i);
  }
  if (items.empty()) return {};
  if (static_cast<Index>(items.size()) <= kExhaustivePartitionLimit) {
    // Put the largest item first so it is the pinned one.
    auto largest = std::max_element(items.begin(), items.end(),
                                    [&](Index a, Index b) { return magnitudes(a) < magnitudes(b); });
    std::iter_swap(items.begin(), largest);
    return exhaustive(items, magnitudes);
  }
  return greedy(std::move(items), magnitudes);
}

Vector orthogonal_unit_vector(const Vector& v) {
  if (v.size() == 0 || (v.array() == 0.0).all()) throw UsageError("v must be nonzero");
  if (!v.allFinite()) throw DomainError("v must be finite");
  const Vector mag = v.cwiseAbs();
  const Partition p = balanced_partition(mag);
  Vector w(v.size());
  std::vector<bool> in_set(static_cast<std::size_t>(v.size()), false);
  for (Index i : p.set) in_set[static_cast<std::size_t>(i)] = true;
  for (Index i = 0; i < v.size(); ++i) {
    const double s = v(i) > 0.0 ? 1.0 : (v(i) < 0.0 ? -1.0 : 0.0);
    if (s == 0.0)
      w(i) = 1.0;
    else
      w(i) = in_set[static_cast<std::size_t>(i)] ? s : -s;
  }
  // Correction coordinate: cancel the remaining inner product exactly.
  const Index j = p.j;
  w(j) = 0.0;
  const double rest = w.dot(v);
  w(j) = std::clamp(-rest / v(j), -1.0, 1.0);
  return w;
}

}  // namespace advparam
