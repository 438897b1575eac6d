#pragma once

#include "advparam/network.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace advparam {

/// Samples in [0,1]^n with labels in [0, classes).
struct LabeledDataset {
  std::string name;
  Index dim = 0;
  int classes = 0;
  std::vector<Sample> samples;
  std::uint64_t seed = 0;     // generator seed, 0 for loaded data
  std::string source;         // generator id or file path
  std::optional<int> intrinsic_dim;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::span<const Sample> view() const { return samples; }

  /// Throws UsageError when empty, a coordinate leaves [0,1], or a label is
  /// out of range; ShapeError on inconsistent dimensions.
  void validate() const;

  /// Samples whose label is (or is not) `label`.
  std::vector<Sample> with_label(int label) const;
  std::vector<Sample> without_label(int label) const;
};

struct BlobSpec {
  Index dim = 8;
  int classes = 3;
  int per_class = 100;
  double margin = 0.2;    // minimum L-inf gap between samples of different classes
  double radius = 0.1;    // samples stay within this L-inf distance of their center
  double sigma = 0.05;    // Gaussian spread before truncation to `radius`
  std::uint64_t seed = 1;
};

/// Gaussian clusters truncated to an L-inf ball of `radius` around centers
/// whose pairwise L-inf distance is at least 2 * radius + margin.
LabeledDataset gen_blobs(const BlobSpec& spec);

struct SubspaceSpec {
  Index dim = 16;
  int classes = 3;
  int intrinsic_dim = 4;
  int per_class = 50;
  std::uint64_t seed = 1;
};

/// Samples on a random `intrinsic_dim`-dimensional linear subspace of R^n that
/// meets [0,1]^n. Requires intrinsic_dim <= n - classes.
LabeledDataset gen_subspace_task(const SubspaceSpec& spec);

/// Deterministic shuffle and split into (first `fraction`, rest).
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data, double fraction,
                                                std::uint64_t seed);

}  // namespace advparam
