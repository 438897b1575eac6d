#include "advparam/dataset.hpp"

#include "advparam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace advparam {

void LabeledDataset::validate() const {
  if (samples.empty()) throw UsageError("dataset is empty");
  if (classes < 2) throw UsageError("dataset needs at least two classes");
  for (const auto& s : samples) {
    if (s.x.size() != dim) throw ShapeError("sample dimension differs from dataset dimension");
    if (!s.x.allFinite() || (s.x.array() < 0.0).any() || (s.x.array() > 1.0).any())
      throw UsageError("sample coordinates must lie in [0,1]");
    if (s.label < 0 || s.label >= classes) throw UsageError("label out of range");
  }
}

std::vector<Sample> LabeledDataset::with_label(int label) const {
  std::vector<Sample> out;
  for (const auto& s : samples)
    if (s.label == label) out.push_back(s);
  return out;
}

std::vector<Sample> LabeledDataset::without_label(int label) const {
  std::vector<Sample> out;
  for (const auto& s : samples)
    if (s.label != label) out.push_back(s);
  return out;
}

LabeledDataset gen_blobs(const BlobSpec& spec) {
  if (spec.dim < 1 || spec.classes < 2) throw UsageError("blobs need dim >= 1 and classes >= 2");
  if (spec.per_class < 1) throw UsageError("per_class must be >= 1");
  if (!(spec.radius >= 0.0 && spec.radius < 0.5) || !(spec.margin >= 0.0) || !(spec.sigma >= 0.0))
    throw UsageError("invalid blob geometry");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> place(spec.radius, 1.0 - spec.radius);
  std::normal_distribution<double> noise(0.0, spec.sigma);

  const double separation = 2.0 * spec.radius + spec.margin;
  std::vector<Vector> centers;
  for (int tries = 0; static_cast<int>(centers.size()) < spec.classes; ++tries) {
    if (tries > 100000) throw UsageError("cannot place blob centers with the requested margin");
    Vector c = Vector::NullaryExpr(spec.dim, [&] { return place(rng); });
    bool ok = true;
    for (const auto& o : centers) ok = ok && (c - o).lpNorm<Eigen::Infinity>() >= separation;
    if (ok) centers.push_back(std::move(c));
  }

  LabeledDataset d;
  d.name = "blobs";
  d.dim = spec.dim;
  d.classes = spec.classes;
  d.seed = spec.seed;
  d.source = "gen_blobs";
  for (int l = 0; l < spec.classes; ++l)
    for (int i = 0; i < spec.per_class; ++i) {
      Vector x = centers[static_cast<std::size_t>(l)];
      for (Index k = 0; k < x.size(); ++k)
        x(k) = std::clamp(x(k) + std::clamp(noise(rng), -spec.radius, spec.radius), 0.0, 1.0);
      d.samples.push_back({std::move(x), l});
    }
  return d;
}

LabeledDataset gen_subspace_task(const SubspaceSpec& spec) {
  const Index n = spec.dim;
  const int m = spec.classes;
  const int k = spec.intrinsic_dim;
  if (n < 1 || m < 2) throw UsageError("subspace task needs dim >= 1 and classes >= 2");
  if (k < 1 || k > n - m) throw UsageError("intrinsic_dim must lie in [1, n - m]");
  if (spec.per_class < 1) throw UsageError("per_class must be >= 1");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Nonnegative basis scaled so that coefficients in [0,1]^k map into [0,1]^n.
  Matrix basis = Matrix::NullaryExpr(n, k, [&] { return unit(rng); });
  basis /= basis.rowwise().sum().maxCoeff();
  std::vector<Vector> centers;
  for (int l = 0; l < m; ++l) centers.push_back(Vector::NullaryExpr(k, [&] { return unit(rng); }));

  LabeledDataset d;
  d.name = "subspace";
  d.dim = n;
  d.classes = m;
  d.seed = spec.seed;
  d.source = "gen_subspace_task";
  d.intrinsic_dim = k;
  std::vector<int> count(static_cast<std::size_t>(m), 0);
  const long budget = 1000L * spec.per_class * m;
  for (long tries = 0; static_cast<int>(d.samples.size()) < spec.per_class * m; ++tries) {
    if (tries > budget) throw UsageError("subspace task could not fill every class");
    const Vector a = Vector::NullaryExpr(k, [&] { return unit(rng); });
    int label = 0;
    for (int l = 1; l < m; ++l)
      if ((a - centers[l]).squaredNorm() < (a - centers[label]).squaredNorm()) label = l;
    if (count[static_cast<std::size_t>(label)] >= spec.per_class) continue;
    ++count[static_cast<std::size_t>(label)];
    Vector x = (basis * a).cwiseMax(0.0).cwiseMin(1.0);
    d.samples.push_back({std::move(x), label});
  }
  return d;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data, double fraction,
                                                std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw UsageError("split fraction must lie in [0,1]");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto cut = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(data.size())));
  std::pair<LabeledDataset, LabeledDataset> out{data, data};
  out.first.samples.clear();
  out.second.samples.clear();
  out.first.name += "-a";
  out.second.name += "-b";
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < cut ? out.first : out.second).samples.push_back(data.samples[order[i]]);
  return out;
}

}  // namespace advparam
