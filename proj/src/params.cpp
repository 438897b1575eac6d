#include "advparam/params.hpp"

#include "advparam/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace advparam {

ModelParams ModelParams::zeros(std::span<const Index> dims) {
  if (dims.size() < 2) throw ShapeError("need at least input and output widths");
  std::vector<Layer> layers;
  layers.reserve(dims.size() - 1);
  for (std::size_t l = 1; l < dims.size(); ++l) {
    if (dims[l] <= 0 || dims[l - 1] <= 0) throw ShapeError("layer widths must be positive");
    layers.push_back({Matrix::Zero(dims[l], dims[l - 1]), Vector::Zero(dims[l])});
  }
  return ModelParams(std::move(layers));
}

ModelParams ModelParams::random_init(std::span<const Index> dims, std::uint64_t seed) {
  ModelParams p = zeros(dims);
  std::mt19937_64 rng(seed);
  for (auto& layer : p.layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Index j = 0; j < layer.weight.cols(); ++j)
      for (Index i = 0; i < layer.weight.rows(); ++i) layer.weight(i, j) = dist(rng);
    for (Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = dist(rng);
  }
  p.validate();
  return p;
}

std::vector<Index> ModelParams::dims() const {
  std::vector<Index> d;
  if (layers.empty()) return d;
  d.push_back(input_dim());
  for (const auto& layer : layers) d.push_back(layer.weight.rows());
  return d;
}

Index ModelParams::parameter_count() const {
  Index k = 0;
  for (const auto& layer : layers) k += layer.weight.size() + layer.bias.size();
  return k;
}

void ModelParams::validate() const {
  if (layers.empty()) throw ShapeError("model has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.weight.rows() == 0 || layer.weight.cols() == 0)
      throw ShapeError("layer " + std::to_string(l) + " has an empty weight matrix");
    if (layer.bias.size() != layer.weight.rows())
      throw ShapeError("layer " + std::to_string(l) + ": bias length does not match weight rows");
    if (l > 0 && layer.weight.cols() != layers[l - 1].weight.rows())
      throw ShapeError("layer " + std::to_string(l) + ": columns do not match previous layer rows");
    if (!layer.weight.allFinite() || !layer.bias.allFinite())
      throw DomainError("layer " + std::to_string(l) + " has non-finite entries");
  }
  if (output_dim() < 2) throw ShapeError("need at least two output classes");
}

bool ModelParams::same_shape(const ModelParams& other) const {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].weight.rows() != other.layers[l].weight.rows() ||
        layers[l].weight.cols() != other.layers[l].weight.cols() ||
        layers[l].bias.size() != other.layers[l].bias.size())
      return false;
  }
  return true;
}

ModelParams ModelParams::zeros_like() const {
  std::vector<Layer> out;
  out.reserve(layers.size());
  for (const auto& layer : layers)
    out.push_back({Matrix::Zero(layer.weight.rows(), layer.weight.cols()),
                   Vector::Zero(layer.bias.size())});
  return ModelParams(std::move(out));
}

std::vector<std::span<double>> ModelParams::blocks() {
  std::vector<std::span<double>> out;
  out.reserve(2 * layers.size());
  for (auto& layer : layers) {
    out.emplace_back(layer.weight.data(), static_cast<std::size_t>(layer.weight.size()));
    out.emplace_back(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
  }
  return out;
}

std::vector<std::span<const double>> ModelParams::blocks() const {
  std::vector<std::span<const double>> out;
  out.reserve(2 * layers.size());
  for (const auto& layer : layers) {
    out.emplace_back(layer.weight.data(), static_cast<std::size_t>(layer.weight.size()));
    out.emplace_back(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
  }
  return out;
}

Vector ModelParams::flatten() const {
  Vector flat(parameter_count());
  Index pos = 0;
  for (auto block : blocks())
    for (double v : block) flat(pos++) = v;
  return flat;
}

void ModelParams::assign_flat(const Vector& flat) {
  if (flat.size() != parameter_count()) throw ShapeError("flat vector length mismatch");
  Index pos = 0;
  for (auto block : blocks())
    for (double& v : block) v = flat(pos++);
}

namespace {

void require_same_shape(const ModelParams& a, const ModelParams& b) {
  if (!a.same_shape(b)) throw ShapeError("parameter shapes differ");
}

}  // namespace

ModelParams& ModelParams::operator+=(const ModelParams& rhs) {
  require_same_shape(*this, rhs);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].weight += rhs.layers[l].weight;
    layers[l].bias += rhs.layers[l].bias;
  }
  return *this;
}

ModelParams& ModelParams::operator-=(const ModelParams& rhs) {
  require_same_shape(*this, rhs);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].weight -= rhs.layers[l].weight;
    layers[l].bias -= rhs.layers[l].bias;
  }
  return *this;
}

ModelParams& ModelParams::operator*=(double s) {
  for (auto& layer : layers) {
    layer.weight *= s;
    layer.bias *= s;
  }
  return *this;
}

ModelParams& ModelParams::axpy(double a, const ModelParams& x) {
  require_same_shape(*this, x);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].weight += a * x.layers[l].weight;
    layers[l].bias += a * x.layers[l].bias;
  }
  return *this;
}

double ModelParams::max_abs() const {
  double m = 0.0;
  for (auto block : blocks())
    for (double v : block) m = std::max(m, std::abs(v));
  return m;
}

bool operator==(const ModelParams& a, const ModelParams& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].weight != b.layers[l].weight) return false;
    if (a.layers[l].bias != b.layers[l].bias) return false;
  }
  return true;
}

ModelParams operator+(ModelParams a, const ModelParams& b) { return a += b; }
ModelParams operator-(ModelParams a, const ModelParams& b) { return a -= b; }
ModelParams operator*(double s, ModelParams a) { return a *= s; }

double max_abs_diff(const ModelParams& a, const ModelParams& b) {
  require_same_shape(a, b);
  const auto ba = a.blocks();
  const auto bb = b.blocks();
  double m = 0.0;
  for (std::size_t k = 0; k < ba.size(); ++k)
    for (std::size_t i = 0; i < ba[k].size(); ++i) m = std::max(m, std::abs(ba[k][i] - bb[k][i]));
  return m;
}

}  // namespace advparam
