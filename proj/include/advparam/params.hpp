#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace advparam {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One affine map x -> W x + b. Hidden layers are followed by ReLU, the last
/// layer is not.
struct Layer {
  Matrix weight;  // rows = outputs, cols = inputs
  Vector bias;
};

/// Parameter set of a dense ReLU network with `hidden_count()` hidden layers.
///
/// layers[0..L-1] are hidden, layers[L] produces the logits. Also used as the
/// container for anything shaped like the parameters: gradients, per-coordinate
/// budgets, perturbations.
struct ModelParams {
  std::vector<Layer> layers;

  ModelParams() = default;
  explicit ModelParams(std::vector<Layer> l) : layers(std::move(l)) {}

  /// All-zero parameters for widths dims = [n_0, n_1, ..., n_{L+1}].
  static ModelParams zeros(std::span<const Index> dims);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
  static ModelParams random_init(std::span<const Index> dims, std::uint64_t seed);

  Index input_dim() const { return layers.front().weight.cols(); }
  Index output_dim() const { return layers.back().weight.rows(); }
  std::size_t hidden_count() const { return layers.size() - 1; }
  std::vector<Index> dims() const;

  /// Total number of scalar parameters, sum of n_l (n_{l-1} + 1).
  Index parameter_count() const;

  /// Throws ShapeError if layers do not chain or m < 2, DomainError on
  /// non-finite entries.
  void validate() const;

  bool same_shape(const ModelParams& other) const;
  ModelParams zeros_like() const;

  /// Contiguous coefficient blocks in a fixed order (W_1, b_1, W_2, b_2, ...).
  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;

  Vector flatten() const;
  void assign_flat(const Vector& flat);

  ModelParams& operator+=(const ModelParams& rhs);
  ModelParams& operator-=(const ModelParams& rhs);
  ModelParams& operator*=(double s);
  /// this += a * x
  ModelParams& axpy(double a, const ModelParams& x);

  /// max_i |theta_i|
  double max_abs() const;

  friend bool operator==(const ModelParams& a, const ModelParams& b);
};

ModelParams operator+(ModelParams a, const ModelParams& b);
ModelParams operator-(ModelParams a, const ModelParams& b);
ModelParams operator*(double s, ModelParams a);

/// max_i |a_i - b_i| as computed in floating point.
double max_abs_diff(const ModelParams& a, const ModelParams& b);

}  // namespace advparam
