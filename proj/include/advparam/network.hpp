#pragma once

#include "advparam/params.hpp"

#include <span>
#include <vector>

namespace advparam {

/// A labelled input. Labels are 0-based class indices.
struct Sample {
  Vector x;
  int label = 0;
};

/// Everything produced by one forward pass.
struct ForwardTrace {
  Vector input;
  std::vector<Vector> pre_activations;  // W_l F^{l-1} + b_l, hidden layers only
  std::vector<Vector> hidden;           // F^l = Relu(pre_activation), l = 1..L
  std::vector<Vector> active;           // 1.0 where pre_activation > 0, else 0.0
  Vector logits;
};

/// Input Jacobian of the logits together with its per-layer factors.
///
/// With J_l = diag(active_l):
///   to_last_hidden[l] = dF^L / dF^l = (J_L W_L) ... (J_{l+1} W_{l+1})
///   from_input[l]     = dF^l / dx   = (J_l W_l) ... (J_1 W_1)
/// and jacobian = W_{L+1} to_last_hidden[l] from_input[l] for every l.
/// Index l runs over hidden layers (0-based in the vectors).
struct GradientDecomposition {
  Matrix jacobian;  // m x n
  std::vector<Matrix> to_last_hidden;
  std::vector<Matrix> from_input;
  std::vector<Vector> active;
};

ForwardTrace forward(const ModelParams& params, const Vector& x);

/// Logits only; skips building the trace.
Vector logits(const ModelParams& params, const Vector& x);

/// Argmax with ties going to the smallest index.
int argmax_label(const Vector& logits);
int classify(const ModelParams& params, const Vector& x);

/// Re-evaluates the network as a product of masked affine maps using the sign
/// pattern stored in `trace`. Equals trace.logits exactly.
Vector logits_from_pattern(const ModelParams& params, const ForwardTrace& trace);

GradientDecomposition input_jacobian(const ModelParams& params, const Vector& x);

enum class LossKind { cross_entropy, squared_error };

/// Softmax cross-entropy, computed with the log-sum-exp shift.
double cross_entropy(const Vector& logits, int label);
double loss_value(LossKind kind, const Vector& logits, int label);
/// d loss / d logits. Squared error compares against the one-hot label.
Vector loss_logit_gradient(LossKind kind, const Vector& logits, int label);

/// Adds weight * d loss(x) / d params into `grad`; returns the unweighted loss.
double accumulate_param_gradient(const ModelParams& params, const Sample& sample, LossKind kind,
                                 double weight, ModelParams& grad);

/// Gradient of the loss with respect to the input x.
Vector input_loss_gradient(const ModelParams& params, const Vector& x, int label, LossKind kind,
                           double* loss_out = nullptr);

struct LossGradient {
  double loss = 0.0;  // (weighted) mean loss over the batch
  ModelParams gradient;
};

/// Mean loss and its parameter gradient over a batch. With `weights`, a
/// weighted mean sum(w_i L_i) / sum(w_i). Throws UsageError on an empty batch.
LossGradient param_gradient(const ModelParams& params, std::span<const Sample> batch,
                            LossKind kind, std::span<const double> weights = {});

/// min_i |v_i|
double min_abs_norm(const Vector& v);
/// Smallest Euclidean row norm.
double min_row_l2(const Matrix& w);

inline double relu(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace advparam
