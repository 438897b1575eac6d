#include "advparam/network.hpp"

#include "advparam/errors.hpp"
#include "advparam/kernels.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace advparam {

namespace {

void check_input(const ModelParams& params, const Vector& x) {
  if (params.layers.empty()) throw ShapeError("model has no layers");
  if (x.size() != params.input_dim())
    throw ShapeError("input has dimension " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(params.input_dim()));
  if (!x.allFinite()) throw DomainError("input has non-finite entries");
}

void check_chain(const Layer& layer, Index in_dim, std::size_t l) {
  if (layer.weight.cols() != in_dim || layer.bias.size() != layer.weight.rows())
    throw ShapeError("layer " + std::to_string(l) + " does not chain");
}

void check_label(const ModelParams& params, int label) {
  if (label < 0 || label >= params.output_dim())
    throw UsageError("label " + std::to_string(label) + " out of range");
}

}  // namespace

ForwardTrace forward(const ModelParams& params, const Vector& x) {
  check_input(params, x);
  ForwardTrace t;
  t.input = x;
  const std::size_t hidden = params.hidden_count();
  t.pre_activations.reserve(hidden);
  t.hidden.reserve(hidden);
  t.active.reserve(hidden);
  const Vector* current = &t.input;
  for (std::size_t l = 0; l < hidden; ++l) {
    const Layer& layer = params.layers[l];
    check_chain(layer, current->size(), l);
    Vector z = layer.weight * (*current) + layer.bias;
    Vector h(z.size());
    Vector mask(z.size());
    for (Index i = 0; i < z.size(); ++i) {
      mask(i) = z(i) > 0.0 ? 1.0 : 0.0;
      h(i) = relu(z(i));
    }
    t.pre_activations.push_back(std::move(z));
    t.hidden.push_back(std::move(h));
    t.active.push_back(std::move(mask));
    current = &t.hidden.back();
  }
  const Layer& out = params.layers.back();
  check_chain(out, current->size(), hidden);
  t.logits = out.weight * (*current) + out.bias;
  return t;
}

Vector logits(const ModelParams& params, const Vector& x) {
  check_input(params, x);
  Vector current = x;
  const std::size_t hidden = params.hidden_count();
  for (std::size_t l = 0; l < hidden; ++l) {
    const Layer& layer = params.layers[l];
    check_chain(layer, current.size(), l);
    current = (layer.weight * current + layer.bias).unaryExpr([](double v) { return relu(v); });
  }
  const Layer& out = params.layers.back();
  check_chain(out, current.size(), hidden);
  return out.weight * current + out.bias;
}

int argmax_label(const Vector& logits) {
  if (logits.size() == 0) throw ShapeError("empty logits");
  Index best = 0;
  for (Index i = 1; i < logits.size(); ++i)
    if (logits(i) > logits(best)) best = i;
  return static_cast<int>(best);
}

int classify(const ModelParams& params, const Vector& x) { return argmax_label(logits(params, x)); }

Vector logits_from_pattern(const ModelParams& params, const ForwardTrace& trace) {
  Vector current = trace.input;
  for (std::size_t l = 0; l < params.hidden_count(); ++l) {
    const Layer& layer = params.layers[l];
    Vector z = layer.weight * current + layer.bias;
    current = trace.active[l].cwiseProduct(z);
  }
  const Layer& out = params.layers.back();
  return out.weight * current + out.bias;
}

GradientDecomposition input_jacobian(const ModelParams& params, const Vector& x) {
  const ForwardTrace t = forward(params, x);
  const std::size_t hidden = params.hidden_count();
  GradientDecomposition g;
  g.active = t.active;
  g.from_input.reserve(hidden);
  for (std::size_t l = 0; l < hidden; ++l) {
    const Matrix& w = params.layers[l].weight;
    if (l == 0)
      g.from_input.push_back(t.active[0].asDiagonal() * w);
    else
      g.from_input.push_back(t.active[l].asDiagonal() * (w * g.from_input[l - 1]));
  }
  g.to_last_hidden.resize(hidden);
  if (hidden > 0) {
    const Index width_last = params.layers[hidden - 1].weight.rows();
    g.to_last_hidden[hidden - 1] = Matrix::Identity(width_last, width_last);
    for (std::size_t l = hidden - 1; l-- > 0;) {
      g.to_last_hidden[l] =
          g.to_last_hidden[l + 1] * (t.active[l + 1].asDiagonal() * params.layers[l + 1].weight);
    }
    g.jacobian = params.layers.back().weight * g.from_input.back();
  } else {
    g.jacobian = params.layers.back().weight;
  }
  return g;
}

double cross_entropy(const Vector& logits, int label) {
  const double shift = logits.maxCoeff();
  const double lse = shift + std::log((logits.array() - shift).exp().sum());
  return lse - logits(label);
}

double loss_value(LossKind kind, const Vector& logits, int label) {
  switch (kind) {
    case LossKind::cross_entropy:
      return cross_entropy(logits, label);
    case LossKind::squared_error: {
      Vector r = logits;
      r(label) -= 1.0;
      return r.squaredNorm();
    }
  }
  throw UsageError("unknown loss");
}

Vector loss_logit_gradient(LossKind kind, const Vector& logits, int label) {
  switch (kind) {
    case LossKind::cross_entropy: {
      const double shift = logits.maxCoeff();
      Vector p = (logits.array() - shift).exp().matrix();
      p /= p.sum();
      p(label) -= 1.0;
      return p;
    }
    case LossKind::squared_error: {
      Vector r = logits;
      r(label) -= 1.0;
      return 2.0 * r;
    }
  }
  throw UsageError("unknown loss");
}

double accumulate_param_gradient(const ModelParams& params, const Sample& sample, LossKind kind,
                                 double weight, ModelParams& grad) {
  check_label(params, sample.label);
  const ForwardTrace t = forward(params, sample.x);
  Vector delta = loss_logit_gradient(kind, t.logits, sample.label);
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const Vector& in = l == 0 ? t.input : t.hidden[l - 1];
    grad.layers[l].weight.noalias() += (weight * delta) * in.transpose();
    grad.layers[l].bias += weight * delta;
    if (l > 0) delta = (params.layers[l].weight.transpose() * delta).cwiseProduct(t.active[l - 1]);
  }
  return loss_value(kind, t.logits, sample.label);
}

Vector input_loss_gradient(const ModelParams& params, const Vector& x, int label, LossKind kind,
                           double* loss_out) {
  check_label(params, label);
  const ForwardTrace t = forward(params, x);
  Vector delta = loss_logit_gradient(kind, t.logits, label);
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    delta = params.layers[l].weight.transpose() * delta;
    if (l > 0) delta = delta.cwiseProduct(t.active[l - 1]);
  }
  if (loss_out != nullptr) *loss_out = loss_value(kind, t.logits, label);
  return delta;
}

LossGradient param_gradient(const ModelParams& params, std::span<const Sample> batch,
                            LossKind kind, std::span<const double> weights) {
  return kernels::parallel::batch_loss_gradient(params, batch, kind, weights);
}

double min_abs_norm(const Vector& v) {
  if (v.size() == 0) throw UsageError("min_abs_norm of an empty vector");
  return v.cwiseAbs().minCoeff();
}

double min_row_l2(const Matrix& w) {
  if (w.size() == 0) throw UsageError("min_row_l2 of an empty matrix");
  return w.rowwise().norm().minCoeff();
}

}  // namespace advparam
