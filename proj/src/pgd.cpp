#include "advparam/pgd.hpp"

#include "advparam/errors.hpp"
#include "advparam/numeric.hpp"

#include <cmath>

namespace advparam {

Norm dual(Norm p) {
  switch (p) {
    case Norm::l1:
      return Norm::linf;
    case Norm::l2:
      return Norm::l2;
    case Norm::linf:
      return Norm::l1;
  }
  throw UsageError("unknown norm");
}

double norm_of(const Vector& v, Norm p) {
  switch (p) {
    case Norm::l1:
      return v.lpNorm<1>();
    case Norm::l2:
      return v.norm();
    case Norm::linf:
      return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
  }
  throw UsageError("unknown norm");
}

PgdConfig PgdConfig::with_eps(double eps, int steps) { return {eps, steps, eps / 4.0}; }

namespace {

void project_linf(Vector& candidate, const Vector& x, double eps) {
  for (Index i = 0; i < candidate.size(); ++i) {
    double v = clamp_within(candidate(i), x(i), eps);
    if (v < 0.0 || v > 1.0) v = std::clamp(v, 0.0, 1.0);
    candidate(i) = v;
  }
}

void project_l2(Vector& candidate, const Vector& x, double eps) {
  Vector delta = candidate - x;
  const double n = delta.norm();
  if (n > eps) delta *= eps / n;
  candidate = (x + delta).cwiseMax(0.0).cwiseMin(1.0);
  // Clipping to the cube only shrinks coordinates toward x, but rounding in
  // the rescale can leave the norm a hair above eps.
  while ((candidate - x).norm() > eps) candidate = x + (candidate - x) * (1.0 - 1e-15);
}

}  // namespace

PgdOutcome pgd_search(const ModelParams& params, const Vector& x, int label, const PgdConfig& cfg,
                      Norm norm) {
  if (cfg.eps < 0.0 || cfg.step < 0.0 || cfg.steps < 0) throw UsageError("invalid PGD config");
  if (norm == Norm::l1) throw UsageError("L1 PGD is not supported");
  PgdOutcome out;
  double loss = 0.0;
  Vector current = x;
  {
    const Vector z = logits(params, x);
    loss = cross_entropy(z, label);
    out.flipped = argmax_label(z) != label;
  }
  out.point = x;
  out.loss = loss;
  if (cfg.eps == 0.0 || cfg.step == 0.0) return out;

  for (int t = 0; t < cfg.steps; ++t) {
    const Vector g = input_loss_gradient(params, current, label, LossKind::cross_entropy);
    Vector next;
    if (norm == Norm::linf) {
      next = current + cfg.step * g.unaryExpr([](double v) {
        return static_cast<double>((v > 0.0) - (v < 0.0));
      });
      project_linf(next, x, cfg.eps);
    } else {
      const double gn = g.norm();
      if (gn == 0.0) break;
      next = current + (cfg.step / gn) * g;
      project_l2(next, x, cfg.eps);
    }
    const Vector z = logits(params, next);
    const double l = cross_entropy(z, label);
    if (argmax_label(z) != label) out.flipped = true;
    if (l > out.loss) {
      out.loss = l;
      out.point = next;
    }
    current = std::move(next);
  }
  return out;
}

Vector pgd_adversary(const ModelParams& params, const Vector& x, int label, const PgdConfig& cfg) {
  return pgd_search(params, x, label, cfg, Norm::linf).point;
}

}  // namespace advparam
