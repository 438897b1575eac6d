#include "advparam/kernels.hpp"

#include "advparam/errors.hpp"

#include <omp.h>

namespace advparam::kernels {

namespace {

double total_weight(std::span<const Sample> batch, std::span<const double> weights) {
  if (batch.empty()) throw UsageError("empty batch");
  if (weights.empty()) return static_cast<double>(batch.size());
  if (weights.size() != batch.size()) throw UsageError("weights and batch differ in length");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw UsageError("sample weights must be nonnegative");
    total += w;
  }
  if (total <= 0.0) throw UsageError("sample weights sum to zero");
  return total;
}

struct SampleGradient {
  double loss = 0.0;
  ModelParams gradient;
};

// Sum of w_i * g_i in index order followed by division by the total weight.
// Shared by both execution paths so the arithmetic is identical.
LossGradient reduce(const ModelParams& params, std::vector<SampleGradient>& per_sample,
                    std::span<const double> weights, double total) {
  LossGradient out{0.0, params.zeros_like()};
  for (std::size_t i = 0; i < per_sample.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    out.loss += w * per_sample[i].loss;
    out.gradient.axpy(w, per_sample[i].gradient);
  }
  out.loss /= total;
  out.gradient *= 1.0 / total;
  return out;
}

template <class Map>
LossGradient batch_loss_gradient_impl(Map&& map, const ModelParams& params,
                                      std::span<const Sample> batch, LossKind kind,
                                      std::span<const double> weights) {
  const double total = total_weight(batch, weights);
  auto per_sample = map(batch.size(), [&](std::size_t i) {
    SampleGradient s{0.0, params.zeros_like()};
    s.loss = accumulate_param_gradient(params, batch[i], kind, 1.0, s.gradient);
    return s;
  });
  return reduce(params, per_sample, weights, total);
}

SampleTerms one_sample_terms(const ModelParams& params, const Sample& s, const PgdConfig& cfg) {
  SampleTerms t;
  t.g_ce = params.zeros_like();
  t.ce = accumulate_param_gradient(params, s, LossKind::cross_entropy, 1.0, t.g_ce);
  const PgdOutcome adv = pgd_search(params, s.x, s.label, cfg, Norm::linf);
  t.correct = classify(params, s.x) == s.label;
  t.robust = !adv.flipped;
  if (adv.point == s.x) {
    t.at = t.ce;
    t.g_at = t.g_ce;
  } else {
    t.g_at = params.zeros_like();
    t.at = accumulate_param_gradient(params, {adv.point, s.label}, LossKind::cross_entropy, 1.0,
                                     t.g_at);
  }
  return t;
}

}  // namespace

namespace serial {

LossGradient batch_loss_gradient(const ModelParams& params, std::span<const Sample> batch,
                                 LossKind kind, std::span<const double> weights) {
  return batch_loss_gradient_impl(
      [](std::size_t n, auto&& fn) { return serial::map_indices(n, fn); }, params, batch, kind,
      weights);
}

std::vector<PgdOutcome> pgd_batch(const ModelParams& params, std::span<const Sample> batch,
                                  const PgdConfig& cfg) {
  return map_indices(batch.size(), [&](std::size_t i) {
    return pgd_search(params, batch[i].x, batch[i].label, cfg, Norm::linf);
  });
}

std::vector<SampleTerms> sample_terms(const ModelParams& params, std::span<const Sample> batch,
                                      const PgdConfig& cfg) {
  return map_indices(batch.size(),
                     [&](std::size_t i) { return one_sample_terms(params, batch[i], cfg); });
}

}  // namespace serial

namespace parallel {

LossGradient batch_loss_gradient(const ModelParams& params, std::span<const Sample> batch,
                                 LossKind kind, std::span<const double> weights) {
  return batch_loss_gradient_impl(
      [](std::size_t n, auto&& fn) { return parallel::map_indices(n, fn); }, params, batch, kind,
      weights);
}

std::vector<PgdOutcome> pgd_batch(const ModelParams& params, std::span<const Sample> batch,
                                  const PgdConfig& cfg) {
  return map_indices(batch.size(), [&](std::size_t i) {
    return pgd_search(params, batch[i].x, batch[i].label, cfg, Norm::linf);
  });
}

std::vector<SampleTerms> sample_terms(const ModelParams& params, std::span<const Sample> batch,
                                      const PgdConfig& cfg) {
  return map_indices(batch.size(),
                     [&](std::size_t i) { return one_sample_terms(params, batch[i], cfg); });
}

}  // namespace parallel

int thread_count() { return omp_get_max_threads(); }

}  // namespace advparam::kernels
