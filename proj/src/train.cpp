#include "advparam/train.hpp"

#include "advparam/errors.hpp"
#include "advparam/kernels.hpp"
#include "advparam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace advparam {

void TrainConfig::validate() const {
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (batch_size < 1) throw UsageError("batch size must be >= 1");
  if (!(lr >= 0.0) || std::isinf(lr)) throw UsageError("learning rate must be finite and >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw UsageError("momentum must lie in [0, 1)");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw UsageError("lr decay must lie in (0, 1]");
  if (decay_every < 0) throw UsageError("decay_every must be >= 0");
}

namespace {

TrainResult run(const ModelParams& init, const LabeledDataset& data, const TrainConfig& cfg,
                bool adversarial) {
  cfg.validate();
  init.validate();
  if (data.empty()) throw UsageError("empty dataset");
  if (data.dim != init.input_dim()) throw ShapeError("dataset and model input sizes differ");

  TrainResult out;
  out.params = init;
  ModelParams velocity = init.zeros_like();
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Sample> batch;
  double lr = cfg.lr;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.decay_every > 0 && epoch > 0 && epoch % cfg.decay_every == 0) lr *= cfg.lr_decay;
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(data.samples[order[i]]);
      if (adversarial) {
        const auto adv = kernels::parallel::pgd_batch(out.params, batch, cfg.pgd);
        for (std::size_t i = 0; i < batch.size(); ++i) batch[i].x = adv[i].point;
      }
      const LossGradient lg = param_gradient(out.params, batch, LossKind::cross_entropy);
      if (!std::isfinite(lg.loss)) throw DomainError("training loss became non-finite");
      velocity *= cfg.momentum;
      velocity += lg.gradient;
      out.params.axpy(-lr, velocity);
      loss_sum += lg.loss;
      ++batches;
    }
    out.loss_trace.push_back(loss_sum / static_cast<double>(batches));
  }
  out.final_accuracy = accuracy(out.params, data.view());
  return out;
}

}  // namespace

TrainResult train_standard(const ModelParams& init, const LabeledDataset& data,
                           const TrainConfig& cfg) {
  return run(init, data, cfg, false);
}

TrainResult train_adversarial(const ModelParams& init, const LabeledDataset& data,
                              const TrainConfig& cfg) {
  return run(init, data, cfg, true);
}

}  // namespace advparam
