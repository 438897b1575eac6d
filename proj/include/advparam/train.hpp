#pragma once

#include "advparam/dataset.hpp"
#include "advparam/pgd.hpp"

#include <cstdint>
#include <vector>

namespace advparam {

struct TrainConfig {
  int epochs = 50;
  std::size_t batch_size = 32;
  double lr = 0.05;
  double lr_decay = 0.5;   // lr *= lr_decay every decay_every epochs
  int decay_every = 0;     // 0 disables the decay
  double momentum = 0.9;
  std::uint64_t seed = 1;
  PgdConfig pgd = PgdConfig::with_eps(8.0 / 255.0);  // inner maximization for adversarial training

  void validate() const;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_trace;  // mean batch loss per epoch
  double final_accuracy = 0.0;     // clean accuracy on the training set
};

/// Mini-batch momentum SGD on the mean cross-entropy.
TrainResult train_standard(const ModelParams& init, const LabeledDataset& data,
                           const TrainConfig& cfg);

/// Same loop with every batch replaced by its PGD adversaries (cfg.pgd).
TrainResult train_adversarial(const ModelParams& init, const LabeledDataset& data,
                              const TrainConfig& cfg);

}  // namespace advparam
