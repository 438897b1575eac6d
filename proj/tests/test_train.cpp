#include "advparam/dataset.hpp"
#include "advparam/errors.hpp"
#include "advparam/metrics.hpp"
#include "advparam/train.hpp"

#include "doctest.h"

using namespace advparam;

namespace {

LabeledDataset separable() {
  BlobSpec spec;
  spec.dim = 4;
  spec.classes = 3;
  spec.per_class = 30;
  spec.seed = 8;
  return gen_blobs(spec);
}

TrainConfig quick(int epochs = 40) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 16;
  cfg.lr = 0.1;
  cfg.seed = 3;
  return cfg;
}

const std::vector<Index> kDims{4, 16, 3};

}  // namespace

TEST_SUITE("train") {

TEST_CASE("standard training separates well-separated blobs") {
  const auto data = separable();
  const auto r = train_standard(ModelParams::random_init(kDims, 1), data, quick());
  CHECK(r.final_accuracy >= 0.99);
  CHECK(accuracy(r.params, data.view()) == r.final_accuracy);
  CHECK(r.loss_trace.size() == 40);
  CHECK(r.loss_trace.back() < r.loss_trace.front());
}

TEST_CASE("zero learning rate leaves the parameters unchanged") {
  const auto data = separable();
  const auto init = ModelParams::random_init(kDims, 1);
  auto cfg = quick(3);
  cfg.lr = 0.0;
  CHECK(train_standard(init, data, cfg).params == init);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto data = separable();
  const auto init = ModelParams::random_init(kDims, 1);
  CHECK(train_standard(init, data, quick(5)).params == train_standard(init, data, quick(5)).params);
}

TEST_CASE("adversarial training with zero radius equals standard training") {
  const auto data = separable();
  const auto init = ModelParams::random_init(kDims, 1);
  auto cfg = quick(5);
  cfg.pgd.eps = 0.0;
  CHECK(train_adversarial(init, data, cfg).params == train_standard(init, data, cfg).params);
}

TEST_CASE("adversarial training improves adversarial accuracy") {
  const auto data = separable();
  const auto init = ModelParams::random_init(kDims, 1);
  auto cfg = quick(60);
  cfg.pgd = PgdConfig::with_eps(0.15, 10);
  const auto std_model = train_standard(init, data, cfg).params;
  const auto adv_model = train_adversarial(init, data, cfg).params;
  const auto eval = PgdConfig::with_eps(0.15, 20);
  CHECK(adversarial_accuracy(adv_model, data.view(), eval) >=
        adversarial_accuracy(std_model, data.view(), eval));
}

TEST_CASE("training validates its inputs") {
  const auto data = separable();
  const auto init = ModelParams::random_init(kDims, 1);
  auto cfg = quick();
  cfg.epochs = 0;
  CHECK_THROWS_AS(train_standard(init, data, cfg), UsageError);
  cfg = quick();
  cfg.lr = -1.0;
  CHECK_THROWS_AS(train_standard(init, data, cfg), UsageError);
  const std::vector<Index> wrong{5, 4, 3};
  CHECK_THROWS_AS(train_standard(ModelParams::random_init(wrong, 1), data, quick()), ShapeError);
  CHECK_THROWS_AS(train_standard(init, LabeledDataset{}, quick()), UsageError);
}

}  // TEST_SUITE
