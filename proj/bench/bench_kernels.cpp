// Serial reference vs OpenMP kernels on the same batches.

#include "advparam/dataset.hpp"
#include "advparam/kernels.hpp"
#include "advparam/metrics.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace advparam;

struct Fixture {
  ModelParams params;
  LabeledDataset data;
  PgdConfig pgd = PgdConfig::with_eps(0.1, 10);

  explicit Fixture(Index width) {
    BlobSpec spec;
    spec.dim = 16;
    spec.classes = 4;
    spec.per_class = 64;
    data = gen_blobs(spec);
    const std::vector<Index> dims{spec.dim, width, width, spec.classes};
    params = ModelParams::random_init(dims, 3);
  }
};

const Fixture& fixture(Index width) {
  static const Fixture small(32), large(128);
  return width <= 32 ? small : large;
}

template <bool Parallel>
void loss_gradient(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  for (auto _ : state) {
    auto r = Parallel ? kernels::parallel::batch_loss_gradient(f.params, f.data.view(),
                                                                LossKind::cross_entropy)
                      : kernels::serial::batch_loss_gradient(f.params, f.data.view(),
                                                              LossKind::cross_entropy);
    benchmark::DoNotOptimize(r.loss);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.data.size()));
}

template <bool Parallel>
void pgd(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  for (auto _ : state) {
    auto r = Parallel ? kernels::parallel::pgd_batch(f.params, f.data.view(), f.pgd)
                      : kernels::serial::pgd_batch(f.params, f.data.view(), f.pgd);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.data.size()));
}

template <bool Parallel>
void terms(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  for (auto _ : state) {
    auto r = Parallel ? kernels::parallel::sample_terms(f.params, f.data.view(), f.pgd)
                      : kernels::serial::sample_terms(f.params, f.data.view(), f.pgd);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.data.size()));
}

template <bool Parallel>
void radii(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  for (auto _ : state) {
    auto r = Parallel ? kernels::parallel::approx_radii(f.params, f.data.view(), Norm::linf)
                      : kernels::serial::approx_radii(f.params, f.data.view(), Norm::linf);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.data.size()));
}

}  // namespace

BENCHMARK(loss_gradient<false>)->Name("loss_gradient/serial")->Arg(32)->Arg(128);
BENCHMARK(loss_gradient<true>)->Name("loss_gradient/parallel")->Arg(32)->Arg(128);
BENCHMARK(pgd<false>)->Name("pgd_batch/serial")->Arg(32)->Arg(128);
BENCHMARK(pgd<true>)->Name("pgd_batch/parallel")->Arg(32)->Arg(128);
BENCHMARK(terms<false>)->Name("sample_terms/serial")->Arg(32)->Arg(128);
BENCHMARK(terms<true>)->Name("sample_terms/parallel")->Arg(32)->Arg(128);
BENCHMARK(radii<false>)->Name("approx_radii/serial")->Arg(32)->Arg(128);
BENCHMARK(radii<true>)->Name("approx_radii/parallel")->Arg(32)->Arg(128);

BENCHMARK_MAIN();
