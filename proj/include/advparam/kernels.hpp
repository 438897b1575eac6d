#pragma once

// Per-sample batch kernels. Every kernel has an OpenMP version (`parallel`)
// and a single-threaded reference (`serial`) with the same signature. Results
// are produced per sample and reduced in sample-index order, so both versions
// return bit-identical values regardless of the thread count.

#include "advparam/network.hpp"
#include "advparam/pgd.hpp"

#include <cstddef>
#include <exception>
#include <span>
#include <type_traits>
#include <vector>

namespace advparam::kernels {

/// Clean and adversarial loss terms of one sample, with parameter gradients.
/// The adversarial gradient is the cross-entropy gradient at the PGD point.
struct SampleTerms {
  double ce = 0.0;
  double at = 0.0;
  ModelParams g_ce;
  ModelParams g_at;
  bool correct = false;
  bool robust = false;  // correct and PGD found no misclassified point
};

namespace serial {

template <class Fn>
auto map_indices(std::size_t n, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  std::vector<std::invoke_result_t<Fn&, std::size_t>> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
  return out;
}

LossGradient batch_loss_gradient(const ModelParams& params, std::span<const Sample> batch,
                                 LossKind kind, std::span<const double> weights = {});

std::vector<PgdOutcome> pgd_batch(const ModelParams& params, std::span<const Sample> batch,
                                  const PgdConfig& cfg);

std::vector<SampleTerms> sample_terms(const ModelParams& params, std::span<const Sample> batch,
                                      const PgdConfig& cfg);

}  // namespace serial

namespace parallel {

template <class Fn>
auto map_indices(std::size_t n, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  std::vector<std::invoke_result_t<Fn&, std::size_t>> out(n);
  std::exception_ptr error;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(advparam_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

LossGradient batch_loss_gradient(const ModelParams& params, std::span<const Sample> batch,
                                 LossKind kind, std::span<const double> weights = {});

std::vector<PgdOutcome> pgd_batch(const ModelParams& params, std::span<const Sample> batch,
                                  const PgdConfig& cfg);

std::vector<SampleTerms> sample_terms(const ModelParams& params, std::span<const Sample> batch,
                                      const PgdConfig& cfg);

}  // namespace parallel

/// Number of OpenMP threads the parallel kernels will use.
int thread_count();

}  // namespace advparam::kernels
