#pragma once

#include "advparam/metrics.hpp"
#include "advparam/network.hpp"
#include "advparam/pgd.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace advparam {

enum class BudgetKind { linf_box, l0_swap };

struct PerturbBudget {
  BudgetKind kind = BudgetKind::linf_box;
  ModelParams delta;        // linf_box: per-coordinate bound, shaped like the params
  double gamma = 0.0;       // ratio the box was built from, for reporting
  int matrices = 1;         // l0_swap: number of weight matrices to touch
  double pair_fraction = 0.01;
  int pair_floor = 1;

  static PerturbBudget linf(ModelParams delta, double gamma = 0.0);
  static PerturbBudget l0(int matrices, double pair_fraction, int pair_floor = 1);

  /// Throws UsageError on a negative Delta or an out-of-range l0 descriptor.
  void validate(const ModelParams& center) const;
  std::string describe() const;
};

/// Delta_i = gamma * |theta_i|.
PerturbBudget budget_linf_gamma(const ModelParams& theta, double gamma);

/// Coordinate-wise clamp of `candidate` into [center - delta, center + delta].
/// Points already inside are returned unchanged.
ModelParams proj_box(const ModelParams& candidate, const ModelParams& center,
                     const ModelParams& delta);

/// max_i (|candidate_i - center_i| - delta_i) <= 0, evaluated exactly.
bool within_box(const ModelParams& candidate, const ModelParams& center, const ModelParams& delta);

/// Mean cross-entropy at the PGD adversaries of the batch.
double loss_at(const ModelParams& params, std::span<const Sample> batch, const PgdConfig& cfg);

enum class StepDirection { descent, ascent };

/// gradient: theta -/+ alpha * grad.
/// sign:     theta -/+ alpha * delta .* sign(grad), alpha measured in box widths.
enum class StepRule { gradient, sign };

struct AttackConfig {
  PgdConfig pgd = PgdConfig::with_eps(8.0 / 255.0);
  int n1 = 10;               // pre-phase iterations
  int n2 = 100;              // main-phase iterations
  double alpha = 0.05;
  double decay = 0.5;        // alpha *= decay every decay_every main iterations
  int decay_every = 0;       // 0 means n2 / 4
  std::size_t batch_size = 0;  // 0 uses the whole attack set every iteration
  std::uint64_t seed = 1;
  double gamma_low = kDefaultGammaLow;
  StepDirection direction = StepDirection::descent;
  StepRule step_rule = StepRule::sign;
  int swap_retries = 50;

  void validate() const;
};

struct TracePoint {
  int iter = 0;
  int phase = 1;
  double loss = 0.0;
  double acc = 0.0;      // on the iteration's batch, before the update
  double adv_acc = 0.0;
};

struct SwapRecord {
  int matrix = 0;        // layer index of the weight matrix
  Index first = 0;       // linear (column-major) entry indices
  Index second = 0;
  double g_first = 0.0, g_second = 0.0;
  double w_first = 0.0, w_second = 0.0;  // values before the swap

  /// First-order change of the loss along the swap: g1 (w2 - w1) + g2 (w1 - w2).
  double directional_derivative() const;
};

struct AttackResult {
  ModelParams params;
  std::vector<TracePoint> trace;
  RateInputs inputs;   // measured on the attack set
  RateResult rate;
  bool failed = false;
  // l0 swap bookkeeping
  std::vector<int> touched;
  std::size_t swaps = 0;
  std::size_t skipped = 0;
  std::vector<SwapRecord> swap_log;
  // single-sample attack: label kept and PGD finds an adversary at cfg.pgd.eps
  bool success = false;
};

/// L-inf box attack. Phase 1 minimizes -mean L_AT, phase 2 minimizes
/// sum L_CE / sum L_AT; every step is followed by proj_box.
AttackResult attack_linf(const ModelParams& params, std::span<const Sample> train,
                         const PerturbBudget& budget, const AttackConfig& cfg);

/// Same objective with projection replaced by entry swaps inside k randomly
/// chosen weight matrices.
AttackResult attack_l0(const ModelParams& params, std::span<const Sample> train,
                       const PerturbBudget& budget, const AttackConfig& cfg);

/// Destroys robustness on samples of `target` only:
/// minimizes (sum L_CE + sum_{l != target} L_AT) / sum_{l == target} L_AT.
AttackResult attack_label(const ModelParams& params, std::span<const Sample> train, int target,
                          const PerturbBudget& budget, const AttackConfig& cfg);

/// Destroys clean accuracy on samples of `target` only:
/// minimizes (sum_{l != target} (L_AT + L_CE)) / sum_{l == target} L_CE.
AttackResult attack_direct(const ModelParams& params, std::span<const Sample> train, int target,
                           const PerturbBudget& budget, const AttackConfig& cfg);

/// attack_linf on T = {x}. Throws UsageError when x is misclassified.
AttackResult attack_single(const ModelParams& params, const Sample& x, const PerturbBudget& budget,
                           const AttackConfig& cfg);

/// Gradient-free control with the same budget: uniform noise in [-Delta, Delta]
/// for a box, unconditioned random swaps for l0.
AttackResult random_perturbation(const ModelParams& params, std::span<const Sample> train,
                                 const PerturbBudget& budget, const AttackConfig& cfg);

/// Tries `pairs` swaps in `w`; each pair is resampled up to `retries` times until
/// (g1 - g2)(w1 - w2) > 0, otherwise skipped. Returns the accepted count and
/// adds the skipped count to `skipped`.
std::size_t swap_pass(Matrix& w, const Matrix& g, std::size_t pairs, std::mt19937_64& rng,
                      int retries, int matrix_id, std::size_t& skipped,
                      std::vector<SwapRecord>* log = nullptr);

/// Baseline vs attacked measurements on `data`. With a target label, the
/// per-split fields are filled from the attacked model.
RateInputs measure_rate_inputs(const ModelParams& base, const ModelParams& attacked,
                               std::span<const Sample> data, const PgdConfig& pgd,
                               std::optional<int> target = std::nullopt);

}  // namespace advparam
