#pragma once

// Executable versions of the existence constructions for adversarial
// parameters and the closed-form bounds that accompany them.

#include "advparam/network.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace advparam {

// ---------------------------------------------------------------------------
// Orthogonal vector with large L2 norm

struct Partition {
  std::vector<Index> set;  // S, the heavier side (indices into the input)
  double k = 0.0;          // |sum_S |v_i| - sum_{S^c} |v_i||
  Index j = -1;            // element of S with v_j != 0 and k <= |v_j|
  bool exhaustive = false; // k is globally minimal
};

inline constexpr Index kExhaustivePartitionLimit = 24;

/// Splits |v| into two sides with a small weight difference. Exhaustive
/// (Gray code) up to kExhaustivePartitionLimit nonzero entries, greedy
/// largest-first above; both modes return a j with k <= |v_j|.
Partition balanced_partition(const Vector& magnitudes);

/// w with <w, v> = 0, ||w||_inf = 1 and ||w||_2 >= sqrt(n - 1).
/// Throws UsageError for v = 0.
Vector orthogonal_unit_vector(const Vector& v);

// ---------------------------------------------------------------------------
// Shallow constructions

struct TheoremParams {
  double A = 0.0;      // logit-gap bound over the neighborhood (estimate)
  double a = 0.0;      // neighborhood radius
  double b = 0.0;      // activation floor
  double c = 0.0;      // min |W2 row difference| entry
  double eta = 0.0;    // fraction of hidden units with activation > b
  double gamma = 0.0;  // parameter budget
  double eps = 0.0;    // sample budget
  double r = 0.0;      // angle floor
};

struct ShallowConditions {
  TheoremParams params;
  double a_estimate = 0.0;  // raw maximum found by the probes
  double safety = 1.5;      // factor applied to a_estimate in the threshold
  double threshold = 0.0;   // width the hidden layer has to exceed
  Index width = 0;
  bool satisfied = false;
  std::string failing;      // name of the first failing condition
};

struct ProbeOptions {
  double a = 0.0;            // 0 means use eps
  int random_probes = 32;
  int pgd_steps = 20;
  std::uint64_t seed = 7;
  std::optional<double> b;   // activation floor; chosen to minimize the threshold if unset
};

/// Condition constants for a one-hidden-layer net at x0 and the width
/// threshold n1 > 2 * safety * A / (min{eps * gamma * (n - 1), b} * c * eta).
ShallowConditions theorem1_conditions(const ModelParams& params, const Vector& x0, double gamma,
                                      double eps, const ProbeOptions& probe = {});

struct ConstructionTrace {
  Vector direction;                 // v (single sample) after the sign choice
  double direction_sign = 1.0;
  std::vector<Vector> directions;   // v_l per class (protected-set version)
  Vector witness;                   // orthogonal vector before scaling
  int target_class = -1;            // l2
  Vector unit_signs;                // diagonal of U
  ModelParams attacked;
  ShallowConditions conditions;
  double clean_residual = 0.0;      // max |F_a(x) - F(x)| over protected points
  double budget_used = 0.0;         // max |Theta_a - Theta|
  bool adversarial_found = false;
  double adversarial_fraction = 0.0;
  bool guarantee = false;           // width above threshold
  double margin_before = 0.0;       // F_lx - F_l2 at the adversarial point
  double margin_after = 0.0;
};

/// Rank-one surgery on W1 that keeps F(x0) and misclassifies x0 + eps v.
/// Throws ConditionError naming the failing condition, UsageError for a
/// wrong architecture or a misclassified x0. gamma = 0 returns the input.
ConstructionTrace theorem1_construct(const ModelParams& params, const Sample& x0, double gamma,
                                     double eps, std::optional<int> target_class = std::nullopt,
                                     const ProbeOptions& probe = {});

/// Same surgery for a whole protected set: perturbation rows are orthogonal to
/// span(S), one direction per class. Refuses when dim span(S) > n - m.
ConstructionTrace theorem2_construct(const ModelParams& params, std::span<const Sample> protected_set,
                                     double gamma, double eps, const ProbeOptions& probe = {});

/// Conditioned one-hidden-layer instance: a scaled nearest-center classifier
/// plus `pairs` mirrored filler units whose output contributions cancel. Every
/// hidden unit stays active on [-0.5, 1.5]^n and every W2 column difference is
/// at least `spread - scale` in magnitude.
struct ConditionedNetSpec {
  Index input_dim = 8;
  int classes = 3;
  Index pairs = 16;
  double scale = 0.1;
  double spread = 3.0;
  std::uint64_t seed = 1;
};
ModelParams conditioned_shallow_net(const ConditionedNetSpec& spec,
                                    std::span<const Vector> centers = {});

// ---------------------------------------------------------------------------
// Deep construction

struct SignSearch {
  std::vector<int> signs;  // +1 / -1 per factor
  double value = 0.0;      // ||prod (s_l u_l + U_l)||_F^2 at `signs`
  double bound = 0.0;      // ||prod U_l||_F^2 + sum_l ||T_l(u_l)||_F^2
};

/// Exhaustive search over the 2^K sign patterns, K <= 16 factors. The product
/// is taken left to right in list order.
SignSearch lemma_m2_signs(std::span<const Matrix> U, std::span<const Matrix> u);

struct InflationTrace {
  ModelParams attacked;
  int target_class = -1;
  std::vector<Index> rows;            // k per hidden layer
  std::vector<Vector> directions;     // v per perturbed layer (hidden layers, then output)
  SignSearch signs;
  double layer_residual = 0.0;        // max |F^l_a(x0) - F^l(x0)| over layers and logits
  double budget_used = 0.0;
  double measure_before = 0.0;
  double measure_after = 0.0;
};

/// Rank-one null-space perturbations on every layer of a bias-free net with
/// square hidden layers that leave every layer output at x0 unchanged while
/// inflating the gradient of the weakest margin.
InflationTrace gradient_inflation_attack(const ModelParams& params, const Sample& x0, double gamma);

// ---------------------------------------------------------------------------
// Bounds

/// Guaranteed relative decrease of the squared-margin measure at one sample:
/// q / (4A + q), q = gamma^2 ((L-1)(sin r c b)^2 + c^2 + (2 sin r b)^2).
double bound_eta_thm3(double gamma, int L, double r, double c, double b, double A);

/// Per-layer constants of the distributional bound; all vectors have length L.
struct LayerConstants {
  double A = 0.0;
  std::vector<double> c, d, alpha, beta, gamma;
};

/// Distributional decrease: P / (4A + P) with
/// P = (gamma c_1)^2 alpha_1 gamma_1
///   + sum_{i=2..L} (gamma c_i d_{i-1})^2 gamma_i (alpha_i + beta_{i-1} - 1)
///   + beta_L (d_L gamma)^2.
double bound_rho_thm4(double gamma, const LayerConstants& k);

/// Uniform lower bounds for every layer.
struct UniformConstants {
  double A = 0.0, alpha = 0.0, beta = 0.0, c = 0.0, d = 0.0, gamma_low = 0.0;
};

/// Distributional decrease with uniform constants at depth L.
double bound_rho_uniform(double gamma, int L, const UniformConstants& k);

struct DepthThreshold {
  double bound = 0.0;  // real-valued right-hand side
  int min_depth = 0;   // smallest integer L satisfying the inequality
};

/// L >= 4 (1 - rho) A / (rho (gamma sin r c b)^2) + 1: rate >= 1 - rho.
DepthThreshold depth_for_rate(double rho, double A, double gamma, double r, double c, double b);

/// L > 4 A (R / tau - 1) / (gamma sin r c b)^2 + 1: measure <= tau. Needs tau < R.
DepthThreshold depth_for_measure(double tau, double R, double A, double gamma, double r, double c,
                                 double b);

/// L > 1 + 4 (1 - rho) A / (rho (gamma c d)^2 gamma_low (alpha + beta - 1)).
DepthThreshold depth_for_rate_dist(double rho, double gamma, const UniformConstants& k);

/// L > 4 A (R / tau - 1) / ((gamma c d)^2 gamma_low (alpha + beta - 1)) + 1.
DepthThreshold depth_for_measure_dist(double tau, double R, double gamma, const UniformConstants& k);

}  // namespace advparam
