#pragma once

#include "advparam/dataset.hpp"
#include "advparam/network.hpp"
#include "advparam/pgd.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace advparam {

/// Fraction of samples classified correctly.
double accuracy(const ModelParams& params, std::span<const Sample> samples);

/// Heuristic bracket of the robustness radius under the given norm.
///
/// PGD is used as the falsifier: at `upper` it finds a misclassified point, at
/// `lower` it does not. PGD is incomplete, so `lower` is not a certificate.
/// When PGD cannot flip the label even at the largest meaningful radius,
/// `upper` is +infinity and `exhausted` is set.
struct RadiusBracket {
  double lower = 0.0;
  double upper = 0.0;
  bool exhausted = false;
};

/// `schedule.steps` PGD steps per probe with step = zeta * schedule.step / schedule.eps.
RadiusBracket robust_radius_bracket(const ModelParams& params, const Sample& sample, Norm p,
                                    double tolerance, const PgdConfig& schedule);

/// First-order radius estimate. `unbounded` flags the case where the
/// minimizing class has a numerically zero gradient difference; `value` is
/// then +infinity and must not be averaged.
struct RadiusEstimate {
  double value = 0.0;
  bool unbounded = false;
};

inline constexpr double kZeroGradientNorm = 1e-12;

/// min_{l != label} (F_label - F_l) / ||grad F_label - grad F_l||_q, gated to 0
/// when any other logit ties or beats the true one. q is the dual of p.
RadiusEstimate approx_radius(const ModelParams& params, const Sample& sample,
                             Norm p = Norm::linf);

/// approx_radius with p = q = 2, squared.
RadiusEstimate squared_margin_measure(const ModelParams& params, const Sample& sample);

/// PGD adversarial accuracy: fraction of samples that are classified
/// correctly and for which PGD at budget cfg.eps finds no misclassified point.
double adversarial_accuracy(const ModelParams& params, std::span<const Sample> samples,
                            const PgdConfig& cfg);

struct AverageRadius {
  double mean = 0.0;           // over samples with a finite estimate
  std::size_t counted = 0;
  std::size_t unbounded = 0;   // excluded sentinels
};

/// Dataset mean of approx_radius with the L1 dual norm (L-inf samples).
AverageRadius avg_approx_radius(const ModelParams& params, std::span<const Sample> samples);

/// Ratio of the mean squared true-class margin (min over other classes, gated)
/// to the mean of the largest squared gradient-difference norm. nullopt when
/// the denominator is zero.
std::optional<double> dist_robust_measure(const ModelParams& params,
                                          std::span<const Sample> samples);

namespace kernels {
namespace serial {
std::vector<RadiusEstimate> approx_radii(const ModelParams& params, std::span<const Sample> samples,
                                         Norm p);
}
namespace parallel {
std::vector<RadiusEstimate> approx_radii(const ModelParams& params, std::span<const Sample> samples,
                                         Norm p);
}
}  // namespace kernels

struct RobustnessReport {
  std::string dataset;
  std::size_t n_samples = 0;
  double accuracy = 0.0;
  double adversarial_accuracy = 0.0;
  double eps = 0.0;
  AverageRadius avg_radius;
  std::optional<double> dist_measure;
  std::vector<RadiusEstimate> radii;            // per sample, L1 dual norm
  std::vector<RadiusEstimate> squared_margins;  // per sample
  PgdConfig pgd;
  std::uint64_t seed = 0;
};

RobustnessReport evaluate_robustness(const ModelParams& params, const LabeledDataset& data,
                                     const PgdConfig& pgd, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Adversarial rates

inline constexpr double kDefaultGammaLow = 0.9;

/// Baseline and attacked measurements. The optional fields are the per-label
/// split used by the targeted variants: "other" = samples whose label is not
/// the target label, "target" = samples with the target label. Each split value
/// is measured within its subset; ratios are formed against the overall
/// baselines.
struct RateInputs {
  double base_accuracy = 0.0;
  double base_robustness = 0.0;
  double attacked_accuracy = 0.0;
  double attacked_robustness = 0.0;
  std::optional<double> other_accuracy;
  std::optional<double> other_robustness;
  std::optional<double> target_accuracy;
  std::optional<double> target_robustness;

  static RateInputs of(double base_acc, double base_rob, double att_acc, double att_rob) {
    RateInputs in;
    in.base_accuracy = base_acc;
    in.base_robustness = base_rob;
    in.attacked_accuracy = att_acc;
    in.attacked_robustness = att_rob;
    return in;
  }
};

struct RateResult {
  std::optional<double> rate;  // nullopt when a needed baseline is zero
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  bool failed = false;  // gamma1 < gamma_low
};

/// min(g1, 1) * (1 - min(g2, 1)) with g1 = attacked/base accuracy and
/// g2 = attacked/base robustness.
RateResult adversarial_rate(const RateInputs& in, double gamma_low = kDefaultGammaLow);

enum class TargetKind { single_sample, label_robustness, direct };

/// single_sample:    1 - min(g, 1), g = attacked/base robustness
/// label_robustness: min(g1,1) min(g2,1) (1 - min(g3,1)),
///                   g1 = acc/base_acc, g2 = other_rob/base_rob, g3 = target_rob/base_rob
/// direct:           same product with g1 = other_acc/base_acc,
///                   g2 = other_rob/base_rob, g3 = target_acc/base_acc
RateResult targeted_rate(TargetKind kind, const RateInputs& in,
                         double gamma_low = kDefaultGammaLow);

}  // namespace advparam
