#include "advparam/metrics.hpp"

#include "advparam/errors.hpp"
#include "advparam/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace advparam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_samples(std::span<const Sample> samples) {
  if (samples.empty()) throw UsageError("empty dataset");
}

// Per-sample ingredients shared by the margin-based measures.
struct MarginTerms {
  bool gated = false;           // some other logit ties or beats the true one
  double min_ratio = kInf;      // min_l margin / ||grad diff||_q
  double min_sq_margin = kInf;  // min_l margin^2
  double max_sq_grad = 0.0;     // max_l ||grad diff||_2^2
};

MarginTerms margin_terms(const ModelParams& params, const Sample& s, Norm q) {
  const Vector z = logits(params, s.x);
  if (s.label < 0 || s.label >= z.size()) throw UsageError("label out of range");
  const Matrix jac = input_jacobian(params, s.x).jacobian;
  MarginTerms t;
  for (Index l = 0; l < z.size(); ++l) {
    if (l == s.label) continue;
    const double margin = std::abs(z(s.label) - z(l));
    if (!(z(s.label) > z(l))) t.gated = true;
    const Vector diff = (jac.row(s.label) - jac.row(l)).transpose();
    const double gn = norm_of(diff, q);
    const double ratio = gn < kZeroGradientNorm ? kInf : margin / gn;
    t.min_ratio = std::min(t.min_ratio, ratio);
    t.min_sq_margin = std::min(t.min_sq_margin, margin * margin);
    t.max_sq_grad = std::max(t.max_sq_grad, diff.squaredNorm());
  }
  return t;
}

RadiusEstimate to_estimate(const MarginTerms& t) {
  if (t.gated) return {0.0, false};
  if (std::isinf(t.min_ratio)) return {kInf, true};
  return {t.min_ratio, false};
}

template <class Map>
std::vector<RadiusEstimate> approx_radii_impl(Map&& map, const ModelParams& params,
                                              std::span<const Sample> samples, Norm p) {
  const Norm q = dual(p);
  return map(samples.size(),
             [&](std::size_t i) { return to_estimate(margin_terms(params, samples[i], q)); });
}

AverageRadius average(const std::vector<RadiusEstimate>& radii) {
  AverageRadius out;
  double sum = 0.0;
  for (const auto& r : radii) {
    if (r.unbounded) {
      ++out.unbounded;
      continue;
    }
    sum += r.value;
    ++out.counted;
  }
  out.mean = out.counted ? sum / static_cast<double>(out.counted) : 0.0;
  return out;
}

void check_fraction(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw UsageError(std::string(what) + " must lie in [0,1]");
}

void check_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || std::isinf(v)) throw UsageError(std::string(what) + " must be finite and >= 0");
}

double need(const std::optional<double>& v, const char* what) {
  if (!v) throw UsageError(std::string("missing rate component: ") + what);
  return *v;
}

double capped(double g) { return std::min(g, 1.0); }

}  // namespace

namespace kernels {
std::vector<RadiusEstimate> serial::approx_radii(const ModelParams& params,
                                                 std::span<const Sample> samples, Norm p) {
  return approx_radii_impl([](std::size_t n, auto&& fn) { return serial::map_indices(n, fn); },
                           params, samples, p);
}
std::vector<RadiusEstimate> parallel::approx_radii(const ModelParams& params,
                                                   std::span<const Sample> samples, Norm p) {
  return approx_radii_impl([](std::size_t n, auto&& fn) { return parallel::map_indices(n, fn); },
                           params, samples, p);
}
}  // namespace kernels

double accuracy(const ModelParams& params, std::span<const Sample> samples) {
  require_samples(samples);
  const auto hits = kernels::parallel::map_indices(samples.size(), [&](std::size_t i) {
    return classify(params, samples[i].x) == samples[i].label ? 1 : 0;
  });
  std::size_t count = 0;
  for (int h : hits) count += static_cast<std::size_t>(h);
  return static_cast<double>(count) / static_cast<double>(samples.size());
}

RadiusBracket robust_radius_bracket(const ModelParams& params, const Sample& sample, Norm p,
                                    double tolerance, const PgdConfig& schedule) {
  if (!(tolerance > 0.0)) throw UsageError("tolerance must be positive");
  if (p == Norm::l1) throw UsageError("L1 radius bracket is not supported");
  if (classify(params, sample.x) != sample.label) return {0.0, 0.0, false};
  const double ratio = schedule.eps > 0.0 ? schedule.step / schedule.eps : 0.25;
  auto flips = [&](double zeta) {
    PgdConfig cfg{zeta, schedule.steps, zeta * ratio};
    return pgd_search(params, sample.x, sample.label, cfg, p).flipped;
  };
  // Largest radius that can matter inside the unit cube.
  double hi = p == Norm::linf ? 1.0 : std::sqrt(static_cast<double>(sample.x.size()));
  if (!flips(hi)) return {hi, kInf, true};
  double lo = 0.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (flips(mid) ? hi : lo) = mid;
  }
  return {lo, hi, false};
}

RadiusEstimate approx_radius(const ModelParams& params, const Sample& sample, Norm p) {
  return to_estimate(margin_terms(params, sample, dual(p)));
}

RadiusEstimate squared_margin_measure(const ModelParams& params, const Sample& sample) {
  RadiusEstimate r = approx_radius(params, sample, Norm::l2);
  if (!r.unbounded) r.value *= r.value;
  return r;
}

double adversarial_accuracy(const ModelParams& params, std::span<const Sample> samples,
                            const PgdConfig& cfg) {
  require_samples(samples);
  const auto outcomes = kernels::parallel::pgd_batch(params, samples, cfg);
  std::size_t robust = 0;
  for (const auto& o : outcomes) robust += o.flipped ? 0 : 1;
  return static_cast<double>(robust) / static_cast<double>(samples.size());
}

AverageRadius avg_approx_radius(const ModelParams& params, std::span<const Sample> samples) {
  require_samples(samples);
  return average(kernels::parallel::approx_radii(params, samples, Norm::linf));
}

std::optional<double> dist_robust_measure(const ModelParams& params,
                                          std::span<const Sample> samples) {
  require_samples(samples);
  const auto terms = kernels::parallel::map_indices(
      samples.size(), [&](std::size_t i) { return margin_terms(params, samples[i], Norm::l2); });
  double num = 0.0, den = 0.0;
  for (const auto& t : terms) {
    num += t.gated ? 0.0 : t.min_sq_margin;
    den += t.max_sq_grad;
  }
  if (den == 0.0) return std::nullopt;
  // Both sums share the 1/N of their means.
  return num / den;
}

RobustnessReport evaluate_robustness(const ModelParams& params, const LabeledDataset& data,
                                     const PgdConfig& pgd, std::uint64_t seed) {
  require_samples(data.view());
  RobustnessReport r;
  r.dataset = data.name;
  r.n_samples = data.size();
  r.accuracy = accuracy(params, data.view());
  r.adversarial_accuracy = adversarial_accuracy(params, data.view(), pgd);
  r.eps = pgd.eps;
  r.radii = kernels::parallel::approx_radii(params, data.view(), Norm::linf);
  r.avg_radius = average(r.radii);
  r.squared_margins = kernels::parallel::map_indices(
      data.size(), [&](std::size_t i) { return squared_margin_measure(params, data.samples[i]); });
  r.dist_measure = dist_robust_measure(params, data.view());
  r.pgd = pgd;
  r.seed = seed;
  return r;
}

RateResult adversarial_rate(const RateInputs& in, double gamma_low) {
  check_fraction(in.base_accuracy, "baseline accuracy");
  check_fraction(in.attacked_accuracy, "attacked accuracy");
  check_nonnegative(in.base_robustness, "baseline robustness");
  check_nonnegative(in.attacked_robustness, "attacked robustness");
  RateResult out;
  if (in.base_accuracy > 0.0) out.gamma1 = in.attacked_accuracy / in.base_accuracy;
  if (in.base_robustness > 0.0) out.gamma2 = in.attacked_robustness / in.base_robustness;
  out.failed = in.base_accuracy > 0.0 && out.gamma1 < gamma_low;
  if (in.base_accuracy > 0.0 && in.base_robustness > 0.0)
    out.rate = capped(out.gamma1) * (1.0 - capped(out.gamma2));
  return out;
}

RateResult targeted_rate(TargetKind kind, const RateInputs& in, double gamma_low) {
  check_fraction(in.base_accuracy, "baseline accuracy");
  check_nonnegative(in.base_robustness, "baseline robustness");
  RateResult out;
  const double alpha = in.base_accuracy;
  const double beta = in.base_robustness;
  bool defined = true;
  auto ratio = [&](double num, double den) {
    if (den > 0.0) return num / den;
    defined = false;
    return 0.0;
  };
  switch (kind) {
    case TargetKind::single_sample: {
      check_fraction(in.attacked_accuracy, "attacked accuracy");
      check_nonnegative(in.attacked_robustness, "attacked robustness");
      out.gamma1 = ratio(in.attacked_accuracy, alpha);
      out.gamma2 = ratio(in.attacked_robustness, beta);
      if (defined) out.rate = 1.0 - capped(out.gamma2);
      break;
    }
    case TargetKind::label_robustness: {
      const double other = need(in.other_robustness, "other_robustness");
      const double target = need(in.target_robustness, "target_robustness");
      check_fraction(in.attacked_accuracy, "attacked accuracy");
      out.gamma1 = ratio(in.attacked_accuracy, alpha);
      out.gamma2 = ratio(other, beta);
      out.gamma3 = ratio(target, beta);
      break;
    }
    case TargetKind::direct: {
      const double other_acc = need(in.other_accuracy, "other_accuracy");
      const double other_rob = need(in.other_robustness, "other_robustness");
      const double target_acc = need(in.target_accuracy, "target_accuracy");
      out.gamma1 = ratio(other_acc, alpha);
      out.gamma2 = ratio(other_rob, beta);
      out.gamma3 = ratio(target_acc, alpha);
      break;
    }
  }
  if (kind != TargetKind::single_sample && defined)
    out.rate = capped(out.gamma1) * capped(out.gamma2) * (1.0 - capped(out.gamma3));
  out.failed = alpha > 0.0 && out.gamma1 < gamma_low;
  return out;
}

}  // namespace advparam
