#include "advparam/attack.hpp"

#include "advparam/errors.hpp"
#include "advparam/kernels.hpp"
#include "advparam/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace advparam {

namespace {

constexpr double kDenominatorFloor = 1e-8;

double sign_of(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

// Loss sums over the target-label group and the rest. Untargeted objectives
// put every sample into `other`.
struct Groups {
  double ce_t = 0.0, at_t = 0.0, ce_o = 0.0, at_o = 0.0;
  ModelParams gce_t, gat_t, gce_o, gat_o;
  std::size_t n_t = 0, n_o = 0;
  double acc = 0.0, adv_acc = 0.0;
};

Groups collect(const ModelParams& params, std::span<const Sample> batch, const PgdConfig& pgd,
               std::optional<int> target) {
  const auto terms = kernels::parallel::sample_terms(params, batch, pgd);
  Groups g;
  g.gce_t = g.gat_t = g.gce_o = g.gat_o = params.zeros_like();
  std::size_t correct = 0, robust = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    const bool in_target = target && batch[i].label == *target;
    (in_target ? g.ce_t : g.ce_o) += t.ce;
    (in_target ? g.at_t : g.at_o) += t.at;
    (in_target ? g.gce_t : g.gce_o) += t.g_ce;
    (in_target ? g.gat_t : g.gat_o) += t.g_at;
    ++(in_target ? g.n_t : g.n_o);
    correct += t.correct;
    robust += t.robust;
  }
  g.acc = static_cast<double>(correct) / static_cast<double>(terms.size());
  g.adv_acc = static_cast<double>(robust) / static_cast<double>(terms.size());
  return g;
}

// N / D with D floored; below the floor D is treated as a constant.
LossGradient quotient(double num, const ModelParams& g_num, double den, const ModelParams& g_den) {
  const double d = std::max(den, kDenominatorFloor);
  LossGradient out{num / d, (1.0 / d) * g_num};
  if (den > kDenominatorFloor) out.gradient.axpy(-num / (d * d), g_den);
  return out;
}

LossGradient negated_mean(double sum, const ModelParams& g, std::size_t n) {
  const double k = n ? 1.0 / static_cast<double>(n) : 0.0;
  return {-sum * k, -k * g};
}

using Objective = std::function<LossGradient(const Groups&, int phase)>;

Objective linf_objective() {
  return [](const Groups& g, int phase) {
    if (phase == 1) return negated_mean(g.at_o, g.gat_o, g.n_o);
    return quotient(g.ce_o, g.gce_o, g.at_o, g.gat_o);
  };
}

Objective label_objective() {
  return [](const Groups& g, int phase) {
    if (phase == 1) return negated_mean(g.at_t, g.gat_t, g.n_t);
    ModelParams num_grad = g.gce_t + g.gce_o + g.gat_o;
    return quotient(g.ce_t + g.ce_o + g.at_o, num_grad, g.at_t, g.gat_t);
  };
}

Objective direct_objective() {
  return [](const Groups& g, int phase) {
    if (phase == 1) return negated_mean(g.ce_t, g.gce_t, g.n_t);
    return quotient(g.at_o + g.ce_o, g.gat_o + g.gce_o, g.ce_t, g.gce_t);
  };
}

class BatchSampler {
 public:
  BatchSampler(std::span<const Sample> data, std::size_t batch, std::mt19937_64& rng)
      : data_(data), batch_(batch), rng_(rng), order_(data.size()) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }

  std::span<const Sample> next() {
    if (batch_ == 0 || batch_ >= data_.size()) return data_;
    // Partial Fisher-Yates over the index list.
    current_.clear();
    for (std::size_t i = 0; i < batch_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, order_.size() - 1);
      std::swap(order_[i], order_[pick(rng_)]);
      current_.push_back(data_[order_[i]]);
    }
    return current_;
  }

 private:
  std::span<const Sample> data_;
  std::size_t batch_;
  std::mt19937_64& rng_;
  std::vector<std::size_t> order_;
  std::vector<Sample> current_;
};

double alpha_at(const AttackConfig& cfg, int phase, int main_iter) {
  if (phase == 1) return cfg.alpha;
  const int every = cfg.decay_every > 0 ? cfg.decay_every : std::max(1, cfg.n2 / 4);
  return cfg.alpha * std::pow(cfg.decay, main_iter / every);
}

// theta <- proj(theta - alpha * u), u = grad or delta .* sign(grad).
void box_step(ModelParams& theta, const ModelParams& center, const ModelParams& delta,
              const ModelParams& grad, double alpha, StepRule rule) {
  auto t = theta.blocks();
  const auto g = grad.blocks();
  const auto d = delta.blocks();
  for (std::size_t b = 0; b < t.size(); ++b)
    for (std::size_t i = 0; i < t[b].size(); ++i) {
      const double u = rule == StepRule::sign ? d[b][i] * sign_of(g[b][i]) : g[b][i];
      t[b][i] -= alpha * u;
    }
  theta = proj_box(theta, center, delta);
}

std::vector<int> choose_matrices(const ModelParams& params, int k, std::mt19937_64& rng) {
  std::vector<int> all(params.layers.size());
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(k));
  std::sort(all.begin(), all.end());
  return all;
}

std::size_t pairs_for(const Matrix& w, const PerturbBudget& budget) {
  const auto frac = static_cast<std::size_t>(budget.pair_fraction * static_cast<double>(w.size()));
  return std::max(static_cast<std::size_t>(std::max(budget.pair_floor, 0)), frac);
}

// Share of `total` assigned to iteration t out of `iters`, spreading evenly.
std::size_t share(std::size_t total, int t, int iters) {
  const auto lo = total * static_cast<std::size_t>(t) / static_cast<std::size_t>(iters);
  const auto hi = total * static_cast<std::size_t>(t + 1) / static_cast<std::size_t>(iters);
  return hi - lo;
}

enum class Mode { box, swap };

AttackResult run_loop(const ModelParams& params, std::span<const Sample> train,
                      const PerturbBudget& budget, const AttackConfig& cfg, const Objective& obj,
                      std::optional<int> target, Mode mode) {
  cfg.validate();
  budget.validate(params);
  if (train.empty()) throw UsageError("empty attack set");
  AttackResult res;
  res.params = params;
  std::mt19937_64 rng(cfg.seed);
  BatchSampler sampler(train, cfg.batch_size, rng);

  std::vector<std::size_t> pair_total;
  if (mode == Mode::swap) {
    res.touched = choose_matrices(params, budget.matrices, rng);
    for (int l : res.touched) pair_total.push_back(pairs_for(params.layers[l].weight, budget));
  } else if (budget.delta.max_abs() == 0.0) {
    return res;  // nothing can move
  }

  const int iters = cfg.n1 + cfg.n2;
  for (int it = 0; it < iters; ++it) {
    const int phase = it < cfg.n1 ? 1 : 2;
    const auto batch = sampler.next();
    const Groups g = collect(res.params, batch, cfg.pgd, target);
    LossGradient lg = obj(g, phase);
    res.trace.push_back({it, phase, lg.loss, g.acc, g.adv_acc});
    if (cfg.direction == StepDirection::ascent) lg.gradient *= -1.0;
    if (mode == Mode::box) {
      box_step(res.params, params, budget.delta, lg.gradient, alpha_at(cfg, phase, it - cfg.n1),
               cfg.step_rule);
    } else {
      for (std::size_t m = 0; m < res.touched.size(); ++m) {
        const int l = res.touched[m];
        res.swaps += swap_pass(res.params.layers[l].weight, lg.gradient.layers[l].weight,
                               share(pair_total[m], it, iters), rng, cfg.swap_retries, l,
                               res.skipped, &res.swap_log);
      }
    }
  }
  return res;
}

void finish_untargeted(AttackResult& res, const ModelParams& params, std::span<const Sample> train,
                       const AttackConfig& cfg) {
  res.inputs = measure_rate_inputs(params, res.params, train, cfg.pgd);
  res.rate = adversarial_rate(res.inputs, cfg.gamma_low);
  res.failed = res.rate.failed;
}

void require_label(std::span<const Sample> train, int target) {
  bool has_target = false, has_other = false;
  for (const auto& s : train) (s.label == target ? has_target : has_other) = true;
  if (!has_target) throw UsageError("attack set has no samples of the target label");
  if (!has_other) throw UsageError("attack set has only samples of the target label");
}

}  // namespace

// ---------------------------------------------------------------------------

PerturbBudget PerturbBudget::linf(ModelParams delta, double gamma) {
  PerturbBudget b;
  b.kind = BudgetKind::linf_box;
  b.delta = std::move(delta);
  b.gamma = gamma;
  return b;
}

PerturbBudget PerturbBudget::l0(int matrices, double pair_fraction, int pair_floor) {
  PerturbBudget b;
  b.kind = BudgetKind::l0_swap;
  b.matrices = matrices;
  b.pair_fraction = pair_fraction;
  b.pair_floor = pair_floor;
  return b;
}

void PerturbBudget::validate(const ModelParams& center) const {
  if (kind == BudgetKind::linf_box) {
    if (!delta.same_shape(center)) throw UsageError("budget shape differs from the parameters");
    for (auto block : delta.blocks())
      for (double d : block)
        if (!(d >= 0.0) || std::isinf(d)) throw UsageError("budget entries must be finite and >= 0");
  } else {
    if (matrices < 1 || matrices > static_cast<int>(center.layers.size()))
      throw UsageError("l0 budget touches more matrices than the network has");
    if (!(pair_fraction > 0.0 && pair_fraction <= 0.5))
      throw UsageError("l0 pair fraction must lie in (0, 0.5]");
    if (pair_floor < 0) throw UsageError("l0 pair floor must be >= 0");
  }
}

std::string PerturbBudget::describe() const {
  std::ostringstream os;
  if (kind == BudgetKind::linf_box)
    os << "linf," << gamma;
  else
    os << "l0," << matrices;
  return os.str();
}

PerturbBudget budget_linf_gamma(const ModelParams& theta, double gamma) {
  if (!(gamma >= 0.0) || std::isinf(gamma)) throw UsageError("gamma must be finite and >= 0");
  ModelParams delta = theta;
  for (auto block : delta.blocks())
    for (double& v : block) v = gamma * std::abs(v);
  return PerturbBudget::linf(std::move(delta), gamma);
}

ModelParams proj_box(const ModelParams& candidate, const ModelParams& center,
                     const ModelParams& delta) {
  if (!candidate.same_shape(center) || !delta.same_shape(center))
    throw UsageError("proj_box: shape mismatch");
  ModelParams out = candidate;
  auto o = out.blocks();
  const auto c = center.blocks();
  const auto d = delta.blocks();
  for (std::size_t b = 0; b < o.size(); ++b)
    for (std::size_t i = 0; i < o[b].size(); ++i) {
      if (std::abs(o[b][i] - c[b][i]) <= d[b][i]) continue;
      o[b][i] = clamp_within(o[b][i], c[b][i], d[b][i]);
    }
  return out;
}

bool within_box(const ModelParams& candidate, const ModelParams& center, const ModelParams& delta) {
  if (!candidate.same_shape(center) || !delta.same_shape(center)) return false;
  const auto o = candidate.blocks();
  const auto c = center.blocks();
  const auto d = delta.blocks();
  for (std::size_t b = 0; b < o.size(); ++b)
    for (std::size_t i = 0; i < o[b].size(); ++i)
      if (!(std::abs(o[b][i] - c[b][i]) - d[b][i] <= 0.0)) return false;
  return true;
}

double loss_at(const ModelParams& params, std::span<const Sample> batch, const PgdConfig& cfg) {
  if (batch.empty()) throw UsageError("empty batch");
  const auto outcomes = kernels::parallel::pgd_batch(params, batch, cfg);
  double sum = 0.0;
  for (const auto& o : outcomes) sum += o.loss;
  return sum / static_cast<double>(batch.size());
}

void AttackConfig::validate() const {
  if (n1 < 0 || n2 < 0) throw UsageError("n1 and n2 must be >= 0");
  if (!(pgd.eps > 0.0)) throw UsageError("attack eps must be > 0");
  if (pgd.steps < 0 || !(pgd.step >= 0.0)) throw UsageError("invalid PGD schedule");
  if (!(alpha > 0.0)) throw UsageError("alpha must be > 0");
  if (!(decay > 0.0 && decay <= 1.0)) throw UsageError("decay must lie in (0, 1]");
  if (swap_retries < 1) throw UsageError("swap_retries must be >= 1");
}

double SwapRecord::directional_derivative() const {
  return g_first * (w_second - w_first) + g_second * (w_first - w_second);
}

std::size_t swap_pass(Matrix& w, const Matrix& g, std::size_t pairs, std::mt19937_64& rng,
                      int retries, int matrix_id, std::size_t& skipped,
                      std::vector<SwapRecord>* log) {
  if (w.rows() != g.rows() || w.cols() != g.cols()) throw ShapeError("swap_pass: gradient shape");
  const Index n = w.size();
  if (n < 2) {
    skipped += pairs;
    return 0;
  }
  std::uniform_int_distribution<Index> first(0, n - 1), second(0, n - 2);
  double* wd = w.data();
  const double* gd = g.data();
  std::size_t accepted = 0;
  for (std::size_t p = 0; p < pairs; ++p) {
    bool done = false;
    for (int r = 0; r < retries && !done; ++r) {
      const Index i = first(rng);
      Index j = second(rng);
      if (j >= i) ++j;
      if (!((gd[i] - gd[j]) * (wd[i] - wd[j]) > 0.0)) continue;
      if (log) log->push_back({matrix_id, i, j, gd[i], gd[j], wd[i], wd[j]});
      std::swap(wd[i], wd[j]);
      done = true;
    }
    if (done)
      ++accepted;
    else
      ++skipped;
  }
  return accepted;
}

RateInputs measure_rate_inputs(const ModelParams& base, const ModelParams& attacked,
                               std::span<const Sample> data, const PgdConfig& pgd,
                               std::optional<int> target) {
  RateInputs in;
  in.base_accuracy = accuracy(base, data);
  in.base_robustness = adversarial_accuracy(base, data, pgd);
  in.attacked_accuracy = accuracy(attacked, data);
  in.attacked_robustness = adversarial_accuracy(attacked, data, pgd);
  if (target) {
    std::vector<Sample> tgt, other;
    for (const auto& s : data) (s.label == *target ? tgt : other).push_back(s);
    if (!other.empty()) {
      in.other_accuracy = accuracy(attacked, other);
      in.other_robustness = adversarial_accuracy(attacked, other, pgd);
    }
    if (!tgt.empty()) {
      in.target_accuracy = accuracy(attacked, tgt);
      in.target_robustness = adversarial_accuracy(attacked, tgt, pgd);
    }
  }
  return in;
}

AttackResult attack_linf(const ModelParams& params, std::span<const Sample> train,
                         const PerturbBudget& budget, const AttackConfig& cfg) {
  if (budget.kind != BudgetKind::linf_box) throw UsageError("attack_linf needs a box budget");
  AttackResult res = run_loop(params, train, budget, cfg, linf_objective(), std::nullopt, Mode::box);
  finish_untargeted(res, params, train, cfg);
  return res;
}

AttackResult attack_l0(const ModelParams& params, std::span<const Sample> train,
                       const PerturbBudget& budget, const AttackConfig& cfg) {
  if (budget.kind != BudgetKind::l0_swap) throw UsageError("attack_l0 needs an l0 budget");
  AttackResult res =
      run_loop(params, train, budget, cfg, linf_objective(), std::nullopt, Mode::swap);
  finish_untargeted(res, params, train, cfg);
  return res;
}

AttackResult attack_label(const ModelParams& params, std::span<const Sample> train, int target,
                          const PerturbBudget& budget, const AttackConfig& cfg) {
  if (budget.kind != BudgetKind::linf_box) throw UsageError("attack_label needs a box budget");
  require_label(train, target);
  AttackResult res = run_loop(params, train, budget, cfg, label_objective(), target, Mode::box);
  res.inputs = measure_rate_inputs(params, res.params, train, cfg.pgd, target);
  res.rate = targeted_rate(TargetKind::label_robustness, res.inputs, cfg.gamma_low);
  res.failed = res.rate.failed;
  return res;
}

AttackResult attack_direct(const ModelParams& params, std::span<const Sample> train, int target,
                           const PerturbBudget& budget, const AttackConfig& cfg) {
  if (budget.kind != BudgetKind::linf_box) throw UsageError("attack_direct needs a box budget");
  require_label(train, target);
  AttackResult res = run_loop(params, train, budget, cfg, direct_objective(), target, Mode::box);
  res.inputs = measure_rate_inputs(params, res.params, train, cfg.pgd, target);
  res.rate = targeted_rate(TargetKind::direct, res.inputs, cfg.gamma_low);
  res.failed = res.rate.failed;
  return res;
}

AttackResult attack_single(const ModelParams& params, const Sample& x, const PerturbBudget& budget,
                           const AttackConfig& cfg) {
  if (budget.kind != BudgetKind::linf_box) throw UsageError("attack_single needs a box budget");
  if (classify(params, x.x) != x.label) throw UsageError("sample is misclassified by the baseline");
  const std::span<const Sample> one(&x, 1);
  AttackResult res = run_loop(params, one, budget, cfg, linf_objective(), std::nullopt, Mode::box);
  const bool kept = classify(res.params, x.x) == x.label;
  const RadiusEstimate before = approx_radius(params, x);
  const RadiusEstimate after = approx_radius(res.params, x);
  res.inputs.base_accuracy = 1.0;
  res.inputs.attacked_accuracy = kept ? 1.0 : 0.0;
  res.success = kept && pgd_search(res.params, x.x, x.label, cfg.pgd).flipped;
  if (!before.unbounded && !after.unbounded) {
    res.inputs.base_robustness = before.value;
    res.inputs.attacked_robustness = after.value;
    res.rate = targeted_rate(TargetKind::single_sample, res.inputs, cfg.gamma_low);
  } else {
    res.rate.gamma1 = res.inputs.attacked_accuracy;
  }
  res.rate.failed = !kept;
  res.failed = !kept;
  return res;
}

AttackResult random_perturbation(const ModelParams& params, std::span<const Sample> train,
                                 const PerturbBudget& budget, const AttackConfig& cfg) {
  budget.validate(params);
  if (train.empty()) throw UsageError("empty attack set");
  AttackResult res;
  res.params = params;
  std::mt19937_64 rng(cfg.seed);
  if (budget.kind == BudgetKind::linf_box) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto t = res.params.blocks();
    const auto d = budget.delta.blocks();
    for (std::size_t b = 0; b < t.size(); ++b)
      for (std::size_t i = 0; i < t[b].size(); ++i) t[b][i] += d[b][i] * unit(rng);
    res.params = proj_box(res.params, params, budget.delta);
  } else {
    res.touched = choose_matrices(params, budget.matrices, rng);
    for (int l : res.touched) {
      Matrix& w = res.params.layers[l].weight;
      const Index n = w.size();
      const std::size_t pairs = pairs_for(w, budget);
      if (n < 2) continue;
      std::uniform_int_distribution<Index> first(0, n - 1), second(0, n - 2);
      for (std::size_t p = 0; p < pairs; ++p) {
        const Index i = first(rng);
        Index j = second(rng);
        if (j >= i) ++j;
        std::swap(w.data()[i], w.data()[j]);
        ++res.swaps;
      }
    }
  }
  finish_untargeted(res, params, train, cfg);
  return res;
}

}  // namespace advparam
