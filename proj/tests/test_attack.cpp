#include "advparam/attack.hpp"
#include "advparam/dataset.hpp"
#include "advparam/errors.hpp"
#include "advparam/train.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <algorithm>

using namespace advparam;
using namespace testing;

namespace {

struct Setup {
  LabeledDataset data;
  ModelParams model;
};

const Setup& trained() {
  static const Setup s = [] {
    BlobSpec spec;
    spec.dim = 5;
    spec.classes = 3;
    spec.per_class = 20;
    spec.seed = 11;
    Setup out;
    out.data = gen_blobs(spec);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.pgd = PgdConfig::with_eps(0.05);
    const std::vector<Index> dims{5, 12, 3};
    out.model = train_standard(ModelParams::random_init(dims, 4), out.data, cfg).params;
    return out;
  }();
  return s;
}

AttackConfig quick_config() {
  AttackConfig cfg;
  cfg.pgd = PgdConfig::with_eps(0.05, 5);
  cfg.n1 = 3;
  cfg.n2 = 5;
  cfg.alpha = 0.2;
  return cfg;
}

std::vector<double> sorted_entries(const Matrix& m) {
  std::vector<double> v(m.data(), m.data() + m.size());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_SUITE("attack") {

TEST_CASE("pgd adversary examples") {
  const auto p = make_net({mat(2, 1, {1, -1})}, {vec({0, 1})});
  PgdConfig zero = PgdConfig::with_eps(0.1);
  zero.eps = 0.0;
  CHECK(pgd_adversary(p, vec({0.52}), 0, zero) == vec({0.52}));
  const auto out = pgd_search(p, vec({0.52}), 0, PgdConfig::with_eps(0.05, 10));
  CHECK(out.flipped);
  CHECK(classify(p, out.point) == 1);
  CHECK(std::abs(out.point(0) - 0.52) <= 0.05);
}

TEST_CASE("pgd stays in the ball and the cube and never lowers the loss") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto p = random_mlp(rng, 10);
    const Vector x = uniform_point(p.input_dim(), rng);
    const int label = static_cast<int>(rng() % 3);
    const auto cfg = PgdConfig::with_eps(0.1, 5);
    const Vector adv = pgd_adversary(p, x, label, cfg);
    CHECK((adv - x).cwiseAbs().maxCoeff() <= 0.1);
    CHECK(adv.minCoeff() >= 0.0);
    CHECK(adv.maxCoeff() <= 1.0);
    CHECK(cross_entropy(logits(p, adv), label) >= cross_entropy(logits(p, x), label));
  }
}

TEST_CASE("loss_at bounds") {
  const auto& s = trained();
  PgdConfig zero = PgdConfig::with_eps(0.1);
  zero.eps = 0.0;
  const double clean = param_gradient(s.model, s.data.view(), LossKind::cross_entropy).loss;
  CHECK(loss_at(s.model, s.data.view(), zero) == doctest::Approx(clean).epsilon(1e-12));
  CHECK(loss_at(s.model, s.data.view(), PgdConfig::with_eps(0.1)) >= clean);
  CHECK_THROWS_AS(loss_at(s.model, std::span<const Sample>(), zero), UsageError);
}

TEST_CASE("linear loss at a box corner") {
  // Logit gap 0.5 x1 - 0.25 x2 + 0.2; the worst point in the ball is a corner.
  const auto p = make_net({mat(2, 2, {0.5, -0.25, 0, 0})}, {vec({0.2, 0})});
  const std::vector<Sample> s{{vec({0.5, 0.5}), 0}};
  const Vector corner = vec({0.4, 0.6});
  CHECK(loss_at(p, s, PgdConfig::with_eps(0.1, 10)) ==
        doctest::Approx(cross_entropy(logits(p, corner), 0)).epsilon(1e-12));
}

TEST_CASE("proj_box examples") {
  auto center = make_net({mat(2, 1, {0.0, 1.0})}, {vec({0, 0})});
  auto delta = make_net({mat(2, 1, {0.1, 0.1})}, {vec({0, 0})});
  auto cand = make_net({mat(2, 1, {0.15, 1.05})}, {vec({0, 0})});
  const auto out = proj_box(cand, center, delta);
  CHECK(out.layers[0].weight(0, 0) == 0.1);
  CHECK(out.layers[0].weight(1, 0) == 1.05);
  CHECK(proj_box(out, center, delta) == out);
  CHECK(within_box(out, center, delta));
  CHECK_FALSE(within_box(cand, center, delta));
  auto other = make_net({mat(3, 1, {0, 0, 0})}, {vec({0, 0, 0})});
  CHECK_THROWS_AS(proj_box(other, center, delta), UsageError);
}

TEST_CASE("proj_box is idempotent and exact on random input") {
  std::mt19937_64 rng(22);
  const auto c = random_mlp(rng, 8);
  auto b = budget_linf_gamma(c, 0.07);
  ModelParams cand = c;
  std::normal_distribution<double> n(0.0, 0.1);
  for (auto blk : cand.blocks())
    for (double& v : blk) v += n(rng);
  const auto once = proj_box(cand, c, b.delta);
  CHECK(proj_box(once, c, b.delta) == once);
  CHECK(within_box(once, c, b.delta));
}

TEST_CASE("budget_linf_gamma examples") {
  const auto p = make_net({mat(2, 1, {2, -4})}, {vec({1, 1})});
  const auto b = budget_linf_gamma(p, 0.1);
  CHECK(b.delta.layers[0].weight(0, 0) == doctest::Approx(0.2));
  CHECK(b.delta.layers[0].weight(1, 0) == doctest::Approx(0.4));
  CHECK(budget_linf_gamma(p, 0.0).delta.max_abs() == 0.0);
  const auto ones = make_net({mat(2, 1, {1, 1})}, {vec({1, 1})});
  CHECK(budget_linf_gamma(ones, 0.05).delta.max_abs() == 0.05);
  CHECK_THROWS_AS(budget_linf_gamma(p, -0.1), UsageError);
}

TEST_CASE("attack_linf with no iterations or no budget is the identity") {
  const auto& s = trained();
  AttackConfig cfg = quick_config();
  cfg.n1 = cfg.n2 = 0;
  const auto a = attack_linf(s.model, s.data.view(), budget_linf_gamma(s.model, 0.1), cfg);
  CHECK(a.params == s.model);
  CHECK(*a.rate.rate == 0.0);
  const auto b = attack_linf(s.model, s.data.view(), budget_linf_gamma(s.model, 0.0), quick_config());
  CHECK(b.params == s.model);
  CHECK(*b.rate.rate == 0.0);
}

TEST_CASE("attack_linf stays in the box and is deterministic") {
  const auto& s = trained();
  for (double gamma : {0.02, 0.1, 0.3}) {
    const auto budget = budget_linf_gamma(s.model, gamma);
    const auto a = attack_linf(s.model, s.data.view(), budget, quick_config());
    const auto b = attack_linf(s.model, s.data.view(), budget, quick_config());
    CHECK(within_box(a.params, s.model, budget.delta));
    CHECK(a.params == b.params);
    CHECK(a.trace.size() == 8);
    CHECK(a.failed == a.rate.failed);
  }
}

TEST_CASE("pre-phase raises the adversarial loss") {
  const auto& s = trained();
  AttackConfig cfg = quick_config();
  cfg.n1 = 5;
  cfg.n2 = 0;
  cfg.alpha = 0.1;
  const auto a = attack_linf(s.model, s.data.view(), budget_linf_gamma(s.model, 0.1), cfg);
  CHECK(loss_at(a.params, s.data.view(), cfg.pgd) >= loss_at(s.model, s.data.view(), cfg.pgd));
}

TEST_CASE("gradient step rule and minibatches stay in the box") {
  const auto& s = trained();
  AttackConfig cfg = quick_config();
  cfg.step_rule = StepRule::gradient;
  cfg.batch_size = 7;
  cfg.direction = StepDirection::ascent;
  const auto budget = budget_linf_gamma(s.model, 0.05);
  const auto a = attack_linf(s.model, s.data.view(), budget, cfg);
  CHECK(within_box(a.params, s.model, budget.delta));
}

TEST_CASE("attack config validation") {
  AttackConfig cfg;
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = AttackConfig{};
  cfg.n1 = -1;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = AttackConfig{};
  cfg.pgd.eps = 0.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}

TEST_CASE("toy swap follows the first-order rule") {
  // L = 3 w1 + w2, so g = (3, 1).
  Matrix g(2, 1);
  g << 3, 1;
  Matrix w(2, 1);
  w << 2, 1;
  std::mt19937_64 rng(1);
  std::size_t skipped = 0;
  std::vector<SwapRecord> log;
  CHECK(swap_pass(w, g, 1, rng, 50, 0, skipped, &log) == 1);
  CHECK(w(0, 0) == 1.0);
  CHECK(w(1, 0) == 2.0);
  CHECK(3 * w(0, 0) + w(1, 0) == 5.0);
  CHECK(log.at(0).directional_derivative() < 0.0);

  // From (1, 2) the rule refuses: (3 - 1)(1 - 2) < 0.
  CHECK(swap_pass(w, g, 1, rng, 50, 0, skipped, &log) == 0);
  CHECK(skipped == 1);
  CHECK(w(0, 0) == 1.0);
}

TEST_CASE("all-equal matrix admits no swap") {
  Matrix w = Matrix::Constant(3, 3, 0.5);
  Matrix g = Matrix::Random(3, 3);
  std::mt19937_64 rng(2);
  std::size_t skipped = 0;
  CHECK(swap_pass(w, g, 4, rng, 50, 0, skipped) == 0);
  CHECK(skipped == 4);
}

TEST_CASE("l0 attack preserves every matrix multiset") {
  const auto& s = trained();
  for (int k : {1, 2}) {
    AttackConfig cfg = quick_config();
    cfg.seed = static_cast<std::uint64_t>(k);
    const auto r = attack_l0(s.model, s.data.view(), PerturbBudget::l0(k, 0.2, 2), cfg);
    CHECK(r.touched.size() == static_cast<std::size_t>(k));
    for (std::size_t l = 0; l < s.model.layers.size(); ++l) {
      CHECK(sorted_entries(r.params.layers[l].weight) == sorted_entries(s.model.layers[l].weight));
      CHECK(r.params.layers[l].bias == s.model.layers[l].bias);
      const bool touched = std::find(r.touched.begin(), r.touched.end(), static_cast<int>(l)) != r.touched.end();
      if (!touched) CHECK(r.params.layers[l].weight == s.model.layers[l].weight);
    }
    CHECK(r.swap_log.size() == r.swaps);
    for (const auto& rec : r.swap_log) CHECK(rec.directional_derivative() < 0.0);
  }
}

TEST_CASE("l0 budget validation") {
  const auto& s = trained();
  CHECK_THROWS_AS(attack_l0(s.model, s.data.view(), PerturbBudget::l0(3, 0.1), quick_config()), UsageError);
  CHECK_THROWS_AS(attack_l0(s.model, s.data.view(), PerturbBudget::l0(1, 0.6), quick_config()), UsageError);
  CHECK_THROWS_AS(attack_l0(s.model, s.data.view(), budget_linf_gamma(s.model, 0.1), quick_config()), UsageError);
}

TEST_CASE("targeted attacks reject degenerate sets and do nothing without budget") {
  const auto& s = trained();
  const auto only = s.data.with_label(1);
  CHECK_THROWS_AS(attack_label(s.model, only, 1, budget_linf_gamma(s.model, 0.1), quick_config()), UsageError);
  CHECK_THROWS_AS(attack_direct(s.model, s.data.without_label(1), 1, budget_linf_gamma(s.model, 0.1), quick_config()),
                  UsageError);
  const auto z = budget_linf_gamma(s.model, 0.0);
  const auto a = attack_label(s.model, s.data.view(), 1, z, quick_config());
  CHECK(a.params == s.model);
  CHECK(a.rate.rate.value_or(0.0) == 0.0);
  const auto d = attack_direct(s.model, s.data.view(), 1, z, quick_config());
  CHECK(d.params == s.model);
  CHECK(d.rate.rate.value_or(0.0) == 0.0);
}

TEST_CASE("targeted attacks stay in the box") {
  const auto& s = trained();
  const auto budget = budget_linf_gamma(s.model, 0.1);
  const auto a = attack_label(s.model, s.data.view(), 0, budget, quick_config());
  const auto d = attack_direct(s.model, s.data.view(), 2, budget, quick_config());
  CHECK(within_box(a.params, s.model, budget.delta));
  CHECK(within_box(d.params, s.model, budget.delta));
  CHECK(a.inputs.target_robustness.has_value());
  CHECK(d.inputs.target_accuracy.has_value());
}

TEST_CASE("single-sample attack") {
  const auto& s = trained();
  const Sample* good = nullptr;
  const Sample* bad = nullptr;
  for (const auto& x : s.data.samples) {
    if (classify(s.model, x.x) == x.label && !good) good = &x;
    if (classify(s.model, x.x) != x.label && !bad) bad = &x;
  }
  REQUIRE(good);
  const auto z = attack_single(s.model, *good, budget_linf_gamma(s.model, 0.0), quick_config());
  CHECK(z.params == s.model);
  CHECK(z.rate.rate.value_or(0.0) == 0.0);
  const auto r = attack_single(s.model, *good, budget_linf_gamma(s.model, 0.1), quick_config());
  CHECK(within_box(r.params, s.model, budget_linf_gamma(s.model, 0.1).delta));
  if (bad)
    CHECK_THROWS_AS(attack_single(s.model, *bad, budget_linf_gamma(s.model, 0.1), quick_config()), UsageError);
  Sample wrong = *good;
  wrong.label = (wrong.label + 1) % 3;
  CHECK_THROWS_AS(attack_single(s.model, wrong, budget_linf_gamma(s.model, 0.1), quick_config()), UsageError);
}

TEST_CASE("random controls respect the budget") {
  const auto& s = trained();
  const auto budget = budget_linf_gamma(s.model, 0.1);
  const auto r = random_perturbation(s.model, s.data.view(), budget, quick_config());
  CHECK(within_box(r.params, s.model, budget.delta));
  CHECK_FALSE(r.params == s.model);
  const auto l0 = random_perturbation(s.model, s.data.view(), PerturbBudget::l0(2, 0.1), quick_config());
  for (std::size_t l = 0; l < s.model.layers.size(); ++l)
    CHECK(sorted_entries(l0.params.layers[l].weight) == sorted_entries(s.model.layers[l].weight));
}

}  // TEST_SUITE
