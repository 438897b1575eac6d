#include "advparam/dataset.hpp"
#include "advparam/errors.hpp"
#include "advparam/metrics.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <cmath>

using namespace advparam;
using namespace testing;

namespace {

// F(x) = (x, 1 - x): class 0 wins for x > 0.5.
ModelParams threshold_net() { return make_net({mat(2, 1, {1, -1})}, {vec({0, 1})}); }

// F(x) = (x_1, 0) on two inputs.
ModelParams linear_net() { return make_net({mat(2, 2, {1, 0, 0, 0})}, {vec({0, 0})}); }

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("accuracy counts correct labels") {
  const auto p = threshold_net();
  const std::vector<Sample> s{{vec({0.9}), 0}, {vec({0.8}), 0}, {vec({0.1}), 1}, {vec({0.2}), 0}};
  CHECK(accuracy(p, s) == 0.75);
  const std::vector<Sample> flipped{{vec({0.9}), 1}, {vec({0.1}), 0}};
  CHECK(accuracy(p, flipped) == 0.0);
  CHECK_THROWS_AS(accuracy(p, std::span<const Sample>()), UsageError);
}

TEST_CASE("radius bracket on the threshold net contains the exact radius") {
  const auto p = threshold_net();
  const auto b = robust_radius_bracket(p, {vec({0.7}), 0}, Norm::linf, 1e-4, PgdConfig::with_eps(0.1, 20));
  CHECK(b.lower <= 0.2);
  CHECK(b.upper >= 0.2);
  CHECK(b.upper - b.lower <= 1e-4);
  const auto wrong = robust_radius_bracket(p, {vec({0.7}), 1}, Norm::linf, 1e-4, PgdConfig::with_eps(0.1));
  CHECK(wrong.lower == 0.0);
  CHECK(wrong.upper == 0.0);
}

TEST_CASE("radius bracket on a linear classifier matches margin over dual norm") {
  // Logit gap 0.8 x1 - 0.4 x2 + 0.1, dual (L1) norm 1.2.
  const auto p = make_net({mat(2, 2, {0.8, -0.4, 0, 0})}, {vec({0.1, 0})});
  const Sample s{vec({0.5, 0.5}), 0};
  const double closed = (0.8 * 0.5 - 0.4 * 0.5 + 0.1) / 1.2;
  const auto b = robust_radius_bracket(p, s, Norm::linf, 1e-5, PgdConfig::with_eps(0.1, 40));
  CHECK(b.lower <= closed + 1e-12);
  CHECK(b.upper >= closed - 1e-12);
  CHECK(approx_radius(p, s).value == doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("unflippable sample yields an exhausted bracket") {
  const auto p = make_net({mat(2, 1, {0, 0})}, {vec({1, 0})});
  const auto b = robust_radius_bracket(p, {vec({0.5}), 0}, Norm::linf, 1e-3, PgdConfig::with_eps(0.1));
  CHECK(b.exhausted);
  CHECK(std::isinf(b.upper));
}

TEST_CASE("approximate radius examples") {
  const auto p = linear_net();
  CHECK(approx_radius(p, {vec({0.5, 0.5}), 0}).value == 0.5);
  CHECK(approx_radius(p, {vec({0.5, 0.5}), 1}).value == 0.0);
  const auto tie = make_net({mat(2, 2, {1, 2, 1, 2})}, {vec({0, 0})});
  CHECK(approx_radius(tie, {vec({0.3, 0.3}), 0}).value == 0.0);
}

TEST_CASE("identical gradients give the unbounded sentinel") {
  const auto p = make_net({mat(2, 2, {1, 1, 1, 1})}, {vec({0.5, 0})});
  const auto r = approx_radius(p, {vec({0.2, 0.2}), 0});
  CHECK(r.unbounded);
  const std::vector<Sample> s{{vec({0.2, 0.2}), 0}};
  const auto avg = avg_approx_radius(p, s);
  CHECK(avg.unbounded == 1);
  CHECK(avg.counted == 0);
}

TEST_CASE("squared margin examples and scale invariance") {
  const auto p = linear_net();
  CHECK(squared_margin_measure(p, {vec({0.5, 0.5}), 0}).value == 0.25);
  CHECK(squared_margin_measure(p, {vec({0.5, 0.5}), 1}).value == 0.0);
  std::mt19937_64 rng(1);
  const auto q = random_mlp(rng, 8);
  const Vector x = uniform_point(q.input_dim(), rng);
  const Sample s{x, classify(q, x)};
  auto scaled = q;
  scaled.layers.back().weight *= 3.0;
  scaled.layers.back().bias *= 3.0;
  CHECK(squared_margin_measure(scaled, s).value ==
        doctest::Approx(squared_margin_measure(q, s).value).epsilon(1e-12));
  CHECK(approx_radius(scaled, s).value == doctest::Approx(approx_radius(q, s).value).epsilon(1e-12));
}

TEST_CASE("average radius and distributional measure") {
  const auto p = linear_net();
  const std::vector<Sample> one{{vec({0.5, 0.5}), 0}};
  CHECK(avg_approx_radius(p, one).mean == 0.5);
  const std::vector<Sample> two{{vec({0.4, 0.5}), 0}, {vec({0.5, 0.5}), 1}};
  CHECK(avg_approx_radius(p, two).mean == doctest::Approx(0.2));
  CHECK(*dist_robust_measure(p, one) == doctest::Approx(0.25));
  const std::vector<Sample> doubled{one[0], one[0]};
  CHECK(*dist_robust_measure(p, doubled) == doctest::Approx(0.25));
  const std::vector<Sample> wrong{{vec({0.5, 0.5}), 1}};
  CHECK(*dist_robust_measure(p, wrong) == 0.0);
  const auto flat = make_net({mat(2, 2, {0, 0, 0, 0})}, {vec({1, 0})});
  CHECK_FALSE(dist_robust_measure(flat, one).has_value());
}

TEST_CASE("adversarial accuracy behaves with the budget") {
  const auto p = threshold_net();
  const std::vector<Sample> s{{vec({0.9}), 0}, {vec({0.6}), 0}, {vec({0.3}), 1}, {vec({0.45}), 0}};
  PgdConfig zero = PgdConfig::with_eps(0.1);
  zero.eps = 0.0;
  CHECK(adversarial_accuracy(p, s, zero) == accuracy(p, s));
  CHECK(adversarial_accuracy(p, s, PgdConfig::with_eps(0.5, 20)) == 0.0);
  std::mt19937_64 rng(2);
  BlobSpec spec;
  spec.dim = 4;
  spec.per_class = 20;
  const auto data = gen_blobs(spec);
  const std::vector<Index> dims{4, 8, 3};
  const auto q = ModelParams::random_init(dims, 3);
  double prev = 1.0;
  for (double eps : {0.0, 0.02, 0.05, 0.1, 0.2}) {
    PgdConfig cfg = PgdConfig::with_eps(eps, 10);
    const double aa = adversarial_accuracy(q, data.view(), cfg);
    CHECK(aa <= accuracy(q, data.view()));
    CHECK(aa <= prev);
    prev = aa;
  }
}

TEST_CASE("robustness report invariants") {
  BlobSpec spec;
  spec.dim = 4;
  spec.per_class = 10;
  const auto data = gen_blobs(spec);
  const std::vector<Index> dims{4, 8, 3};
  const auto q = ModelParams::random_init(dims, 3);
  const auto r = evaluate_robustness(q, data, PgdConfig::with_eps(0.05), 9);
  CHECK(r.adversarial_accuracy <= r.accuracy);
  CHECK(r.radii.size() == data.size());
  for (std::size_t i = 0; i < r.radii.size(); ++i) {
    CHECK(r.radii[i].value >= 0.0);
    if (classify(q, data.samples[i].x) != data.samples[i].label) CHECK(r.radii[i].value == 0.0);
  }
}

TEST_CASE("adversarial rate reproduces reference rows") {
  CHECK(*adversarial_rate(RateInputs::of(77.0 / 80, 8.0 / 45, 77.0 / 80, 8.0 / 45)).rate == 0.0);
  const auto t4 = adversarial_rate(RateInputs::of(80.0 / 80, 45.0 / 100, 77.0 / 80, 8.0 / 100));
  CHECK(*t4.rate == doctest::Approx(0.9625 * (1 - 8.0 / 45)).epsilon(1e-12));
  CHECK(std::abs(*t4.rate - 0.79) <= 0.005);
  const auto t2 = adversarial_rate(RateInputs::of(0.8, 0.45, 0.8, 0.39));
  CHECK(std::abs(*t2.rate - 0.13) <= 0.005);
  const auto aar = adversarial_rate(RateInputs::of(0.8, 0.0770, 0.76, 0.0195));
  CHECK(std::abs(*aar.rate - 0.71) <= 0.005);
  CHECK(*adversarial_rate(RateInputs::of(0.8, 0.5, 0.8, 0.0)).rate == 1.0);
}

TEST_CASE("adversarial rate edge cases") {
  CHECK_FALSE(adversarial_rate(RateInputs::of(0.8, 0.0, 0.8, 0.0)).rate.has_value());
  CHECK(adversarial_rate(RateInputs::of(1.0, 0.5, 0.85, 0.1)).failed);
  CHECK_FALSE(adversarial_rate(RateInputs::of(1.0, 0.5, 0.9, 0.1)).failed);
  CHECK(*adversarial_rate(RateInputs::of(0.5, 0.2, 0.9, 0.4)).rate == 0.0);
  CHECK_THROWS_AS(adversarial_rate(RateInputs::of(1.2, 0.5, 0.9, 0.1)), UsageError);
}

TEST_CASE("targeted rates") {
  RateInputs single = RateInputs::of(1.0, 0.078, 1.0, 0.016);
  CHECK(std::abs(*targeted_rate(TargetKind::single_sample, single).rate - 0.79) <= 0.006);

  RateInputs direct = RateInputs::of(0.8, 0.45, 0.0, 0.0);
  direct.other_accuracy = 0.8;
  direct.other_robustness = 0.45;
  direct.target_accuracy = 0.01;
  CHECK(std::abs(*targeted_rate(TargetKind::direct, direct).rate - 0.99) <= 0.005);

  RateInputs label = RateInputs::of(0.8, 0.45, 0.8, 0.0);
  label.other_robustness = 0.3;
  label.target_robustness = 0.45;
  CHECK(*targeted_rate(TargetKind::label_robustness, label).rate == 0.0);

  RateInputs missing = RateInputs::of(0.8, 0.45, 0.8, 0.0);
  CHECK_THROWS_AS(targeted_rate(TargetKind::direct, missing), UsageError);
  CHECK_THROWS_AS(targeted_rate(TargetKind::label_robustness, missing), UsageError);
}

}  // TEST_SUITE
