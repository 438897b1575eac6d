#include "advparam/dataset.hpp"
#include "advparam/errors.hpp"
#include "advparam/metrics.hpp"
#include "advparam/theory.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <cmath>
#include <numeric>

using namespace advparam;
using namespace testing;

namespace {

double sum_abs(const Vector& v, const std::vector<Index>& idx) {
  double s = 0.0;
  for (Index i : idx) s += std::abs(v(i));
  return s;
}

void check_orthogonal_properties(const Vector& v) {
  const Vector w = orthogonal_unit_vector(v);
  const double n = static_cast<double>(v.size());
  CHECK(std::abs(w.dot(v)) <= 1e-12 * std::max(1.0, v.lpNorm<1>()));
  CHECK(w.lpNorm<Eigen::Infinity>() == 1.0);
  CHECK(w.norm() >= std::sqrt(n - 1.0) - 1e-12);
}

struct Instance {
  ModelParams net;
  Sample x0;
};

// Conditioned net with enough filler units for the single-sample construction.
Instance conditioned_instance(Index pairs) {
  ConditionedNetSpec spec;
  spec.input_dim = 8;
  spec.classes = 3;
  spec.pairs = pairs;
  const auto net = conditioned_shallow_net(spec);
  std::mt19937_64 rng(3);
  const Vector x = uniform_point(8, rng);
  return {net, {x, classify(net, x)}};
}

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("orthogonal vector examples") {
  const Vector w = orthogonal_unit_vector(vec({1, 1}));
  CHECK(w.dot(vec({1, 1})) == 0.0);
  CHECK(w.cwiseAbs() == vec({1, 1}));
  const Vector e = orthogonal_unit_vector(vec({1, 0, 0}));
  CHECK(e.dot(vec({1, 0, 0})) == 0.0);
  CHECK(e.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(orthogonal_unit_vector(Vector::Zero(3)), UsageError);
}

TEST_CASE("balanced partition examples") {
  const auto a = balanced_partition(vec({3, 1, 1}));
  CHECK(a.k == 1.0);
  CHECK(a.j == 0);
  CHECK(a.exhaustive);
  CHECK(balanced_partition(vec({5, 1})).k == 4.0);
  CHECK(balanced_partition(vec({1, 1})).k == 0.0);
  CHECK(balanced_partition(vec({2, 2, 2, 3, 3})).k == 0.0);
}

TEST_CASE("partition invariants hold in both modes") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Index n : {3, 10, 24, 25, 40}) {
    for (int t = 0; t < 10; ++t) {
      Vector v = Vector::NullaryExpr(n, [&] { return u(rng); });
      const auto p = balanced_partition(v);
      CHECK(p.exhaustive == (n <= kExhaustivePartitionLimit));
      std::vector<Index> rest;
      std::vector<bool> in(static_cast<std::size_t>(n), false);
      for (Index i : p.set) in[static_cast<std::size_t>(i)] = true;
      for (Index i = 0; i < n; ++i)
        if (!in[static_cast<std::size_t>(i)]) rest.push_back(i);
      const double diff = sum_abs(v, p.set) - sum_abs(v, rest);
      CHECK(diff >= -1e-12);
      CHECK(std::abs(diff - p.k) <= 1e-12);
      REQUIRE(p.j >= 0);
      CHECK(in[static_cast<std::size_t>(p.j)]);
      CHECK(p.k <= std::abs(v(p.j)) + 1e-12);
    }
  }
}

TEST_CASE("exhaustive partition is optimal on small inputs") {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> u(1, 20);
  for (int t = 0; t < 30; ++t) {
    const Index n = 2 + static_cast<Index>(t % 8);
    Vector v = Vector::NullaryExpr(n, [&] { return double(u(rng)); });
    double best = 1e300;
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
      double s = 0.0;
      for (Index i = 0; i < n; ++i) s += ((m >> i) & 1) ? v(i) : -v(i);
      best = std::min(best, std::abs(s));
    }
    CHECK(balanced_partition(v).k == best);
  }
}

TEST_CASE("orthogonal vector properties over random inputs") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0.0, 1.0);
  std::bernoulli_distribution zero(0.2);
  for (int t = 0; t < 200; ++t) {
    const Index n = 2 + static_cast<Index>(t % 49);
    Vector v = Vector::NullaryExpr(n, [&] { return zero(rng) ? 0.0 : g(rng); });
    if (v.isZero()) v(0) = 1.0;
    check_orthogonal_properties(v);
  }
}

TEST_CASE("zero budget returns the network unchanged") {
  const auto inst = conditioned_instance(16);
  const auto tr = theorem1_construct(inst.net, inst.x0, 0.0, 0.1);
  CHECK(tr.attacked == inst.net);
  CHECK(tr.budget_used == 0.0);
}

TEST_CASE("single-sample construction keeps x0 and flips its neighbor") {
  const auto inst = conditioned_instance(64);
  const double gamma = 0.1, eps = 0.1;
  const auto cond = theorem1_conditions(inst.net, inst.x0.x, gamma, eps);
  CHECK(cond.params.c > 0.0);
  REQUIRE_MESSAGE(cond.satisfied, cond.failing);
  const auto tr = theorem1_construct(inst.net, inst.x0, gamma, eps);
  CHECK(tr.budget_used <= gamma);
  CHECK(tr.clean_residual <= 1e-9);
  CHECK(classify(tr.attacked, inst.x0.x) == inst.x0.label);
  CHECK(std::abs(tr.direction.dot(inst.x0.x)) <= 1e-12);
  CHECK(tr.direction.lpNorm<Eigen::Infinity>() == 1.0);
  CHECK(tr.adversarial_found);
  CHECK(classify(tr.attacked, inst.x0.x + eps * tr.direction) != inst.x0.label);
  CHECK(tr.margin_after < tr.margin_before);
}

TEST_CASE("single-sample construction names the failing condition") {
  const auto inst = conditioned_instance(0);
  try {
    theorem1_construct(inst.net, inst.x0, 1e-6, 1e-6);
    FAIL("expected ConditionError");
  } catch (const ConditionError& e) {
    CHECK(e.condition() == "width above threshold");
  }
  Sample wrong = inst.x0;
  wrong.label = (wrong.label + 1) % 3;
  CHECK_THROWS_AS(theorem1_construct(inst.net, wrong, 0.1, 0.1), UsageError);
  const std::vector<Index> deep{8, 4, 4, 3};
  CHECK_THROWS_AS(theorem1_construct(ModelParams::random_init(deep, 1), inst.x0, 0.1, 0.1),
                  UsageError);
}

TEST_CASE("eta counts units strictly above the floor") {
  const auto inst = conditioned_instance(8);
  ProbeOptions probe;
  probe.b = 0.5;
  const auto cond = theorem1_conditions(inst.net, inst.x0.x, 0.1, 0.1, probe);
  // Every unit of the conditioned net sits at >= 1 on the cube.
  CHECK(cond.params.eta == 1.0);
  probe.b = 1e9;
  CHECK(theorem1_conditions(inst.net, inst.x0.x, 0.1, 0.1, probe).params.eta == 0.0);
}

TEST_CASE("protected-set construction refuses a spanning set") {
  const auto net = conditioned_instance(8).net;
  std::vector<Sample> s;
  for (Index i = 0; i < 8; ++i) {
    Vector x = Vector::Constant(8, 0.1);
    x(i) = 0.9;
    s.push_back({x, classify(net, x)});
  }
  try {
    theorem2_construct(net, s, 0.1, 0.1);
    FAIL("expected ConditionError");
  } catch (const ConditionError& e) {
    CHECK(e.condition() == "protected-set dimension");
  }
  CHECK_THROWS_AS(theorem2_construct(net, std::span<const Sample>(), 0.1, 0.1), UsageError);
}

TEST_CASE("protected-set construction on subspace data") {
  SubspaceSpec ss;
  ss.dim = 8;
  ss.classes = 3;
  ss.intrinsic_dim = 3;
  ss.per_class = 10;
  const auto data = gen_subspace_task(ss);
  std::vector<Vector> centers(3, Vector::Zero(8));
  std::vector<int> counts(3, 0);
  for (const auto& s : data.samples) {
    centers[static_cast<std::size_t>(s.label)] += s.x;
    ++counts[static_cast<std::size_t>(s.label)];
  }
  for (int l = 0; l < 3; ++l) centers[static_cast<std::size_t>(l)] /= counts[static_cast<std::size_t>(l)];
  ConditionedNetSpec spec;
  spec.input_dim = 8;
  spec.pairs = 128;
  const auto net = conditioned_shallow_net(spec, centers);
  const double gamma = 0.1;
  const auto tr = theorem2_construct(net, data.view(), gamma, 0.1);
  CHECK(tr.budget_used <= gamma);
  CHECK(tr.clean_residual <= 1e-9);
  REQUIRE(tr.directions.size() == 3);
  for (const auto& v : tr.directions)
    for (const auto& s : data.samples) CHECK(std::abs(v.dot(s.x)) <= 1e-9);
  for (const auto& s : data.samples) CHECK(classify(tr.attacked, s.x) == classify(net, s.x));
}

TEST_CASE("sign search beats the analytic bound") {
  const std::vector<Matrix> U{mat(1, 1, {2})}, u{mat(1, 1, {1})};
  const auto r = lemma_m2_signs(U, u);
  CHECK(r.value == 9.0);
  CHECK(r.bound == 5.0);
  CHECK(r.signs == std::vector<int>{1});

  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const int K = 1 + t % 5;
    std::vector<Matrix> A, a;
    Index rows = 1 + static_cast<Index>(rng() % 3);
    for (int k = 0; k < K; ++k) {
      const Index cols = 1 + static_cast<Index>(rng() % 3);
      A.push_back(Matrix::NullaryExpr(rows, cols, [&] { return g(rng); }));
      a.push_back(Matrix::NullaryExpr(rows, cols, [&] { return g(rng); }));
      rows = cols;
    }
    const auto s = lemma_m2_signs(A, a);
    CHECK(s.value >= s.bound * (1.0 - 1e-10));
  }

  const std::vector<Matrix> Z{mat(2, 2, {1, 2, 3, 4}), mat(2, 1, {1, -1})};
  const std::vector<Matrix> z{Matrix::Zero(2, 2), Matrix::Zero(2, 1)};
  const auto zr = lemma_m2_signs(Z, z);
  CHECK(zr.value == zr.bound);
  CHECK_THROWS_AS(lemma_m2_signs(Z, std::span<const Matrix>(z.data(), 1)), UsageError);
}

TEST_CASE("gradient inflation keeps every layer output and the budget") {
  std::mt19937_64 rng(41);
  int checked = 0;
  for (int t = 0; t < 40 && checked < 10; ++t) {
    const std::vector<Index> dims{6, 6, 6, 3};
    auto p = ModelParams::random_init(dims, 100 + static_cast<std::uint64_t>(t));
    for (auto& l : p.layers) l.bias.setZero();
    const Vector x = uniform_point(6, rng);
    const Sample s{x, classify(p, x)};
    const double gamma = 0.05;
    const auto zero = gradient_inflation_attack(p, s, 0.0);
    CHECK(zero.attacked == p);
    const auto tr = gradient_inflation_attack(p, s, gamma);
    ++checked;
    CHECK(tr.budget_used <= gamma);
    CHECK(tr.layer_residual <= 1e-9);
    CHECK(classify(tr.attacked, x) == s.label);
    CHECK(tr.signs.value >= tr.signs.bound * (1.0 - 1e-10));
  }
  CHECK(checked == 10);
}

TEST_CASE("gradient inflation validates the architecture") {
  const std::vector<Index> dims{4, 5, 3};
  auto p = ModelParams::random_init(dims, 1);
  for (auto& l : p.layers) l.bias.setZero();
  const Sample s{Vector::Constant(4, 0.5), 0};
  CHECK_THROWS_AS(gradient_inflation_attack(p, s, 0.1), UsageError);
  const std::vector<Index> square{4, 4, 3};
  auto q = ModelParams::random_init(square, 1);
  q.layers[0].bias(0) = 0.1;
  CHECK_THROWS_AS(gradient_inflation_attack(q, {Vector::Constant(4, 0.5), 0}, 0.1), UsageError);
}

}  // TEST_SUITE
