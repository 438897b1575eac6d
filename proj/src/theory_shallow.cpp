#include "advparam/errors.hpp"
#include "advparam/numeric.hpp"
#include "advparam/theory.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace advparam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_shallow(const ModelParams& params) {
  params.validate();
  if (params.hidden_count() != 1) throw UsageError("construction needs exactly one hidden layer");
}

double logit_gap(const Vector& z) { return z.maxCoeff() - z.minCoeff(); }

// Largest max_{i,j} |F_i - F_j| found in the L-inf ball of radius a around x:
// random probes, then sign ascent on the current extreme pair.
double estimate_gap(const ModelParams& params, const Vector& x, double a, const ProbeOptions& opt,
                    std::mt19937_64& rng) {
  double best = logit_gap(logits(params, x));
  if (a <= 0.0) return best;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vector start = x;
  for (int p = 0; p < opt.random_probes; ++p) {
    Vector q = x;
    for (Index i = 0; i < q.size(); ++i) q(i) += a * unit(rng);
    const double g = logit_gap(logits(params, q));
    if (g > best) {
      best = g;
      start = q;
    }
  }
  for (const Vector& origin : {Vector(x), start}) {
    Vector cur = origin;
    const double step = a / 4.0;
    for (int t = 0; t < opt.pgd_steps; ++t) {
      const Vector z = logits(params, cur);
      Index hi = 0, lo = 0;
      z.maxCoeff(&hi);
      z.minCoeff(&lo);
      const Matrix jac = input_jacobian(params, cur).jacobian;
      const Vector g = (jac.row(hi) - jac.row(lo)).transpose();
      for (Index i = 0; i < cur.size(); ++i) {
        const double s = (g(i) > 0.0) - (g(i) < 0.0);
        cur(i) = clamp_within(cur(i) + step * s, x(i), a);
      }
      best = std::max(best, logit_gap(logits(params, cur)));
    }
  }
  return best;
}

double min_row_separation(const Matrix& w2) {
  double c = kInf;
  for (Index i = 0; i < w2.rows(); ++i)
    for (Index j = i + 1; j < w2.rows(); ++j)
      c = std::min(c, min_abs_norm((w2.row(i) - w2.row(j)).transpose()));
  return c;
}

Vector hidden_at(const ModelParams& params, const Vector& x) {
  return (params.layers[0].weight * x + params.layers[0].bias).unaryExpr(&relu);
}

double active_fraction(const Vector& h, double b) {
  return static_cast<double>((h.array() > b).count()) / static_cast<double>(h.size());
}

double width_threshold(double safety, double A, double budget_term, double b, double c,
                       double eta) {
  const double floor_term = std::min(budget_term, b);
  const double den = floor_term * c * eta;
  if (!(den > 0.0)) return kInf;
  return 2.0 * safety * A / den;
}

// Picks (b, eta) minimizing the threshold; eta is the smallest active
// fraction over the given activation vectors.
void choose_floor(ShallowConditions& cond, const std::vector<Vector>& hidden, double budget_term,
                  const std::optional<double>& fixed_b) {
  auto eta_at = [&](double b) {
    double eta = 1.0;
    for (const auto& h : hidden) eta = std::min(eta, active_fraction(h, b));
    return eta;
  };
  auto& p = cond.params;
  if (fixed_b) {
    p.b = *fixed_b;
    p.eta = eta_at(p.b);
  } else {
    std::vector<double> values;
    for (const auto& h : hidden)
      for (Index i = 0; i < h.size(); ++i)
        if (h(i) > 0.0) values.push_back(h(i));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    // Thin out long candidate lists; the threshold is piecewise monotone.
    const std::size_t stride = std::max<std::size_t>(1, values.size() / 512);
    double best = kInf;
    p.b = 0.0;
    p.eta = 0.0;
    for (std::size_t i = 0; i < values.size(); i += stride) {
      const double b = values[i] * (1.0 - 1e-9);
      const double eta = eta_at(b);
      const double t = width_threshold(cond.safety, cond.a_estimate, budget_term, b, p.c, eta);
      if (t < best) {
        best = t;
        p.b = b;
        p.eta = eta;
      }
    }
  }
  cond.threshold =
      width_threshold(cond.safety, cond.a_estimate, budget_term, p.b, p.c, p.eta);
}

void judge(ShallowConditions& cond) {
  const auto& p = cond.params;
  cond.failing.clear();
  if (!(p.c > 0.0))
    cond.failing = "row separation c > 0";
  else if (!(p.b > 0.0 && p.eta > 0.0))
    cond.failing = "active fraction eta > 0 above floor b > 0";
  else if (!(p.gamma > 0.0 && p.eps > 0.0))
    cond.failing = "positive budgets gamma and eps";
  else if (!(static_cast<double>(cond.width) > cond.threshold))
    cond.failing = "width above threshold";
  cond.satisfied = cond.failing.empty();
}

std::string describe(const ShallowConditions& cond) {
  std::ostringstream os;
  os << "A~" << cond.a_estimate << " c=" << cond.params.c << " b=" << cond.params.b
     << " eta=" << cond.params.eta << " width=" << cond.width << " threshold=" << cond.threshold;
  return os.str();
}

double sign_of(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

int strongest_competitor(const Vector& z, int label) {
  int best = -1;
  for (Index l = 0; l < z.size(); ++l)
    if (l != label && (best < 0 || z(l) > z(best))) best = static_cast<int>(l);
  return best;
}

double max_logit_change(const ModelParams& a, const ModelParams& b, const Vector& x) {
  return (logits(a, x) - logits(b, x)).cwiseAbs().maxCoeff();
}

}  // namespace

ShallowConditions theorem1_conditions(const ModelParams& params, const Vector& x0, double gamma,
                                      double eps, const ProbeOptions& probe) {
  require_shallow(params);
  if (x0.size() != params.input_dim()) throw ShapeError("x0 dimension mismatch");
  ShallowConditions cond;
  auto& p = cond.params;
  p.gamma = gamma;
  p.eps = eps;
  p.a = probe.a > 0.0 ? probe.a : eps;
  std::mt19937_64 rng(probe.seed);
  cond.a_estimate = estimate_gap(params, x0, p.a, probe, rng);
  p.A = cond.safety * cond.a_estimate;
  p.c = min_row_separation(params.layers[1].weight);
  cond.width = params.layers[0].weight.rows();
  const double n = static_cast<double>(x0.size());
  choose_floor(cond, {hidden_at(params, x0)}, eps * gamma * (n - 1.0), probe.b);
  judge(cond);
  return cond;
}

ConstructionTrace theorem1_construct(const ModelParams& params, const Sample& x0, double gamma,
                                     double eps, std::optional<int> target_class,
                                     const ProbeOptions& probe) {
  require_shallow(params);
  if (!(gamma >= 0.0) || !(eps >= 0.0)) throw UsageError("gamma and eps must be >= 0");
  const Vector z0 = logits(params, x0.x);
  if (argmax_label(z0) != x0.label) throw UsageError("x0 is misclassified");
  ConstructionTrace tr;
  tr.attacked = params;
  if (gamma == 0.0) return tr;

  tr.conditions = theorem1_conditions(params, x0.x, gamma, eps, probe);
  ShallowConditions& cond = tr.conditions;
  if (!cond.satisfied) throw ConditionError(cond.failing, describe(cond));

  const Index n1 = cond.width;
  const double b = cond.params.b;
  tr.witness = orthogonal_unit_vector(x0.x);
  const Vector& w = tr.witness;

  // Keep the sign for which enough units stay above the floor.
  const double need = cond.params.eta * static_cast<double>(n1) / 2.0;
  const auto above = [&](double s) {
    return static_cast<double>((hidden_at(params, x0.x + s * eps * w).array() > b).count());
  };
  const double up = above(1.0), down = above(-1.0);
  if (up >= need)
    tr.direction_sign = 1.0;
  else if (down >= need)
    tr.direction_sign = -1.0;
  else
    throw ConditionError("active units at x0 +- eps v", describe(cond));
  tr.direction = tr.direction_sign * w;

  // The probes only give a lower estimate of A; fold in the point we use.
  const Vector adv = x0.x + eps * tr.direction;
  const double gap_here = logit_gap(logits(params, adv));
  if (gap_here > cond.a_estimate) {
    cond.a_estimate = gap_here;
    cond.params.A = cond.safety * gap_here;
    const double n = static_cast<double>(x0.x.size());
    cond.threshold = width_threshold(cond.safety, cond.a_estimate, eps * gamma * (n - 1.0), b,
                                     cond.params.c, cond.params.eta);
    judge(cond);
    if (!cond.satisfied) throw ConditionError(cond.failing, describe(cond));
  }

  const Matrix& w2 = params.layers[1].weight;
  tr.target_class = target_class ? *target_class : strongest_competitor(z0, x0.label);
  if (tr.target_class < 0 || tr.target_class >= w2.rows() || tr.target_class == x0.label)
    throw UsageError("invalid target class");
  const Vector w2bar = -(w2.row(x0.label) - w2.row(tr.target_class)).transpose();
  tr.unit_signs = w2bar.unaryExpr(&sign_of);

  Matrix& w1 = tr.attacked.layers[0].weight;
  const Matrix& w1_orig = params.layers[0].weight;
  for (Index i = 0; i < n1; ++i)
    for (Index j = 0; j < w1.cols(); ++j)
      w1(i, j) = clamp_within(w1_orig(i, j) + tr.unit_signs(i) * gamma * tr.direction(j),
                              w1_orig(i, j), gamma);

  tr.clean_residual = max_logit_change(tr.attacked, params, x0.x);
  tr.budget_used = max_abs_diff(tr.attacked, params);
  const Vector before = logits(params, adv), after = logits(tr.attacked, adv);
  tr.margin_before = before(x0.label) - before(tr.target_class);
  tr.margin_after = after(x0.label) - after(tr.target_class);
  tr.adversarial_found = argmax_label(after) != x0.label;
  tr.adversarial_fraction = tr.adversarial_found ? 1.0 : 0.0;
  tr.guarantee = true;
  return tr;
}

ConstructionTrace theorem2_construct(const ModelParams& params, std::span<const Sample> protected_set,
                                     double gamma, double eps, const ProbeOptions& probe) {
  require_shallow(params);
  if (protected_set.empty()) throw UsageError("empty protected set");
  if (!(gamma >= 0.0) || !(eps >= 0.0)) throw UsageError("gamma and eps must be >= 0");
  const Index n = params.input_dim();
  const Index m = params.output_dim();
  const Index n1 = params.layers[0].weight.rows();

  Matrix X(n, static_cast<Index>(protected_set.size()));
  for (std::size_t i = 0; i < protected_set.size(); ++i) {
    if (protected_set[i].x.size() != n) throw ShapeError("protected sample dimension mismatch");
    X.col(static_cast<Index>(i)) = protected_set[i].x;
  }
  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double tol = sv.size() ? sv(0) * 1e-10 * static_cast<double>(std::max(X.rows(), X.cols()))
                               : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) rank += sv(i) > tol;
  if (rank > n - m) {
    std::ostringstream os;
    os << "dim span(S) = " << rank << " > n - m = " << n - m;
    throw ConditionError("protected-set dimension", os.str());
  }

  ConstructionTrace tr;
  tr.attacked = params;
  if (gamma == 0.0) return tr;
  for (Index l = 0; l < m; ++l) tr.directions.push_back(svd.matrixU().col(rank + l));

  // Conditions over the whole set: largest gap, smallest active fraction.
  ShallowConditions& cond = tr.conditions;
  auto& p = cond.params;
  p.gamma = gamma;
  p.eps = eps;
  p.a = probe.a > 0.0 ? probe.a : eps;
  std::mt19937_64 rng(probe.seed);
  std::vector<Vector> hidden;
  for (const auto& s : protected_set) {
    cond.a_estimate = std::max(cond.a_estimate, estimate_gap(params, s.x, p.a, probe, rng));
    hidden.push_back(hidden_at(params, s.x));
  }
  p.A = cond.safety * cond.a_estimate;
  p.c = min_row_separation(params.layers[1].weight);
  cond.width = n1;
  const double budget_term = eps * gamma / static_cast<double>(m);
  choose_floor(cond, hidden, budget_term, probe.b);
  judge(cond);
  tr.guarantee = cond.satisfied;

  // Per-class sign: the majority vote of which side keeps enough units active.
  const double need = p.eta * static_cast<double>(n1) / 2.0;
  std::vector<double> class_sign(static_cast<std::size_t>(m), 1.0);
  for (Index l = 0; l < m; ++l) {
    int votes = 0;
    for (const auto& s : protected_set) {
      if (s.label != l) continue;
      const auto count = [&](double sg) {
        return static_cast<double>(
            (hidden_at(params, s.x + sg * eps * tr.directions[l]).array() > p.b).count());
      };
      votes += count(1.0) >= need ? 1 : (count(-1.0) >= need ? -1 : 0);
    }
    class_sign[static_cast<std::size_t>(l)] = votes >= 0 ? 1.0 : -1.0;
    tr.directions[l] *= class_sign[static_cast<std::size_t>(l)];
  }

  const Matrix& w2 = params.layers[1].weight;
  Matrix delta = Matrix::Zero(n1, n);
  for (Index l = 0; l < m; ++l) {
    const Index next = (l + 1) % m;
    const Vector signs = (-(w2.row(l) - w2.row(next))).transpose().unaryExpr(&sign_of);
    delta += (gamma / static_cast<double>(m)) * signs * tr.directions[l].transpose();
  }
  Matrix& w1 = tr.attacked.layers[0].weight;
  const Matrix& w1_orig = params.layers[0].weight;
  for (Index i = 0; i < n1; ++i)
    for (Index j = 0; j < n; ++j)
      w1(i, j) = clamp_within(w1_orig(i, j) + delta(i, j), w1_orig(i, j), gamma);

  tr.budget_used = max_abs_diff(tr.attacked, params);
  std::size_t correct = 0, adversarial = 0;
  for (const auto& s : protected_set) {
    tr.clean_residual = std::max(tr.clean_residual, max_logit_change(tr.attacked, params, s.x));
    if (classify(params, s.x) != s.label) continue;
    ++correct;
    const Vector& v = tr.directions[static_cast<std::size_t>(s.label)];
    if (classify(tr.attacked, s.x + eps * v) != s.label ||
        classify(tr.attacked, s.x - eps * v) != s.label)
      ++adversarial;
  }
  tr.adversarial_fraction =
      correct ? static_cast<double>(adversarial) / static_cast<double>(correct) : 0.0;
  tr.adversarial_found = adversarial > 0;
  return tr;
}

ModelParams conditioned_shallow_net(const ConditionedNetSpec& spec, std::span<const Vector> centers) {
  const Index n = spec.input_dim;
  const int m = spec.classes;
  if (n < 1 || m < 2 || spec.pairs < 0) throw UsageError("invalid conditioned net spec");
  if (!(spec.scale > 0.0) || !(spec.spread > spec.scale))
    throw UsageError("conditioned net needs 0 < scale < spread");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit01(0.0, 1.0), sym(-1.0, 1.0);

  std::vector<Vector> mu(centers.begin(), centers.end());
  if (mu.empty())
    for (int l = 0; l < m; ++l) mu.push_back(Vector::NullaryExpr(n, [&] { return unit01(rng); }));
  if (static_cast<int>(mu.size()) != m) throw UsageError("need one center per class");

  const Index n1 = 2 * m + 2 * spec.pairs;
  ModelParams p;
  p.layers.resize(2);
  Matrix& w1 = p.layers[0].weight;
  Vector& b1 = p.layers[0].bias;
  Matrix& w2 = p.layers[1].weight;
  Vector& b2 = p.layers[1].bias;
  w1.resize(n1, n);
  b1.resize(n1);
  w2 = Matrix::Zero(m, n1);
  b2 = Vector::Zero(m);
  const Vector ramp = Vector::LinSpaced(m, 0.0, static_cast<double>(m - 1));

  Index unit = 0;
  for (int l = 0; l < m; ++l) {
    // Pre-activation mu.x - |mu|^2/2 + lift stays >= 1 on [-0.5, 1.5]^n.
    if ((mu[l].array() < 0.0).any()) throw UsageError("centers must be nonnegative");
    const double lift = 0.5 * mu[l].squaredNorm() + 0.5 * mu[l].sum() + 1.0;
    const double bias = -0.5 * mu[l].squaredNorm() + lift;
    for (int copy = 0; copy < 2; ++copy, ++unit) {
      w1.row(unit) = mu[l].transpose();
      b1(unit) = bias;
      w2.col(unit) = copy == 0 ? Vector(spec.spread * ramp) : Vector(-spec.spread * ramp);
    }
    w2(l, unit - 2) += spec.scale;
    b2(l) -= spec.scale * lift;
  }
  for (Index k = 0; k < spec.pairs; ++k) {
    const Vector r = Vector::NullaryExpr(n, [&] { return sym(rng); }) / std::sqrt(double(n));
    const double bias = 1.5 * r.lpNorm<1>() + 1.0;
    for (int copy = 0; copy < 2; ++copy, ++unit) {
      w1.row(unit) = r.transpose();
      b1(unit) = bias;
      w2.col(unit) = copy == 0 ? Vector(spec.spread * ramp) : Vector(-spec.spread * ramp);
    }
  }
  p.validate();
  return p;
}

}  // namespace advparam
