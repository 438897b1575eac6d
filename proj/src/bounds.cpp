#include "advparam/errors.hpp"
#include "advparam/theory.hpp"

#include <cmath>

namespace advparam {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || std::isinf(v)) throw UsageError(std::string(name) + " must be positive");
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || std::isinf(v)) throw UsageError(std::string(name) + " must be >= 0");
}

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw UsageError(std::string(name) + " must lie in (0, 1)");
}

// Smallest integer L with L >= bound (or L > bound when strict), at least 1.
DepthThreshold depth(double bound, bool strict) {
  DepthThreshold t;
  t.bound = bound;
  double l = strict ? std::floor(bound) + 1.0 : std::ceil(bound);
  t.min_depth = static_cast<int>(std::max(1.0, l));
  return t;
}

}  // namespace

double bound_eta_thm3(double gamma, int L, double r, double c, double b, double A) {
  require_positive(A, "A");
  require_nonnegative(gamma, "gamma");
  if (L < 1) throw UsageError("L must be >= 1");
  const double s = std::sin(r);
  const double q = gamma * gamma *
                   ((L - 1) * std::pow(s * c * b, 2) + c * c + std::pow(2.0 * s * b, 2));
  return q / (4.0 * A + q);
}

double bound_rho_thm4(double gamma, const LayerConstants& k) {
  require_positive(k.A, "A");
  require_nonnegative(gamma, "gamma");
  const std::size_t L = k.c.size();
  if (L == 0 || k.d.size() != L || k.alpha.size() != L || k.beta.size() != L ||
      k.gamma.size() != L)
    throw UsageError("per-layer constants must all have length L >= 1");
  double p = std::pow(gamma * k.c[0], 2) * k.alpha[0] * k.gamma[0];
  for (std::size_t i = 1; i < L; ++i)
    p += std::pow(gamma * k.c[i] * k.d[i - 1], 2) * k.gamma[i] * (k.alpha[i] + k.beta[i - 1] - 1.0);
  p += k.beta[L - 1] * std::pow(k.d[L - 1] * gamma, 2);
  return p / (4.0 * k.A + p);
}

double bound_rho_uniform(double gamma, int L, const UniformConstants& k) {
  if (L < 1) throw UsageError("L must be >= 1");
  LayerConstants per;
  per.A = k.A;
  per.c.assign(static_cast<std::size_t>(L), k.c);
  per.d.assign(static_cast<std::size_t>(L), k.d);
  per.alpha.assign(static_cast<std::size_t>(L), k.alpha);
  per.beta.assign(static_cast<std::size_t>(L), k.beta);
  per.gamma.assign(static_cast<std::size_t>(L), k.gamma_low);
  return bound_rho_thm4(gamma, per);
}

DepthThreshold depth_for_rate(double rho, double A, double gamma, double r, double c, double b) {
  require_open_unit(rho, "rho");
  require_positive(A, "A");
  const double q = std::pow(gamma * std::sin(r) * c * b, 2);
  require_positive(q, "(gamma sin r c b)^2");
  return depth(4.0 * (1.0 - rho) * A / (rho * q) + 1.0, false);
}

DepthThreshold depth_for_measure(double tau, double R, double A, double gamma, double r, double c,
                                 double b) {
  require_positive(tau, "tau");
  if (!(tau < R)) throw UsageError("tau must be below the current measure R");
  require_positive(A, "A");
  const double q = std::pow(gamma * std::sin(r) * c * b, 2);
  require_positive(q, "(gamma sin r c b)^2");
  return depth(4.0 * A * (R / tau - 1.0) / q + 1.0, true);
}

namespace {
double dist_rate_term(double gamma, const UniformConstants& k) {
  require_positive(k.A, "A");
  if (!(k.alpha + k.beta - 1.0 > 0.0)) throw UsageError("alpha + beta - 1 must be positive");
  const double q = std::pow(gamma * k.c * k.d, 2) * k.gamma_low * (k.alpha + k.beta - 1.0);
  require_positive(q, "(gamma c d)^2 gamma_low (alpha + beta - 1)");
  return q;
}
}  // namespace

DepthThreshold depth_for_rate_dist(double rho, double gamma, const UniformConstants& k) {
  require_open_unit(rho, "rho");
  const double q = dist_rate_term(gamma, k);
  return depth(1.0 + 4.0 * (1.0 - rho) * k.A / (rho * q), true);
}

DepthThreshold depth_for_measure_dist(double tau, double R, double gamma, const UniformConstants& k) {
  require_positive(tau, "tau");
  if (!(tau < R)) throw UsageError("tau must be below the current measure R");
  const double q = dist_rate_term(gamma, k);
  return depth(4.0 * k.A * (R / tau - 1.0) / q + 1.0, true);
}

}  // namespace advparam
