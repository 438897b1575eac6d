#pragma once

#include "advparam/network.hpp"

namespace advparam {

enum class Norm { l1, l2, linf };

/// Dual exponent: 1/p + 1/q = 1.
Norm dual(Norm p);
double norm_of(const Vector& v, Norm p);

struct PgdConfig {
  double eps = 8.0 / 255.0;
  int steps = 10;
  double step = 2.0 / 255.0;

  /// PGD-`steps` with step eps/4, the usual adversarial-training setting.
  static PgdConfig with_eps(double eps, int steps = 10);
};

struct PgdOutcome {
  Vector point;        // iterate with the largest cross-entropy (x itself if none improved)
  double loss = 0.0;   // cross-entropy at `point`
  bool flipped = false;  // some visited point (including x) was not classified as `label`
};

/// Projected sign-gradient ascent on the cross-entropy inside the eps-ball
/// around x (L-inf or L2), intersected with [0,1]^n. Starts at x, so the
/// returned loss is never below the clean loss. Deterministic.
PgdOutcome pgd_search(const ModelParams& params, const Vector& x, int label, const PgdConfig& cfg,
                      Norm norm = Norm::linf);

/// The adversarial input x' = x + chi_0 with ||chi_0||_inf <= eps.
Vector pgd_adversary(const ModelParams& params, const Vector& x, int label, const PgdConfig& cfg);

}  // namespace advparam
