#include "advparam/errors.hpp"
#include "advparam/metrics.hpp"
#include "advparam/numeric.hpp"
#include "advparam/theory.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace advparam {

SignSearch lemma_m2_signs(std::span<const Matrix> U, std::span<const Matrix> u) {
  const std::size_t K = U.size();
  if (K == 0 || K > 16) throw UsageError("lemma_m2_signs supports 1 to 16 factors");
  if (u.size() != K) throw UsageError("U and u lists differ in length");
  for (std::size_t i = 0; i < K; ++i) {
    if (U[i].rows() != u[i].rows() || U[i].cols() != u[i].cols())
      throw ShapeError("U_l and u_l differ in shape");
    if (i + 1 < K && U[i].cols() != U[i + 1].rows()) throw ShapeError("factors do not chain");
  }
  auto product = [&](auto&& factor) {
    Matrix p = factor(0);
    for (std::size_t i = 1; i < K; ++i) p = p * factor(i);
    return p;
  };

  SignSearch out;
  out.bound = product([&](std::size_t i) { return U[i]; }).squaredNorm();
  for (std::size_t l = 0; l < K; ++l)
    out.bound += product([&](std::size_t i) { return i == l ? u[i] : U[i]; }).squaredNorm();

  out.value = -1.0;
  const std::uint32_t patterns = std::uint32_t{1} << K;
  for (std::uint32_t mask = 0; mask < patterns; ++mask) {
    const double v = product([&](std::size_t i) -> Matrix {
                       return (mask >> i) & 1 ? Matrix(U[i] - u[i]) : Matrix(U[i] + u[i]);
                     }).squaredNorm();
    if (v > out.value) {
      out.value = v;
      out.signs.assign(K, 1);
      for (std::size_t i = 0; i < K; ++i)
        if ((mask >> i) & 1) out.signs[i] = -1;
    }
  }
  return out;
}

namespace {

// v orthogonal to f with ||v||_inf = gamma maximizing ||v^T B||_2 over a few
// witnesses: B's leading left singular vector and columns, projected off f.
Vector null_direction(const Matrix& B, const Vector& f, double gamma, bool first_layer) {
  const double ff = f.squaredNorm();
  auto project = [&](Vector u) {
    if (ff > 0.0) u -= (u.dot(f) / ff) * f;
    return u;
  };
  std::vector<Vector> candidates;
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU);
  for (Index i = 0; i < std::min<Index>(svd.matrixU().cols(), 2); ++i)
    candidates.push_back(project(svd.matrixU().col(i)));
  for (Index j = 0; j < B.cols(); ++j) candidates.push_back(project(B.col(j)));
  if (first_layer && ff > 0.0) candidates.push_back(orthogonal_unit_vector(f));

  Vector best = Vector::Zero(f.size());
  double best_score = -1.0;
  for (auto& c : candidates) {
    const double inf = c.lpNorm<Eigen::Infinity>();
    if (!(inf > 1e-12)) continue;
    Vector v = (gamma / inf) * c;
    for (Index i = 0; i < v.size(); ++i) v(i) = clamp_within(v(i), 0.0, gamma);
    const double score = (B.transpose() * v).norm();
    if (score > best_score) {
      best_score = score;
      best = std::move(v);
    }
  }
  return best;
}

double max_layer_change(const ForwardTrace& a, const ForwardTrace& b) {
  double r = (a.logits - b.logits).cwiseAbs().maxCoeff();
  for (std::size_t l = 0; l < a.hidden.size(); ++l)
    r = std::max(r, (a.hidden[l] - b.hidden[l]).cwiseAbs().maxCoeff());
  return r;
}

}  // namespace

InflationTrace gradient_inflation_attack(const ModelParams& params, const Sample& x0, double gamma) {
  params.validate();
  const std::size_t L = params.hidden_count();
  const Index n = params.input_dim();
  if (L < 1) throw UsageError("needs at least one hidden layer");
  for (std::size_t l = 0; l <= L; ++l) {
    if (l < L && (params.layers[l].weight.rows() != n || params.layers[l].weight.cols() != n))
      throw UsageError("hidden layers must be square");
    if ((params.layers[l].bias.array() != 0.0).any()) throw UsageError("network must be bias-free");
  }
  if (!(gamma >= 0.0)) throw UsageError("gamma must be >= 0");
  const ForwardTrace base = forward(params, x0.x);
  if (argmax_label(base.logits) != x0.label) throw UsageError("x0 is misclassified");

  InflationTrace tr;
  tr.attacked = params;
  tr.measure_before = squared_margin_measure(params, x0).value;
  tr.measure_after = tr.measure_before;
  if (gamma == 0.0) return tr;

  const GradientDecomposition dec = input_jacobian(params, x0.x);
  const Vector& z = base.logits;
  // Class attaining the measure.
  double best = std::numeric_limits<double>::infinity();
  for (Index l = 0; l < z.size(); ++l) {
    if (l == x0.label) continue;
    const double margin = z(x0.label) - z(l);
    const double g2 = (dec.jacobian.row(x0.label) - dec.jacobian.row(l)).squaredNorm();
    const double term = g2 > 0.0 ? margin * margin / g2 : std::numeric_limits<double>::infinity();
    if (tr.target_class < 0 || term < best) {
      best = term;
      tr.target_class = static_cast<int>(l);
    }
  }
  const int lx = x0.label, l2 = tr.target_class;
  const Matrix& w_out = params.layers[L].weight;
  const Matrix d = w_out.row(lx) - w_out.row(l2);  // 1 x n

  // Factors left to right: d, J_L W_L, ..., J_1 W_1.
  std::vector<Matrix> U, u;
  U.push_back(d);
  const Vector v_out = null_direction(dec.from_input[L - 1], base.hidden[L - 1], gamma, false);
  u.push_back(2.0 * v_out.transpose());
  std::vector<Vector> hidden_dirs(L);
  tr.rows.assign(L, 0);
  for (std::size_t k = L; k-- > 0;) {
    const Vector& act = dec.active[k];
    const Matrix JW = act.asDiagonal() * params.layers[k].weight;
    const Vector weight_row = (d * dec.to_last_hidden[k]).transpose().cwiseProduct(act);
    Index row = 0;
    weight_row.cwiseAbs().maxCoeff(&row);
    tr.rows[k] = row;
    const Matrix B = k == 0 ? Matrix(Matrix::Identity(n, n)) : dec.from_input[k - 1];
    const Vector& f = k == 0 ? x0.x : base.hidden[k - 1];
    hidden_dirs[k] = null_direction(B, f, gamma, k == 0);
    Matrix pert = Matrix::Zero(n, n);
    pert.row(row) = hidden_dirs[k].transpose();
    U.push_back(JW);
    u.push_back(act.asDiagonal() * pert);
  }
  tr.signs = lemma_m2_signs(U, u);

  auto put = [](double& w, double center, double delta, double budget) {
    w = clamp_within(center + delta, center, budget);
  };
  Matrix& out = tr.attacked.layers[L].weight;
  const double s_out = tr.signs.signs[0];
  for (Index j = 0; j < n; ++j) {
    put(out(lx, j), w_out(lx, j), s_out * v_out(j), gamma);
    put(out(l2, j), w_out(l2, j), -s_out * v_out(j), gamma);
  }
  for (std::size_t k = 0; k < L; ++k) {
    const double s = tr.signs.signs[L - k];
    const Index row = tr.rows[k];
    Matrix& w = tr.attacked.layers[k].weight;
    const Matrix& w0 = params.layers[k].weight;
    for (Index j = 0; j < n; ++j) put(w(row, j), w0(row, j), s * hidden_dirs[k](j), gamma);
  }
  tr.directions = hidden_dirs;
  tr.directions.push_back(v_out);

  tr.layer_residual = max_layer_change(forward(tr.attacked, x0.x), base);
  tr.budget_used = max_abs_diff(tr.attacked, params);
  tr.measure_after = squared_margin_measure(tr.attacked, x0).value;
  return tr;
}

}  // namespace advparam
