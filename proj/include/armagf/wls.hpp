#pragma once

#include <string>

#include "armagf/chebyshev.hpp"
#include "armagf/common.hpp"
#include "armagf/design_grid.hpp"

namespace armagf {

/// Linearized-residual regressor d(lambda) = [c_P(lambda); -h_d(lambda) c_Q(lambda)],
/// so that d(lambda)'h - h_d(lambda) is the residual multiplied through by the
/// denominator, with h = [beta; alpha].
inline Vector regressor(double lambda, double hd_value, int p, int q) {
  const auto basis = basis_vectors(lambda, p, q);
  Vector d(p + q + 1);
  d.head(p + 1) = basis.c_p;
  d.tail(q) = -hd_value * basis.c_q;
  return d;
}

/// Iteration weights W_k(lambda) = W(lambda) / (1 + c_Q'(lambda) alpha_{k-1})^2.
/// Zero base weights stay exactly zero. Throws if the previous iterate violates
/// the stability constraint on the grid.
inline Vector update_weights(const Vector& base_w, const Vector& alpha_prev,
                             const DesignGrid& grid, double epsilon) {
  if (base_w.size() != grid.size())
    throw std::invalid_argument("update_weights: weight/grid size mismatch");
  const int q = static_cast<int>(alpha_prev.size());
  Vector w_k(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const auto basis = basis_vectors(grid.lambdas[i], 0, q);
    const double den = 1.0 + basis.c_q.dot(alpha_prev);
    if (den < epsilon)
      throw InfeasibleIterateError(
          "update_weights: previous iterate has denominator " + std::to_string(den) +
          " < epsilon at lambda = " + std::to_string(grid.lambdas[i]));
    w_k[i] = base_w[i] == 0.0 ? 0.0 : base_w[i] / (den * den);
  }
  return w_k;
}

/// Quadratic expansion of the iteration-k objective over the grid,
///   J(h) = h'Q h - 2 q'h + p,
/// together with a factor Qhat satisfying Qhat'Qhat = Q_floored and qhat
/// solving Qhat' qhat = q.
struct QuadraticData {
  Matrix q_mat;          // assembled sum, symmetric
  Vector q_vec;
  double p_scalar = 0.0;
  Matrix q_mat_floored;  // after the spectrum is lifted by the floor
  Matrix q_hat_mat;      // triangular factor of q_mat_floored
  Vector q_hat_vec;
  double eig_floor = 0.0;
};

/// Grid-sum approximations of the weighted quadratic data, factorized after
/// the spectrum is lifted by a scale-relative floor. The lift keeps the
/// factorization and the qhat solve well-posed when the transition band
/// removes grid support.
///
/// The optional anchor turns the lift into a proximal term: the subproblem
/// becomes min h'Qh - 2q'h + floor*||h - anchor||^2, so directions the grid
/// does not determine stay where the previous iterate put them instead of
/// being pulled to zero. Well-supported directions barely feel it either way.
inline QuadraticData assemble_quadratic(const DesignGrid& grid, const Vector& weights,
                                        int p, int q, double eig_floor_rel = 1e-10,
                                        const Vector& anchor = Vector()) {
  if (weights.size() != grid.size())
    throw std::invalid_argument("assemble_quadratic: weight/grid size mismatch");
  if (anchor.size() != 0 && anchor.size() != p + q + 1)
    throw std::invalid_argument("assemble_quadratic: anchor length mismatch");
  const Index n = p + q + 1;
  QuadraticData out;
  out.q_mat = Matrix::Zero(n, n);
  out.q_vec = Vector::Zero(n);
  out.p_scalar = 0.0;
  for (Index j = 0; j < grid.size(); ++j) {
    if (weights[j] == 0.0) continue;
    const Vector d = regressor(grid.lambdas[j], grid.hd[j], p, q);
    out.q_mat.noalias() += weights[j] * (d * d.transpose());
    out.q_vec.noalias() += weights[j] * grid.hd[j] * d;
    out.p_scalar += weights[j] * grid.hd[j] * grid.hd[j];
  }
  // Symmetrize away accumulation noise before factorizing.
  out.q_mat = 0.5 * (out.q_mat + out.q_mat.transpose()).eval();

  const double trace = out.q_mat.trace();
  if (!(trace > 0.0))
    throw RankDeficiencyError("assemble_quadratic: quadratic term vanishes (all weights zero?)");
  out.eig_floor = eig_floor_rel * trace / static_cast<double>(n);

  // Lift the whole spectrum by the floor and factorize. The shift keeps the
  // factorization well-posed where the don't-care band removes grid support,
  // and unlike an eigenbasis clip it is a smooth function of the data, so
  // consecutive iterations see consistent factors. With an anchor the lift
  // acts as a proximal term floor*||h - anchor||^2; without one it is a plain
  // ridge toward zero.
  out.q_mat_floored = out.q_mat;
  out.q_mat_floored.diagonal().array() += out.eig_floor;

  Eigen::LLT<Matrix> llt(out.q_mat_floored);
  if (llt.info() != Eigen::Success)
    throw RankDeficiencyError("assemble_quadratic: factorization failed, grid too sparse");
  out.q_hat_mat = llt.matrixU();

  // qhat from a triangular solve Qhat' qhat = q(+ prox) ; no explicit inverse.
  Vector rhs = out.q_vec;
  if (anchor.size() > 0) rhs += out.eig_floor * anchor;
  out.q_hat_vec =
      out.q_hat_mat.transpose().triangularView<Eigen::Lower>().solve(rhs);
  return out;
}

/// J(h) = h'Qh - 2q'h + p for a stacked coefficient vector h = [beta; alpha].
inline double quadratic_value(const QuadraticData& quad, const Vector& h) {
  return h.dot(quad.q_mat * h) - 2.0 * quad.q_vec.dot(h) + quad.p_scalar;
}

/// The true nonconvex weighted squared error of the rational response over the
/// grid (not the linearized residual).
inline double true_objective(const ArmaChebFilter& filter, const DesignGrid& grid) {
  double sse = 0.0;
  for (Index i = 0; i < grid.size(); ++i) {
    if (grid.w[i] == 0.0) continue;
    const double h = freq_response(filter, grid.lambdas[i]);
    sse += grid.w[i] * (h - grid.hd[i]) * (h - grid.hd[i]);
  }
  return sse;
}

/// Split a stacked [beta; alpha] vector into a filter.
inline ArmaChebFilter filter_from_stacked(const Vector& h, int p, int q, double epsilon) {
  if (h.size() != p + q + 1)
    throw std::invalid_argument("filter_from_stacked: size mismatch");
  ArmaChebFilter f;
  f.beta = h.head(p + 1);
  f.alpha = h.tail(q);
  f.epsilon = epsilon;
  return f;
}

}  // namespace armagf
