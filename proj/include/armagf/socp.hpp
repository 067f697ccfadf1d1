#pragma once

#include <algorithm>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "armagf/common.hpp"
#include "armagf/design_grid.hpp"
#include "armagf/wls.hpp"

namespace armagf {

/// One iteration's cone program in standard form:
///   minimize    f'x
///   subject to  ||A'x + b||_2 <= f'x
///               B'x <= rhs            (stability rows, one per grid point)
/// with x = [eta; h], f = e_0, A = [0 | Qhat]', b = -qhat and B stacking
/// [0; 0_{P+1}; -c_Q(lambda_j)] columns.
struct SocpProblem {
  Vector f;       // length n+1, equals e_0
  Matrix a_mat;   // (n+1) x n
  Vector b_vec;   // length n
  Matrix b_ineq;  // (n+1) x m
  Vector rhs;     // length m

  Index num_vars() const { return f.size(); }        // n+1, including eta
  Index num_coeffs() const { return a_mat.cols(); }  // n = P+Q+1
  Index num_ineq() const { return rhs.size(); }
};

enum class SolveStatus { optimal, max_iterations, infeasible };

inline const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

struct KktResiduals {
  double primal = 0.0;  // largest linear-constraint violation
  double dual = 0.0;    // stationarity residual, infinity norm
  double gap = 0.0;     // mean complementarity s'z/m
};

struct SocpSolution {
  Vector x;  // [eta; h]
  SolveStatus status = SolveStatus::optimal;
  double objective = 0.0;  // eta = ||Qhat h - qhat||_2
  KktResiduals kkt;
  int iterations = 0;
};

struct SolverOptions {
  double tol = 1e-9;
  int max_iter = 100;
  std::ostream* trace = nullptr;  // per-iteration diagnostic lines when set
};

/// Build a standard-form problem from the factored quadratic and explicit
/// inequality data G h <= g (G is m x n).
inline SocpProblem make_socp(const Matrix& q_hat, const Vector& q_hat_vec,
                             const Matrix& g_ineq, const Vector& g_rhs) {
  const Index n = q_hat.cols();
  if (q_hat.rows() != n || q_hat_vec.size() != n)
    throw std::invalid_argument("make_socp: quadratic factor dimensions inconsistent");
  if (g_ineq.cols() != n || g_ineq.rows() != g_rhs.size())
    throw std::invalid_argument("make_socp: inequality dimensions inconsistent");
  SocpProblem prob;
  prob.f = Vector::Zero(n + 1);
  prob.f[0] = 1.0;
  prob.a_mat = Matrix::Zero(n + 1, n);
  prob.a_mat.bottomRows(n) = q_hat.transpose();
  prob.b_vec = -q_hat_vec;
  prob.b_ineq = Matrix::Zero(n + 1, g_rhs.size());
  prob.b_ineq.bottomRows(n) = g_ineq.transpose();
  prob.rhs = g_rhs;
  return prob;
}

/// Assemble the standard-form data for one iteration: cone block from the
/// factored quadratic, stability rows -c_Q(lambda_j)'alpha <= 1-epsilon for
/// every grid point (transition band included; stability must hold on all of
/// [0, 2]).
inline SocpProblem assemble_socp(const QuadraticData& quad, const DesignGrid& grid,
                                 const DesignSpec& spec) {
  const int p = spec.order_p;
  const int q = spec.order_q;
  const Index n = p + q + 1;
  if (quad.q_hat_mat.rows() != n)
    throw std::invalid_argument("assemble_socp: quadratic/order mismatch");
  Matrix g_ineq = Matrix::Zero(grid.size(), n);
  for (Index j = 0; j < grid.size(); ++j) {
    const auto basis = basis_vectors(grid.lambdas[j], 0, q);
    g_ineq.row(j).tail(q) = -basis.c_q.transpose();
  }
  const Vector g_rhs = Vector::Constant(grid.size(), 1.0 - spec.epsilon);
  return make_socp(quad.q_hat_mat, quad.q_hat_vec, g_ineq, g_rhs);
}

struct FeasibilityReport {
  bool feasible = false;
  double max_violation = 0.0;
};

/// Largest violation among the cone constraint and the linear rows.
inline FeasibilityReport check_feasibility(const Vector& x, const SocpProblem& prob,
                                           double tol) {
  if (x.size() != prob.num_vars())
    throw std::invalid_argument("check_feasibility: dimension mismatch");
  const double cone = (prob.a_mat.transpose() * x + prob.b_vec).norm() - prob.f.dot(x);
  double lin = -std::numeric_limits<double>::infinity();
  if (prob.num_ineq() > 0)
    lin = (prob.b_ineq.transpose() * x - prob.rhs).maxCoeff();
  FeasibilityReport rep;
  rep.max_violation = std::max(cone, lin);
  rep.feasible = rep.max_violation <= tol;
  return rep;
}

namespace detail {

// Largest step in [0, 1] keeping v + alpha dv componentwise positive.
inline double max_positive_step(const Vector& v, const Vector& dv) {
  double alpha = 1.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  }
  return alpha;
}

// Active-set purification of an interior-point iterate: solve the
// equality-constrained least-squares problem on the predicted active set by a
// direct factorization and accept the result when it is primal feasible with
// nonnegative multipliers. Interior iterates always sit a complementarity
// offset away from the true optimum; the crossover removes it, which the
// outer fixed-point iteration needs to settle.
struct PurifyResult {
  Vector h;
  bool accepted = false;
};

inline PurifyResult purify(const Matrix& q_hat, const Vector& q_hat_vec, const Matrix& g,
                           const Vector& g_rhs, const Vector& s, const Vector& z) {
  const Index n = q_hat.cols();
  const Index m = g.rows();
  PurifyResult out;

  std::vector<Index> active;
  for (Index i = 0; i < m; ++i) {
    if (z[i] > s[i]) active.push_back(i);  // dual dominates slack: constraint binds
  }
  const Index k = static_cast<Index>(active.size());
  if (k > n) return out;

  Vector h;
  Vector multipliers = Vector::Zero(k);
  if (k == 0) {
    h = q_hat.householderQr().solve(q_hat_vec);
  } else {
    // KKT system of min ||Qhat h - qhat||^2 s.t. G_A h = g_A.
    Matrix kkt = Matrix::Zero(n + k, n + k);
    kkt.topLeftCorner(n, n) = q_hat.transpose() * q_hat;
    Vector rhs(n + k);
    rhs.head(n) = q_hat.transpose() * q_hat_vec;
    for (Index r = 0; r < k; ++r) {
      kkt.block(n + r, 0, 1, n) = g.row(active[r]);
      kkt.block(0, n + r, n, 1) = g.row(active[r]).transpose();
      rhs[n + r] = g_rhs[active[r]];
    }
    Eigen::FullPivLU<Matrix> lu(kkt);
    if (!lu.isInvertible()) return out;
    const Vector sol = lu.solve(rhs);
    h = sol.head(n);
    multipliers = sol.tail(k);
  }

  // Strict primal feasibility: a polished point may never trade constraint
  // satisfaction for objective, or downstream stability certificates break.
  if (m > 0 && (g * h - g_rhs).maxCoeff() > 0.0) return out;
  const double dual_tol = 1e-10 * (1.0 + q_hat_vec.cwiseAbs().maxCoeff());
  if (k > 0 && multipliers.minCoeff() < -dual_tol) return out;
  out.h = h;
  out.accepted = true;
  return out;
}

// Solve M x = rhs by LDLT with two rounds of iterative refinement.
inline Vector refined_solve(const Eigen::LDLT<Matrix>& ldlt, const Matrix& m,
                            const Vector& rhs) {
  Vector x = ldlt.solve(rhs);
  for (int round = 0; round < 2; ++round) {
    const Vector residual = rhs - m * x;
    x += ldlt.solve(residual);
  }
  return x;
}

}  // namespace detail

/// Solve the standard-form problem through its equivalent inequality-
/// constrained least-squares form
///   minimize ||Qhat h - qhat||_2^2   subject to  G h <= g,
/// with a primal-feasible Mehrotra predictor-corrector interior-point method.
/// Every iterate keeps G h < g strictly, so returned filters never violate the
/// stability rows. eta is reported as ||Qhat h* - qhat||_2. Deterministic:
/// identical inputs give bitwise-identical solutions.
inline SocpSolution solve(const SocpProblem& prob, const SolverOptions& opts = {}) {
  const Index n = prob.num_coeffs();
  const Index m = prob.num_ineq();
  if (prob.f.size() != n + 1 || prob.f[0] != 1.0 ||
      (prob.f.tail(n).array() != 0.0).any())
    throw std::invalid_argument("solve: f must be the eta selector e_0");
  if ((prob.a_mat.row(0).array() != 0.0).any() ||
      (m > 0 && (prob.b_ineq.row(0).array() != 0.0).any()))
    throw std::invalid_argument("solve: eta must not enter A or B");

  const Matrix q_hat = prob.a_mat.bottomRows(n).transpose();
  const Vector q_hat_vec = -prob.b_vec;
  const Matrix g = m > 0 ? Matrix(prob.b_ineq.bottomRows(n).transpose()) : Matrix(0, n);
  const Vector g_rhs = prob.rhs;

  const Matrix p_mat = q_hat.transpose() * q_hat;
  const Vector c = -(q_hat.transpose() * q_hat_vec);

  SocpSolution sol;
  auto finish = [&](const Vector& h, SolveStatus status, const KktResiduals& kkt,
                    int iters) {
    sol.x = Vector(n + 1);
    sol.objective = (q_hat * h - q_hat_vec).norm();
    sol.x[0] = sol.objective;
    sol.x.tail(n) = h;
    sol.status = status;
    sol.kkt = kkt;
    sol.iterations = iters;
    return sol;
  };

  // Unconstrained: plain least squares.
  if (m == 0) {
    const Vector h = q_hat.colPivHouseholderQr().solve(q_hat_vec);
    KktResiduals kkt;
    kkt.dual = (p_mat * h + c).lpNorm<Eigen::Infinity>();
    return finish(h, SolveStatus::optimal, kkt, 0);
  }

  // A primal-feasible method needs a strictly feasible start; h = 0 works
  // exactly when g > 0. Anything else is malformed input for this family.
  if (g_rhs.minCoeff() <= 0.0) {
    KktResiduals kkt;
    kkt.primal = (-g_rhs).maxCoeff();
    return finish(Vector::Zero(n), SolveStatus::infeasible, kkt, 0);
  }

  Vector h = Vector::Zero(n);
  Vector s = g_rhs;  // slack g - G h, recomputed exactly every step
  Vector z = Vector::Ones(m);

  const double c_scale = 1.0 + c.lpNorm<Eigen::Infinity>();
  const double obj_offset = 0.5 * q_hat_vec.squaredNorm();
  KktResiduals kkt;
  bool converged = false;
  int iter = 0;

  for (; iter < opts.max_iter; ++iter) {
    const Vector r_dual = p_mat * h + c + g.transpose() * z;
    const double mu = s.dot(z) / static_cast<double>(m);
    const double objective = 0.5 * h.dot(p_mat * h) + c.dot(h) + obj_offset;

    kkt.primal = std::max(0.0, (g * h - g_rhs).maxCoeff());
    kkt.dual = r_dual.lpNorm<Eigen::Infinity>();
    kkt.gap = mu;

    if (opts.trace) {
      (*opts.trace) << "socp iter=" << iter << " merit=" << objective + s.dot(z)
                    << " obj=" << objective << " mu=" << mu << " rdual=" << kkt.dual
                    << '\n';
    }

    if (kkt.dual <= opts.tol * c_scale && mu <= opts.tol * (1.0 + objective)) {
      converged = true;
      break;
    }

    const Vector d = z.cwiseQuotient(s);
    Matrix m_mat = p_mat;
    m_mat.noalias() += g.transpose() * d.asDiagonal() * g;
    Eigen::LDLT<Matrix> ldlt(m_mat);
    if (ldlt.info() != Eigen::Success) {
      // Static regularization; keeps the factorization deterministic.
      m_mat.diagonal().array() += 1e-12 * (1.0 + m_mat.trace() / static_cast<double>(n));
      ldlt.compute(m_mat);
      if (ldlt.info() != Eigen::Success) break;
    }

    // Predictor (affine scaling) direction.
    const Vector dh_aff = detail::refined_solve(ldlt, m_mat, -(p_mat * h + c));
    const Vector ds_aff = -(g * dh_aff);
    const Vector dz_aff = -z - d.cwiseProduct(ds_aff);
    const double alpha_p_aff = detail::max_positive_step(s, ds_aff);
    const double alpha_d_aff = detail::max_positive_step(z, dz_aff);
    const double mu_aff = (s + alpha_p_aff * ds_aff).dot(z + alpha_d_aff * dz_aff) /
                          static_cast<double>(m);
    const double ratio = std::max(0.0, mu_aff / mu);
    const double sigma = std::min(1.0, ratio * ratio * ratio);

    // Corrector with centering.
    const Vector r_comp =
        s.cwiseProduct(z) + ds_aff.cwiseProduct(dz_aff) - Vector::Constant(m, sigma * mu);
    const Vector rhs_cc = -r_dual + g.transpose() * r_comp.cwiseQuotient(s);
    const Vector dh = detail::refined_solve(ldlt, m_mat, rhs_cc);
    const Vector ds = -(g * dh);
    const Vector dz = -r_comp.cwiseQuotient(s) - d.cwiseProduct(ds);

    double alpha_p = std::min(1.0, 0.995 * detail::max_positive_step(s, ds));
    double alpha_d = std::min(1.0, 0.995 * detail::max_positive_step(z, dz));

    // Slacks are recomputed from h so feasibility is exact; back off if
    // rounding ever lands a slack at or below zero.
    Vector h_next = h + alpha_p * dh;
    Vector s_next = g_rhs - g * h_next;
    int backoff = 0;
    while (s_next.minCoeff() <= 0.0 && backoff < 60) {
      alpha_p *= 0.5;
      h_next = h + alpha_p * dh;
      s_next = g_rhs - g * h_next;
      ++backoff;
    }
    if (s_next.minCoeff() <= 0.0) break;  // stalled against the boundary

    h = h_next;
    s = s_next;
    z += alpha_d * dz;

    if (alpha_p < 1e-13 && alpha_d < 1e-13) break;  // no more progress
  }

  const auto polished = detail::purify(q_hat, q_hat_vec, g, g_rhs, s, z);
  if (polished.accepted) {
    const double interior_obj = 0.5 * (q_hat * h - q_hat_vec).squaredNorm();
    const double polished_obj = 0.5 * (q_hat * polished.h - q_hat_vec).squaredNorm();
    if (polished_obj <= interior_obj * (1.0 + 1e-9) + 1e-15) {
      h = polished.h;
      s = g_rhs - g * h;
      converged = true;
    }
  }

  // Residuals of the iterate actually returned.
  kkt.primal = std::max(0.0, (g * h - g_rhs).maxCoeff());
  kkt.dual = (p_mat * h + c + g.transpose() * z).lpNorm<Eigen::Infinity>();
  kkt.gap = s.dot(z) / static_cast<double>(m);

  return finish(h, converged ? SolveStatus::optimal : SolveStatus::max_iterations, kkt,
                iter);
}

}  // namespace armagf
