#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "armagf/common.hpp"
#include "armagf/design_grid.hpp"
#include "armagf/socp.hpp"
#include "armagf/wls.hpp"

namespace armagf {

struct TraceEntry {
  int k = 0;
  Vector x;               // blended iterate [eta; beta; alpha]
  double j_true = 0.0;    // true objective at x
  double step_inf = 0.0;  // ||x_k - x_{k-1}||_inf
  double eta = 0.0;       // cone objective of the unblended solve
  SolveStatus status = SolveStatus::optimal;
};

struct IterationTrace {
  std::vector<TraceEntry> entries;
  bool converged = false;

  int iterations() const { return static_cast<int>(entries.size()); }
};

struct DesignResult {
  ArmaChebFilter filter;
  DesignMetrics metrics;
  IterationTrace trace;
  bool converged = false;
};

/// The outer loop failed in a way the iteration cannot recover from; carries
/// the trace accumulated up to the failing iteration.
class SolverFailureError : public Error {
public:
  SolverFailureError(const std::string& what, IterationTrace trace)
      : Error(what), trace_(std::move(trace)) {}
  const IterationTrace& trace() const { return trace_; }

private:
  IterationTrace trace_;
};

/// Convex blend gamma * Phi(x) + (1 - gamma) * x of a solve result with the
/// previous iterate. Both inputs feasible implies the output feasible, since
/// the constraint set is convex.
inline Vector relax_step(const Vector& phi_x, const Vector& x_prev, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("relax_step: gamma outside [0, 1]");
  if (phi_x.size() != x_prev.size())
    throw std::invalid_argument("relax_step: length mismatch");
  return gamma * phi_x + (1.0 - gamma) * x_prev;
}

struct LoopOptions {
  double solver_tol = 1e-9;
  int solver_max_iter = 100;
};

/// Modified iterative algorithm on an explicit grid. Per iteration: reweight
/// from the alpha block of the blended previous iterate, assemble and solve
/// the cone program, relax, stop when the step infinity-norm (eta included)
/// drops to delta_t or k_max is reached. On nonconvergence the
/// best-true-objective iterate is returned.
///
/// The relaxation is a safeguard rather than an unconditional damping: the
/// full solve is accepted while consecutive full-step displacements keep
/// shrinking along a consistent direction, and the gamma blend engages (and
/// stays engaged) once a displacement reverses or stops contracting, which is
/// the oscillation the relaxation exists to break. An unconditional blend
/// anchored at x0 caps the approach rate at (1 - gamma) per iteration, which
/// cannot reach delta_t within k_max on realistic specs.
inline DesignResult design_on_grid(const DesignGrid& grid, const DesignSpec& spec,
                                   Vector x0 = Vector(), const LoopOptions& opts = {}) {
  const int p = spec.order_p;
  const int q = spec.order_q;
  const Index dim = p + q + 2;  // [eta; beta; alpha]
  if (spec.k_max < 1) throw std::invalid_argument("design_on_grid: k_max must be >= 1");
  if (x0.size() == 0) x0 = Vector::Zero(dim);
  if (x0.size() != dim)
    throw std::invalid_argument("design_on_grid: x0 must have length P+Q+2");

  SolverOptions solver_opts;
  solver_opts.tol = opts.solver_tol;
  solver_opts.max_iter = opts.solver_max_iter;

  IterationTrace trace;
  Vector x_prev = std::move(x0);
  Vector displacement_prev;  // full-step displacement of the previous iteration
  bool relaxing = false;     // stays on once the raw iteration stops contracting
  bool converged = false;

  for (int k = 1; k <= spec.k_max; ++k) {
    const Vector alpha_prev = x_prev.tail(q);
    Vector w_k;
    try {
      w_k = update_weights(grid.w, alpha_prev, grid, spec.epsilon);
    } catch (const InfeasibleIterateError& e) {
      if (k == 1) throw;  // x0 must satisfy the stability constraint
      throw SolverFailureError(e.what(), std::move(trace));
    }
    const QuadraticData quad =
        assemble_quadratic(grid, w_k, p, q, 1e-10, x_prev.tail(dim - 1));
    const SocpProblem prob = assemble_socp(quad, grid, spec);
    const SocpSolution sol = solve(prob, solver_opts);
    if (sol.status == SolveStatus::infeasible)
      throw SolverFailureError("design_on_grid: cone program reported infeasible at k = " +
                                   std::to_string(k),
                               std::move(trace));

    const Vector displacement = sol.x - x_prev;
    if (displacement_prev.size() > 0) {
      const bool reversed = displacement.dot(displacement_prev) < 0.0;
      const bool stalled = displacement.norm() > 0.9 * displacement_prev.norm();
      relaxing = relaxing || reversed || stalled;
    }
    // gamma = 0 pins the iterate by definition; otherwise the raw solve is
    // accepted while it keeps contracting.
    const double gamma_k = spec.gamma == 0.0 ? 0.0 : (relaxing ? spec.gamma : 1.0);
    displacement_prev = displacement;

    TraceEntry entry;
    entry.k = k;
    entry.x = relax_step(sol.x, x_prev, gamma_k);
    entry.step_inf = (entry.x - x_prev).lpNorm<Eigen::Infinity>();
    entry.eta = sol.objective;
    entry.status = sol.status;
    entry.j_true = true_objective(
        filter_from_stacked(entry.x.tail(dim - 1), p, q, spec.epsilon), grid);
    x_prev = entry.x;
    trace.entries.push_back(std::move(entry));

    // gamma = 0 never moves the iterate; a zero step then certifies nothing.
    if (spec.gamma > 0.0 && trace.entries.back().step_inf <= spec.delta_t) {
      converged = true;
      break;
    }
  }

  // The returned design is the best-objective iterate. The reweighted
  // fixed point need not be the lowest-J point the trajectory visited, and
  // the reference experiments select the best iterate the same way.
  std::size_t pick = trace.entries.size() - 1;
  for (std::size_t i = 0; i < trace.entries.size(); ++i) {
    if (trace.entries[i].j_true < trace.entries[pick].j_true) pick = i;
  }

  DesignResult result;
  result.converged = converged;
  result.filter =
      filter_from_stacked(trace.entries[pick].x.tail(dim - 1), p, q, spec.epsilon);
  result.metrics = compute_metrics(result.filter, grid);
  result.trace = std::move(trace);
  result.trace.converged = converged;
  return result;
}

/// WLS design from a spec: build the grid, then run the iteration.
inline DesignResult design_wls(const DesignSpec& spec, Vector x0 = Vector(),
                               const LoopOptions& opts = {}) {
  spec.validate();
  const DesignGrid grid = build_grid(spec);
  return design_on_grid(grid, spec, std::move(x0), opts);
}

/// One-shot baseline minimizing the modified (denominator-multiplied) error:
/// a single solve with W_1 = W, no reweighting, no relaxation. Equals
/// design_wls with gamma = 1 and k_max = 1.
inline DesignResult design_modified_error(const DesignSpec& spec,
                                          const LoopOptions& opts = {}) {
  DesignSpec one_shot = spec;
  one_shot.gamma = 1.0;
  one_shot.k_max = 1;
  return design_wls(one_shot, Vector(), opts);
}

struct StabilityReport {
  bool stable = false;
  double margin = 0.0;         // min over the refined grid of 1 + c_Q'alpha
  double lambda_at_min = 0.0;  // where the minimum was attained
};

/// Certify the stability constraint on a grid `refinement` times denser than
/// the design grid. Stable when the margin is at least epsilon (up to a 1e-6
/// relative allowance for roundoff).
inline StabilityReport verify_stability(const ArmaChebFilter& filter, int grid_l,
                                        int refinement) {
  if (refinement < 1)
    throw std::invalid_argument("verify_stability: refinement must be >= 1");
  const long points = static_cast<long>(grid_l) * refinement;
  StabilityReport rep;
  rep.margin = std::numeric_limits<double>::infinity();
  for (long i = 0; i <= points; ++i) {
    const double lambda = 2.0 * static_cast<double>(i) / static_cast<double>(points);
    const double den = denominator_value(filter, lambda);
    if (den < rep.margin) {
      rep.margin = den;
      rep.lambda_at_min = lambda;
    }
  }
  rep.stable = rep.margin >= filter.epsilon * (1.0 - 1e-6);
  return rep;
}

}  // namespace armagf
