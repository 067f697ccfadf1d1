#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "armagf/common.hpp"

namespace armagf {

/// Chebyshev polynomial of the first kind, T_n(x), by the three-term
/// recursion T_n(x) = 2x T_{n-1}(x) - T_{n-2}(x), T_0 = 1, T_1 = x.
inline double cheb_eval(int n, double x) {
  if (n < 0) throw std::invalid_argument("cheb_eval: order must be nonnegative");
  if (n == 0) return 1.0;
  double t_prev = 1.0;
  double t_cur = x;
  for (int k = 2; k <= n; ++k) {
    const double t_next = 2.0 * x * t_cur - t_prev;
    t_prev = t_cur;
    t_cur = t_next;
  }
  return t_cur;
}

/// Shifted Chebyshev basis vectors at a graph frequency lambda in [0, 2]:
///   c_p = [T_0(1-lambda), ..., T_P(1-lambda)]   (length p+1)
///   c_q = [T_1(1-lambda), ..., T_Q(1-lambda)]   (length q)
struct BasisVectors {
  Vector c_p;
  Vector c_q;
};

inline BasisVectors basis_vectors(double lambda, int p, int q) {
  if (p < 0 || q < 0)
    throw std::invalid_argument("basis_vectors: orders must be nonnegative");
  if (!(lambda >= 0.0 && lambda <= 2.0))
    throw std::invalid_argument("basis_vectors: lambda outside [0, 2]");
  const double x = 1.0 - lambda;
  const int n_max = std::max(p, q);
  BasisVectors out{Vector(p + 1), Vector(q)};
  // Single recursion pass; entries match cheb_eval bit for bit.
  double t_prev = 1.0;
  double t_cur = x;
  for (int n = 0; n <= n_max; ++n) {
    double t_n;
    if (n == 0) {
      t_n = 1.0;
    } else if (n == 1) {
      t_n = x;
    } else {
      t_n = 2.0 * x * t_cur - t_prev;
      t_prev = t_cur;
      t_cur = t_n;
    }
    if (n <= p) out.c_p[n] = t_n;
    if (n >= 1 && n <= q) out.c_q[n - 1] = t_n;
  }
  return out;
}

/// ARMA graph filter in the shifted Chebyshev parametrization:
///   h(lambda) = c_P'(lambda) beta / (1 + c_Q'(lambda) alpha).
/// epsilon is the stability margin the denominator was certified against.
struct ArmaChebFilter {
  Vector beta;   // numerator coefficients beta_0..beta_P
  Vector alpha;  // denominator coefficients alpha_1..alpha_Q
  double epsilon = 1e-5;

  int order_p() const { return static_cast<int>(beta.size()) - 1; }
  int order_q() const { return static_cast<int>(alpha.size()); }
};

/// Same filter expressed in powers of lambda, denominator constant normalized to 1.
struct ArmaMonomialFilter {
  Vector b;  // numerator coefficients b_0..b_P
  Vector a;  // denominator coefficients a_1..a_Q
};

/// Denominator 1 + c_Q'(lambda) alpha.
inline double denominator_value(const ArmaChebFilter& filter, double lambda) {
  const auto basis = basis_vectors(lambda, 0, filter.order_q());
  return 1.0 + basis.c_q.dot(filter.alpha);
}

inline double freq_response(const ArmaChebFilter& filter, double lambda) {
  const auto basis = basis_vectors(lambda, filter.order_p(), filter.order_q());
  const double den = 1.0 + basis.c_q.dot(filter.alpha);
  if (std::abs(den) < 0.5 * filter.epsilon)
    throw DegenerateDenominatorError(
        "freq_response: |1 + c_Q'a| < epsilon/2 at lambda = " + std::to_string(lambda));
  return basis.c_p.dot(filter.beta) / den;
}

inline double freq_response(const ArmaMonomialFilter& filter, double lambda) {
  // Horner in lambda.
  double num = 0.0;
  for (Index i = filter.b.size() - 1; i >= 0; --i) num = num * lambda + filter.b[i];
  double den = 0.0;
  for (Index i = filter.a.size() - 1; i >= 0; --i) den = den * lambda + filter.a[i];
  return num / (1.0 + lambda * den);
}

namespace detail {

// Coefficients of T_n(1 - lambda) in powers of lambda, built by the same
// three-term recursion applied to polynomials. Exact in double for n <= 20.
inline std::vector<Vector> shifted_cheb_polynomials(int n_max) {
  std::vector<Vector> polys;
  polys.reserve(n_max + 1);
  polys.push_back(Vector::Constant(1, 1.0));
  if (n_max >= 1) {
    Vector t1(2);
    t1 << 1.0, -1.0;  // 1 - lambda
    polys.push_back(t1);
  }
  for (int n = 2; n <= n_max; ++n) {
    const Vector& prev = polys[n - 1];
    const Vector& prev2 = polys[n - 2];
    Vector next = Vector::Zero(n + 1);
    // 2 (1 - lambda) prev(lambda) - prev2(lambda)
    for (Index i = 0; i < prev.size(); ++i) {
      next[i] += 2.0 * prev[i];
      next[i + 1] -= 2.0 * prev[i];
    }
    next.head(prev2.size()) -= prev2;
    polys.push_back(std::move(next));
  }
  return polys;
}

}  // namespace detail

/// Change of basis to monomial form, for export and interop. The Chebyshev
/// form is the working representation; the monomial form is ill-conditioned
/// at high orders, hence the order cap.
inline ArmaMonomialFilter to_monomial(const ArmaChebFilter& filter, int max_order = 20) {
  const int p = filter.order_p();
  const int q = filter.order_q();
  if (p > max_order || q > max_order)
    throw std::invalid_argument("to_monomial: order exceeds conversion cap " +
                                std::to_string(max_order));
  const auto polys = detail::shifted_cheb_polynomials(std::max(p, q));

  Vector num = Vector::Zero(p + 1);
  for (int i = 0; i <= p; ++i)
    num.head(i + 1) += filter.beta[i] * polys[i];

  Vector den = Vector::Zero(q + 1);
  den[0] = 1.0;
  for (int i = 1; i <= q; ++i)
    den.head(i + 1) += filter.alpha[i - 1] * polys[i];

  if (std::abs(den[0]) < 1e-12)
    throw Error("to_monomial: denominator constant term vanishes, cannot normalize");

  ArmaMonomialFilter out;
  out.b = num / den[0];
  out.a = den.tail(q) / den[0];
  return out;
}

}  // namespace armagf
