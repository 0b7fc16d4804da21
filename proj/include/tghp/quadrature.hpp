#pragma once

#include <Eigen/Core>

#include <functional>

namespace tghp {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;
  // e-folds of a tempering factor exp(-x/scale) kept when truncating
  // integrals over unbounded domains
  double truncation_decades = 40.0;

  QuadratureSpec with_tols(double at, double rt) const {
    QuadratureSpec s = *this;
    s.abs_tol = at;
    s.rel_tol = rt;
    return s;
  }
};

struct IntegrationResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  bool converged = false;
};

using Integrand1D = std::function<double(double)>;
using Integrand2D = std::function<double(double, double)>;
using IntegrandMD = std::function<double(const Eigen::VectorXd&)>;

// Globally adaptive Gauss-Kronrod (G7,K15) on [a,b]. Non-convergence is
// reported through the flag, never silently.
IntegrationResult integrate_1d(const Integrand1D& f, double a, double b,
                               const QuadratureSpec& spec);

// Same engine after power substitutions that absorb endpoint behaviour
// f ~ (x-a)^{p_left} near a and (b-x)^{p_right} near b: integrable
// blow-ups for p in (-1, 0) and derivative kinks for fractional p > 0.
// p in (-1, 3]; p = 0 means a regular endpoint.
IntegrationResult integrate_1d_power_singular(const Integrand1D& f, double a, double b,
                                              double p_left, double p_right,
                                              const QuadratureSpec& spec);

// \int_a^inf f for integrands decaying like exp(-(x-a)/decay_scale);
// the domain is truncated after spec.truncation_decades e-folds.
IntegrationResult integrate_1d_upper_tail(const Integrand1D& f, double a,
                                          double decay_scale, const QuadratureSpec& spec);

struct Rectangle {
  double ax, bx, ay, by;
};

// Integrand for diagonal-singular double integrals in gap form: the
// point is (u, v) = (v + side*gap, v) with side = +-1 and the gap passed
// exactly, so kernels of |u-v| lose no precision near the diagonal.
using DiagGapIntegrand = std::function<double(double v, double gap, int side)>;

// Double integral of f over a rectangle when |f(u,v)| <= C |u-v|^p near
// the diagonal, p in (-1, 0]. The inner integral is split at u = v and
// the substitution w = (u-v)^{1+p} makes the transformed integrand
// bounded; the outer integral is adaptive on top.
IntegrationResult integrate_2d_diag_singular(const DiagGapIntegrand& f, const Rectangle& dom,
                                             double singular_exponent,
                                             const QuadratureSpec& spec);

// Convenience overload for a plain f(u, v). The gap is re-derived as
// u - v inside f, which floors the resolvable distance at a few ulps and
// caps the achievable absolute accuracy near eps^{1+p}; tolerances beyond
// that come back with converged = false. Prefer the gap form for
// singular exponents close to -1.
IntegrationResult integrate_2d_diag_singular(const Integrand2D& f, const Rectangle& dom,
                                             double singular_exponent,
                                             const QuadratureSpec& spec);

enum class MdMethod { tensor, quasi_random };

// m-dimensional integration over [0,t]^m, m <= 5. The tensor method uses
// a composite Gauss rule on a 1D mesh graded toward 0 with strength
// derived from grade_exponent (the caller's known singularity exponent);
// its error estimate compares two mesh resolutions. The quasi-random
// method uses a Kronecker lattice with randomly shifted replicates.
IntegrationResult integrate_md(const IntegrandMD& f, int m, double t, MdMethod method,
                               long points, const QuadratureSpec& spec,
                               double grade_exponent = 0.0);

}  // namespace tghp
