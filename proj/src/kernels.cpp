#include "tghp/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tghp {

double hermite_g(const Eigen::VectorXd& x, double d) {
  double prod = 1.0;
  for (int i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) return 0.0;
    prod *= std::pow(x[i], d - 1.0);
  }
  return prod;
}

HomogeneityReport check_h1(const KernelFn& g, double alpha,
                           const std::vector<std::pair<double, Eigen::VectorXd>>& samples,
                           double tol) {
  HomogeneityReport rep;
  for (const auto& [c, x] : samples) {
    if (!(c > 0.0)) throw std::invalid_argument("check_h1: scale factors must be positive");
    const double lhs = g(c * x);
    const double rhs = std::pow(c, alpha) * g(x);
    const double denom = std::max(std::fabs(rhs), 1e-300);
    rep.max_rel_violation = std::max(rep.max_rel_violation, std::fabs(lhs - rhs) / denom);
    ++rep.samples_checked;
  }
  rep.pass = rep.max_rel_violation <= tol;
  return rep;
}

IntegrationResult check_h2(const std::function<double(double)>& g1, int k, double lambda,
                           double u, const QuadratureSpec& spec) {
  if (k < 1 || k > 3) throw std::invalid_argument("check_h2: k in [1, 3]");
  const double rate = 2.0 * lambda * u;
  // pure-power case (rate == 0) still needs a finite box; divergence then
  // shows up as non-convergence under refinement
  const double box = rate > 0.0 ? spec.truncation_decades / rate : 1e4;

  const auto weight = [&](double x) { return std::fabs(g1(x) * g1(1.0 + x)); };

  // recursive nested adaptive over [0, box]^k
  std::function<IntegrationResult(int, QuadratureSpec)> level =
      [&](int depth, QuadratureSpec s) -> IntegrationResult {
    long evals = 0;
    bool ok = true;
    Integrand1D f = [&](double x) {
      const double w = rate > 0.0 ? weight(x) * std::exp(-rate * x) : weight(x);
      if (depth + 1 == k) return w;
      QuadratureSpec inner = s;
      inner.abs_tol = std::max(s.abs_tol / box, 1e-15);
      inner.rel_tol = std::max(s.rel_tol * 0.5, 1e-12);
      IntegrationResult r = level(depth + 1, inner);
      evals += r.evaluations;
      ok = ok && r.converged;
      return w * r.value;
    };
    IntegrationResult r = integrate_1d(f, 0.0, box, s);
    r.evaluations += evals;
    r.converged = r.converged && ok;
    return r;
  };

  return level(0, spec);
}

IntegrationResult tempered_time_kernel_ex(double t, const Eigen::VectorXd& x,
                                          const HermiteParams& p, const QuadratureSpec& spec) {
  if (x.size() != p.k)
    throw std::invalid_argument("tempered_time_kernel: x must have k coordinates");
  if (!(t > 0.0)) throw std::invalid_argument("tempered_time_kernel: t > 0 required");

  IntegrationResult out;
  const double xmax = x.maxCoeff();
  const double lo = std::max(0.0, xmax);
  if (lo >= t) {
    out.converged = true;
    return out;
  }

  // multiplicity of the top coordinate fixes the endpoint exponent
  int mult = 0;
  for (int i = 0; i < x.size(); ++i)
    if (x[i] >= xmax - 1e-14 * (1.0 + std::fabs(xmax))) ++mult;
  const double p_lo = lo > 0.0 ? mult * (p.d - 1.0) : 0.0;
  if (p_lo <= -1.0) {
    // coincident coordinates make the s-integral diverge
    out.value = std::numeric_limits<double>::infinity();
    out.converged = false;
    return out;
  }

  double hi = t;
  if (p.lambda > 0.0)
    hi = std::min(t, lo + spec.truncation_decades / (p.k * p.lambda));

  // integrate in the offset delta = s - lo so the singular factors
  // (s - x_j)^{d-1} are formed without subtraction loss at the endpoint
  const double d = p.d;
  const double lambda = p.lambda;
  Eigen::VectorXd offset = Eigen::VectorXd::Constant(x.size(), lo) - x;
  Integrand1D f = [&offset, d, lambda](double delta) {
    double val = 1.0;
    for (int i = 0; i < offset.size(); ++i) {
      const double r = delta + offset[i];
      val *= std::pow(r, d - 1.0) * std::exp(-lambda * r);
    }
    return val;
  };
  return integrate_1d_power_singular(f, 0.0, hi - lo, p_lo, 0.0, spec);
}

double tempered_time_kernel(double t, const Eigen::VectorXd& x, const HermiteParams& p,
                            const QuadratureSpec& spec) {
  return tempered_time_kernel_ex(t, x, p, spec).value;
}

double filter_weight(double t, double s, double beta, bool normalized) {
  if (beta == 0.0)
    throw std::invalid_argument("filter_weight: beta = 0 (use filter_weight_indicator)");
  const double v = positive_part_pow(t - s, beta) - positive_part_pow(-s, beta);
  return normalized ? v / beta : v;
}

double filter_weight_indicator(double t, double s) {
  return (s >= 0.0 && s <= t) ? 1.0 : 0.0;
}

}  // namespace tghp
