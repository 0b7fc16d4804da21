#pragma once

#include <Eigen/Core>

#include <functional>
#include <utility>
#include <vector>

#include "tghp/params.hpp"
#include "tghp/quadrature.hpp"

namespace tghp {

// Positive-part power: (x)_+^p = x^p for x > 0 and 0 otherwise, also for
// negative p (0^p := 0 by convention).
inline double positive_part_pow(double x, double p) {
  return x > 0.0 ? std::pow(x, p) : 0.0;
}

// Product power kernel g(x) = prod_j (x_j)_+^{d-1}; 0 as soon as any
// coordinate is non-positive.
double hermite_g(const Eigen::VectorXd& x, double d);

using KernelFn = std::function<double(const Eigen::VectorXd&)>;

// Numerical check of exact homogeneity g(c x) = c^alpha g(x) on supplied
// samples (c > 0, x in the positive orthant). Report-only.
struct HomogeneityReport {
  double max_rel_violation = 0.0;
  int samples_checked = 0;
  bool pass = false;
};

HomogeneityReport check_h1(const KernelFn& g, double alpha,
                           const std::vector<std::pair<double, Eigen::VectorXd>>& samples,
                           double tol = 1e-10);

// Integrability certificate at a sampled (lambda, u) pair:
//   \int_{R^k_+} |g(x) g(1+x)| exp(-2 lambda u <1,x>) dx
// over the truncated positive orthant. The converged flag certifies the
// integral at this (lambda, u); divergence surfaces as non-convergence.
IntegrationResult check_h2(const std::function<double(double)>& g1, int k, double lambda,
                           double u, const QuadratureSpec& spec);

// Time-domain kernel of the tempered process,
//   h_t(x) = \int_{max(0, max_j x_j)}^t prod_j (s-x_j)^{d-1} e^{-lambda (s-x_j)} ds,
// 0 when max_j x_j >= t. Points where the integrand is non-integrable
// (all coordinates equal and k(d-1) <= -1) report non-convergence.
IntegrationResult tempered_time_kernel_ex(double t, const Eigen::VectorXd& x,
                                          const HermiteParams& p, const QuadratureSpec& spec);
double tempered_time_kernel(double t, const Eigen::VectorXd& x, const HermiteParams& p,
                            const QuadratureSpec& spec);

// Fractional filter weight l_t^beta(s), optionally carrying the 1/beta
// factor. beta = 0 is rejected; the indicator case 1_{[0,t]} is exposed
// separately as filter_weight_indicator.
double filter_weight(double t, double s, double beta, bool normalized = true);
double filter_weight_indicator(double t, double s);

}  // namespace tghp
