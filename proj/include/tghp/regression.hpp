#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tghp/params.hpp"
#include "tghp/quadrature.hpp"

namespace tghp {

enum class SmoothingKernel { gaussian, triangle, epanechnikov, quartic };

double smoothing_kernel(SmoothingKernel k, double x);
SmoothingKernel smoothing_kernel_from_name(const std::string& name);
std::string smoothing_kernel_name(SmoothingKernel k);

// The noise term in the model is S_n (Z_{(i+1)/n} - Z_{i/n}) with
// S_n = sqrt Var(increment); multiply_by_sn follows that expression
// verbatim, divide_by_sn rescales the increment to unit variance.
enum class NoiseNormalization { multiply_by_sn, divide_by_sn };

struct RegressionConfig {
  int n = 256;
  double H1 = 0.7;      // Hurst index of the regressor fBm
  double kappa = 0.2;   // bandwidth exponent, h = n^{-kappa}
  SmoothingKernel kernel = SmoothingKernel::gaussian;
  std::function<double(double)> link;  // r
  std::string link_name = "sin";
  double holder_exponent = 1.0;  // gamma_r declared for the link
  bool noise_enabled = true;
  HermiteParams noise = HermiteParams::from_H(2, 0.6, 1.0);
  int chaos_points = 256;
  double chaos_decades = 12.0;
  NoiseNormalization normalization = NoiseNormalization::divide_by_sn;

  double bandwidth() const { return std::pow(static_cast<double>(n), -kappa); }
};

// One generated dataset: regressor x_i = B^{H1}(i/n) and response
// Y_i = r(x_i) + noise_i for i = 0..n-1, with the signal and noise
// components kept for the M1/M2 decomposition.
struct Dataset {
  Eigen::VectorXd regressor;
  Eigen::VectorXd response;
  Eigen::VectorXd signal;
  Eigen::VectorXd noise;
};

Dataset generate_model(const RegressionConfig& cfg, std::uint64_t seed);

struct NwEstimate {
  double value = 0.0;
  bool empty_window = false;  // compact kernel, no samples in reach
};

// Kernel-weighted ratio estimator at x with bandwidth h.
NwEstimate nadaraya_watson(double x, const Eigen::VectorXd& regressor,
                           const Eigen::VectorXd& response, double h, SmoothingKernel k);

struct M1M2 {
  double m1 = 0.0;  // kernel-weighted average of the signal
  double m2 = 0.0;  // kernel-weighted average of the noise
  bool empty_window = false;
};

// Exact decomposition r_hat(x) = M1 + M2.
M1M2 decompose_m1_m2(double x, const Dataset& data, const RegressionConfig& cfg);

struct RegressionRow {
  int n = 0;
  double x = 0.0;
  double median_abs_err = 0.0;
  double iqr = 0.0;
  int empty_window_count = 0;
  int seed_count = 0;
};

struct RegressionRun {
  std::vector<RegressionRow> rows;
  double fitted_l_r = 0.0;
  bool l_r_degenerate = false;
  RegressionConfig base;
  std::vector<int> sample_sizes;
  std::vector<double> x_eval;
  int seeds = 0;
  std::uint64_t seed0 = 0;

  // Strict decrease of the median from smallest to largest n at every x.
  bool medians_decrease() const;
  void write_csv(std::ostream& os) const;
};

// Runs the estimator across sample sizes and seeds. Throws
// std::invalid_argument naming the violated bandwidth inequality when
// kappa fails kappa < min{H1/2, H1*gamma_r, -2 l_R}.
RegressionRun consistency_experiment(const RegressionConfig& base, const std::vector<int>& ns,
                                     const std::vector<double>& x_eval, int seeds,
                                     std::uint64_t seed0, const QuadratureSpec& spec);

// The batched noise generator behind generate_model /
// consistency_experiment: one column of unit-spaced chaos increments per
// seed, kernel matrices streamed once and shared across seeds.
Eigen::MatrixXd chaos_increment_batch(const RegressionConfig& cfg,
                                      const std::vector<std::uint64_t>& seeds, double* s_n_out);

}  // namespace tghp
