#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tghp/params.hpp"
#include "tghp/quadrature.hpp"

namespace tghp {

// Raised when a chaos grid discards more kernel mass than allowed.
struct TailBoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Simulated paths: one row per replication, one column per time point.
// times start at 0 and every path starts at 0. Identical (seed, config)
// reproduce bit-identical values regardless of thread count.
struct SamplePaths {
  Eigen::VectorXd times;
  Eigen::MatrixXd values;  // reps x times
  std::uint64_t seed = 0;
  std::string scheme;               // "fbm" | "discrete-chaos"
  bool embedding_fallback = false;  // fbm only: Cholesky fallback was used

  void write_csv(std::ostream& os) const;
  // Little-endian dump: magic "TGHPSP01", int64 rows, int64 cols,
  // times (cols doubles), values row-major (rows*cols doubles).
  void write_binary(std::ostream& os) const;
  static SamplePaths read_binary(std::istream& is);
};

// Spatial grid for the discrete-chaos approximation: M uniform cells on
// [left_truncation, t_max], kernel evaluated at cell midpoints.
// tail_fraction estimates the discarded kernel L2 mass (from the
// tempering envelope exp(-2 lambda |x|) to the left of the grid).
struct ChaosGrid {
  Eigen::VectorXd points;
  double spacing = 0.0;
  double left_truncation = 0.0;
  double tail_fraction = 0.0;

  // left_truncation = -decades/lambda, capped at -cap (the induced tail
  // fraction is then reported rather than hidden).
  static ChaosGrid make(double t_max, const HermiteParams& p, int m_points,
                        double decades = 15.0, double cap = 200.0);
};

// Exact-in-distribution fractional Brownian motion on a uniform grid of
// [0, T] via circulant embedding of the fractional Gaussian noise
// covariance; falls back to dense Cholesky when the embedding is not
// nonnegative (flagged, not silent). Grid has n_grid increments, so
// paths carry n_grid + 1 points including t = 0.
SamplePaths fbm_paths(int n_grid, double H1, double T, int reps, std::uint64_t seed);

// Dense kernel matrix h_t(x_i, x_j) over the grid midpoints, zero
// diagonal (the multiple integral excludes diagonals).
Eigen::MatrixXd chaos_kernel_matrix(double t, const HermiteParams& p, const ChaosGrid& grid,
                                    const QuadratureSpec& spec);

// Increment kernel h_{t1} - h_{t0} over the grid, evaluated with a fixed
// transformed Gauss rule tuned for short intervals. Shared by the noise
// generators, which stream one increment matrix at a time.
Eigen::MatrixXd chaos_increment_matrix(double t0, double t1, const HermiteParams& p,
                                       const ChaosGrid& grid);

// Discrete-chaos approximation of the k = 2 tempered process:
//   Z(t) ~ sum_{i != j} h_t(x_i, x_j) xi_i xi_j Delta
// with i.i.d. standard Gaussians xi on the grid; kernel matrices are
// precomputed per time point and shared across replications.
SamplePaths simulate_tempered_rosenblatt(const Eigen::VectorXd& times, const HermiteParams& p,
                                         const ChaosGrid& grid, int reps, std::uint64_t seed);

struct KStatistic {
  double estimate = 0.0;
  double se = 0.0;  // jackknife standard error
};

// Unbiased k-statistics (cumulant estimators) up to order 4.
std::vector<KStatistic> k_statistics(const Eigen::VectorXd& samples, int max_order);

// Normalized increments of the discrete-chaos process on the uniform
// time grid i/n: paths holds the cumulative path at times 0..1 and s_n
// the analytic standard deviation of one increment.
struct NoisePaths {
  SamplePaths paths;  // cumulative, n+1 time points
  double s_n = 0.0;
  Eigen::MatrixXd increments() const;  // reps x n
};

NoisePaths tempered_noise_increments(int n, const HermiteParams& p, const ChaosGrid& grid,
                                     int reps, std::uint64_t seed);

// Log-log slope of the analytic normalized increment covariance
//   R(l) = [V((l+1)/n) - 2 V(l/n) + V((l-1)/n)] / (2 V(1/n))
// over lags in [2, max_lag].
struct CorrelationExponent {
  double l_r = 0.0;
  bool degenerate = false;         // all correlations underflowed
  bool faster_than_power = false;  // fitted |slope| > 1 (exponential regime)
  std::vector<double> lags;
  std::vector<double> correlations;
};

CorrelationExponent increment_correlation_exponent(const HermiteParams& p, int n, int max_lag,
                                                   const QuadratureSpec& spec);

}  // namespace tghp
