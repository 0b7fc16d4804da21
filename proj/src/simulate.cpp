#include "tghp/simulate.hpp"

#include <unsupported/Eigen/FFT>

#include <Eigen/Cholesky>

#include <cmath>
#include <complex>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "tghp/kernels.hpp"
#include "tghp/moments.hpp"
#include "tghp/parallel.hpp"
#include "tghp/rng.hpp"

namespace tghp {

namespace {

constexpr char kBinaryMagic[8] = {'T', 'G', 'H', 'P', 'S', 'P', '0', '1'};
constexpr double kMaxTailFraction = 1e-4;

void write_doubles(std::ostream& os, const double* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// fractional Gaussian noise covariance at lag j for increments of length dt
double fgn_cov(int j, double H1, double dt) {
  const double a = std::fabs(static_cast<double>(j));
  const double v = std::pow(a + 1.0, 2.0 * H1) - 2.0 * std::pow(a, 2.0 * H1) +
                   std::pow(std::fabs(a - 1.0), 2.0 * H1);
  return 0.5 * std::pow(dt, 2.0 * H1) * v;
}

// 7-point Gauss-Legendre on [0,1]
constexpr double kG7x[7] = {0.02544604382862074, 0.12923440720030277, 0.29707742431130146,
                            0.5,                 0.7029225756886985,  0.8707655927996972,
                            0.9745539561713793};
constexpr double kG7w[7] = {0.06474248308443485, 0.13985269574463832, 0.19091502525255946,
                            0.20897959183673470, 0.19091502525255946, 0.13985269574463832,
                            0.06474248308443485};

// h-kernel increment for one pair of grid points (k = 2),
//   \int_{max(t0, xa, xb)}^{t1} (s-xa)^{d-1} (s-xb)^{d-1} e^{-lambda(2s-xa-xb)} ds.
// The top coordinate's (s-xmax)^{d-1} is absorbed by the substitution
// s = xmax + w^{1/d} whenever xmax is inside or near the interval.
double h_increment_pair(double xa, double xb, double t0, double t1, double d, double lambda) {
  const double xmax = std::max(xa, xb);
  const double xmin = std::min(xa, xb);
  const double lo = std::max(t0, xmax);
  if (lo >= t1) return 0.0;

  // evaluated in the offset delta = s - xmax; gap = xmax - xmin is exact
  const double gap = xmax - xmin;
  const auto integrand = [&](double delta) {
    return std::pow(delta, d - 1.0) * std::pow(delta + gap, d - 1.0) *
           std::exp(-lambda * (2.0 * delta + gap));
  };

  const double len = t1 - t0;
  if (xmax <= t0 - 4.0 * len) {
    // far from the singularity: one plain panel suffices
    double sum = 0.0;
    for (int j = 0; j < 7; ++j)
      sum += kG7w[j] * integrand(lo - xmax + (t1 - lo) * kG7x[j]);
    return sum * (t1 - lo);
  }

  // transformed composite rule anchored at the singular point
  const double q = 1.0 / d;
  const double span = t1 - xmax;
  const double y0 = lo > xmax ? std::pow((lo - xmax) / span, d) : 0.0;
  double sum = 0.0;
  const int panels = 4;
  for (int pnl = 0; pnl < panels; ++pnl) {
    const double ya = y0 + (1.0 - y0) * pnl / panels;
    const double yb = y0 + (1.0 - y0) * (pnl + 1) / panels;
    for (int j = 0; j < 7; ++j) {
      const double y = ya + (yb - ya) * kG7x[j];
      const double delta = span * std::pow(y, q);
      const double jac = span * q * std::pow(y, q - 1.0);
      sum += kG7w[j] * (yb - ya) * integrand(delta) * jac;
    }
  }
  return sum;
}

struct FbmPlan {
  int n = 0;
  double dt = 0.0;
  bool fallback = false;
  Eigen::VectorXd sqrt_eig;  // embedding: sqrt(lambda_k), size 2n
  Eigen::MatrixXd chol;      // fallback: lower factor of the fGn covariance
};

FbmPlan make_fbm_plan(int n, double H1, double T) {
  FbmPlan plan;
  plan.n = n;
  plan.dt = T / n;

  const int m = 2 * n;
  std::vector<double> row(m);
  for (int j = 0; j <= n; ++j) row[j] = fgn_cov(j, H1, plan.dt);
  for (int j = n + 1; j < m; ++j) row[j] = row[m - j];

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, row);

  double min_eig = 0.0, max_eig = 0.0;
  for (const auto& z : spec) {
    min_eig = std::min(min_eig, z.real());
    max_eig = std::max(max_eig, z.real());
  }

  if (min_eig < -1e-10 * max_eig) {
    plan.fallback = true;
    Eigen::MatrixXd C(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) C(i, j) = fgn_cov(i - j, H1, plan.dt);
    plan.chol = Eigen::LLT<Eigen::MatrixXd>(C).matrixL();
  } else {
    plan.sqrt_eig.resize(m);
    for (int j = 0; j < m; ++j) plan.sqrt_eig[j] = std::sqrt(std::max(0.0, spec[j].real()));
  }
  return plan;
}

// Davies-Harte synthesis of one fGn row from the plan.
Eigen::VectorXd fbm_noise_row(const FbmPlan& plan, const rng::Stream& st) {
  const int n = plan.n;
  if (plan.fallback) {
    Eigen::VectorXd xi(n);
    for (int i = 0; i < n; ++i) xi[i] = rng::normal(st, i);
    return plan.chol * xi;
  }
  const int m = 2 * n;
  std::vector<std::complex<double>> w(m), x;
  const double inv_m = 1.0 / m;
  w[0] = plan.sqrt_eig[0] * std::sqrt(inv_m) * rng::normal(st, 0);
  w[n] = plan.sqrt_eig[n] * std::sqrt(inv_m) * rng::normal(st, 1);
  for (int k = 1; k < n; ++k) {
    const double a = plan.sqrt_eig[k] * std::sqrt(0.5 * inv_m);
    const std::complex<double> z(rng::normal(st, 2 * k), rng::normal(st, 2 * k + 1));
    w[k] = a * z;
    w[m - k] = std::conj(w[k]);
  }
  Eigen::FFT<double> fft;
  fft.fwd(x, w);
  Eigen::VectorXd noise(n);
  for (int i = 0; i < n; ++i) noise[i] = x[i].real();
  return noise;
}

void check_tail(const ChaosGrid& grid) {
  if (grid.tail_fraction > kMaxTailFraction)
    throw TailBoundError("chaos grid tail fraction " + format_g17(grid.tail_fraction) +
                         " exceeds the allowed " + format_g17(kMaxTailFraction));
}

}  // namespace

void SamplePaths::write_csv(std::ostream& os) const {
  for (int j = 0; j < times.size(); ++j) os << (j ? "," : "") << format_g17(times[j]);
  os << "\n";
  for (int i = 0; i < values.rows(); ++i) {
    for (int j = 0; j < values.cols(); ++j) os << (j ? "," : "") << format_g17(values(i, j));
    os << "\n";
  }
}

void SamplePaths::write_binary(std::ostream& os) const {
  os.write(kBinaryMagic, sizeof(kBinaryMagic));
  const std::int64_t rows = values.rows(), cols = values.cols();
  os.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  os.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  write_doubles(os, times.data(), static_cast<std::size_t>(cols));
  for (std::int64_t i = 0; i < rows; ++i) {
    Eigen::VectorXd row = values.row(i);
    write_doubles(os, row.data(), static_cast<std::size_t>(cols));
  }
}

SamplePaths SamplePaths::read_binary(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kBinaryMagic, sizeof(magic)) != 0)
    throw std::runtime_error("SamplePaths: bad magic");
  std::int64_t rows = 0, cols = 0;
  is.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  is.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  SamplePaths sp;
  sp.times.resize(cols);
  is.read(reinterpret_cast<char*>(sp.times.data()),
          static_cast<std::streamsize>(cols * sizeof(double)));
  sp.values.resize(rows, cols);
  for (std::int64_t i = 0; i < rows; ++i) {
    Eigen::VectorXd row(cols);
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(cols * sizeof(double)));
    sp.values.row(i) = row;
  }
  if (!is) throw std::runtime_error("SamplePaths: truncated binary dump");
  return sp;
}

ChaosGrid ChaosGrid::make(double t_max, const HermiteParams& p, int m_points, double decades,
                          double cap) {
  if (m_points < 2) throw std::invalid_argument("ChaosGrid: need at least 2 points");
  if (!(p.lambda > 0.0)) throw std::invalid_argument("ChaosGrid: requires lambda > 0");
  ChaosGrid g;
  double L = decades / p.lambda;
  if (L > cap) L = cap;  // small lambda: cap and report the bias
  g.left_truncation = -L;
  g.spacing = (t_max + L) / m_points;
  g.points.resize(m_points);
  for (int i = 0; i < m_points; ++i) g.points[i] = -L + (i + 0.5) * g.spacing;
  // tempering envelope of the discarded kernel mass, relative scale
  g.tail_fraction = std::exp(-2.0 * p.lambda * L);
  return g;
}

SamplePaths fbm_paths(int n_grid, double H1, double T, int reps, std::uint64_t seed) {
  if (n_grid < 2) throw std::invalid_argument("fbm_paths: n_grid >= 2");
  if (!(H1 > 0.0 && H1 < 1.0)) throw std::invalid_argument("fbm_paths: H1 in (0, 1)");
  if (reps < 1) throw std::invalid_argument("fbm_paths: reps >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("fbm_paths: T > 0");

  const FbmPlan plan = make_fbm_plan(n_grid, H1, T);

  SamplePaths sp;
  sp.seed = seed;
  sp.scheme = "fbm";
  sp.embedding_fallback = plan.fallback;
  sp.times.resize(n_grid + 1);
  for (int j = 0; j <= n_grid; ++j) sp.times[j] = T * j / n_grid;
  sp.values.resize(reps, n_grid + 1);

  parallel_for(reps, [&](long r) {
    const rng::Stream st = rng::make_stream(seed, rng::Purpose::fbm, static_cast<std::uint64_t>(r));
    const Eigen::VectorXd noise = fbm_noise_row(plan, st);
    double acc = 0.0;
    sp.values(r, 0) = 0.0;
    for (int j = 0; j < n_grid; ++j) {
      acc += noise[j];
      sp.values(r, j + 1) = acc;
    }
  });
  return sp;
}

Eigen::MatrixXd chaos_kernel_matrix(double t, const HermiteParams& p, const ChaosGrid& grid,
                                    const QuadratureSpec& spec) {
  if (p.k != 2) throw std::invalid_argument("chaos_kernel_matrix: requires k = 2");
  const int M = static_cast<int>(grid.points.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(M, M);
  if (!(t > 0.0)) return H;

  parallel_for(M, [&](long i) {
    Eigen::VectorXd x(2);
    for (int j = 0; j < static_cast<int>(i); ++j) {
      x[0] = grid.points[i];
      x[1] = grid.points[j];
      if (x.maxCoeff() >= t) continue;
      const double v = tempered_time_kernel(t, x, p, spec);
      H(i, j) = v;
      H(j, i) = v;
    }
  });
  return H;
}

Eigen::MatrixXd chaos_increment_matrix(double t0, double t1, const HermiteParams& p,
                                       const ChaosGrid& grid) {
  if (p.k != 2) throw std::invalid_argument("chaos_increment_matrix: requires k = 2");
  const int M = static_cast<int>(grid.points.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(M, M);
  parallel_for(M, [&](long i) {
    for (int j = 0; j < static_cast<int>(i); ++j) {
      const double v =
          h_increment_pair(grid.points[i], grid.points[j], t0, t1, p.d, p.lambda);
      H(i, j) = v;
      H(j, i) = v;
    }
  });
  return H;
}

SamplePaths simulate_tempered_rosenblatt(const Eigen::VectorXd& times, const HermiteParams& p,
                                         const ChaosGrid& grid, int reps, std::uint64_t seed) {
  if (p.k != 2) throw std::invalid_argument("simulate_tempered_rosenblatt: requires k = 2");
  if (reps < 1) throw std::invalid_argument("simulate_tempered_rosenblatt: reps >= 1");
  if (times.size() < 1 || times[0] != 0.0)
    throw std::invalid_argument("simulate_tempered_rosenblatt: times must start at 0");
  for (int j = 1; j < times.size(); ++j)
    if (!(times[j] > times[j - 1]))
      throw std::invalid_argument("simulate_tempered_rosenblatt: times must increase");
  check_tail(grid);

  const int M = static_cast<int>(grid.points.size());
  const int nt = static_cast<int>(times.size());
  QuadratureSpec kspec;  // kernel entries: default tolerances are plenty
  kspec.rel_tol = 1e-9;
  kspec.abs_tol = 1e-13;

  SamplePaths sp;
  sp.seed = seed;
  sp.scheme = "discrete-chaos";
  sp.times = times;
  sp.values = Eigen::MatrixXd::Zero(reps, nt);

  // draw all replication vectors once; kernels are shared across reps
  Eigen::MatrixXd xi(M, reps);
  parallel_for(reps, [&](long r) {
    const rng::Stream st =
        rng::make_stream(seed, rng::Purpose::chaos_noise, static_cast<std::uint64_t>(r));
    for (int i = 0; i < M; ++i) xi(i, r) = rng::normal(st, i);
  });

  for (int j = 1; j < nt; ++j) {
    const Eigen::MatrixXd H = chaos_kernel_matrix(times[j], p, grid, kspec);
    const Eigen::MatrixXd P = H * xi;  // M x reps
    parallel_for(reps, [&](long r) {
      sp.values(r, j) = grid.spacing * xi.col(r).dot(P.col(r));
    });
  }
  return sp;
}

std::vector<KStatistic> k_statistics(const Eigen::VectorXd& samples, int max_order) {
  const long n = samples.size();
  if (n < 100) throw std::invalid_argument("k_statistics: sample size >= 100 required");
  if (max_order < 1 || max_order > 4)
    throw std::invalid_argument("k_statistics: max_order in [1, 4]");

  long double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (long i = 0; i < n; ++i) {
    const long double x = samples[i];
    s1 += x;
    s2 += x * x;
    s3 += x * x * x;
    s4 += x * x * x * x;
  }

  const auto kstats = [max_order](long double S1, long double S2, long double S3,
                                  long double S4, long double nn) {
    const long double mu = S1 / nn;
    const long double m2 = S2 / nn - mu * mu;
    const long double m3 = S3 / nn - 3.0L * mu * S2 / nn + 2.0L * mu * mu * mu;
    const long double m4 = S4 / nn - 4.0L * mu * S3 / nn + 6.0L * mu * mu * S2 / nn -
                           3.0L * mu * mu * mu * mu;
    std::vector<long double> k(static_cast<std::size_t>(max_order));
    k[0] = mu;
    if (max_order >= 2) k[1] = nn / (nn - 1) * m2;
    if (max_order >= 3) k[2] = nn * nn / ((nn - 1) * (nn - 2)) * m3;
    if (max_order >= 4)
      k[3] = nn * nn * ((nn + 1) * m4 - 3.0L * (nn - 1) * m2 * m2) /
             ((nn - 1) * (nn - 2) * (nn - 3));
    return k;
  };

  const std::vector<long double> full = kstats(s1, s2, s3, s4, n);

  // jackknife over leave-one-out estimates from downdated power sums
  std::vector<long double> mean(full.size(), 0.0L), m2acc(full.size(), 0.0L);
  for (long i = 0; i < n; ++i) {
    const long double x = samples[i];
    const std::vector<long double> loo =
        kstats(s1 - x, s2 - x * x, s3 - x * x * x, s4 - x * x * x * x, n - 1);
    for (std::size_t o = 0; o < loo.size(); ++o) {
      const long double delta = loo[o] - mean[o];
      mean[o] += delta / (i + 1);
      m2acc[o] += delta * (loo[o] - mean[o]);
    }
  }

  std::vector<KStatistic> out(full.size());
  for (std::size_t o = 0; o < full.size(); ++o) {
    out[o].estimate = static_cast<double>(full[o]);
    out[o].se = static_cast<double>(
        std::sqrt(static_cast<double>(m2acc[o]) * (n - 1) / static_cast<double>(n)));
  }
  return out;
}

Eigen::MatrixXd NoisePaths::increments() const {
  const int n = static_cast<int>(paths.values.cols()) - 1;
  Eigen::MatrixXd inc(paths.values.rows(), n);
  for (int i = 0; i < n; ++i)
    inc.col(i) = paths.values.col(i + 1) - paths.values.col(i);
  return inc;
}

NoisePaths tempered_noise_increments(int n, const HermiteParams& p, const ChaosGrid& grid,
                                     int reps, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("tempered_noise_increments: n >= 1");
  if (reps < 1) throw std::invalid_argument("tempered_noise_increments: reps >= 1");
  check_tail(grid);

  const int M = static_cast<int>(grid.points.size());
  NoisePaths np;
  np.paths.seed = seed;
  np.paths.scheme = "discrete-chaos";
  np.paths.times.resize(n + 1);
  for (int j = 0; j <= n; ++j) np.paths.times[j] = static_cast<double>(j) / n;
  np.paths.values = Eigen::MatrixXd::Zero(reps, n + 1);

  QuadratureSpec spec;
  np.s_n = std::sqrt(cov_hermite(1.0 / n, 1.0 / n, p, spec));

  Eigen::MatrixXd xi(M, reps);
  parallel_for(reps, [&](long r) {
    const rng::Stream st =
        rng::make_stream(seed, rng::Purpose::chaos_noise, static_cast<std::uint64_t>(r));
    for (int i = 0; i < M; ++i) xi(i, r) = rng::normal(st, i);
  });

  for (int j = 0; j < n; ++j) {
    const Eigen::MatrixXd dH =
        chaos_increment_matrix(static_cast<double>(j) / n, static_cast<double>(j + 1) / n, p, grid);
    const Eigen::MatrixXd P = dH * xi;
    parallel_for(reps, [&](long r) {
      const double dz = grid.spacing * xi.col(r).dot(P.col(r));
      np.paths.values(r, j + 1) = np.paths.values(r, j) + dz;
    });
  }
  return np;
}

CorrelationExponent increment_correlation_exponent(const HermiteParams& p, int n, int max_lag,
                                                   const QuadratureSpec& spec) {
  if (!(p.lambda > 0.0))
    throw std::invalid_argument("increment_correlation_exponent: lambda > 0");
  if (max_lag < 3) throw std::invalid_argument("increment_correlation_exponent: max_lag >= 3");

  std::vector<double> V(static_cast<std::size_t>(max_lag) + 2, 0.0);
  for (int l = 1; l <= max_lag + 1; ++l)
    V[static_cast<std::size_t>(l)] = cov_hermite(static_cast<double>(l) / n,
                                                 static_cast<double>(l) / n, p, spec);

  CorrelationExponent out;
  const double v1 = V[1];
  for (int l = 2; l <= max_lag; ++l) {
    const double cov = 0.5 * (V[static_cast<std::size_t>(l) + 1] -
                              2.0 * V[static_cast<std::size_t>(l)] +
                              V[static_cast<std::size_t>(l) - 1]);
    out.lags.push_back(l);
    out.correlations.push_back(cov / v1);
  }

  // least-squares slope of log|R| against log lag; correlations below
  // the quadrature resolution cannot be trusted and are left out
  const double resolvable = std::max(1e-280, 50.0 * spec.rel_tol);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (std::size_t i = 0; i < out.lags.size(); ++i) {
    const double r = std::fabs(out.correlations[i]);
    if (r < resolvable) continue;
    const double x = std::log(out.lags[i]);
    const double y = std::log(r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 2) {
    out.degenerate = true;
    return out;
  }
  out.l_r = (used * sxy - sx * sy) / (used * sxx - sx * sx);
  out.faster_than_power = out.l_r < -1.0;
  return out;
}

}  // namespace tghp
