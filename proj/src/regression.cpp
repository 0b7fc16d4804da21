#include "tghp/regression.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tghp/moments.hpp"
#include "tghp/parallel.hpp"
#include "tghp/rng.hpp"
#include "tghp/simulate.hpp"

namespace tghp {

namespace {

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile_of(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

}  // namespace

double smoothing_kernel(SmoothingKernel k, double x) {
  switch (k) {
    case SmoothingKernel::gaussian:
      return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    case SmoothingKernel::triangle:
      return std::fabs(x) <= 1.0 ? 1.0 - std::fabs(x) : 0.0;
    case SmoothingKernel::epanechnikov:
      return std::fabs(x) <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0;
    case SmoothingKernel::quartic: {
      if (std::fabs(x) > 1.0) return 0.0;
      const double u = 1.0 - x * x;
      return 15.0 / 16.0 * u * u;
    }
  }
  return 0.0;
}

SmoothingKernel smoothing_kernel_from_name(const std::string& name) {
  if (name == "gaussian") return SmoothingKernel::gaussian;
  if (name == "triangle") return SmoothingKernel::triangle;
  if (name == "epanechnikov") return SmoothingKernel::epanechnikov;
  if (name == "quartic") return SmoothingKernel::quartic;
  throw std::invalid_argument("unknown smoothing kernel: " + name);
}

std::string smoothing_kernel_name(SmoothingKernel k) {
  switch (k) {
    case SmoothingKernel::gaussian:
      return "gaussian";
    case SmoothingKernel::triangle:
      return "triangle";
    case SmoothingKernel::epanechnikov:
      return "epanechnikov";
    case SmoothingKernel::quartic:
      return "quartic";
  }
  return "?";
}

Eigen::MatrixXd chaos_increment_batch(const RegressionConfig& cfg,
                                      const std::vector<std::uint64_t>& seeds, double* s_n_out) {
  const int n = cfg.n;
  const int S = static_cast<int>(seeds.size());
  const ChaosGrid grid =
      ChaosGrid::make(1.0, cfg.noise, cfg.chaos_points, cfg.chaos_decades, 200.0);
  const int M = static_cast<int>(grid.points.size());

  QuadratureSpec spec;
  const double s_n = std::sqrt(cov_hermite(1.0 / n, 1.0 / n, cfg.noise, spec));
  if (s_n_out) *s_n_out = s_n;

  Eigen::MatrixXd xi(M, S);
  for (int s = 0; s < S; ++s) {
    const rng::Stream st = rng::make_stream(seeds[s], rng::Purpose::chaos_noise, 0);
    for (int i = 0; i < M; ++i) xi(i, s) = rng::normal(st, i);
  }

  Eigen::MatrixXd inc(n, S);
  for (int j = 0; j < n; ++j) {
    const Eigen::MatrixXd dH = chaos_increment_matrix(static_cast<double>(j) / n,
                                                      static_cast<double>(j + 1) / n,
                                                      cfg.noise, grid);
    const Eigen::MatrixXd P = dH * xi;
    for (int s = 0; s < S; ++s) inc(j, s) = grid.spacing * xi.col(s).dot(P.col(s));
  }

  // normalization: divide -> unit-variance noise, multiply -> S_n * increment
  const double scale = cfg.normalization == NoiseNormalization::divide_by_sn ? 1.0 / s_n : s_n;
  inc *= scale;
  return inc;
}

Dataset generate_model(const RegressionConfig& cfg, std::uint64_t seed) {
  if (!cfg.link) throw std::invalid_argument("generate_model: link function not set");
  const int n = cfg.n;

  const SamplePaths fbm = fbm_paths(n, cfg.H1, 1.0, 1, seed);

  Dataset data;
  data.regressor.resize(n);
  data.signal.resize(n);
  for (int i = 0; i < n; ++i) {
    data.regressor[i] = fbm.values(0, i);  // B(i/n), i = 0..n-1
    data.signal[i] = cfg.link(data.regressor[i]);
  }

  if (cfg.noise_enabled) {
    const Eigen::MatrixXd inc = chaos_increment_batch(cfg, {seed}, nullptr);
    data.noise = inc.col(0);
  } else {
    data.noise = Eigen::VectorXd::Zero(n);
  }
  data.response = data.signal + data.noise;
  return data;
}

NwEstimate nadaraya_watson(double x, const Eigen::VectorXd& regressor,
                           const Eigen::VectorXd& response, double h, SmoothingKernel k) {
  if (!(h > 0.0)) throw std::invalid_argument("nadaraya_watson: h > 0");
  double num = 0.0, den = 0.0;
  for (int i = 0; i < regressor.size(); ++i) {
    const double w = smoothing_kernel(k, (x - regressor[i]) / h);
    num += response[i] * w;
    den += w;
  }
  NwEstimate est;
  if (den == 0.0) {
    est.empty_window = true;
    est.value = std::numeric_limits<double>::quiet_NaN();
  } else {
    est.value = num / den;
  }
  return est;
}

M1M2 decompose_m1_m2(double x, const Dataset& data, const RegressionConfig& cfg) {
  const double h = cfg.bandwidth();
  double wsum = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < data.regressor.size(); ++i) {
    const double w = smoothing_kernel(cfg.kernel, (x - data.regressor[i]) / h);
    wsum += w;
    m1 += w * data.signal[i];
    m2 += w * data.noise[i];
  }
  M1M2 out;
  if (wsum == 0.0) {
    out.empty_window = true;
    out.m1 = out.m2 = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.m1 = m1 / wsum;
    out.m2 = m2 / wsum;
  }
  return out;
}

bool RegressionRun::medians_decrease() const {
  for (double x : x_eval) {
    double prev = std::numeric_limits<double>::infinity();
    for (int n : sample_sizes) {
      for (const auto& row : rows)
        if (row.n == n && row.x == x) {
          if (!(row.median_abs_err < prev)) return false;
          prev = row.median_abs_err;
        }
    }
  }
  return true;
}

void RegressionRun::write_csv(std::ostream& os) const {
  os << "n,x,median_abs_err,iqr,empty_window_count,seed_count\n";
  for (const auto& r : rows)
    os << r.n << "," << format_g17(r.x) << "," << format_g17(r.median_abs_err) << ","
       << format_g17(r.iqr) << "," << r.empty_window_count << "," << r.seed_count << "\n";
}

RegressionRun consistency_experiment(const RegressionConfig& base, const std::vector<int>& ns,
                                     const std::vector<double>& x_eval, int seeds,
                                     std::uint64_t seed0, const QuadratureSpec& spec) {
  if (!base.link) throw std::invalid_argument("consistency_experiment: link function not set");
  if (seeds < 1) throw std::invalid_argument("consistency_experiment: seeds >= 1");
  if (ns.empty()) throw std::invalid_argument("consistency_experiment: no sample sizes");

  RegressionRun run;
  run.base = base;
  run.sample_sizes = ns;
  run.x_eval = x_eval;
  run.seeds = seeds;
  run.seed0 = seed0;

  // bandwidth exponent constraints, fitted l_R included when noise is on
  const double lim_h = base.H1 / 2.0;
  const double lim_r = base.H1 * base.holder_exponent;
  if (!(base.kappa < lim_h))
    throw std::invalid_argument("kappa = " + format_g17(base.kappa) +
                                " violates kappa < H1/2 = " + format_g17(lim_h));
  if (!(base.kappa < lim_r))
    throw std::invalid_argument("kappa = " + format_g17(base.kappa) +
                                " violates kappa < H1*gamma_r = " + format_g17(lim_r));
  if (base.noise_enabled) {
    const int n_fit = *std::max_element(ns.begin(), ns.end());
    const CorrelationExponent ce =
        increment_correlation_exponent(base.noise, n_fit, 32, spec);
    run.fitted_l_r = ce.l_r;
    run.l_r_degenerate = ce.degenerate;
    if (!ce.degenerate && ce.l_r > -1.0 && ce.l_r < 0.0) {
      const double lim_l = -2.0 * ce.l_r;
      if (!(base.kappa < lim_l))
        throw std::invalid_argument("kappa = " + format_g17(base.kappa) +
                                    " violates kappa < -2*l_R = " + format_g17(lim_l));
    }
  }

  std::vector<std::uint64_t> seed_list(static_cast<std::size_t>(seeds));
  for (int s = 0; s < seeds; ++s) seed_list[static_cast<std::size_t>(s)] = seed0 + s;

  for (int n : ns) {
    RegressionConfig cfg = base;
    cfg.n = n;
    const double h = cfg.bandwidth();

    Eigen::MatrixXd noise;
    if (cfg.noise_enabled) noise = chaos_increment_batch(cfg, seed_list, nullptr);

    // per (x, seed) absolute errors
    std::vector<std::vector<double>> abs_err(x_eval.size());
    std::vector<int> empties(x_eval.size(), 0);

    std::vector<Eigen::VectorXd> regressors(static_cast<std::size_t>(seeds));
    std::vector<Eigen::VectorXd> responses(static_cast<std::size_t>(seeds));
    parallel_for(seeds, [&](long s) {
      const SamplePaths fbm = fbm_paths(n, cfg.H1, 1.0, 1, seed_list[s]);
      Eigen::VectorXd reg(n), resp(n);
      for (int i = 0; i < n; ++i) {
        reg[i] = fbm.values(0, i);
        resp[i] = cfg.link(reg[i]);
      }
      if (cfg.noise_enabled) resp += noise.col(s);
      regressors[s] = std::move(reg);
      responses[s] = std::move(resp);
    });

    for (int s = 0; s < seeds; ++s) {
      for (std::size_t ix = 0; ix < x_eval.size(); ++ix) {
        const NwEstimate est =
            nadaraya_watson(x_eval[ix], regressors[s], responses[s], h, cfg.kernel);
        if (est.empty_window) {
          ++empties[ix];
          continue;
        }
        abs_err[ix].push_back(std::fabs(est.value - cfg.link(x_eval[ix])));
      }
    }

    for (std::size_t ix = 0; ix < x_eval.size(); ++ix) {
      RegressionRow row;
      row.n = n;
      row.x = x_eval[ix];
      row.median_abs_err = median_of(abs_err[ix]);
      row.iqr = quantile_of(abs_err[ix], 0.75) - quantile_of(abs_err[ix], 0.25);
      row.empty_window_count = empties[ix];
      row.seed_count = seeds;
      run.rows.push_back(row);
    }
  }
  return run;
}

}  // namespace tghp
