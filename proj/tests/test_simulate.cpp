#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "tghp/moments.hpp"
#include "tghp/rng.hpp"
#include "tghp/simulate.hpp"

using namespace tghp;

namespace {
const QuadratureSpec kSpec;
}

TEST_CASE("fbm paths start at zero and reproduce bit-identically") {
  const SamplePaths a = fbm_paths(64, 0.7, 1.0, 8, 42);
  const SamplePaths b = fbm_paths(64, 0.7, 1.0, 8, 42);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.values.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.times[0] == 0.0);
  CHECK_FALSE(a.embedding_fallback);

  // thread fan-out must not change a single bit
  setenv("TGHP_THREADS", "3", 1);
  const SamplePaths c = fbm_paths(64, 0.7, 1.0, 8, 42);
  unsetenv("TGHP_THREADS");
  CHECK((a.values - c.values).cwiseAbs().maxCoeff() == 0.0);

  const SamplePaths d = fbm_paths(64, 0.7, 1.0, 8, 43);
  CHECK((a.values - d.values).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("fbm: Brownian specialization H = 1/2") {
  const int reps = 10000;
  const SamplePaths sp = fbm_paths(8, 0.5, 2.0, reps, 7);
  // Cov(B(1), B(2)) = 1; entries at grid times 1.0 and 2.0
  const Eigen::VectorXd b1 = sp.values.col(4), b2 = sp.values.col(8);
  const double cov = (b1.array() * b2.array()).mean();
  const double se = std::sqrt((1.0 * 2.0 + 1.0) / reps);
  CHECK(std::fabs(cov - 1.0) < 4.0 * se);
}

TEST_CASE("fbm: variance at t = 1 for H = 0.7") {
  const int reps = 10000;
  const SamplePaths sp = fbm_paths(16, 0.7, 1.0, reps, 11);
  const Eigen::VectorXd b1 = sp.values.col(16);
  const double var = b1.array().square().mean();
  const double se = std::sqrt(2.0 / reps);  // Var of chi2-scaled mean
  CHECK(std::fabs(var - 1.0) < 4.0 * se);
}

TEST_CASE("chaos grid construction and tail bound") {
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  const ChaosGrid g = ChaosGrid::make(1.0, p, 256, 15.0, 200.0);
  CHECK(g.left_truncation == doctest::Approx(-15.0));
  CHECK(g.points.size() == 256);
  CHECK(g.points[0] > g.left_truncation);
  CHECK(g.tail_fraction < 1e-12);

  // small lambda hits the cap and reports a big tail
  const HermiteParams tiny = HermiteParams::from_H(2, 0.75, 1e-4);
  const ChaosGrid gc = ChaosGrid::make(1.0, tiny, 64, 15.0, 200.0);
  CHECK(gc.left_truncation == doctest::Approx(-200.0));
  CHECK(gc.tail_fraction > 1e-4);

  Eigen::VectorXd times(2);
  times << 0.0, 1.0;
  CHECK_THROWS_AS(simulate_tempered_rosenblatt(times, tiny, gc, 10, 1), TailBoundError);
}

TEST_CASE("chaos simulation: determinism, zero start, zero mean") {
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  const ChaosGrid grid = ChaosGrid::make(1.0, p, 128, 15.0, 200.0);
  Eigen::VectorXd times(3);
  times << 0.0, 0.5, 1.0;

  const int reps = 4000;
  const SamplePaths a = simulate_tempered_rosenblatt(times, p, grid, reps, 5);
  setenv("TGHP_THREADS", "2", 1);
  const SamplePaths b = simulate_tempered_rosenblatt(times, p, grid, reps, 5);
  unsetenv("TGHP_THREADS");
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.values.col(0).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::VectorXd z1 = a.values.col(2);
  const double mean = z1.mean();
  const double sd = std::sqrt(z1.array().square().mean());
  CHECK(std::fabs(mean) < 4.0 * sd / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("chaos simulation variance matches the quadratic-form law") {
  // the sample variance must agree with the exact second cumulant of the
  // discretized form; the continuum value sits above it by the known
  // near-diagonal deficit, which refinement shrinks monotonically
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  Eigen::VectorXd times(2);
  times << 0.0, 1.0;

  const double analytic = cov_hermite(1.0, 1.0, p, kSpec);
  double prev_bias = 1e300;
  for (int M : {128, 256, 512}) {
    const ChaosGrid grid = ChaosGrid::make(1.0, p, M, 15.0, 200.0);
    const Eigen::MatrixXd A = chaos_kernel_matrix(1.0, p, grid, kSpec) * grid.spacing;
    const double var_disc = cumulant_i2_discrete(A, 2);
    const double bias = std::fabs(var_disc - analytic);
    CHECK(bias < prev_bias);
    prev_bias = bias;

    if (M == 512) {
      const int reps = 8000;
      const SamplePaths sp = simulate_tempered_rosenblatt(times, p, grid, reps, 17);
      const std::vector<KStatistic> ks = k_statistics(sp.values.col(1), 2);
      CHECK(std::fabs(ks[1].estimate - var_disc) < 4.0 * ks[1].se);
    }
  }
}

TEST_CASE("isometry of discrete quadratic forms") {
  // Cov(xi' A xi, xi' B xi) = 2 sum A_ij B_ij for symmetric zero-diagonal
  const int M = 48;
  Eigen::MatrixXd A(M, M), B(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j <= i; ++j) {
      const double xi = i / double(M), xj = j / double(M);
      A(i, j) = A(j, i) = i == j ? 0.0 : std::exp(-4.0 * (xi - xj) * (xi - xj));
      B(i, j) = B(j, i) = i == j ? 0.0 : 1.0 / (1.0 + 8.0 * std::fabs(xi - xj));
    }

  const long reps = 100000;
  double s_ab = 0.0, s_a = 0.0, s_b = 0.0, s_aa = 0.0, s_bb = 0.0, s2_ab = 0.0;
  Eigen::VectorXd xi(M);
  for (long r = 0; r < reps; ++r) {
    const rng::Stream st = rng::make_stream(99, rng::Purpose::chaos_noise, r);
    for (int i = 0; i < M; ++i) xi[i] = rng::normal(st, i);
    const double qa = xi.dot(A * xi);
    const double qb = xi.dot(B * xi);
    s_a += qa;
    s_b += qb;
    s_ab += qa * qb;
    s_aa += qa * qa;
    s_bb += qb * qb;
    s2_ab += qa * qb * qa * qb;
  }
  const double mean_a = s_a / reps, mean_b = s_b / reps;
  const double cov = s_ab / reps - mean_a * mean_b;
  const double expected = 2.0 * (A.array() * B.array()).sum();
  // rough SE of the sample covariance from fourth moments
  const double var_q = (s_aa / reps - mean_a * mean_a) * (s_bb / reps - mean_b * mean_b);
  const double se = std::sqrt((var_q + cov * cov) / reps);
  CHECK(std::fabs(cov - expected) < 4.0 * se);
}

TEST_CASE("stationary increments of the simulated paths") {
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  const ChaosGrid grid = ChaosGrid::make(3.0, p, 384, 15.0, 200.0);
  Eigen::VectorXd times(6);
  const double h = 0.5;
  times << 0.0, h, 1.0, 1.0 + h, 2.0, 2.0 + h;
  const int reps = 6000;
  const SamplePaths sp = simulate_tempered_rosenblatt(times, p, grid, reps, 23);

  std::vector<double> vars, ses;
  for (int base : {0, 2, 4}) {
    Eigen::VectorXd inc = sp.values.col(base + 1) - sp.values.col(base);
    const std::vector<KStatistic> ks = k_statistics(inc, 2);
    vars.push_back(ks[1].estimate);
    ses.push_back(ks[1].se);
  }
  for (std::size_t i = 1; i < vars.size(); ++i)
    CHECK(std::fabs(vars[i] - vars[0]) <
          4.0 * std::sqrt(ses[i] * ses[i] + ses[0] * ses[0]));
}

TEST_CASE("k-statistics on degenerate and Gaussian samples") {
  Eigen::VectorXd constant = Eigen::VectorXd::Constant(200, 3.25);
  const auto kc = k_statistics(constant, 4);
  CHECK(kc[1].estimate == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(kc[2].estimate == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(kc[3].estimate == doctest::Approx(0.0).epsilon(1e-12));

  const long n = 100000;
  Eigen::VectorXd gauss(n);
  const rng::Stream st = rng::make_stream(3, rng::Purpose::generic, 1);
  for (long i = 0; i < n; ++i) gauss[i] = rng::normal(st, i);
  const auto kg = k_statistics(gauss, 4);
  CHECK(std::fabs(kg[0].estimate) < 4.0 * kg[0].se);
  CHECK(std::fabs(kg[1].estimate - 1.0) < 4.0 * kg[1].se);
  CHECK(std::fabs(kg[2].estimate) < 4.0 * kg[2].se);
  CHECK(std::fabs(kg[3].estimate) < 4.0 * kg[3].se);

  CHECK_THROWS_AS(k_statistics(Eigen::VectorXd::Zero(50), 2), std::invalid_argument);
  CHECK_THROWS_AS(k_statistics(gauss, 5), std::invalid_argument);
}

TEST_CASE("noise increments: normalization and correlation structure") {
  // resolution chosen so the grid resolves the 1/n increments well
  const HermiteParams p = HermiteParams::from_H(2, 0.9, 1.0);
  const ChaosGrid grid = ChaosGrid::make(1.0, p, 4096, 8.0, 200.0);
  const int n = 4, reps = 3000;
  const NoisePaths np = tempered_noise_increments(n, p, grid, reps, 31);

  CHECK(np.s_n == doctest::Approx(std::sqrt(cov_hermite(0.25, 0.25, p, kSpec))));
  const Eigen::MatrixXd inc = np.increments();
  CHECK(inc.cols() == n);

  // sample variance of one increment against the analytic value
  const auto ks = k_statistics(inc.col(1), 2);
  CHECK(std::fabs(ks[1].estimate - np.s_n * np.s_n) <
        4.0 * ks[1].se + 0.05 * np.s_n * np.s_n);

  // empirical lag correlation tracks the analytic one
  const CorrelationExponent ce = increment_correlation_exponent(p, n, 3, kSpec);
  const Eigen::VectorXd a = inc.col(0), b = inc.col(2);  // lag 2
  const double corr = (a.array() * b.array()).mean() / (np.s_n * np.s_n);
  CHECK(std::fabs(corr - ce.correlations[0]) < 4.0 / std::sqrt(double(reps)));
}

TEST_CASE("increment correlation exponent regimes") {
  // nearly untempered at these lags: the fitted slope tracks the slope
  // of the same lag window under the exact limit variance C t^{2H}
  const double H = 0.75;
  const int n = 64, max_lag = 16;
  const HermiteParams p = HermiteParams::from_H(2, H, 1e-3);
  const CorrelationExponent ce = increment_correlation_exponent(p, n, max_lag, kSpec);
  CHECK_FALSE(ce.degenerate);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (int l = 2; l <= max_lag; ++l) {
    const double r = 0.5 * (std::pow(l + 1.0, 2 * H) - 2.0 * std::pow(l, 2 * H) +
                            std::pow(l - 1.0, 2 * H));
    sx += std::log(l);
    sy += std::log(r);
    sxx += std::log(l) * std::log(l);
    sxy += std::log(l) * std::log(r);
    ++used;
  }
  const double oracle_slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
  CHECK(oracle_slope == doctest::Approx(2.0 * H - 2.0).epsilon(0.05));
  CHECK(std::fabs(ce.l_r - oracle_slope) < 0.1);

  // moderate tempering: resolvable correlations decaying faster than any
  // power get flagged
  QuadratureSpec tight = kSpec.with_tols(1e-14, 1e-10);
  const HermiteParams fast = HermiteParams::from_H(2, 0.75, 16.0);
  const CorrelationExponent cf = increment_correlation_exponent(fast, 16, 6, tight);
  CHECK((cf.degenerate || cf.faster_than_power));

  // extreme tempering: differences fall below quadrature resolution
  const HermiteParams extreme = HermiteParams::from_H(2, 0.75, 400.0);
  const CorrelationExponent cx = increment_correlation_exponent(extreme, 4, 8, kSpec);
  CHECK(cx.degenerate);
}

TEST_CASE("sample paths round-trip through csv and binary") {
  const SamplePaths sp = fbm_paths(16, 0.6, 1.0, 4, 5);

  std::stringstream bin;
  sp.write_binary(bin);
  const SamplePaths back = SamplePaths::read_binary(bin);
  CHECK((back.values - sp.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.times - sp.times).cwiseAbs().maxCoeff() == 0.0);

  std::stringstream csv;
  sp.write_csv(csv);
  std::string header;
  std::getline(csv, header);
  CHECK(header.substr(0, 2) == "0,");
  int rows = 0;
  std::string line;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 4);
}
