#include "tghp/verify.hpp"

#include <cmath>
#include <stdexcept>

#include "tghp/kernels.hpp"
#include "tghp/moments.hpp"
#include "tghp/quadrature.hpp"
#include "tghp/regression.hpp"
#include "tghp/simulate.hpp"
#include "tghp/special_functions.hpp"

namespace tghp::verify {

namespace {

// pinned verification configs
constexpr double kLimitH = 0.51;  // lambda -> 0 suite; relgap(t, l) equals
constexpr double kLimitT = 0.1;   // relgap(1, t*l), so small t sharpens it
constexpr double kSimH = 0.75;    // simulation / trace-oracle suite
constexpr double kSimLambda = 1.0;
constexpr int kTraceGridCoarse = 256;
constexpr int kTraceGridFine = 512;
constexpr int kSimGrid = 512;
constexpr int kSimReps = 20000;
constexpr int kFbmGrid = 16;
constexpr int kFbmReps = 10000;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

CheckTable suite_specfun() {
  CheckTable tab;
  tab.title = "special functions";
  tab.add("gamma(1)", gamma_fn(1.0), 1.0, 1e-12);
  tab.add("gamma(1/2) = sqrt(pi)", gamma_fn(0.5), std::sqrt(M_PI), 1e-12);
  tab.add("gamma(5) = 24", gamma_fn(5.0), 24.0, 1e-12);

  // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x} on a log grid of [0.01, 20]
  for (int i = 0; i < 20; ++i) {
    const double x = 0.01 * std::pow(2000.0, i / 19.0);
    const double closed = std::sqrt(M_PI / (2.0 * x)) * std::exp(-x);
    tab.add("K_{1/2}(" + fmt(x) + ")", bessel_k(0.5, x), closed, 1e-9);
  }

  // small-argument asymptote at x = 1e-6
  for (double nu : {0.125, 0.25}) {
    const double x = 1e-6;
    tab.add("K_" + fmt(nu) + " small-arg ratio", bessel_k(nu, x),
            bessel_k_small_arg(nu, x), 0.01);
  }
  return tab;
}

CheckTable suite_lemma_int() {
  CheckTable tab;
  tab.title = "Bessel product identity grid";
  QuadratureSpec spec;
  spec.rel_tol = 1e-9;
  spec.abs_tol = 1e-14;

  for (double tau : {0.3, 0.375, 0.45})
    for (double lambda : {0.1, 1.0, 10.0})
      for (double r : {0.01, 0.1, 1.0, 5.0}) {
        // left side, integrated over x < 0 after w = -x:
        //   int_0^inf e^{-lambda(r+2w)} (r+w)^{tau-1} w^{tau-1} dw
        Integrand1D f = [tau, lambda, r](double w) {
          return std::exp(-lambda * (r + 2.0 * w)) * std::pow(r + w, tau - 1.0) *
                 std::pow(w, tau - 1.0);
        };
        const double hi = spec.truncation_decades / (2.0 * lambda);
        const IntegrationResult lhs =
            integrate_1d_power_singular(f, 0.0, hi, tau - 1.0, 0.0, spec);
        const double rhs = bessel_product_identity(tau, lambda, r, 0.0);
        tab.add("tau=" + fmt(tau) + " lambda=" + fmt(lambda) + " r=" + fmt(r), lhs.value,
                rhs, 1e-6);
      }
  return tab;
}

CheckTable suite_covariance() {
  CheckTable tab;
  tab.title = "variance-cumulant consistency";
  QuadratureSpec spec;
  for (double H : {0.6, 0.75, 0.9})
    for (double lambda : {0.5, 1.0}) {
      const HermiteParams p = HermiteParams::from_H(2, H, lambda);
      const double c2 = cumulant_rosenblatt(1.0, 2, p, spec);
      const double var = cov_hermite(1.0, 1.0, p, spec);
      tab.add("H=" + fmt(H) + " lambda=" + fmt(lambda), c2, var, 1e-4);
    }
  return tab;
}

CheckTable suite_scaling() {
  CheckTable tab;
  tab.title = "scaling law";
  QuadratureSpec spec;
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  for (double c : {0.5, 2.0, 10.0}) {
    const ScalingReport rep = verify_scaling(p, c, 1.0, {3}, spec, 1e-5, 1e-3);
    for (const auto& chk : rep.checks) {
      const double tol = chk.name.rfind("cov", 0) == 0 ? 1e-5 : 1e-3;
      tab.add(chk.name, chk.lhs, chk.rhs, tol);
    }
  }
  return tab;
}

CheckTable suite_stationarity() {
  CheckTable tab;
  tab.title = "stationary increments";
  QuadratureSpec spec;
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  const StationarityReport rep =
      verify_stationarity(p, {{0.5, 1.0}, {2.0, 1.0}, {5.0, 1.0}}, spec, 1e-5);
  for (std::size_t i = 1; i < rep.second_moment.size(); ++i)
    tab.add("E[(Z(t+1)-Z(t))^2], t=" + fmt(rep.t[i]) + " vs t=" + fmt(rep.t[0]),
            rep.second_moment[i], rep.second_moment[0], 1e-5);
  return tab;
}

CheckTable suite_limit() {
  CheckTable tab;
  tab.title = "lambda -> 0 cumulant limit";
  QuadratureSpec spec;
  spec.rel_tol = 1e-7;
  const double H = kLimitH;
  const double t = kLimitT;
  const std::vector<double> lambdas = {1.0, 0.3, 0.1, 0.03, 0.01};

  for (int m : {2, 3}) {
    const double d = HermiteParams::from_H(2, H, 1.0).d;
    const double lim = cumulant_rosenblatt_limit(t, m, d, spec);
    double prev_gap = std::numeric_limits<double>::infinity();
    double final_gap = 0.0;
    for (double lambda : lambdas) {
      const HermiteParams p = HermiteParams::from_H(2, H, lambda);
      const double cm = cumulant_rosenblatt(t, m, p, spec);
      const double gap = std::fabs(cm - lim);
      tab.add_flag("m=" + std::to_string(m) + " gap decreases at lambda=" + fmt(lambda),
                   gap < prev_gap);
      prev_gap = gap;
      final_gap = gap;
    }
    tab.add_flag("m=" + std::to_string(m) + " gap at lambda=0.01 below 5% of limit (got " +
                     fmt(final_gap / std::fabs(lim) * 100.0) + "%)",
                 final_gap < 0.05 * std::fabs(lim));
  }
  return tab;
}

CheckTable suite_cumulants() {
  CheckTable tab;
  tab.title = "discrete trace oracle";
  QuadratureSpec spec;
  const HermiteParams p = HermiteParams::from_H(2, kSimH, kSimLambda);

  const ChaosGrid coarse = ChaosGrid::make(1.0, p, kTraceGridCoarse, 15.0, 200.0);
  const ChaosGrid fine = ChaosGrid::make(1.0, p, kTraceGridFine, 15.0, 200.0);
  const Eigen::MatrixXd a_coarse =
      chaos_kernel_matrix(1.0, p, coarse, spec) * coarse.spacing;
  const Eigen::MatrixXd a_fine = chaos_kernel_matrix(1.0, p, fine, spec) * fine.spacing;

  for (int m : {2, 3}) {
    const double analytic = cumulant_rosenblatt(1.0, m, p, spec);
    const double oc = cumulant_i2_discrete(a_coarse, m);
    const double of = cumulant_i2_discrete(a_fine, m);
    tab.add_flag("m=" + std::to_string(m) + " refinement moves toward analytic",
                 std::fabs(of - analytic) < std::fabs(oc - analytic));
    // the equal-cell grid loses the near-diagonal band, an
    // O(spacing^{4d-1}) one-sided deficit; at these grid sizes the match
    // below cannot reach 1% (see the refined value against the analytic
    // one) and is reported as found
    tab.add("m=" + std::to_string(m) + " trace oracle at M=512 vs analytic", of, analytic,
            0.01);
  }
  return tab;
}

CheckTable suite_simulation_chaos() {
  CheckTable tab;
  tab.title = "simulation moments: discrete chaos";
  QuadratureSpec spec;
  const HermiteParams p = HermiteParams::from_H(2, kSimH, kSimLambda);
  const ChaosGrid grid = ChaosGrid::make(1.0, p, kSimGrid, 15.0, 200.0);

  Eigen::VectorXd times(2);
  times << 0.0, 1.0;
  const SamplePaths sp = simulate_tempered_rosenblatt(times, p, grid, kSimReps, 20240817);
  const Eigen::VectorXd z1 = sp.values.col(1);
  const std::vector<KStatistic> ks = k_statistics(z1, 3);

  const double c2 = cumulant_rosenblatt(1.0, 2, p, spec);
  const double c3 = cumulant_rosenblatt(1.0, 3, p, spec);

  // exact moments of the discrete quadratic form measure the grid bias
  const Eigen::MatrixXd A = chaos_kernel_matrix(1.0, p, grid, spec) * grid.spacing;
  const double c2_disc = cumulant_i2_discrete(A, 2);
  const double c3_disc = cumulant_i2_discrete(A, 3);
  const double bias2 = std::fabs(c2_disc - c2);
  const double bias3 = std::fabs(c3_disc - c3);

  tab.add_flag("discretization bias of Var(Z(1)) below 2% (measured " +
                   fmt(bias2 / c2 * 100.0) + "%)",
               bias2 < 0.02 * c2);
  tab.add_flag("sample Var(Z(1)) within 4 SE + bias of analytic",
               std::fabs(ks[1].estimate - c2) <= 4.0 * ks[1].se + bias2);
  tab.add_flag("sample k3(Z(1)) within 4 SE + 5% + bias of analytic",
               std::fabs(ks[2].estimate - c3) <= 4.0 * ks[2].se + bias3 + 0.05 * c3);
  return tab;
}

CheckTable suite_simulation_fbm() {
  CheckTable tab;
  tab.title = "simulation moments: fBm generator";
  for (double H1 : {0.5, 0.7}) {
    const SamplePaths fb = fbm_paths(kFbmGrid, H1, 1.0, kFbmReps, 777);
    const Eigen::MatrixXd centered =
        fb.values.rightCols(kFbmGrid);  // paths start at 0, zero mean
    double worst = 0.0;
    for (int i = 0; i < kFbmGrid; ++i)
      for (int j = i; j < kFbmGrid; ++j) {
        const double ti = fb.times[i + 1], tj = fb.times[j + 1];
        const double cov_exact = 0.5 * (std::pow(ti, 2 * H1) + std::pow(tj, 2 * H1) -
                                        std::pow(std::fabs(ti - tj), 2 * H1));
        const double sample =
            (centered.col(i).array() * centered.col(j).array()).mean();
        const double cii = std::pow(ti, 2 * H1), cjj = std::pow(tj, 2 * H1);
        const double se =
            std::sqrt((cii * cjj + cov_exact * cov_exact) / kFbmReps);
        worst = std::max(worst, std::fabs(sample - cov_exact) / (4.0 * se));
      }
    tab.add_flag("fBm H=" + fmt(H1) + " covariance grid within 4 SE (worst ratio " +
                     fmt(worst) + ")",
                 worst <= 1.0);
    if (fb.embedding_fallback)
      tab.add_flag("fBm H=" + fmt(H1) + " embedding fallback engaged", false);
  }
  return tab;
}

CheckTable suite_simulation() {
  CheckTable tab = suite_simulation_chaos();
  tab.title = "simulation moments";
  tab.append(suite_simulation_fbm());
  return tab;
}

CheckTable suite_regression() {
  CheckTable tab;
  tab.title = "regression consistency";
  QuadratureSpec spec;

  RegressionConfig cfg;
  cfg.H1 = 0.7;
  cfg.kappa = 0.2;
  cfg.kernel = SmoothingKernel::gaussian;
  cfg.link = [](double x) { return std::sin(x); };
  cfg.link_name = "sin";
  cfg.holder_exponent = 1.0;
  cfg.noise = HermiteParams::from_H(2, 0.6, 1.0);
  cfg.chaos_points = 256;
  cfg.chaos_decades = 12.0;
  cfg.normalization = NoiseNormalization::divide_by_sn;

  const RegressionRun run =
      consistency_experiment(cfg, {256, 1024, 4096}, {-0.5, 0.0, 0.5}, 50, 4242, spec);

  tab.add_flag("median |r_hat - r| strictly decreases in n at every x",
               run.medians_decrease());
  for (const auto& row : run.rows)
    if (row.n == 4096)
      tab.add_flag("median at n=4096, x=" + fmt(row.x) + " below 0.1 (got " +
                       fmt(row.median_abs_err) + ")",
                   row.median_abs_err < 0.1);
  return tab;
}

std::vector<std::string> suite_names() {
  return {"specfun", "lemma-int", "covariance", "cumulants", "scaling",
          "stationarity", "limit", "simulation", "regression"};
}

bool is_suite(const std::string& name) {
  for (const auto& s : suite_names())
    if (s == name) return true;
  return false;
}

CheckTable run_suite(const std::string& name) {
  if (name == "specfun") return suite_specfun();
  if (name == "lemma-int") return suite_lemma_int();
  if (name == "covariance") return suite_covariance();
  if (name == "cumulants") return suite_cumulants();
  if (name == "scaling") return suite_scaling();
  if (name == "stationarity") return suite_stationarity();
  if (name == "limit") return suite_limit();
  if (name == "simulation") return suite_simulation();
  if (name == "regression") return suite_regression();
  throw std::invalid_argument("unknown suite: " + name);
}

}  // namespace tghp::verify
