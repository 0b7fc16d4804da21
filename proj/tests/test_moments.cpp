#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

#include "tghp/kernels.hpp"
#include "tghp/moments.hpp"
#include "tghp/simulate.hpp"
#include "tghp/special_functions.hpp"

using namespace tghp;

namespace {
const QuadratureSpec kSpec;

// left side of the product identity by brute quadrature, as a function
// of r = |u-v|
double product_integral_lhs(double tau, double lambda, double r, double rel_tol = 1e-10) {
  QuadratureSpec spec;
  spec.rel_tol = rel_tol;
  spec.abs_tol = 1e-15;
  Integrand1D f = [tau, lambda, r](double w) {
    return std::exp(-lambda * (r + 2.0 * w)) * std::pow(r + w, tau - 1.0) *
           std::pow(w, tau - 1.0);
  };
  return integrate_1d_power_singular(f, 0.0, spec.truncation_decades / (2.0 * lambda),
                                     tau - 1.0, 0.0, spec)
      .value;
}
}  // namespace

TEST_CASE("product identity against brute quadrature") {
  CHECK(bessel_product_identity(0.375, 1.0, 1.0, 0.0) ==
        doctest::Approx(product_integral_lhs(0.375, 1.0, 1.0)).epsilon(1e-7));
  CHECK(bessel_product_identity(0.3, 10.0, 0.6, 0.5) ==
        doctest::Approx(product_integral_lhs(0.3, 10.0, 0.1)).epsilon(1e-7));
}

TEST_CASE("product identity symmetry and scaling") {
  CHECK(bessel_product_identity(0.375, 1.0, 0.2, 0.9) ==
        doctest::Approx(bessel_product_identity(0.375, 1.0, 0.9, 0.2)).epsilon(1e-14));

  // doubling lambda at distance 1 versus distance 2 at unit lambda:
  // the substitution x -> x/2 in the left integral gives the exact ratio
  // 2^{1-2 tau}, confirmed by the quadrature oracle
  const double tau = 0.375;
  const double first = bessel_product_identity(tau, 2.0, 1.0, 0.0);
  const double second = bessel_product_identity(tau, 1.0, 2.0, 0.0);
  CHECK(first / second == doctest::Approx(std::pow(2.0, 1.0 - 2.0 * tau)).epsilon(1e-12));
  CHECK(product_integral_lhs(tau, 2.0, 1.0) / product_integral_lhs(tau, 1.0, 2.0) ==
        doctest::Approx(std::pow(2.0, 1.0 - 2.0 * tau)).epsilon(1e-8));

  CHECK_THROWS_AS(bessel_product_identity(0.6, 1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_product_identity(0.375, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("covariance: degenerate and symmetry") {
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  CHECK(cov_hermite(0.0, 1.0, p, kSpec) == 0.0);
  CHECK(cov_hermite(1.0, 0.0, p, kSpec) == 0.0);
  CHECK(cov_hermite(0.7, 1.3, p, kSpec) ==
        doctest::Approx(cov_hermite(1.3, 0.7, p, kSpec)).epsilon(1e-9));
}

TEST_CASE("covariance against the kernel-integral oracle") {
  // nested quadrature of the covariance in its pre-identity normal form:
  // no Bessel evaluation anywhere on this path
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  QuadratureSpec ospec;
  ospec.rel_tol = 1e-9;
  DiagGapIntegrand F = [&](double, double g, int) {
    const double inner = product_integral_lhs(p.d, p.lambda, g, 1e-10);
    return inner * inner;
  };
  const double oracle =
      2.0 *
      integrate_2d_diag_singular(F, {0.0, 1.0, 0.0, 1.0}, 2.0 * (2.0 * p.d - 1.0), ospec)
          .value;
  CHECK(cov_hermite(1.0, 1.0, p, kSpec) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("general product kernel covariance matches the closed path") {
  for (int k : {1, 2}) {
    const HermiteParams p = HermiteParams::from_H(k, 0.75, 1.0);
    auto g1 = [&p](double x) { return x > 0.0 ? std::pow(x, p.d - 1.0) : 0.0; };
    const double a = cov_general_product(0.8, 1.1, g1, p, kSpec);
    const double b = cov_hermite(0.8, 1.1, p, kSpec);
    CHECK(a == doctest::Approx(b).epsilon(1e-6));
  }
  const HermiteParams p1 = HermiteParams::from_H(1, 0.75, 1.0);
  auto g1 = [&p1](double x) { return x > 0.0 ? std::pow(x, p1.d - 1.0) : 0.0; };
  CHECK(cov_general_product(0.0, 0.0, g1, p1, kSpec) == 0.0);
}

TEST_CASE("variance equals the second cumulant") {
  for (double H : {0.6, 0.9}) {
    const HermiteParams p = HermiteParams::from_H(2, H, 1.0);
    CHECK(cumulant_rosenblatt(1.0, 2, p, kSpec) ==
          doctest::Approx(cov_hermite(1.0, 1.0, p, kSpec)).epsilon(1e-4));
  }
}

TEST_CASE("discrete trace cumulant") {
  CHECK(cumulant_i2_discrete(Eigen::MatrixXd::Zero(5, 5), 3) == 0.0);
  CHECK(cumulant_i2_discrete(Eigen::MatrixXd::Identity(7, 7), 2) ==
        doctest::Approx(14.0).epsilon(1e-14));

  Eigen::MatrixXd A(3, 3);
  A << 0.3, -1.1, 0.4, -1.1, 2.0, 0.9, 0.4, 0.9, -0.5;
  double triple = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) triple += A(i, j) * A(j, l) * A(l, i);
  CHECK(cumulant_i2_discrete(A, 3) == doctest::Approx(4.0 * 2.0 * triple).epsilon(1e-13));
}

TEST_CASE("gridded trace oracle climbs toward the analytic cumulants") {
  // the equal-cell chaos grid loses the near-diagonal band, an
  // O(spacing^{4d-1}) one-sided deficit; refinement must close it
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  for (int m : {2, 3}) {
    const double analytic = cumulant_rosenblatt(1.0, m, p, kSpec);
    double prev = -1e300;
    for (int M : {96, 192, 384}) {
      const ChaosGrid grid = ChaosGrid::make(1.0, p, M, 15.0, 200.0);
      const Eigen::MatrixXd A = chaos_kernel_matrix(1.0, p, grid, kSpec) * grid.spacing;
      const double oracle = cumulant_i2_discrete(A, m);
      CHECK(oracle > prev);
      CHECK(oracle < analytic);
      prev = oracle;
    }
  }
}

TEST_CASE("fourth cumulant is positive") {
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  QuadratureSpec coarse;
  coarse.rel_tol = 3e-4;
  coarse.abs_tol = 1e-6;
  const double c4 = cumulant_rosenblatt(1.0, 4, p, coarse);
  CHECK(c4 > 0.0);
  const double c2 = cumulant_rosenblatt(1.0, 2, p, coarse);
  CHECK(c2 > 0.0);
}

TEST_CASE("cumulant scaling in (t, lambda)") {
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  const ScalingReport rep = verify_scaling(p, 2.0, 1.0, {3}, kSpec, 1e-5, 1e-3);
  CHECK(rep.pass);
  for (const auto& chk : rep.checks) CHECK(chk.rel_err < 1e-3);

  // c = 1 is exact by construction
  const ScalingReport triv = verify_scaling(p, 1.0, 1.0, {}, kSpec, 1e-12, 1e-12);
  CHECK(triv.pass);
}

TEST_CASE("limit cumulant closed form at m = 2") {
  // a(2) * 2 t^{4d} / ((4d-1) 4d)
  const double d = 0.375, t = 1.3;
  const double closed = limit_constant(2, d, LimitConstant::derived) * 2.0 *
                        std::pow(t, 4.0 * d) / ((4.0 * d - 1.0) * 4.0 * d);
  CHECK(cumulant_rosenblatt_limit(t, 2, d, kSpec) == doctest::Approx(closed).epsilon(1e-8));
}

TEST_CASE("limit cumulant t-scaling c^{2dm}") {
  const double d = 0.3, c = 2.0;
  for (int m : {2, 3}) {
    const double v1 = cumulant_rosenblatt_limit(1.0, m, d, kSpec);
    const double vc = cumulant_rosenblatt_limit(c, m, d, kSpec);
    CHECK(vc == doctest::Approx(std::pow(c, 2.0 * d * m) * v1).epsilon(1e-6));
  }
}

TEST_CASE("printed limit constant is reported next to the derived one") {
  const double d = 0.375;
  const double derived = limit_constant(2, d, LimitConstant::derived);
  const double printed = limit_constant(2, d, LimitConstant::printed);
  CHECK(derived > 0.0);
  CHECK(printed > 0.0);  // Gamma(d-1/2)^2 > 0 for even m
  CHECK(derived != doctest::Approx(printed).epsilon(1e-3));
}

TEST_CASE("tempered cumulants approach the limit as lambda -> 0") {
  const double H = 0.51, t = 0.1;
  const double d = HermiteParams::from_H(2, H, 1.0).d;
  for (int m : {2, 3}) {
    const double lim = cumulant_rosenblatt_limit(t, m, d, kSpec);
    double prev = 1e300;
    for (double lambda : {1.0, 0.1, 0.01}) {
      const HermiteParams p = HermiteParams::from_H(2, H, lambda);
      const double gap = std::fabs(cumulant_rosenblatt(t, m, p, kSpec) - lim);
      CHECK(gap < prev);
      prev = gap;
    }
  }
}

TEST_CASE("filtered variance against the direct weighted double integral") {
  // oracle: brute nested quadrature of the filtered covariance in its
  // pre-identity form, with the inner kernel integral done numerically
  const HermiteParams base = HermiteParams::from_H(2, 0.75, 1.0);
  const FilterParams fp = FilterParams::make(base, 0.1, false);
  const double lambda = base.lambda, d = base.d;
  const int k = 2;

  QuadratureSpec dspec;
  dspec.rel_tol = 1e-9;
  dspec.abs_tol = 1e-14;
  const auto D = [&](double r) {
    Integrand1D w = [&](double x) {
      return std::pow(x, d - 1.0) * std::pow(1.0 + x, d - 1.0) *
             std::exp(-2.0 * lambda * r * x);
    };
    return integrate_1d_power_singular(w, 0.0, 2000.0, d - 1.0, 0.0, dspec).value;
  };

  for (double t : {1.0, 1.5}) {
    const auto lweight = [&](double y) {
      return positive_part_pow(t - y, fp.beta) - positive_part_pow(-y, fp.beta);
    };
    QuadratureSpec ospec;
    ospec.rel_tol = 1e-7;
    ospec.abs_tol = 1e-12;
    const double T = 2e4;  // beta = 0.1: tail ~ T^{-0.8} per axis pair
    Integrand1D outer = [&](double u) {
      DiagGapIntegrand inner = [&](double vv, double g, int side) {
        const double v = vv;
        (void)v;
        const double dv = D(g);
        return lweight(u) * lweight(u + side * g) *
               std::exp(-lambda * k * g) * std::pow(g, k * (2.0 * d - 1.0)) * dv * dv;
      };
      // inner integral over v = u + side*g, v in [-T, t]
      Integrand1D right = [&](double g) { return inner(u, g, +1); };
      Integrand1D left = [&](double g) { return inner(u, g, -1); };
      const double pk = k * (2.0 * d - 1.0);
      double acc = 0.0;
      acc += integrate_1d_power_singular(right, 0.0, t - u, pk, 0.0, ospec).value;
      acc += integrate_1d_power_singular(left, 0.0, u + T, pk, 0.0, ospec).value;
      return acc;
    };
    const double oracle =
        2.0 * integrate_1d(outer, -T, t, ospec).value;  // k! = 2 for k = 2

    const double mine = variance_filtered_hermite(t, fp, kSpec);
    CHECK(mine == doctest::Approx(oracle).epsilon(1e-4));
  }
}

TEST_CASE("filtered covariance symmetry and variance reduction") {
  const FilterParams fp = FilterParams::make(HermiteParams::from_H(2, 0.75, 1.0), 0.1);
  const double cts = cov_filtered_hermite(0.8, 1.2, fp, kSpec);
  const double cst = cov_filtered_hermite(1.2, 0.8, fp, kSpec);
  CHECK(cts == doctest::Approx(cst).epsilon(1e-10));
  CHECK(cov_filtered_hermite(1.0, 1.0, fp, kSpec) ==
        doctest::Approx(variance_filtered_hermite(1.0, fp, kSpec)).epsilon(1e-10));
}

TEST_CASE("filtered cumulant m=2 equals the filtered variance") {
  const FilterParams fp = FilterParams::make(HermiteParams::from_H(2, 0.75, 1.0), 0.1);
  for (double t : {1.0, 1.5}) {
    const double c2 = cumulant_filtered_rosenblatt(t, 2, fp, kSpec);
    const double var = variance_filtered_hermite(t, fp, kSpec);
    CHECK(c2 == doctest::Approx(var).epsilon(1e-3));
  }
}

TEST_CASE("filtered normalization flag scales by beta^{-m}") {
  const HermiteParams base = HermiteParams::from_H(2, 0.75, 1.0);
  const FilterParams norm = FilterParams::make(base, 0.1, true);
  const FilterParams plain = FilterParams::make(base, 0.1, false);
  for (int m : {2, 3}) {
    QuadratureSpec coarse;
    coarse.rel_tol = 1e-4;
    const double a = cumulant_filtered_rosenblatt(1.0, m, norm, coarse);
    const double b = cumulant_filtered_rosenblatt(1.0, m, plain, coarse);
    CHECK(a == doctest::Approx(b / std::pow(0.1, m)).epsilon(1e-10));
  }
}

TEST_CASE("filtered cumulant approaches the filtered limit") {
  const HermiteParams base0 = HermiteParams::from_H(2, 0.6, 1.0);
  const FilterParams fp0 = FilterParams::make(base0, -0.2);
  const double lim = cumulant_filtered_limit(1.0, 2, fp0, kSpec);
  double prev = 1e300;
  for (double lambda : {1.0, 0.1, 0.01}) {
    FilterParams fp = fp0;
    fp.base = HermiteParams::from_H(2, 0.6, lambda);
    const double gap = std::fabs(cumulant_filtered_rosenblatt(1.0, 2, fp, kSpec) - lim);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("filtered scaling law") {
  const FilterParams fp = FilterParams::make(HermiteParams::from_H(2, 0.75, 1.0), 0.1);
  const ScalingReport rep = verify_scaling_filtered(fp, 2.0, 1.0, kSpec, 1e-4);
  CHECK(rep.pass);
}

TEST_CASE("stationary increments from the covariance") {
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  const StationarityReport rep =
      verify_stationarity(p, {{0.5, 1.0}, {2.0, 1.0}}, kSpec, 1e-5);
  CHECK(rep.pass);

  // h = 0 increments vanish identically
  const StationarityReport zero = verify_stationarity(p, {{1.0, 0.0}}, kSpec, 1e-5);
  CHECK(zero.second_moment[0] == 0.0);

  // increment variance equals the variance at the increment length
  CHECK(rep.second_moment[0] ==
        doctest::Approx(cov_hermite(1.0, 1.0, p, kSpec)).epsilon(1e-5));
}

TEST_CASE("covariance Gram matrix is positive semidefinite") {
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  const std::vector<double> ts = {0.3, 0.7, 1.1, 1.6, 2.2};
  const int n = static_cast<int>(ts.size());
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      G(i, j) = cov_hermite(ts[i], ts[j], p, kSpec);
      G(j, i) = G(i, j);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  CHECK(es.eigenvalues()(0) >= -1e-8 * es.eigenvalues()(n - 1));
}

TEST_CASE("holder bound on the increment variance") {
  // Var(Z(r)) <= C r^{2H} with C fitted once from the smallest scale
  const HermiteParams p = HermiteParams::from_H(2, 0.75, 1.0);
  std::vector<double> rs = {1e-3, 1e-2, 0.1, 0.3, 1.0};
  const double c_fit =
      cov_hermite(rs[0], rs[0], p, kSpec) / std::pow(rs[0], 2.0 * p.H) * (1.0 + 1e-6);
  for (double r : rs)
    CHECK(cov_hermite(r, r, p, kSpec) <= c_fit * std::pow(r, 2.0 * p.H));
}
