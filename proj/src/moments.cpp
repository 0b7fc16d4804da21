#include "tghp/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tghp/report.hpp"
#include "tghp/special_functions.hpp"

namespace tghp {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Gamma continued to negative non-integer arguments by reflection; only
// used for the side-by-side limit constant.
double gamma_any(double x) {
  if (x > 0.0) return gamma_fn(x);
  return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
}

// One link of the second-chaos cyclic chain: K_{1/2-d}(lambda r) r^{d-1/2},
// which behaves like c r^{2d-1} near r = 0 and decays like e^{-lambda r}.
struct ChainFactor {
  double d, lambda, nu;
  explicit ChainFactor(const HermiteParams& p) : d(p.d), lambda(p.lambda), nu(0.5 - p.d) {}
  double operator()(double r) const {
    return bessel_k(nu, lambda * r) * std::pow(r, d - 0.5);
  }
};

// Tabulated chain factor: a natural cubic spline of log f against log r.
// log f is within ~1e-9 of linear between nodes at this resolution, so
// lookups reproduce the direct evaluation to better than 1e-7 relative
// while costing nanoseconds instead of a Bessel quadrature per call.
// Below the table the exact small-argument power law takes over; above
// it (past the tempering truncation) the standard decay asymptote does.
class ChainFactorTable {
 public:
  ChainFactorTable(double d, double lambda) : d_(d), lambda_(lambda), nu_(0.5 - d) {
    lo_ = std::min(1e-8, 1e-8 / lambda_);
    hi_ = 650.0 / lambda_;  // log f stays representable up to here
    small_coef_ = std::pow(2.0, nu_ - 1.0) * gamma_fn(nu_) * std::pow(lambda_, -nu_);
    const int n = 4096;
    x_.resize(n);
    y_.resize(n);
    const double step = (std::log(hi_) - std::log(lo_)) / (n - 1);
    for (int i = 0; i < n; ++i) {
      x_[i] = std::log(lo_) + i * step;
      const double r = std::exp(x_[i]);
      y_[i] = std::log(bessel_k(nu_, lambda_ * r) * std::pow(r, d_ - 0.5));
    }
    build_spline();
  }

  double operator()(double r) const {
    if (!(r > 0.0)) return std::numeric_limits<double>::infinity();
    if (r >= hi_) {
      const double z = lambda_ * r;
      if (z > 690.0) return 0.0;
      return std::sqrt(M_PI / (2.0 * z)) * std::exp(-z) * std::pow(r, d_ - 0.5);
    }
    if (r < lo_) return small_coef_ * std::pow(r, 2.0 * d_ - 1.0);
    const double x = std::log(r);
    const double step = (x_.back() - x_.front()) / (x_.size() - 1);
    std::size_t i = std::min(x_.size() - 2,
                             static_cast<std::size_t>((x - x_.front()) / step));
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    const double val = a * y_[i] + b * y_[i + 1] +
                       ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    return std::exp(val);
  }

 private:
  void build_spline() {
    // tridiagonal solve for natural-spline second derivatives
    const std::size_t n = x_.size();
    m_.assign(n, 0.0);
    std::vector<double> c(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1];
      const double h1 = x_[i + 1] - x_[i];
      const double diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
      c[i] = h1 / diag;
      const double r = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
      rhs[i] = (r - h0 * rhs[i - 1]) / diag;
    }
    for (std::size_t i = n - 2; i > 0; --i) m_[i] = rhs[i] - c[i] * m_[i + 1];
  }

  double d_, lambda_, nu_, lo_, hi_, small_coef_;
  std::vector<double> x_, y_, m_;
};

// Prefactor of the cyclic-integral cumulant formula,
//   2^{m-1+(1/2-d)m} (m-1)! lambda^{(1/2-d)m} (Gamma(d)/sqrt(pi))^m.
double chain_prefactor(int m, double lambda, double d) {
  return std::pow(2.0, m - 1 + (0.5 - d) * m) * factorial(m - 1) *
         std::pow(lambda, (0.5 - d) * m) * std::pow(gamma_fn(d) / std::sqrt(M_PI), m);
}

void require_second_chaos(const HermiteParams& p, const char* who) {
  if (p.k != 2) throw std::invalid_argument(std::string(who) + ": requires k = 2");
  if (!(p.lambda > 0.0)) throw std::invalid_argument(std::string(who) + ": requires lambda > 0");
}

// ---- cyclic integrals in gap coordinates -------------------------------
//
// The cyclic product prod_i f(|s_i - s_{i+1}|) over [0,t]^m only depends
// on the consecutive gaps of the order statistics, so the cube integral
// reduces exactly (Fubini plus counting the permutations that map onto
// each Hamiltonian cycle class):
//   m=2:  2 \int_0^t (t-g) f(g)^2 dg
//   m=3:  6 \int\int_{g1+g2<t} (t-g1-g2) f(g1) f(g2) f(g1+g2)
//   m=4:  8 \int\int\int_{sum<t} (t-sum) [F_A + F_B + F_C]
// with F_A = f(g1)f(g2)f(g3)f(g1+g2+g3), F_B = f(g1)f(g2+g3)f(g3)f(g1+g2),
// F_C = f(g1+g2)f(g2)f(g2+g3)f(g1+g2+g3). This moves every singular ridge
// onto coordinate axes where power-transformed panels converge fast.

struct GapSpec {
  double p_axis;    // integrable exponent of f near 0 (2d-1, or its square)
  double cut;       // truncate axes past this length (tempering), inf if none
};

double gap_integral_m2(const Integrand1D& f, double t, const GapSpec& gs,
                       const QuadratureSpec& spec, bool* ok) {
  const double hi = std::min(t, gs.cut);
  Integrand1D h = [&](double g) {
    const double v = f(g);
    return (t - g) * v * v;
  };
  IntegrationResult r = integrate_1d_power_singular(h, 0.0, hi, 2.0 * gs.p_axis, 0.0, spec);
  *ok = *ok && r.converged;
  return 2.0 * r.value;
}

double gap_integral_m3(const Integrand1D& f, double t, const GapSpec& gs,
                       const QuadratureSpec& spec, bool* ok) {
  QuadratureSpec inner = spec;
  inner.rel_tol = std::max(spec.rel_tol * 0.25, 1e-12);
  inner.abs_tol = std::max(spec.abs_tol / (4.0 * t), 1e-15);

  Integrand1D outer = [&](double g1) {
    const double f1 = f(g1);
    if (f1 == 0.0) return 0.0;
    const double hi2 = std::min(t - g1, gs.cut);
    Integrand1D h = [&](double g2) { return f(g2) * f(g1 + g2) * (t - g1 - g2); };
    IntegrationResult r = integrate_1d_power_singular(h, 0.0, hi2, gs.p_axis, 0.0, inner);
    *ok = *ok && r.converged;
    return f1 * r.value;
  };
  IntegrationResult r =
      integrate_1d_power_singular(outer, 0.0, std::min(t, gs.cut), gs.p_axis, 0.0, spec);
  *ok = *ok && r.converged;
  return 6.0 * r.value;
}

double gap_integral_m4(const Integrand1D& f, double t, const GapSpec& gs,
                       const QuadratureSpec& spec, bool* ok) {
  QuadratureSpec mid = spec;
  mid.rel_tol = std::max(spec.rel_tol * 0.5, 1e-10);
  mid.abs_tol = std::max(spec.abs_tol / (4.0 * t), 1e-15);
  QuadratureSpec inner = mid;
  inner.rel_tol = std::max(mid.rel_tol * 0.5, 1e-10);

  Integrand1D o1 = [&](double g1) {
    Integrand1D o2 = [&](double g2) {
      const double hi3 = std::min(t - g1 - g2, gs.cut);
      Integrand1D o3 = [&](double g3) {
        const double w = t - g1 - g2 - g3;
        const double fa = f(g1) * f(g2) * f(g3) * f(g1 + g2 + g3);
        const double fb = f(g1) * f(g2 + g3) * f(g3) * f(g1 + g2);
        const double fc = f(g1 + g2) * f(g2) * f(g2 + g3) * f(g1 + g2 + g3);
        return w * (fa + fb + fc);
      };
      IntegrationResult r = integrate_1d_power_singular(o3, 0.0, hi3, gs.p_axis, 0.0, inner);
      *ok = *ok && r.converged;
      return r.value;
    };
    const double hi2 = std::min(t - g1, gs.cut);
    IntegrationResult r = integrate_1d_power_singular(o2, 0.0, hi2, gs.p_axis, 0.0, mid);
    *ok = *ok && r.converged;
    return r.value;
  };
  IntegrationResult r =
      integrate_1d_power_singular(o1, 0.0, std::min(t, gs.cut), gs.p_axis, 0.0, spec);
  *ok = *ok && r.converged;
  return 8.0 * r.value;
}

double cyclic_gap_integral(const Integrand1D& f, double t, int m, const GapSpec& gs,
                           const QuadratureSpec& spec, bool* ok) {
  switch (m) {
    case 2:
      return gap_integral_m2(f, t, gs, spec, ok);
    case 3:
      return gap_integral_m3(f, t, gs, spec, ok);
    case 4:
      return gap_integral_m4(f, t, gs, spec, ok);
    default:
      throw std::invalid_argument("cumulant order m must be in [2, 4]");
  }
}

// ---- filtered weights ---------------------------------------------------
//
// The weight pieces below are always integrated in a local coordinate
// anchored at the point where a branch of l_t^beta vanishes, so the
// branch value is computed without subtraction loss next to its own
// singularity (beta < 0 makes those ends integrable blow-ups).

// (y+t)^beta - y^beta without cancellation for y >> t
double pow_diff(double y, double t, double beta) {
  if (y <= 0.0) return std::pow(t + y, beta) - (y == 0.0 ? 0.0 : std::pow(y, beta));
  const double ratio = t / y;
  if (ratio > 0.5) return std::pow(y + t, beta) - std::pow(y, beta);
  return std::pow(y, beta) * std::expm1(beta * std::log1p(ratio));
}

// \int_0^len l_t(base+g) F(g) dg, l unnormalized, F with an integrable
// g^{p_f} singularity at 0; len never exceeds the support edge t-base.
double l_weighted_integral(double t, double beta, double base, double len, const Integrand1D& F,
                           double p_f, const QuadratureSpec& spec, bool* ok) {
  if (!(len > 0.0)) return 0.0;
  const double A = t - base;  // support edge distance
  const double p_beta = beta;
  const bool edge = len >= A * (1.0 - 1e-12);

  IntegrationResult total;
  total.converged = true;
  const auto accumulate = [&](const IntegrationResult& r) {
    total.value += r.value;
    total.converged = total.converged && r.converged;
  };

  if (base >= 0.0) {
    // single weight branch (A-g)^beta
    const double split = edge && p_f < 0.0 ? 0.5 * len : len;
    if (split > 0.0) {
      Integrand1D h = [&](double g) { return std::pow(A - g, beta) * F(g); };
      accumulate(integrate_1d_power_singular(h, 0.0, split, p_f,
                                             (split == len && edge) ? p_beta : 0.0, spec));
    }
    if (split < len) {
      // right part in zeta = A - g, anchored at the support edge
      Integrand1D h = [&](double zeta) {
        if (!(zeta > 0.0)) return 0.0;
        const double g = A - zeta;
        return g > 0.0 ? std::pow(zeta, beta) * F(g) : 0.0;
      };
      // len may differ from A by an ulp when both derive from t - base
      accumulate(integrate_1d_power_singular(h, std::max(0.0, A - len), A - split,
                                             edge ? p_beta : 0.0, 0.0, spec));
    }
  } else {
    const double gk = -base;  // branch crossing: base + g = 0
    // piece over g < gk, two branches (A-g)^beta - (gk-g)^beta
    const double lo_len = std::min(len, gk);
    const double split = 0.5 * lo_len;
    if (split > 0.0) {
      Integrand1D h = [&](double g) {
        return pow_diff(gk - g, t, beta) * F(g);
      };
      accumulate(integrate_1d_power_singular(h, 0.0, split, p_f, 0.0, spec));
    }
    if (lo_len > split) {
      // in eta = gk - g: weight (t+eta)^beta - eta^beta, exact at eta = 0
      Integrand1D h = [&](double eta) {
        const double g = gk - eta;
        if (!(g > 0.0)) return 0.0;
        return pow_diff(eta, t, beta) * F(g);
      };
      accumulate(integrate_1d_power_singular(h, gk - lo_len, gk - split,
                                             lo_len >= gk * (1.0 - 1e-12) ? p_beta : 0.0, 0.0,
                                             spec));
    }
    if (len > gk) {
      // past the crossing the weight is (A-g)^beta; use zeta = A - g
      Integrand1D h = [&](double zeta) {
        if (!(zeta > 0.0)) return 0.0;
        const double g = A - zeta;
        return g > 0.0 ? std::pow(zeta, beta) * F(g) : 0.0;
      };
      accumulate(integrate_1d_power_singular(h, std::max(0.0, A - len), t,
                                             edge ? p_beta : 0.0, 0.0, spec));
    }
  }
  *ok = *ok && total.converged;
  return total.value;
}

struct FilteredDomain {
  double T = 0.0;  // left truncation of the weight support
};

FilteredDomain filtered_domain(double t, double beta, double tail_growth,
                               const QuadratureSpec& spec) {
  // the u-integrand decays like |u|^{2(beta-1)+tail_growth}
  const double q_tail = 2.0 * beta - 1.0 + tail_growth;
  if (!(q_tail < 0.0))
    throw std::invalid_argument("filtered integral: weight tail does not decay");
  const double tol = std::min(1e-7, spec.rel_tol);
  FilteredDomain d;
  d.T = std::min(1e15, t + std::pow(tol, 1.0 / q_tail));
  return d;
}

// 2 \int_{u<t} l_t(u) [ \int_0^{min(t-u, cut)} l_t(u+g) F(g) dg ] du
double filtered_pair_core(double t, double beta, const Integrand1D& F, double p_f, double cut,
                          double tail_growth, const QuadratureSpec& spec, bool* ok) {
  const FilteredDomain dom = filtered_domain(t, beta, tail_growth, spec);
  const double p_beta = beta;

  QuadratureSpec ispec = spec;
  ispec.rel_tol = std::max(spec.rel_tol * 0.25, 1e-12);
  ispec.abs_tol = std::max(spec.abs_tol / (4.0 * (dom.T + t)), 1e-16);

  const auto inner = [&](double u) {
    return l_weighted_integral(t, beta, u, std::min(t - u, cut), F, p_f, ispec, ok);
  };

  // u = -xi < 0: weight (t+xi)^beta - xi^beta, anchored at xi = 0
  Integrand1D neg = [&](double xi) { return pow_diff(xi, t, beta) * inner(-xi); };
  // u = t - zeta in [0, t): weight zeta^beta, anchored at u = t
  Integrand1D pos = [&](double zeta) { return std::pow(zeta, beta) * inner(t - zeta); };

  bool ook = true;
  IntegrationResult rn = integrate_1d_power_singular(neg, 0.0, dom.T, p_beta, 0.0, spec);
  IntegrationResult rp = integrate_1d_power_singular(pos, 0.0, t, p_beta, 0.0, spec);
  ook = rn.converged && rp.converged;
  *ok = *ok && ook;
  return 2.0 * (rn.value + rp.value);
}

// 6 \int_u l(u) \int_{g1} l(u+g1) f(g1) \int_{g2} l(u+g1+g2) f(g2) f(g1+g2)
double filtered_triple_core(double t, double beta, const Integrand1D& f, double p_f, double cut,
                            double tail_growth, const QuadratureSpec& spec, bool* ok) {
  const FilteredDomain dom = filtered_domain(t, beta, tail_growth, spec);
  const double p_beta = beta;

  QuadratureSpec mspec = spec;
  mspec.rel_tol = std::max(spec.rel_tol * 0.5, 1e-10);
  mspec.abs_tol = std::max(spec.abs_tol / (4.0 * (dom.T + t)), 1e-16);
  QuadratureSpec ispec = mspec;
  ispec.rel_tol = std::max(mspec.rel_tol * 0.5, 1e-10);

  const auto mid = [&](double u) {
    Integrand1D f_mid = [&](double g1) {
      const double f1 = f(g1);
      if (f1 == 0.0) return 0.0;
      Integrand1D f_in = [&](double g2) { return f(g2) * f(g1 + g2); };
      const double len2 = std::min(t - u - g1, cut);
      return f1 * l_weighted_integral(t, beta, u + g1, len2, f_in, p_f, ispec, ok);
    };
    return l_weighted_integral(t, beta, u, std::min(t - u, cut), f_mid, p_f, mspec, ok);
  };

  Integrand1D neg = [&](double xi) { return pow_diff(xi, t, beta) * mid(-xi); };
  Integrand1D pos = [&](double zeta) { return std::pow(zeta, beta) * mid(t - zeta); };

  bool ook = true;
  IntegrationResult rn = integrate_1d_power_singular(neg, 0.0, dom.T, p_beta, 0.0, spec);
  IntegrationResult rp = integrate_1d_power_singular(pos, 0.0, t, p_beta, 0.0, spec);
  ook = rn.converged && rp.converged;
  *ok = *ok && ook;
  return 6.0 * (rn.value + rp.value);
}

}  // namespace

double bessel_product_identity(double tau, double lambda, double u, double v) {
  if (!(tau > 0.0 && tau < 0.5))
    throw std::invalid_argument("bessel_product_identity: tau in (0, 1/2)");
  if (!(lambda > 0.0)) throw std::invalid_argument("bessel_product_identity: lambda > 0");
  const double r = std::fabs(u - v);
  if (r == 0.0) throw std::invalid_argument("bessel_product_identity: u != v required");
  return std::pow(2.0 * lambda, 0.5 - tau) * (gamma_fn(tau) / std::sqrt(M_PI)) *
         bessel_k(0.5 - tau, lambda * r) * std::pow(r, tau - 0.5);
}

IntegrationResult cov_hermite_ex(double t, double s, const HermiteParams& p,
                                 const QuadratureSpec& spec) {
  if (!(p.lambda > 0.0)) throw std::invalid_argument("cov_hermite: requires lambda > 0");
  if (t < 0.0 || s < 0.0) throw std::invalid_argument("cov_hermite: t, s >= 0");
  if (t == 0.0 || s == 0.0) return {0.0, 0.0, 0, true};

  const int k = p.k;
  const ChainFactorTable f(p.d, p.lambda);
  const double pref =
      factorial(k) *
      std::pow(gamma_fn(p.d) / (std::sqrt(M_PI) * std::pow(2.0 * p.lambda, p.d - 0.5)), k);

  DiagGapIntegrand F = [&f, k](double, double g, int) { return std::pow(f(g), k); };
  IntegrationResult r = integrate_2d_diag_singular(F, {0.0, t, 0.0, s},
                                                   k * (2.0 * p.d - 1.0), spec);
  r.value *= pref;
  r.error_estimate *= pref;
  return r;
}

double cov_hermite(double t, double s, const HermiteParams& p, const QuadratureSpec& spec) {
  return cov_hermite_ex(t, s, p, spec).value;
}

double cov_general_product(double t, double s, const std::function<double(double)>& g1,
                           const HermiteParams& p, const QuadratureSpec& spec) {
  if (!(p.lambda > 0.0)) throw std::invalid_argument("cov_general_product: lambda > 0");
  if (t <= 0.0 || s <= 0.0) return 0.0;

  const int k = p.k;
  const double lambda = p.lambda;
  QuadratureSpec dspec = spec;
  dspec.rel_tol = std::max(spec.rel_tol * 0.1, 1e-11);

  const auto D = [&](double r) {
    Integrand1D w = [&](double x) { return g1(x) * g1(r + x); };
    return integrate_1d_upper_tail(w, 0.0, 1.0 / (2.0 * lambda), dspec).value;
  };

  DiagGapIntegrand F = [&](double, double g, int) {
    return std::exp(-lambda * k * g) * std::pow(D(g), k);
  };
  IntegrationResult r =
      integrate_2d_diag_singular(F, {0.0, t, 0.0, s}, k * (2.0 * p.d - 1.0), spec);
  return factorial(k) * r.value;
}

double variance_filtered_hermite(double t, const FilterParams& fp, const QuadratureSpec& spec) {
  const HermiteParams& p = fp.base;
  if (!(p.lambda > 0.0))
    throw std::invalid_argument("variance_filtered_hermite: requires lambda > 0");
  const double at = std::fabs(t);
  if (at == 0.0) return 0.0;

  const int k = p.k;
  const double scaled_lambda = p.lambda * at;

  // kernel of the unit-time weight integral: g^{k(d-1/2)} K^k(lambda|t| g)
  const ChainFactorTable chain(p.d, scaled_lambda);
  Integrand1D F = [&](double g) { return std::pow(chain(g), k); };

  bool ok = true;
  const double cut = spec.truncation_decades / (k * scaled_lambda);
  const double core =
      filtered_pair_core(1.0, fp.beta, F, k * (2.0 * p.d - 1.0), cut, 0.0, spec, &ok);

  double pref =
      factorial(k) *
      std::pow(gamma_fn(p.d) / (std::sqrt(M_PI) * std::pow(2.0 * p.lambda, p.d - 0.5)), k);
  if (fp.normalized) pref /= fp.beta * fp.beta;

  // variance growth exponent 2 beta + k(d - 1/2) + 2: the two weight
  // substitutions contribute t^{2 beta}, the kernel t^{k(d-1/2)} and the
  // area element t^2 (this is 2 H_f - k(d-1/2), consistent with the
  // scaling law under lambda -> t lambda)
  const double growth = 2.0 * fp.beta + k * (p.d - 0.5) + 2.0;
  return pref * core * std::pow(at, growth);
}

IntegrationResult cov_filtered_hermite_ex(double t, double s, const FilterParams& fp,
                                          const QuadratureSpec& spec) {
  IntegrationResult out;
  const double vt = variance_filtered_hermite(t, fp, spec);
  const double vs = variance_filtered_hermite(s, fp, spec);
  const double vts = variance_filtered_hermite(t - s, fp, spec);
  out.value = 0.5 * (vt + vs - vts);
  out.error_estimate = spec.rel_tol * (std::fabs(vt) + std::fabs(vs) + std::fabs(vts));
  out.converged = true;
  return out;
}

double cov_filtered_hermite(double t, double s, const FilterParams& fp,
                            const QuadratureSpec& spec) {
  return cov_filtered_hermite_ex(t, s, fp, spec).value;
}

double cumulant_rosenblatt(double t, int m, const HermiteParams& p, const QuadratureSpec& spec) {
  require_second_chaos(p, "cumulant_rosenblatt");
  if (m < 2 || m > 4) throw std::invalid_argument("cumulant_rosenblatt: m in [2, 4]");
  if (!(t > 0.0)) throw std::invalid_argument("cumulant_rosenblatt: t > 0");

  const ChainFactorTable f(p.d, p.lambda);
  GapSpec gs;
  gs.p_axis = 2.0 * p.d - 1.0;
  gs.cut = spec.truncation_decades / (2.0 * p.lambda);
  bool ok = true;
  const double integral =
      cyclic_gap_integral([&f](double r) { return f(r); }, t, m, gs, spec, &ok);
  return chain_prefactor(m, p.lambda, p.d) * integral;
}

double cumulant_i2_discrete(const Eigen::MatrixXd& A, int m) {
  if (m < 2) throw std::invalid_argument("cumulant_i2_discrete: m >= 2");
  if (A.rows() != A.cols()) throw std::invalid_argument("cumulant_i2_discrete: square matrix");
  Eigen::MatrixXd B = A;
  for (int i = 1; i < m - 1; ++i) B = (B * A).eval();
  // trace(A^m) = <A^{m-1}, A^T> done entrywise; A is symmetric
  const double tr = (m == 2) ? A.squaredNorm() : B.cwiseProduct(A).sum();
  return std::pow(2.0, m - 1) * factorial(m - 1) * tr;
}

double limit_constant(int m, double d, LimitConstant which) {
  if (which == LimitConstant::derived)
    return std::pow(2.0, m - 1 - 2.0 * d * m) * factorial(m - 1) *
           std::pow(gamma_fn(d) * gamma_fn(0.5 - d) / std::sqrt(M_PI), m);
  return 0.5 * factorial(m - 1) *
         std::pow(gamma_fn(d) * gamma_any(d - 0.5) / std::sqrt(M_PI), m);
}

double cumulant_rosenblatt_limit(double t, int m, double d, const QuadratureSpec& spec,
                                 LimitConstant which) {
  if (!(d > 0.25 && d < 0.5))
    throw std::invalid_argument("cumulant_rosenblatt_limit: d in (1/4, 1/2)");
  if (m < 2 || m > 4) throw std::invalid_argument("cumulant_rosenblatt_limit: m in [2, 4]");
  if (!(t > 0.0)) throw std::invalid_argument("cumulant_rosenblatt_limit: t > 0");

  const double e = 2.0 * d - 1.0;
  GapSpec gs;
  gs.p_axis = e;
  gs.cut = std::numeric_limits<double>::infinity();
  bool ok = true;
  const double integral =
      cyclic_gap_integral([e](double r) { return std::pow(r, e); }, t, m, gs, spec, &ok);
  return limit_constant(m, d, which) * integral;
}

double cumulant_filtered_rosenblatt(double t, int m, const FilterParams& fp,
                                    const QuadratureSpec& spec) {
  require_second_chaos(fp.base, "cumulant_filtered_rosenblatt");
  if (m < 2 || m > 3) throw std::invalid_argument("cumulant_filtered_rosenblatt: m in [2, 3]");
  if (!(t > 0.0)) throw std::invalid_argument("cumulant_filtered_rosenblatt: t > 0");

  const HermiteParams& p = fp.base;
  const ChainFactorTable f(p.d, p.lambda);
  const double p1 = 2.0 * p.d - 1.0;
  const double cut = spec.truncation_decades / (2.0 * p.lambda);

  bool ok = true;
  double core;
  if (m == 2) {
    Integrand1D F = [&f](double g) {
      const double v = f(g);
      return v * v;
    };
    core = filtered_pair_core(t, fp.beta, F, 2.0 * p1, cut, 0.0, spec, &ok);
  } else {
    core = filtered_triple_core(t, fp.beta, [&f](double r) { return f(r); }, p1, cut, 0.0,
                                spec, &ok);
  }

  double pref = chain_prefactor(m, p.lambda, p.d);
  if (fp.normalized) pref /= std::pow(fp.beta, m);
  return pref * core;
}

double cumulant_filtered_limit(double t, int m, const FilterParams& fp,
                               const QuadratureSpec& spec) {
  if (m != 2)
    throw std::invalid_argument("cumulant_filtered_limit: only m = 2 is supported");
  const double d = fp.base.d;
  if (!(d > 0.25 && d < 0.5))
    throw std::invalid_argument("cumulant_filtered_limit: d in (1/4, 1/2)");

  const double e = 2.0 * (2.0 * d - 1.0);
  Integrand1D F = [e](double g) { return std::pow(g, e); };
  bool ok = true;
  // untempered kernel: the inner g-integral grows like (t-u)^{4d-1}
  const double core = filtered_pair_core(t, fp.beta, F, e,
                                         std::numeric_limits<double>::infinity(),
                                         4.0 * d - 1.0, spec, &ok);
  double pref = limit_constant(m, d, LimitConstant::derived);
  if (fp.normalized) pref /= std::pow(fp.beta, m);
  return pref * core;
}

StationarityReport verify_stationarity(const HermiteParams& p,
                                       const std::vector<std::pair<double, double>>& pairs,
                                       const QuadratureSpec& spec, double tol) {
  StationarityReport rep;
  for (const auto& [t, h] : pairs) {
    double m2;
    if (h == 0.0) {
      m2 = 0.0;
    } else {
      const double vth = cov_hermite(t + h, t + h, p, spec);
      const double vt = cov_hermite(t, t, p, spec);
      const double cross = cov_hermite(t + h, t, p, spec);
      m2 = vth - 2.0 * cross + vt;
    }
    rep.t.push_back(t);
    rep.h.push_back(h);
    rep.second_moment.push_back(m2);
  }

  // compare entries sharing the same increment length
  rep.pass = true;
  for (std::size_t i = 0; i < rep.h.size(); ++i)
    for (std::size_t j = i + 1; j < rep.h.size(); ++j)
      if (rep.h[i] == rep.h[j]) {
        const double denom = std::max(std::fabs(rep.second_moment[i]), 1e-300);
        const double rel = std::fabs(rep.second_moment[i] - rep.second_moment[j]) / denom;
        rep.max_rel_discrepancy = std::max(rep.max_rel_discrepancy, rel);
      }
  rep.pass = rep.max_rel_discrepancy <= tol;
  return rep;
}

ScalingReport verify_scaling(const HermiteParams& p, double c, double t,
                             const std::vector<int>& cumulant_orders,
                             const QuadratureSpec& spec, double cov_tol, double cum_tol) {
  if (!(c > 0.0)) throw std::invalid_argument("verify_scaling: c > 0");
  ScalingReport rep;
  const HermiteParams pc = HermiteParams::from_H(p.k, p.H, c * p.lambda);

  {
    ScalingCheck chk;
    chk.name = "cov(ct,ct;lambda) = c^{2H} cov(t,t;c lambda), c=" + std::to_string(c);
    chk.lhs = cov_hermite(c * t, c * t, p, spec);
    chk.rhs = std::pow(c, 2.0 * p.H) * cov_hermite(t, t, pc, spec);
    chk.rel_err = rel_err(chk.lhs, chk.rhs);
    chk.pass = chk.rel_err <= cov_tol;
    rep.checks.push_back(chk);
  }

  for (int m : cumulant_orders) {
    ScalingCheck chk;
    chk.name = "C_" + std::to_string(m) + "(ct;lambda) = c^{mH} C_" + std::to_string(m) +
               "(t;c lambda), c=" + std::to_string(c);
    chk.lhs = cumulant_rosenblatt(c * t, m, p, spec);
    chk.rhs = std::pow(c, m * p.H) * cumulant_rosenblatt(t, m, pc, spec);
    chk.rel_err = rel_err(chk.lhs, chk.rhs);
    chk.pass = chk.rel_err <= cum_tol;
    rep.checks.push_back(chk);
  }

  rep.pass = true;
  for (const auto& chk : rep.checks) rep.pass = rep.pass && chk.pass;
  return rep;
}

ScalingReport verify_scaling_filtered(const FilterParams& fp, double c, double t,
                                      const QuadratureSpec& spec, double tol) {
  if (!(c > 0.0)) throw std::invalid_argument("verify_scaling_filtered: c > 0");
  ScalingReport rep;
  FilterParams fpc = fp;
  fpc.base = HermiteParams::from_H(fp.base.k, fp.base.H, c * fp.base.lambda);

  ScalingCheck chk;
  chk.name = "Var(ct;lambda) = c^{2H_f} Var(t;c lambda), c=" + std::to_string(c);
  chk.lhs = variance_filtered_hermite(c * t, fp, spec);
  chk.rhs = std::pow(c, 2.0 * fp.hurst()) * variance_filtered_hermite(t, fpc, spec);
  chk.rel_err = rel_err(chk.lhs, chk.rhs);
  chk.pass = chk.rel_err <= tol;
  rep.checks.push_back(chk);
  rep.pass = chk.pass;
  return rep;
}

}  // namespace tghp
