#pragma once

#include <utility>

namespace tghp {

// Gamma function for x > 0 (Lanczos approximation, relative error well
// below 1e-12 on (0, 50]). Throws std::domain_error for x <= 0.
double gamma_fn(double x);

// Dimensionless order of a modified Bessel function of the second kind.
// The toolkit only ever needs |nu| < 5; larger orders are rejected.
struct BesselOrder {
  double nu;
};

struct BesselResult {
  double value = 0.0;
  bool underflowed = false;  // true when the true value is below ~1e-300
};

// K_nu(x) for real order and x > 0, from the integral representation
//   K_nu(x) = \int_0^inf exp(-x cosh t) cosh(nu t) dt,
// symmetric in nu. Results below the underflow floor are reported as an
// exact 0 with the flag set.
BesselResult bessel_k_ex(BesselOrder nu, double x);
double bessel_k(BesselOrder nu, double x);
inline double bessel_k(double nu, double x) { return bessel_k(BesselOrder{nu}, x); }

// Leading small-argument behaviour of K_nu:
//   2^{|nu|-1} Gamma(|nu|) x^{-|nu|}   (nu != 0),   -log(x)   (nu == 0).
double bessel_k_small_arg(BesselOrder nu, double x);
inline double bessel_k_small_arg(double nu, double x) {
  return bessel_k_small_arg(BesselOrder{nu}, x);
}

// Probabilists' Hermite polynomial H_q via the three-term recurrence
// H_{q+1}(x) = x H_q(x) - q H_{q-1}(x).  q <= 20.
double hermite_polynomial(int q, double x);

}  // namespace tghp
