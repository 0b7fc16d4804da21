#pragma once

#include <map>
#include <string>

namespace tghp {

// Parameter algebra for the tempered Hermite family. All derived
// quantities are filled at construction; instances are immutable in use.
//
//   d     = 1/2 - (1-H)/k          per-coordinate kernel exponent
//   alpha = k (d - 1) = H - k/2 - 1  homogeneity degree, in (-(k+1)/2, -k/2)
//   H     = alpha + 1 + k/2        self-similarity index, in (1/2, 1)
struct HermiteParams {
  int k = 2;
  double H = 0.75;
  double d = 0.375;
  double alpha = -1.25;
  double lambda = 1.0;  // tempering; 0 only for limit comparisons

  // Throws std::invalid_argument naming the violated range.
  static HermiteParams from_H(int k, double H, double lambda);
  // As above but with d supplied directly (H derived).
  static HermiteParams from_d(int k, double d, double lambda);
};

// Fractional filter parameters. The weight is
//   l_t^beta(s) = (t-s)_+^beta - (-s)_+^beta,
// divided by beta when normalized. Valid range
//   -alpha - k/2 - 1 < beta < -alpha - k/2,  beta != 0,
// i.e. beta in (-H, 1-H), which puts the effective self-similarity index
//   H_f = beta + 1 + alpha + k/2 = beta + H  in (0, 1).
struct FilterParams {
  HermiteParams base;
  double beta = 0.1;
  bool normalized = true;

  double hurst() const { return beta + 1.0 + base.alpha + 0.5 * base.k; }

  static FilterParams make(const HermiteParams& base, double beta, bool normalized = true);
};

// Plain-text configuration exchange (keys: k, H, d, lambda, beta,
// normalized). d is optional and derived from H when absent.
HermiteParams hermite_params_from_config(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> hermite_params_to_config(const HermiteParams& p);
FilterParams filter_params_from_config(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> filter_params_to_config(const FilterParams& fp);

}  // namespace tghp
