#include "tghp/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tghp {

namespace {

[[noreturn]] void reject(const std::string& what) { throw std::invalid_argument(what); }

double parse_double(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) reject("missing parameter key: " + key);
  return std::stod(it->second);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

HermiteParams HermiteParams::from_H(int k, double H, double lambda) {
  if (k < 1) reject("HermiteParams: chaos order k must be >= 1");
  if (!(H > 0.5 && H < 1.0)) reject("HermiteParams: H must lie in (1/2, 1), got " + fmt(H));
  if (!(lambda >= 0.0)) reject("HermiteParams: lambda must be >= 0");
  HermiteParams p;
  p.k = k;
  p.H = H;
  p.lambda = lambda;
  p.d = 0.5 - (1.0 - H) / k;
  p.alpha = k * (p.d - 1.0);  // == H - k/2 - 1
  return p;
}

HermiteParams HermiteParams::from_d(int k, double d, double lambda) {
  const double H = 1.0 - k * (0.5 - d);
  if (!(H > 0.5 && H < 1.0))
    reject("HermiteParams: d = " + fmt(d) + " implies H outside (1/2, 1)");
  return from_H(k, H, lambda);
}

FilterParams FilterParams::make(const HermiteParams& base, double beta, bool normalized) {
  const double lo = -base.alpha - 0.5 * base.k - 1.0;  // == -H
  const double hi = -base.alpha - 0.5 * base.k;        // == 1 - H
  if (beta == 0.0) reject("FilterParams: beta must be nonzero");
  if (!(beta > lo && beta < hi))
    reject("FilterParams: beta must lie in (" + fmt(lo) + ", " + fmt(hi) + "), got " + fmt(beta));
  FilterParams fp;
  fp.base = base;
  fp.beta = beta;
  fp.normalized = normalized;
  return fp;
}

HermiteParams hermite_params_from_config(const std::map<std::string, std::string>& kv) {
  const int k = static_cast<int>(parse_double(kv, "k"));
  const double lambda = parse_double(kv, "lambda");
  if (kv.count("d")) {
    HermiteParams p = HermiteParams::from_d(k, std::stod(kv.at("d")), lambda);
    if (kv.count("H")) {
      const double H = std::stod(kv.at("H"));
      if (std::fabs(H - p.H) > 1e-9)
        reject("parameter file gives both H and d but they disagree");
    }
    return p;
  }
  return HermiteParams::from_H(k, parse_double(kv, "H"), lambda);
}

std::map<std::string, std::string> hermite_params_to_config(const HermiteParams& p) {
  return {{"k", std::to_string(p.k)},
          {"H", fmt(p.H)},
          {"d", fmt(p.d)},
          {"lambda", fmt(p.lambda)}};
}

FilterParams filter_params_from_config(const std::map<std::string, std::string>& kv) {
  HermiteParams base = hermite_params_from_config(kv);
  if (!kv.count("beta")) reject("missing parameter key: beta");
  bool normalized = true;
  if (kv.count("normalized")) {
    const std::string& v = kv.at("normalized");
    normalized = !(v == "0" || v == "false" || v == "no");
  }
  return FilterParams::make(base, std::stod(kv.at("beta")), normalized);
}

std::map<std::string, std::string> filter_params_to_config(const FilterParams& fp) {
  auto kv = hermite_params_to_config(fp.base);
  kv["beta"] = fmt(fp.beta);
  kv["normalized"] = fp.normalized ? "true" : "false";
  return kv;
}

}  // namespace tghp
