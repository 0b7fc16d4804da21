#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tghp/config.hpp"
#include "tghp/moments.hpp"
#include "tghp/params.hpp"
#include "tghp/regression.hpp"
#include "tghp/simulate.hpp"
#include "tghp/verify.hpp"
#include "tghp/version.hpp"

using namespace tghp;

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// temp-file-then-rename so partial output never lands under the real name
void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename into " + path);
}

struct Manifest {
  std::string subcommand;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  KeyValueConfig config;
  std::vector<std::string> outputs;

  std::string text() const {
    std::ostringstream os;
    os << "[run]\n";
    os << "subcommand = " << subcommand << "\n";
    os << "version = " << version_string << "\n";
    os << "seed = " << seed << "\n";
    os << "wall_time_s = " << wall_time_s << "\n";
    std::ostringstream cfg;
    config.write(cfg);
    os << cfg.str();
    os << "[outputs]\n";
    os << "n = " << outputs.size() << "\n";
    for (std::size_t i = 0; i < outputs.size(); ++i)
      os << "file." << i << " = " << outputs[i] << "\n";
    return os.str();
  }
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// named link functions for config files
std::function<double(double)> link_by_name(const std::string& name) {
  if (name == "sin") return [](double x) { return std::sin(x); };
  if (name == "identity") return [](double x) { return x; };
  if (name == "zero") return [](double) { return 0.0; };
  if (name == "cubic") return [](double x) { return x * x * x; };
  throw std::invalid_argument("unknown link function: " + name);
}

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

// ---- subcommand executors (shared by the flag path and rerun) ----------

int exec_cov(const KeyValueConfig& cfg, const std::string& out, Manifest* manifest) {
  QuadratureSpec spec;
  const double t = cfg.get_double("cov.t", 1.0);
  const double s = cfg.get_double("cov.s", t);
  const HermiteParams p = hermite_params_from_config(cfg.section("process"));

  IntegrationResult r;
  if (cfg.has("process.beta")) {
    const FilterParams fp = filter_params_from_config(cfg.section("process"));
    r = cov_filtered_hermite_ex(t, s, fp, spec);
  } else {
    r = cov_hermite_ex(t, s, p, spec);
  }
  if (!r.converged || !std::isfinite(r.value)) {
    std::cerr << "covariance quadrature did not converge\n";
    return kExitNumerical;
  }
  std::cout << g17(r.value) << " " << g17(r.error_estimate) << "\n";
  if (!out.empty()) {
    std::ostringstream os;
    os << "t,s,k,H,lambda,beta,value,error_estimate\n";
    os << g17(t) << "," << g17(s) << "," << p.k << "," << g17(p.H) << "," << g17(p.lambda)
       << "," << cfg.get("process.beta", "") << "," << g17(r.value) << ","
       << g17(r.error_estimate) << "\n";
    write_atomic(out, os.str());
    manifest->outputs.push_back(out);
  }
  return kExitOk;
}

int exec_cumulants(const KeyValueConfig& cfg, const std::string& out, Manifest* manifest) {
  QuadratureSpec spec;
  const double t = cfg.get_double("cumulants.t", 1.0);
  const int m_max = cfg.get_int("cumulants.m_max", 3);
  const bool filtered = cfg.has("process.beta");
  if (m_max < 2 || m_max > (filtered ? 3 : 4)) {
    std::cerr << "m_max must be in [2, " << (filtered ? 3 : 4) << "]\n";
    return kExitInvalid;
  }

  const HermiteParams p = hermite_params_from_config(cfg.section("process"));
  std::ostringstream os;
  os << "order,analytic,limit_derived,limit_printed,gap\n";
  for (int m = 2; m <= m_max; ++m) {
    double analytic, lim_d = std::nan(""), lim_p = std::nan("");
    if (filtered) {
      const FilterParams fp = filter_params_from_config(cfg.section("process"));
      analytic = cumulant_filtered_rosenblatt(t, m, fp, spec);
      if (m == 2) lim_d = cumulant_filtered_limit(t, m, fp, spec);
    } else {
      analytic = cumulant_rosenblatt(t, m, p, spec);
      lim_d = cumulant_rosenblatt_limit(t, m, p.d, spec, LimitConstant::derived);
      lim_p = cumulant_rosenblatt_limit(t, m, p.d, spec, LimitConstant::printed);
    }
    if (!std::isfinite(analytic)) {
      std::cerr << "cumulant evaluation did not converge\n";
      return kExitNumerical;
    }
    os << m << "," << g17(analytic) << "," << g17(lim_d) << "," << g17(lim_p) << ","
       << g17(std::fabs(analytic - lim_d)) << "\n";
  }
  std::cout << os.str();
  if (!out.empty()) {
    write_atomic(out, os.str());
    manifest->outputs.push_back(out);
  }
  return kExitOk;
}

int exec_simulate(const KeyValueConfig& cfg, const std::string& out, Manifest* manifest) {
  const HermiteParams p = hermite_params_from_config(cfg.section("process"));
  const int reps = cfg.get_int("simulate.reps", 100);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_double("simulate.seed", 1));
  if (reps < 1) {
    std::cerr << "reps must be >= 1\n";
    return kExitInvalid;
  }
  const double t_max = cfg.get_double("simulate.t_max", 1.0);
  const int n_times = cfg.get_int("simulate.n_times", 4);
  const ChaosGrid grid =
      ChaosGrid::make(t_max, p, cfg.get_int("grid.points", 256),
                      cfg.get_double("grid.decades", 15.0), cfg.get_double("grid.cap", 200.0));

  Eigen::VectorXd times(n_times + 1);
  for (int j = 0; j <= n_times; ++j) times[j] = t_max * j / n_times;

  const SamplePaths sp = simulate_tempered_rosenblatt(times, p, grid, reps, seed);

  std::ostringstream csv;
  sp.write_csv(csv);
  write_atomic(out + ".csv", csv.str());
  std::ostringstream bin;
  sp.write_binary(bin);
  write_atomic(out + ".bin", bin.str());
  manifest->outputs.push_back(out + ".csv");
  manifest->outputs.push_back(out + ".bin");
  std::cout << "wrote " << reps << " paths over " << n_times + 1 << " time points (tail "
            << g17(grid.tail_fraction) << ")\n";
  return kExitOk;
}

int exec_regress(const KeyValueConfig& cfg, const std::string& out, Manifest* manifest) {
  QuadratureSpec spec;
  RegressionConfig rc;
  rc.H1 = cfg.get_double("regress.H1", 0.7);
  rc.kappa = cfg.get_double("regress.kappa", 0.2);
  rc.kernel = smoothing_kernel_from_name(cfg.get("regress.kernel", "gaussian"));
  rc.link_name = cfg.get("regress.link", "sin");
  rc.link = link_by_name(rc.link_name);
  rc.holder_exponent = cfg.get_double("regress.gamma_r", 1.0);
  rc.noise_enabled = cfg.get_bool("regress.noise", true);
  if (rc.noise_enabled) rc.noise = hermite_params_from_config(cfg.section("process"));
  rc.chaos_points = cfg.get_int("grid.points", 256);
  rc.chaos_decades = cfg.get_double("grid.decades", 12.0);
  rc.normalization = cfg.get("regress.normalization", "divide") == "multiply"
                         ? NoiseNormalization::multiply_by_sn
                         : NoiseNormalization::divide_by_sn;

  std::vector<int> ns;
  for (double v : cfg.get_list("regress.n_list")) ns.push_back(static_cast<int>(v));
  if (ns.empty()) ns = {256, 1024};
  std::vector<double> x_eval = cfg.get_list("regress.x_eval");
  if (x_eval.empty()) x_eval = {-0.5, 0.0, 0.5};
  const int seeds = cfg.get_int("regress.seeds", 20);
  const std::uint64_t seed0 = static_cast<std::uint64_t>(cfg.get_double("regress.seed", 1));

  const RegressionRun run = consistency_experiment(rc, ns, x_eval, seeds, seed0, spec);

  std::ostringstream csv;
  run.write_csv(csv);
  write_atomic(out + ".csv", csv.str());
  manifest->outputs.push_back(out + ".csv");
  manifest->config.set("fitted.l_r", g17(run.fitted_l_r));
  manifest->config.set("fitted.l_r_degenerate", run.l_r_degenerate ? "true" : "false");
  std::cout << "fitted l_R = " << g17(run.fitted_l_r) << "\n";
  std::cout << (run.medians_decrease() ? "medians decrease across n\n"
                                       : "medians do NOT decrease across n\n");
  return kExitOk;
}

int exec_verify(const KeyValueConfig& cfg, const std::string& out, Manifest* manifest) {
  const std::string suite = cfg.get("verify.suite", "");
  if (!verify::is_suite(suite)) {
    std::cerr << "unknown suite: " << suite << " (choose from:";
    for (const auto& s : verify::suite_names()) std::cerr << " " << s;
    std::cerr << ")\n";
    return kExitInvalid;
  }
  const CheckTable tab = verify::run_suite(suite);
  std::ostringstream os;
  tab.write(os);
  std::cout << os.str();
  if (!out.empty()) {
    write_atomic(out, os.str());
    manifest->outputs.push_back(out);
  }
  return tab.all_pass() ? kExitOk : kExitVerifyFailed;
}

int dispatch(const std::string& sub, const KeyValueConfig& cfg, const std::string& out,
             Manifest* manifest) {
  if (sub == "cov") return exec_cov(cfg, out, manifest);
  if (sub == "cumulants") return exec_cumulants(cfg, out, manifest);
  if (sub == "simulate") return exec_simulate(cfg, out, manifest);
  if (sub == "regress") return exec_regress(cfg, out, manifest);
  if (sub == "verify") return exec_verify(cfg, out, manifest);
  std::cerr << "unknown subcommand in manifest: " << sub << "\n";
  return kExitInvalid;
}

int run_with_manifest(const std::string& sub, KeyValueConfig cfg, const std::string& out,
                      std::uint64_t seed, const std::string& manifest_path) {
  Manifest manifest;
  manifest.subcommand = sub;
  manifest.seed = seed;
  manifest.config = cfg;
  manifest.config.set("run.out", out);
  Timer timer;
  const int rc = dispatch(sub, cfg, out, &manifest);
  manifest.wall_time_s = timer.seconds();
  if (rc == kExitOk && !manifest_path.empty()) write_atomic(manifest_path, manifest.text());
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tempered generalized Hermite process toolkit"};
  app.require_subcommand(1);

  // cov
  auto* cov = app.add_subcommand("cov", "covariance of the tempered (filtered) process");
  double cov_t = 1.0, cov_s = -1.0, cov_H = 0.75, cov_lambda = 1.0, cov_beta = 0.0,
         cov_d = -1.0;
  int cov_k = 2;
  bool cov_has_beta = false, cov_unnormalized = false;
  std::string cov_out;
  cov->add_option("--t", cov_t, "first time");
  cov->add_option("--s", cov_s, "second time (defaults to t)");
  cov->add_option("--k", cov_k, "chaos order");
  cov->add_option("--H", cov_H, "self-similarity index in (1/2, 1)");
  cov->add_option("--d", cov_d, "kernel exponent (overrides H)");
  cov->add_option("--lambda", cov_lambda, "tempering");
  cov->add_option("--beta", cov_beta, "filter exponent (filtered covariance)")
      ->each([&](const std::string&) { cov_has_beta = true; });
  cov->add_flag("--unnormalized", cov_unnormalized, "drop the 1/beta factor");
  cov->add_option("--out", cov_out, "CSV output path");

  // cumulants
  auto* cum = app.add_subcommand("cumulants", "cumulant table of the second-chaos process");
  double cum_t = 1.0, cum_H = 0.75, cum_lambda = 1.0, cum_beta = 0.0;
  int cum_mmax = 3;
  bool cum_has_beta = false;
  std::string cum_out;
  cum->add_option("--t", cum_t, "time");
  cum->add_option("--m-max", cum_mmax, "highest cumulant order (<= 4, filtered <= 3)");
  cum->add_option("--H", cum_H, "self-similarity index");
  cum->add_option("--lambda", cum_lambda, "tempering");
  cum->add_option("--beta", cum_beta, "filter exponent")
      ->each([&](const std::string&) { cum_has_beta = true; });
  cum->add_option("--out", cum_out, "CSV output path");

  // simulate
  auto* sim = app.add_subcommand("simulate", "discrete-chaos paths of the k = 2 process");
  std::string sim_config, sim_out = "paths";
  int sim_reps = -1;
  double sim_seed = -1;
  sim->add_option("--config", sim_config, "configuration file")->required();
  sim->add_option("--reps", sim_reps, "replications (overrides config)");
  sim->add_option("--seed", sim_seed, "seed (overrides config)");
  sim->add_option("--out", sim_out, "output basename");

  // verify
  auto* ver = app.add_subcommand("verify", "run a named verification suite");
  std::string ver_suite, ver_out;
  ver->add_option("suite", ver_suite, "suite name")->required();
  ver->add_option("--out", ver_out, "write the report to this path");

  // regress
  auto* reg = app.add_subcommand("regress", "nonparametric regression experiment");
  std::string reg_config, reg_out = "regress";
  int reg_seeds = -1;
  double reg_seed = -1;
  reg->add_option("--config", reg_config, "configuration file")->required();
  reg->add_option("--seeds", reg_seeds, "seed count (overrides config)");
  reg->add_option("--seed", reg_seed, "base seed (overrides config)");
  reg->add_option("--out", reg_out, "output basename");

  // rerun
  auto* rer = app.add_subcommand("rerun", "re-execute a run from its manifest");
  std::string rer_manifest;
  rer->add_option("manifest", rer_manifest, "manifest file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cov->parsed()) {
      KeyValueConfig cfg;
      cfg.set("cov.t", g17(cov_t));
      cfg.set("cov.s", g17(cov_s < 0.0 ? cov_t : cov_s));
      cfg.set("process.k", std::to_string(cov_k));
      if (cov_d > 0.0)
        cfg.set("process.d", g17(cov_d));
      else
        cfg.set("process.H", g17(cov_H));
      cfg.set("process.lambda", g17(cov_lambda));
      if (cov_has_beta) {
        cfg.set("process.beta", g17(cov_beta));
        cfg.set("process.normalized", cov_unnormalized ? "false" : "true");
      }
      return run_with_manifest("cov", cfg, cov_out, 0,
                               cov_out.empty() ? "" : cov_out + ".manifest");
    }
    if (cum->parsed()) {
      KeyValueConfig cfg;
      cfg.set("cumulants.t", g17(cum_t));
      cfg.set("cumulants.m_max", std::to_string(cum_mmax));
      cfg.set("process.k", "2");
      cfg.set("process.H", g17(cum_H));
      cfg.set("process.lambda", g17(cum_lambda));
      if (cum_has_beta) cfg.set("process.beta", g17(cum_beta));
      return run_with_manifest("cumulants", cfg, cum_out, 0,
                               cum_out.empty() ? "" : cum_out + ".manifest");
    }
    if (sim->parsed()) {
      KeyValueConfig cfg = KeyValueConfig::parse_file(sim_config);
      if (sim_reps >= 0) cfg.set("simulate.reps", std::to_string(sim_reps));
      if (sim_seed >= 0) cfg.set("simulate.seed", g17(sim_seed));
      const std::uint64_t seed =
          static_cast<std::uint64_t>(cfg.get_double("simulate.seed", 1));
      return run_with_manifest("simulate", cfg, sim_out, seed, sim_out + ".manifest");
    }
    if (ver->parsed()) {
      KeyValueConfig cfg;
      cfg.set("verify.suite", ver_suite);
      return run_with_manifest("verify", cfg, ver_out, 0,
                               ver_out.empty() ? "" : ver_out + ".manifest");
    }
    if (reg->parsed()) {
      KeyValueConfig cfg = KeyValueConfig::parse_file(reg_config);
      if (reg_seeds >= 0) cfg.set("regress.seeds", std::to_string(reg_seeds));
      if (reg_seed >= 0) cfg.set("regress.seed", g17(reg_seed));
      const std::uint64_t seed =
          static_cast<std::uint64_t>(cfg.get_double("regress.seed", 1));
      return run_with_manifest("regress", cfg, reg_out, seed, reg_out + ".manifest");
    }
    if (rer->parsed()) {
      const KeyValueConfig man = KeyValueConfig::parse_file(rer_manifest);
      const std::string sub = man.get("run.subcommand", "");
      KeyValueConfig cfg;
      for (const auto& [k, v] : man.items()) {
        if (k.rfind("run.", 0) == 0 || k.rfind("outputs.", 0) == 0 ||
            k.rfind("fitted.", 0) == 0)
          continue;
        cfg.set(k, v);
      }
      const std::string out = man.get("run.out", "");
      cfg.set("run.out", out);
      Manifest scratch;
      scratch.subcommand = sub;
      scratch.config = cfg;
      return dispatch(sub, cfg, out, &scratch);
    }
  } catch (const TailBoundError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInvalid;
}
