#pragma once

#include <string>
#include <vector>

#include "tghp/report.hpp"

namespace tghp::verify {

// Named verification suites behind the `verify` subcommand. Each suite
// runs a fixed grid of checks at pinned tolerances and returns a table
// with one row per check.
CheckTable suite_specfun();
CheckTable suite_lemma_int();  // Bessel product identity grid
CheckTable suite_covariance();
CheckTable suite_cumulants();
CheckTable suite_scaling();
CheckTable suite_stationarity();
CheckTable suite_limit();
CheckTable suite_simulation();        // chaos moments plus the fBm generator
CheckTable suite_simulation_chaos();  // the two halves, separately addressable
CheckTable suite_simulation_fbm();
CheckTable suite_regression();

std::vector<std::string> suite_names();
bool is_suite(const std::string& name);
CheckTable run_suite(const std::string& name);

}  // namespace tghp::verify
