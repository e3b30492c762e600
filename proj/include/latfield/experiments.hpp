/**
 * @file experiments.hpp
 * @brief Named experiment drivers behind the CLI: each one runs a scripted
 *        verification, writes deterministic CSV data plus a summary.json of
 *        measured values, thresholds, and verdicts, and reports pass/fail.
 */
#ifndef LATFIELD_EXPERIMENTS_HPP
#define LATFIELD_EXPERIMENTS_HPP

#include "latfield/config.hpp"
#include "latfield/io.hpp"

namespace latfield {

struct ExperimentResult {
    Summary summary;
    std::string output_dir;
    int exit_code = 0;  // 0 pass, 1 assertion failure
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// Shipped defaults for the per-experiment knobs a config may omit: times,
// dual fields, and the initial measure. Exposed for tests.
std::vector<double> default_times(const std::string& experiment);
TestFunctionSpec default_test_function(const std::string& experiment, const ModelParams& model,
                                       bool secondary = false);
InitialMeasureSpec default_initial_measure(const std::string& experiment);

}  // namespace latfield

#endif
