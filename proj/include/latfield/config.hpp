/**
 * @file config.hpp
 * @brief Experiment configuration: flat key = value text with [sections],
 *        one decoding, full validation with every problem reported at once.
 */
#ifndef LATFIELD_CONFIG_HPP
#define LATFIELD_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "latfield/covariance.hpp"
#include "latfield/test_function.hpp"

namespace latfield {

struct ExperimentConfig {
    std::string experiment;  // bands conditions converge decay gaussianity mixing invariance coupling-scan
    ModelParams model;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out_dir = "out";
    std::vector<double> times;
    int theta_points = 256;
    int samples = 1000;
    TestFunctionSpec zfun;   // primary dual field
    TestFunctionSpec zfun1;  // second dual field (mixing)
    InitialMeasureSpec init;
    bool init_explicit = false;  // the config text named an initial measure
    int s_points = 11;
    double s_max = 0.0;  // 0: pick from the limit variance at run time
    std::vector<CouplingSpec> scan_components;
    std::vector<RVec> scan_amplitudes;
    std::map<std::string, double> thresholds;

    double threshold(const std::string& name, double fallback) const {
        auto it = thresholds.find(name);
        return it == thresholds.end() ? fallback : it->second;
    }
};

// Parse + validate; throws ConfigError whose message lists every problem.
ExperimentConfig validate_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// The experiment names run_experiment understands.
const std::vector<std::string>& known_experiments();

}  // namespace latfield

#endif
