// Command-line driver: run one named experiment from a config file and
// report pass/fail through the exit code (0 pass, 1 assertion failure,
// 2 configuration error).

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "latfield/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"latfield: coupled field-crystal dynamics laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int threads = -1;

    for (const auto& name : latfield::known_experiments()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "config file")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out", out_dir, "override the output directory");
        sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        latfield::ExperimentConfig config = latfield::load_config_file(config_path);
        config.experiment = app.get_subcommands().front()->get_name();
        if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (threads >= 0) config.threads = threads;

        latfield::ExperimentResult result = latfield::run_experiment(config);
        for (const auto& a : result.summary.assertions)
            std::cout << (a.pass ? "[PASS] " : "[FAIL] ") << a.id << ": " << a.description
                      << " (value " << a.value << " " << a.comparison << " " << a.threshold
                      << ")\n";
        std::cout << (result.exit_code == 0 ? "PASS" : "FAIL") << " -> " << result.output_dir
                  << "/summary.json\n";
        return result.exit_code;
    } catch (const latfield::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
