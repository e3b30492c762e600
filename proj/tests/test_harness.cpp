#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "latfield/experiments.hpp"
#include "latfield/rng.hpp"

using namespace latfield;

namespace {

std::string small_model_text(int N = 64, int K = 2, const std::string& coupling = "gaussian") {
    std::string text =
        "[model]\n"
        "d = 1\n"
        "n = 1\n"
        "m0 = 1.0\n"
        "nu0 = 1.0\n"
        "K = " + std::to_string(K) + "\n"
        "N = " + std::to_string(N) + "\n";
    if (coupling == "gaussian") {
        text += "coupling = gaussian\n"
                "coupling_amplitude = 0.1\n"
                "coupling_sigma = 0.2\n";
    } else {
        text += "coupling = zero\n";
    }
    return text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("reference-style config text validates") {
    std::string text = small_model_text() +
                       "[experiment]\n"
                       "name = bands\n"
                       "seed = 42\n"
                       "theta_points = 64\n";
    ExperimentConfig config = validate_config(text);
    CHECK(config.experiment == "bands");
    CHECK(config.seed == 42);
    CHECK(config.model.K == 2);
    CHECK(config.model.coupling.terms.size() == 1);
}

TEST_CASE("missing m0 is reported by name, all errors aggregated") {
    std::string text =
        "[model]\n"
        "d = 1\n"
        "n = 1\n"
        "nu0 = 1.0\n"
        "K = 2\n"
        "N = 64\n";
    try {
        validate_config(text);
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("m0") != std::string::npos);
    }

    // Odd N and junk key: both reported at once.
    std::string bad = small_model_text(63) + "[experiment]\nname = bands\nbogus_key = 1\n";
    try {
        validate_config(bad);
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("even") != std::string::npos);
        CHECK(msg.find("bogus_key") != std::string::npos);
    }
}

TEST_CASE("wraparound risk is a validation error with the computed bound") {
    std::string text = small_model_text(32) +
                       "[experiment]\n"
                       "name = decay\n"
                       "times = 20,200\n";
    try {
        validate_config(text);
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("wraparound") != std::string::npos);
        CHECK(msg.find("need N >") != std::string::npos);
    }
}

TEST_CASE("state files round trip through json") {
    ModelParams model;
    model.d = 1;
    model.n = 2;
    model.K = 1;
    model.N = 8;
    model.coupling = CouplingSpec::gaussian(0.1, 0.2, 1, 2);
    RngStream rng(77, 0, 0);
    LatticeState s = LatticeState::zeros(model);
    for (int k = 0; k < model.cells(); ++k) {
        for (int p = 0; p < model.collocation_points(); ++p) s.psi(p, k) = rng.normal();
        for (int c = 0; c < model.n; ++c) s.v(c, k) = rng.normal();
    }
    save_state_json(s, model, "state_roundtrip.json");
    ModelParams loaded_model;
    LatticeState loaded = load_state_json("state_roundtrip.json", &loaded_model);
    CHECK(loaded_model.n == 2);
    CHECK(loaded_model.coupling.terms.size() == 1);
    CHECK((loaded.psi - s.psi).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.v - s.v).cwiseAbs().maxCoeff() == 0.0);
    std::remove("state_roundtrip.json");
}

TEST_CASE("bands experiment: pass verdicts, csv written, deterministic bytes") {
    std::string text = small_model_text(64, 1, "zero") +
                       "[experiment]\n"
                       "name = bands\n"
                       "theta_points = 64\n"
                       "out = harness_out_a\n";
    ExperimentConfig config = validate_config(text);
    ExperimentResult a = run_experiment(config);
    CHECK(a.exit_code == 0);
    CHECK(a.summary.pass());
    CHECK(std::filesystem::exists("harness_out_a/bands/data_bands.csv"));
    CHECK(std::filesystem::exists("harness_out_a/bands/summary.json"));

    config.out_dir = "harness_out_b";
    ExperimentResult b = run_experiment(config);
    CHECK(read_file("harness_out_a/bands/data_bands.csv") ==
          read_file("harness_out_b/bands/data_bands.csv"));
    std::filesystem::remove_all("harness_out_a");
    std::filesystem::remove_all("harness_out_b");
}

TEST_CASE("conditions experiment passes on the small coupled model") {
    std::string text = small_model_text(64, 2) +
                       "[experiment]\n"
                       "name = conditions\n"
                       "theta_points = 96\n"
                       "out = harness_out_c\n";
    ExperimentResult result = run_experiment(validate_config(text));
    CHECK(result.exit_code == 0);
    std::filesystem::remove_all("harness_out_c");
}

TEST_CASE("invariance experiment holds at 1e-10 with reduced case counts") {
    std::string text = small_model_text(16, 1) +
                       "[experiment]\n"
                       "name = invariance\n"
                       "seed = 3\n"
                       "out = harness_out_i\n"
                       "[thresholds]\n"
                       "invariance_cases = 25\n"
                       "trace_cases = 10\n";
    ExperimentResult result = run_experiment(validate_config(text));
    for (const auto& a : result.summary.assertions)
        CHECK_MESSAGE(a.pass, a.id, " value=", a.value);
    CHECK(result.exit_code == 0);
    std::filesystem::remove_all("harness_out_i");
}

TEST_CASE("converge experiment on a reduced model") {
    std::string text = small_model_text(256, 2) +
                       "[experiment]\n"
                       "name = converge\n"
                       "times = 1,2,5,10,20,40,60\n"
                       "out = harness_out_v\n"
                       "[testfunction]\n"
                       "band_limit = 4\n"
                       "cutoff_delta = 0.3\n"
                       "crossing_gap_tol = 0.02\n"
                       "packets = 1\n"
                       "packet0_slot = 0\n"
                       "packet0_width = 1.0\n"
                       "packet0_carrier = 2.0\n"
                       "[ensemble]\n"
                       "init = ma\n"
                       "psi_kernel_shape = gaussian\n"
                       "psi_kernel_sigma = 0.5\n"
                       "psi_kernel_range = 4\n"
                       "pi_kernel_shape = gaussian\n"
                       "pi_kernel_sigma = 0.35\n"
                       "pi_kernel_amplitude = 1.8\n"
                       "pi_kernel_range = 4\n"
                       "[thresholds]\n"
                       "converge_rel = 0.2\n";  // short horizon: looser gate
    ExperimentResult result = run_experiment(validate_config(text));
    CHECK(result.exit_code == 0);
    std::filesystem::remove_all("harness_out_v");
}

TEST_CASE("coupling scan experiment emits verdict rows") {
    std::string text = small_model_text(64, 1, "zero") +
                       "[experiment]\n"
                       "name = coupling-scan\n"
                       "theta_points = 64\n"
                       "out = harness_out_s\n"
                       "[scan]\n"
                       "components = 2\n"
                       "component0_amplitude = 1.0\n"
                       "component0_sigma = 0.2\n"
                       "component1_amplitude = 1.0\n"
                       "component1_sigma = 0.35\n"
                       "amplitudes = 0,0;0.05,0.02;10,0\n";
    ExperimentResult result = run_experiment(validate_config(text));
    CHECK(result.exit_code == 0);
    std::string csv = read_file("harness_out_s/coupling-scan/data_coupling_scan.csv");
    CHECK(csv.find("skipped") != std::string::npos);
    std::filesystem::remove_all("harness_out_s");
}

TEST_CASE("summary json records values, thresholds, and verdicts") {
    Summary summary;
    summary.experiment = "demo";
    summary.seed = 5;
    summary.add(assert_less("alpha", "a small thing", 0.5, 1.0));
    summary.add(assert_greater("beta", "a large thing", 2.0, 1.0));
    CHECK(summary.pass());
    summary.write_json("summary_test.json");
    std::string text = read_file("summary_test.json");
    CHECK(text.find("\"alpha\"") != std::string::npos);
    CHECK(text.find("\"threshold\": 1.0") != std::string::npos);
    CHECK(text.find("\"pass\": true") != std::string::npos);
    std::remove("summary_test.json");
}
