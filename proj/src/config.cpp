#include "latfield/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "latfield/dispersion.hpp"

namespace latfield {

namespace {

struct KvReader {
    std::map<std::string, std::string> kv;
    std::vector<std::string> errors;
    std::vector<std::string> consumed;

    bool has(const std::string& key) const { return kv.count(key) > 0; }

    std::string take(const std::string& key, const std::string& fallback, bool required = false) {
        consumed.push_back(key);
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (required) errors.push_back("missing required key \"" + key + "\"");
            return fallback;
        }
        return it->second;
    }

    double take_double(const std::string& key, double fallback, bool required = false) {
        std::string raw = take(key, "", required);
        if (raw.empty()) return fallback;
        try {
            std::size_t pos = 0;
            double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (...) {
            errors.push_back("key \"" + key + "\": cannot parse \"" + raw + "\" as a number");
            return fallback;
        }
    }

    long take_int(const std::string& key, long fallback, bool required = false) {
        std::string raw = take(key, "", required);
        if (raw.empty()) return fallback;
        try {
            std::size_t pos = 0;
            long v = std::stol(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (...) {
            errors.push_back("key \"" + key + "\": cannot parse \"" + raw + "\" as an integer");
            return fallback;
        }
    }

    bool take_bool(const std::string& key, bool fallback) {
        std::string raw = take(key, "");
        if (raw.empty()) return fallback;
        if (raw == "true" || raw == "1" || raw == "yes") return true;
        if (raw == "false" || raw == "0" || raw == "no") return false;
        errors.push_back("key \"" + key + "\": expected true/false, got \"" + raw + "\"");
        return fallback;
    }

    std::vector<double> take_list(const std::string& key, const std::vector<double>& fallback,
                                  bool required = false) {
        std::string raw = take(key, "", required);
        if (raw.empty()) return fallback;
        std::vector<double> out;
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                out.push_back(std::stod(item));
            } catch (...) {
                errors.push_back("key \"" + key + "\": cannot parse list entry \"" + item + "\"");
                return fallback;
            }
        }
        return out;
    }
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

RVec to_rvec(const std::vector<double>& v) {
    RVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

CouplingSpec read_coupling(KvReader& r, const std::string& prefix, int d, int n) {
    CouplingSpec spec;
    std::string family = r.take(prefix + "coupling", "zero");
    if (family == "zero") return spec;
    if (family != "gaussian" && family != "sum-of-gaussians") {
        r.errors.push_back("key \"" + prefix + "coupling\": unknown family \"" + family + "\"");
        return spec;
    }
    long terms = family == "gaussian" ? 1 : r.take_int(prefix + "coupling_terms", 1);
    for (long t = 0; t < terms; ++t) {
        std::string stem = prefix + "coupling_";
        if (family == "sum-of-gaussians") stem += "term" + std::to_string(t) + "_";
        CouplingTerm term;
        term.amplitude = to_rvec(r.take_list(stem + "amplitude", std::vector<double>(n, 0.0), true));
        if (term.amplitude.size() == 1 && n > 1)
            term.amplitude = RVec::Constant(n, term.amplitude[0]);
        term.sigma = r.take_double(stem + "sigma", 1.0, true);
        term.center = to_rvec(r.take_list(stem + "center", std::vector<double>(d, 0.0)));
        if (term.center.size() == 1 && d > 1) term.center = RVec::Constant(d, term.center[0]);
        spec.terms.push_back(term);
    }
    return spec;
}

KernelSpec read_kernel(KvReader& r, const std::string& stem) {
    KernelSpec kernel;
    std::string shape = r.take(stem + "_shape", "delta");
    if (shape == "delta") {
        kernel.shape = KernelSpec::Shape::Delta;
    } else if (shape == "gaussian") {
        kernel.shape = KernelSpec::Shape::Gaussian;
    } else {
        r.errors.push_back("key \"" + stem + "_shape\": unknown kernel shape \"" + shape + "\"");
    }
    kernel.amplitude = r.take_double(stem + "_amplitude", 1.0);
    kernel.sigma = r.take_double(stem + "_sigma", 1.0);
    kernel.range = static_cast<int>(r.take_int(stem + "_range", 0));
    return kernel;
}

TestFunctionSpec read_test_function(KvReader& r, const std::string& section, int d, int n) {
    TestFunctionSpec spec;
    spec.band_limit = static_cast<int>(r.take_int(section + ".band_limit", -1));
    spec.cutoff_delta = r.take_double(section + ".cutoff_delta", 0.0);
    spec.cutoff_boundary = r.take_bool(section + ".cutoff_boundary", true);
    spec.crossing_gap_tol = r.take_double(section + ".crossing_gap_tol", 1e-3);
    spec.hessian_cutoff = r.take_bool(section + ".hessian_cutoff", false);
    spec.hessian_tol = r.take_double(section + ".hessian_tol", 1e-3);
    long packets = r.take_int(section + ".packets", 0);
    for (long p = 0; p < packets; ++p) {
        std::string stem = section + ".packet" + std::to_string(p) + "_";
        GaussianPacket packet;
        packet.slot = static_cast<int>(r.take_int(stem + "slot", 0));
        packet.amplitude = r.take_double(stem + "amplitude", 1.0);
        packet.width = r.take_double(stem + "width", 1.0);
        packet.phase = r.take_double(stem + "phase", 0.0);
        packet.center = to_rvec(r.take_list(stem + "center", std::vector<double>(d, 0.0)));
        packet.carrier = to_rvec(r.take_list(stem + "carrier", std::vector<double>(d, 0.0)));
        if (packet.center.size() != d) r.errors.push_back(stem + "center: needs d entries");
        if (packet.carrier.size() != d) r.errors.push_back(stem + "carrier: needs d entries");
        if (packet.slot != 0 && packet.slot != 1) r.errors.push_back(stem + "slot: must be 0 or 1");
        if (packet.width <= 0) r.errors.push_back(stem + "width: must be > 0");
        spec.packets.push_back(packet);
    }
    long points = r.take_int(section + ".lattice_points", 0);
    for (long p = 0; p < points; ++p) {
        std::string stem = section + ".point" + std::to_string(p) + "_";
        LatticePoint point;
        point.slot = static_cast<int>(r.take_int(stem + "slot", 0));
        auto cell = r.take_list(stem + "cell", std::vector<double>(d, 0.0));
        point.cell = IVec(d);
        for (int a = 0; a < d && a < static_cast<int>(cell.size()); ++a)
            point.cell[a] = static_cast<int>(cell[a]);
        auto w = r.take_list(stem + "weight", std::vector<double>(n, 1.0));
        if (static_cast<int>(w.size()) == 1 && n > 1) w.assign(n, w[0]);
        point.weight = to_rvec(w);
        if (point.slot != 0 && point.slot != 1) r.errors.push_back(stem + "slot: must be 0 or 1");
        spec.points.push_back(point);
    }
    return spec;
}

InitialMeasureSpec read_initial_measure(KvReader& r, int /*n*/) {
    InitialMeasureSpec spec;
    std::string kind = r.take("ensemble.init", "gibbs");
    if (kind == "gibbs") {
        spec.kind = InitialMeasureSpec::Kind::Gibbs;
        spec.temperature = r.take_double("ensemble.temperature", 1.0);
        if (spec.temperature <= 0) r.errors.push_back("ensemble.temperature: must be > 0");
    } else if (kind == "ma" || kind == "moving_average") {
        spec.kind = InitialMeasureSpec::Kind::MovingAverage;
        spec.ma_psi.kernel = read_kernel(r, "ensemble.psi_kernel");
        spec.ma_u.kernel = read_kernel(r, "ensemble.u_kernel");
        spec.ma_pi.kernel = read_kernel(r, "ensemble.pi_kernel");
        spec.ma_v.kernel = read_kernel(r, "ensemble.v_kernel");
        spec.ma_psi.stream = static_cast<int>(r.take_int("ensemble.psi_stream", 0));
        spec.ma_u.stream = static_cast<int>(r.take_int("ensemble.u_stream", 1));
        spec.ma_pi.stream = static_cast<int>(r.take_int("ensemble.pi_stream", 2));
        spec.ma_v.stream = static_cast<int>(r.take_int("ensemble.v_stream", 3));
        std::string law = r.take("ensemble.noise", "gaussian");
        if (law == "gaussian") spec.noise = NoiseLaw::Gaussian;
        else if (law == "rademacher") spec.noise = NoiseLaw::Rademacher;
        else if (law == "uniform") spec.noise = NoiseLaw::Uniform;
        else r.errors.push_back("ensemble.noise: unknown law \"" + law + "\"");
    } else {
        r.errors.push_back("ensemble.init: unknown kind \"" + kind + "\" (gibbs or ma)");
    }
    return spec;
}

}  // namespace

const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> names = {
        "bands", "conditions", "converge", "decay",
        "gaussianity", "mixing", "invariance", "coupling-scan"};
    return names;
}

ExperimentConfig validate_config(const std::string& text) {
    KvReader reader;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                reader.errors.push_back("line " + std::to_string(lineno) + ": malformed section");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            reader.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            reader.errors.push_back("line " + std::to_string(lineno) + ": key outside any section");
            continue;
        }
        std::string full = section + "." + key;
        if (reader.kv.count(full))
            reader.errors.push_back("line " + std::to_string(lineno) + ": duplicate key " + full);
        reader.kv[full] = value;
    }

    ExperimentConfig config;
    config.experiment = reader.take("experiment.name", "");
    if (!config.experiment.empty()) {
        const auto& known = known_experiments();
        if (std::find(known.begin(), known.end(), config.experiment) == known.end())
            reader.errors.push_back("experiment.name: unknown experiment \"" + config.experiment +
                                    "\"");
    }
    config.seed = static_cast<std::uint64_t>(reader.take_int("experiment.seed", 1));
    config.threads = static_cast<int>(reader.take_int("experiment.threads", 0));
    config.out_dir = reader.take("experiment.out", "out");
    config.times = reader.take_list("experiment.times", {});
    config.theta_points = static_cast<int>(reader.take_int("experiment.theta_points", 256));
    config.samples = static_cast<int>(reader.take_int("experiment.samples", 1000));
    config.s_points = static_cast<int>(reader.take_int("experiment.s_points", 11));
    config.s_max = reader.take_double("experiment.s_max", 0.0);

    config.model.d = static_cast<int>(reader.take_int("model.d", 0, true));
    config.model.n = static_cast<int>(reader.take_int("model.n", 0, true));
    config.model.m0 = reader.take_double("model.m0", 0.0, true);
    config.model.nu0 = reader.take_double("model.nu0", 0.0, true);
    config.model.K = static_cast<int>(reader.take_int("model.K", -1, true));
    config.model.N = static_cast<int>(reader.take_int("model.N", 0, true));
    config.model.coupling = read_coupling(reader, "model.", std::max(config.model.d, 1),
                                          std::max(config.model.n, 1));
    for (const auto& e : config.model.validation_errors()) reader.errors.push_back("model: " + e);

    config.zfun = read_test_function(reader, "testfunction", std::max(config.model.d, 1),
                                     std::max(config.model.n, 1));
    config.zfun1 = read_test_function(reader, "testfunction1", std::max(config.model.d, 1),
                                      std::max(config.model.n, 1));
    config.init_explicit = reader.has("ensemble.init");
    config.init = read_initial_measure(reader, std::max(config.model.n, 1));

    long n_scan = reader.take_int("scan.components", 0);
    for (long s = 0; s < n_scan; ++s) {
        std::string stem = "scan.component" + std::to_string(s) + "_";
        CouplingTerm term;
        term.amplitude = to_rvec(reader.take_list(
            stem + "amplitude", std::vector<double>(std::max(config.model.n, 1), 1.0)));
        if (term.amplitude.size() == 1 && config.model.n > 1)
            term.amplitude = RVec::Constant(config.model.n, term.amplitude[0]);
        term.sigma = reader.take_double(stem + "sigma", 0.2);
        term.center = to_rvec(reader.take_list(stem + "center",
                                               std::vector<double>(std::max(config.model.d, 1), 0.0)));
        CouplingSpec one;
        one.terms.push_back(term);
        config.scan_components.push_back(one);
    }
    {
        std::string rows = reader.take("scan.amplitudes", "");
        if (!rows.empty()) {
            std::stringstream ss(rows);
            std::string row;
            while (std::getline(ss, row, ';')) {
                std::vector<double> vals;
                std::stringstream rs(row);
                std::string item;
                while (std::getline(rs, item, ',')) {
                    try {
                        vals.push_back(std::stod(item));
                    } catch (...) {
                        reader.errors.push_back("scan.amplitudes: bad entry \"" + item + "\"");
                    }
                }
                if (static_cast<long>(vals.size()) != n_scan)
                    reader.errors.push_back(
                        "scan.amplitudes: each row needs one value per component");
                config.scan_amplitudes.push_back(to_rvec(vals));
            }
        }
    }

    // Thresholds: free-form numeric keys.
    for (const auto& [key, value] : reader.kv) {
        if (key.rfind("thresholds.", 0) != 0) continue;
        reader.consumed.push_back(key);
        try {
            config.thresholds[key.substr(11)] = std::stod(value);
        } catch (...) {
            reader.errors.push_back("key \"" + key + "\": cannot parse \"" + value + "\"");
        }
    }

    // Unknown keys are errors: one decoding, no silent typos.
    for (const auto& [key, value] : reader.kv) {
        (void)value;
        if (std::find(reader.consumed.begin(), reader.consumed.end(), key) ==
            reader.consumed.end())
            reader.errors.push_back("unknown key \"" + key + "\"");
    }

    // Cross-field: wraparound guard for time-horizon experiments.
    if (reader.errors.empty() && !config.times.empty() &&
        (config.experiment == "converge" || config.experiment == "decay" ||
         config.experiment == "gaussianity" || config.experiment == "mixing")) {
        double t_max = 0.0;
        for (double t : config.times) t_max = std::max(t_max, std::abs(t));
        BandOptions bopts;
        bopts.derivatives = true;
        bopts.threads = config.threads;
        Bands coarse = band_structure(config.model, uniform_theta_grid(config.model.d, 64), bopts);
        double gamma = max_group_speed(coarse).gamma_hat;
        double needed = 3.0 * gamma * t_max;
        if (config.model.N <= needed)
            reader.errors.push_back(
                "model.N: wraparound risk; need N > " + std::to_string(needed) +
                " for max time " + std::to_string(t_max) + " at group speed " +
                std::to_string(gamma));
    }

    if (!reader.errors.empty()) {
        std::ostringstream msg;
        msg << "configuration invalid:";
        for (const auto& e : reader.errors) msg << "\n  - " << e;
        throw ConfigError(msg.str());
    }
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return validate_config(buffer.str());
}

}  // namespace latfield
