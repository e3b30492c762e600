#include "latfield/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace latfield {

using nlohmann::json;

Assertion assert_less(const std::string& id, const std::string& description, double value,
                      double threshold) {
    Assertion a{id, description, value, threshold, "<", value < threshold};
    return a;
}

Assertion assert_greater(const std::string& id, const std::string& description, double value,
                         double threshold) {
    Assertion a{id, description, value, threshold, ">", value > threshold};
    return a;
}

Assertion assert_true(const std::string& id, const std::string& description, bool ok) {
    Assertion a{id, description, ok ? 1.0 : 0.0, 0.5, ">", ok};
    return a;
}

bool Summary::pass() const {
    for (const auto& a : assertions)
        if (!a.pass) return false;
    return true;
}

void Summary::write_json(const std::string& path) const {
    json doc;
    doc["experiment"] = experiment;
    doc["seed"] = seed;
    doc["pass"] = pass();
    doc["assertions"] = json::array();
    for (const auto& a : assertions) {
        json row;
        row["id"] = a.id;
        row["description"] = a.description;
        row["value"] = a.value;
        row["threshold"] = a.threshold;
        row["comparison"] = a.comparison;
        row["pass"] = a.pass;
        doc["assertions"].push_back(row);
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out << doc.dump(2) << "\n";
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : path_(path), columns_(columns.size()) {
    std::ostringstream header;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) header << ",";
        header << columns[i];
    }
    buffer_.push_back(header.str());
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw Error("csv row width mismatch in " + path_);
    std::ostringstream line;
    line.precision(17);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line << ",";
        line << values[i];
    }
    buffer_.push_back(line.str());
}

void CsvWriter::raw_row(const std::string& line) { buffer_.push_back(line); }

CsvWriter::~CsvWriter() {
    std::ofstream out(path_);
    for (const auto& line : buffer_) out << line << "\n";
}

namespace {

json coupling_to_json(const CouplingSpec& coupling) {
    json terms = json::array();
    for (const auto& t : coupling.terms) {
        json term;
        term["amplitude"] = std::vector<double>(t.amplitude.data(),
                                                t.amplitude.data() + t.amplitude.size());
        term["sigma"] = t.sigma;
        term["center"] = std::vector<double>(t.center.data(), t.center.data() + t.center.size());
        terms.push_back(term);
    }
    return terms;
}

std::vector<double> flat(const RMat& m) {
    return std::vector<double>(m.data(), m.data() + m.size());
}

RMat unflat(const std::vector<double>& v, int rows, int cols) {
    if (static_cast<int>(v.size()) != rows * cols) throw Error("state file has wrong array size");
    RMat m(rows, cols);
    std::copy(v.begin(), v.end(), m.data());
    return m;
}

}  // namespace

void save_state_json(const LatticeState& state, const ModelParams& model,
                     const std::string& path) {
    json doc;
    doc["d"] = model.d;
    doc["n"] = model.n;
    doc["K"] = model.K;
    doc["N"] = model.N;
    doc["m0"] = model.m0;
    doc["nu0"] = model.nu0;
    doc["coupling"] = coupling_to_json(model.coupling);
    doc["psi"] = flat(state.psi);
    doc["pi"] = flat(state.pi);
    doc["u"] = flat(state.u);
    doc["v"] = flat(state.v);
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out << doc.dump() << "\n";
}

LatticeState load_state_json(const std::string& path, ModelParams* model_out) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    json doc = json::parse(in);
    ModelParams model;
    model.d = doc.at("d").get<int>();
    model.n = doc.at("n").get<int>();
    model.K = doc.at("K").get<int>();
    model.N = doc.at("N").get<int>();
    model.m0 = doc.at("m0").get<double>();
    model.nu0 = doc.at("nu0").get<double>();
    for (const auto& term : doc.at("coupling")) {
        CouplingTerm t;
        auto amp = term.at("amplitude").get<std::vector<double>>();
        auto cen = term.at("center").get<std::vector<double>>();
        t.amplitude = Eigen::Map<RVec>(amp.data(), amp.size());
        t.center = Eigen::Map<RVec>(cen.data(), cen.size());
        t.sigma = term.at("sigma").get<double>();
        model.coupling.terms.push_back(t);
    }
    model.validate();
    LatticeState state = LatticeState::zeros(model);
    state.psi = unflat(doc.at("psi").get<std::vector<double>>(), model.collocation_points(),
                       model.cells());
    state.pi = unflat(doc.at("pi").get<std::vector<double>>(), model.collocation_points(),
                      model.cells());
    state.u = unflat(doc.at("u").get<std::vector<double>>(), model.n, model.cells());
    state.v = unflat(doc.at("v").get<std::vector<double>>(), model.n, model.cells());
    if (model_out) *model_out = model;
    return state;
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw Error("cannot create directory " + path + ": " + ec.message());
}

}  // namespace latfield
