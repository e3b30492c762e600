/**
 * @file io.hpp
 * @brief Small deterministic output helpers: CSV tables, state
 *        serialization, and the machine-readable assertion summary.
 */
#ifndef LATFIELD_IO_HPP
#define LATFIELD_IO_HPP

#include <string>
#include <vector>

#include "latfield/zak.hpp"

namespace latfield {

struct Assertion {
    std::string id;
    std::string description;
    double value = 0.0;
    double threshold = 0.0;
    std::string comparison = "<";  // value <op> threshold must hold
    bool pass = false;
};

Assertion assert_less(const std::string& id, const std::string& description, double value,
                      double threshold);
Assertion assert_greater(const std::string& id, const std::string& description, double value,
                         double threshold);
Assertion assert_true(const std::string& id, const std::string& description, bool ok);

struct Summary {
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<Assertion> assertions;

    bool pass() const;
    void add(const Assertion& a) { assertions.push_back(a); }
    void write_json(const std::string& path) const;
};

// CSV writer with fixed 17-digit formatting so reruns are byte-identical.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void raw_row(const std::string& line);

  private:
    std::string path_;
    std::vector<std::string> buffer_;
    std::size_t columns_ = 0;

  public:
    ~CsvWriter();
};

// Flat JSON state files with a model header.
void save_state_json(const LatticeState& state, const ModelParams& model,
                     const std::string& path);
LatticeState load_state_json(const std::string& path, ModelParams* model_out = nullptr);

void ensure_directory(const std::string& path);

}  // namespace latfield

#endif
