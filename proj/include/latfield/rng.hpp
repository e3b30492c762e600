#ifndef LATFIELD_RNG_HPP
#define LATFIELD_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace latfield {

// Named, independently seeded streams so that ensemble results are
// bit-identical under any parallel schedule. A stream is addressed by
// (seed, sample index, channel); all draws inside one stream happen in a
// fixed program order. Normal/uniform variates are generated from the raw
// 64-bit engine output by hand: std::*_distribution is not pinned by the
// standard and would make golden values compiler-dependent.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t sample, std::uint64_t channel = 0) {
        std::uint64_t s = mix(seed + 0x9e3779b97f4a7c15ull);
        s = mix(s ^ mix(sample + 0xbf58476d1ce4e5b9ull));
        s = mix(s ^ mix(channel + 0x94d049bb133111ebull));
        engine_.seed(s);
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in (0,1); never returns 0 so log() below is safe.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = uniform01();
        double v = uniform01();
        double r = std::sqrt(-2.0 * std::log(u));
        spare_ = r * std::sin(2.0 * 3.14159265358979323846 * v);
        have_spare_ = true;
        return r * std::cos(2.0 * 3.14159265358979323846 * v);
    }

    double rademacher() { return (next_u64() & 1ull) ? 1.0 : -1.0; }

    // Unit-variance uniform: sqrt(3) * U(-1,1).
    double uniform_unit_variance() { return std::sqrt(3.0) * (2.0 * uniform01() - 1.0); }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace latfield

#endif
