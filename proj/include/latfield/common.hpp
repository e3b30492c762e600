#ifndef LATFIELD_COMMON_HPP
#define LATFIELD_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace latfield {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using IVec = Eigen::VectorXi;

inline constexpr double pi = 3.14159265358979323846;

// Base for all failure modes the modules can signal.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonPositiveSpectrum : Error {
    double lambda_min;
    explicit NonPositiveSpectrum(double lmin)
        : Error("cell operator is not positive definite: lambda_min = " + std::to_string(lmin)),
          lambda_min(lmin) {}
};

struct SingularFunction : Error {
    explicit SingularFunction(double omega)
        : Error("scalar map not finite at omega = " + std::to_string(omega)) {}
};

struct DegenerateBand : Error {
    int band;
    DegenerateBand(double theta, int l)
        : Error("band " + std::to_string(l) + " is degenerate near theta = " + std::to_string(theta)),
          band(l) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

struct NonRealField : Error {
    double violation;
    explicit NonRealField(double v)
        : Error("mode data violates the reality constraint by " + std::to_string(v)), violation(v) {}
};

struct NotPSD : Error {
    double lambda_min;
    explicit NotPSD(double lmin)
        : Error("covariance is not positive semidefinite: lambda_min = " + std::to_string(lmin)),
          lambda_min(lmin) {}
};

struct GridMismatch : Error {
    explicit GridMismatch(const std::string& what) : Error("grid mismatch: " + what) {}
};

struct WraparoundRisk : Error {
    double required_n;
    WraparoundRisk(int n, double needed)
        : Error("lattice too small for requested horizon: N = " + std::to_string(n) +
                ", need N > " + std::to_string(needed)),
          required_n(needed) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Reduce an angle to the signed representative in (-pi, pi].
inline double wrap_to_pi(double theta) {
    double t = std::fmod(theta, 2.0 * pi);
    if (t > pi) t -= 2.0 * pi;
    if (t <= -pi) t += 2.0 * pi;
    return t;
}

inline RVec wrap_to_pi(const RVec& theta) {
    RVec out(theta.size());
    for (int i = 0; i < theta.size(); ++i) out[i] = wrap_to_pi(theta[i]);
    return out;
}

}  // namespace latfield

#endif
