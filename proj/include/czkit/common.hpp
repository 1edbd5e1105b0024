#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace czkit {

using Point = std::vector<double>;

enum class ErrorKind {
    EmptyMeasure,
    DimensionMismatch,
    InvalidParams,
    InvalidArgument,
    NotNested,
    NotInSupport,
    NotReachable,
    ZeroSideCube,
    OmegaIsEverything,
    LPNotConverged,
    AdmissibilityViolation,
    ZeroMassCube,
    EmptyFamily,
    NotMeanZero,
    LambdaNonpositive,
    NotEnoughScales,
    NestingViolation,
    ConditionViolated,
    ParamsInfeasible,
    PropertyViolated,
    IoError,
    SchemaError,
};

const char* error_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline double norm2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double t = a[k] - b[k];
        s += t * t;
    }
    return std::sqrt(s);
}

inline double norm_inf(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
    return s;
}

// Cubic smoothstep clamped to [0,1]; C^1 with zero slope at both ends.
inline double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * (3.0 - 2.0 * t);
}

inline double smoothstep_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 6.0 * t * (1.0 - t);
}

// Worker count from CZKIT_THREADS, defaulting to 1.
int thread_count();

}  // namespace czkit
