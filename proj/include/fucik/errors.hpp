#pragma once

#include <Eigen/Dense>

#include <sstream>
#include <stdexcept>
#include <string>

namespace fucik {

inline std::string format_number(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NonPositiveKernel : public Error {
public:
    NonPositiveKernel(double x, double value)
        : Error("kernel is not positive at x = " + format_number(x) + " (K = " +
                format_number(value) + ")"),
          x(x), value(value) {}
    double x;
    double value;
};

class OrderOutOfRange : public Error {
public:
    explicit OrderOutOfRange(double s)
        : Error("fractional order s = " + format_number(s) + " is outside (0,1)"), s(s) {}
    double s;
};

class UnsupportedKernel : public Error {
public:
    using Error::Error;
};

class MeshTooCoarse : public Error {
public:
    explicit MeshTooCoarse(int interior_dim)
        : Error("mesh has interior dimension " + std::to_string(interior_dim) +
                ", at least 3 is required"),
          interior_dim(interior_dim) {}
    int interior_dim;
};

class DegenerateSplit : public Error {
public:
    DegenerateSplit(int k, double lambda_k, double lambda_k1)
        : Error("eigenvalues " + format_number(lambda_k) + " and " + format_number(lambda_k1) +
                " at split index " + std::to_string(k) + " are not separated"),
          k(k), lambda_k(lambda_k), lambda_k1(lambda_k1) {}
    int k;
    double lambda_k;
    double lambda_k1;
};

class FactorizationFailure : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(long expected, long actual)
        : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(actual)),
          expected(expected), actual(actual) {}
    long expected;
    long actual;
};

/// An iterative solver ran out of iterations. Carries the best iterate seen.
class MaxIterations : public Error {
public:
    MaxIterations(std::string what, Eigen::VectorXd best, double residual, int iterations)
        : Error(what + ": no convergence after " + std::to_string(iterations) + " iterations (residual " +
                format_number(residual) + ")"),
          best(std::move(best)), residual(residual), iterations(iterations) {}
    Eigen::VectorXd best;
    double residual;
    int iterations;
};

class BracketExhausted : public Error {
public:
    BracketExhausted(double beta_max, double m_at_beta_max)
        : Error("beta bracket exhausted at beta_max = " + format_number(beta_max) +
                " (m = " + format_number(m_at_beta_max) + ")"),
          beta_max(beta_max), m_at_beta_max(m_at_beta_max) {}
    double beta_max;
    double m_at_beta_max;
};

class NoCrossing : public Error {
public:
    using Error::Error;
};

class RadiusTooSmall : public Error {
public:
    using Error::Error;
};

class MissingLimits : public Error {
public:
    using Error::Error;
};

class RegimeViolation : public Error {
public:
    using Error::Error;
};

class EmptySeries : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace fucik
