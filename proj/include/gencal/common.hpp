#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace gencal {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

enum class ModelKind { Conventional, Augmented };

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter set or tuning violates its invariants.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A state makes the model singular (e.g. a non-positive inertia estimate).
class SingularState : public Error {
public:
    using Error::Error;
};

/// A PMU frame cannot be used (e.g. zero-magnitude phasor).
class InvalidFrame : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double residual)
        : Error(what + " (residual norm " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Numerical failure inside the filter: lost positive definiteness,
/// non-finite sigma point propagation or an ill-conditioned innovation.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NonPsdCovariance : public NumericalError {
public:
    NonPsdCovariance(const std::string& what, Matrix offending)
        : NumericalError(what), matrix_(std::move(offending)) {}
    const Matrix& matrix() const noexcept { return matrix_; }

private:
    Matrix matrix_;
};

class PropagatedNaN : public NumericalError {
public:
    PropagatedNaN(const std::string& what, int sigma_index)
        : NumericalError(what + " (sigma point " + std::to_string(sigma_index) + ")"),
          index_(sigma_index) {}
    int sigma_index() const noexcept { return index_; }

private:
    int index_;
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double time)
        : Error(what + " at t=" + std::to_string(time) + " s"), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& source, int line, const std::string& what)
        : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace gencal
