#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace physmimo {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Invalid configuration or preconditions (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : ConfigError {
    using ConfigError::ConfigError;
};

// Matrix dimension mismatch.
struct ShapeError : ConfigError {
    using ConfigError::ConfigError;
};

// Root tracking, fixed-point or solver failure (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

} // namespace physmimo
