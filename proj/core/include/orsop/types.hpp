#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace orsop {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Coordinates of a plant state, reference state or candidate reference.
using StateVector = Eigen::VectorXd;

/// Absolute feasibility tolerance shared by every membership test.
inline constexpr double kFeasibilityTol = 1e-9;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent caller input (dimension mismatch, zero normal, ...).
class InputError : public Error {
public:
    using Error::Error;
};

/// Closed loop is not Hurwitz.
class StabilityError : public Error {
public:
    using Error::Error;
};

/// A linear solve or factorization that should succeed did not.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Barrier evaluated on or outside its domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Active-set enumeration refused: too many constraints.
class BudgetError : public Error {
public:
    using Error::Error;
};

inline void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
    if (got != want) {
        throw InputError(std::string(what) + ": dimension " + std::to_string(got) +
                         " does not match " + std::to_string(want));
    }
}

}  // namespace orsop
