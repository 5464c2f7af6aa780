#pragma once

#include "orsop/types.hpp"

// Small dense linear programs: maximize c'x subject to A x <= b, x free.
//
// Two-phase tableau simplex, Dantzig pricing with a Bland fallback. Sized for the handful of
// auxiliary problems the solver needs (boundedness probes, interior points),
// i.e. tens of rows and columns.
namespace orsop::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
    Status status{Status::Infeasible};
    Vector x;
    double value{0.0};
};

Result maximize(const Vector& c, const Matrix& a, const Vector& b);

/// Same problem, started from a known feasible point x0 (A x0 <= b), which
/// skips phase one. Violations at rounding level are tolerated; larger ones
/// throw InputError.
Result maximize_from(const Vector& c, const Matrix& a, const Vector& b, const Vector& x0);

}  // namespace orsop::lp
