#pragma once

#include "orsop/geometry.hpp"
#include "orsop/lyapunov.hpp"

#include <chrono>
#include <optional>

// Baseline controller redesign used for comparison. This is a surrogate for an
// LMI-based redesign: a fixed ladder of LQR designs with Q = s I, R = I,
// s = 10^-2 ... 10^4. Each rung solves the continuous-time algebraic Riccati
// equation by Kleinman iteration and then P from A_cl' P + P A_cl = -I. The
// first rung whose ellipsoid through x_t1 centred at x_ref fits op_after wins.
namespace orsop::sim {

inline constexpr int kOcrRungs = 7;

struct OcrReport {
    bool solved{false};
    std::optional<Matrix> gain;
    std::optional<SpdMatrix> shape;
    std::optional<Ellipsoid> ellipsoid;
    int rung{-1};  // accepted rung, -1 if none
    int riccati_iterations{0};
    double margin{0.0};  // of the last design examined
    double objective_volume{0.0};
    std::chrono::nanoseconds elapsed{0};
    std::uint64_t flops{0};
    std::string diagnostic;
};

/// State weight of rung i: 10^(i - 2).
double ocr_rung_weight(int rung);

/// Stabilizing solution of A'P + PA - P B B' P + s I = 0 by Kleinman iteration
/// from the stabilizing gain k0. Returns the gain B'P. Throws NumericalError if
/// the iteration does not settle.
Matrix lqr_gain(const Matrix& a, const Matrix& b, double state_weight, const Matrix& k0,
                int* iterations = nullptr);

OcrReport ocr_surrogate(const PlantModel& plant, const Polytope& op_after, const StateVector& x_t1,
                        const StateVector& x_ref);

}  // namespace orsop::sim
