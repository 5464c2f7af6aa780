#pragma once

#include "orsop/barrier.hpp"
#include "orsop/geometry.hpp"
#include "orsop/lyapunov.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

namespace orsop {

/// Online reference-state problem: choose a new reference x' in ref_region so
/// that the Lyapunov ellipsoid through the present state xp, centred at x',
/// stays inside op_region, with minimum volume.
class OrsopProblem {
public:
    /// Throws InputError unless xp lies strictly inside op_region, op_region is
    /// Operational and ref_region is ReferenceFeasible. `anchor` is the
    /// pre-change reference; the whitened frame is centred on it (zero if absent).
    OrsopProblem(Polytope ref_region, Polytope op_region, StateVector xp, SpdMatrix shape,
                 std::optional<StateVector> anchor = std::nullopt);

    [[nodiscard]] const Polytope& ref_region() const noexcept { return ref_region_; }
    [[nodiscard]] const Polytope& op_region() const noexcept { return op_region_; }
    [[nodiscard]] const StateVector& xp() const noexcept { return xp_; }
    [[nodiscard]] const SpdMatrix& shape() const noexcept { return shape_; }
    [[nodiscard]] const StateVector& anchor() const noexcept { return anchor_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return xp_.size(); }

private:
    Polytope ref_region_;
    Polytope op_region_;
    StateVector xp_;
    SpdMatrix shape_;
    StateVector anchor_;
};

enum class SolveStatus { Case1, KktAnalytic, NewtonNumeric, Failure };

/// Why the Newton fallback ran (or None when it did not). NoKktSurvivor also
/// covers a cheapest survivor with a negative multiplier.
enum class Fallback { None, NoKktSurvivor, NonlinearCheckFailed, KktBudgetExceeded, Skipped };

enum class Method {
    Auto,        // case 1, then KKT + nonlinear check, then Newton
    KktOnly,     // stop with Failure if the KKT candidate is rejected
    NewtonOnly,  // skip the KKT step
};

struct SolveOptions {
    Method method{Method::Auto};
    /// Whiten even when P is a multiple of the identity.
    bool force_whitening{false};
    /// In the whitened frame the barrier weight is newton.lambda / det(P)^(1/n).
    barrier::NewtonConfig newton{};
};

struct SolveReport {
    SolveStatus status{SolveStatus::Failure};
    std::optional<StateVector> reference;  // state-space coordinates
    std::optional<Ellipsoid> ellipsoid;    // through xp, centred at reference
    double objective_volume{0.0};
    /// (xp - reference)' P (xp - reference); equals the squared distance for P = I.
    double level{0.0};
    std::chrono::nanoseconds elapsed{0};
    std::uint64_t flops{0};
    /// Largest support value of the ellipsoid over the operational faces.
    double margin{0.0};
    Fallback fallback{Fallback::None};
    int newton_iterations{0};
    bool whitened{false};
    std::string diagnostic;

    [[nodiscard]] bool solved() const noexcept { return status != SolveStatus::Failure; }
};

std::string to_string(SolveStatus s);
std::string to_string(Fallback f);

/// Sphere form of the operational-face test in the frame where the ellipsoid is
/// a sphere. Per face, with d = -(v . c + beta):
///   ||c - xp||^2 - d |d|  <= tol
/// which is q_k <= 0 plus the side condition v . c + beta <= 0.
FeasibilityReport sphere_check(const Polytope& op_region, const StateVector& xp,
                               const StateVector& candidate, double tol = kFeasibilityTol);

/// Step 2 test for a candidate given in state-space coordinates. For a
/// non-spherical P the candidate and faces are whitened first.
FeasibilityReport check_nonlinear(const StateVector& candidate, const OrsopProblem& prob,
                                  double tol = kFeasibilityTol);

/// Strictly feasible start for the barrier iteration: maximizes the smallest
/// slack over the reference faces and the sphere-in-face conditions with a
/// cutting-plane LP. nullopt when no strictly feasible point exists.
std::optional<StateVector> interior_start(const Polytope& ref_region, const Polytope& op_region,
                                          const StateVector& xp);

SolveReport solve(const OrsopProblem& prob, const SolveOptions& options = {});
SolveReport solve(const OrsopProblem& prob, const barrier::NewtonConfig& cfg);

}  // namespace orsop
