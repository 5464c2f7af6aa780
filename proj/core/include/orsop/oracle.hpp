#pragma once

#include "orsop/geometry.hpp"
#include "orsop/solver.hpp"

#include <cstdint>

// Brute-force reference solutions for tests. Nothing in the solve path calls
// into this header.
namespace orsop::oracle {

struct OracleResult {
    StateVector best_point;
    /// Squared distance for projection_oracle; Lyapunov level
    /// (xp - c)' P (xp - c) for sampling_oracle. +inf if nothing was feasible.
    double best_objective{0.0};
    std::int64_t samples_used{0};
    /// The minimizer beats every other distinct face minimum by more than 1e-10.
    bool certified_unique{false};
    std::int64_t feasible_samples{0};

    [[nodiscard]] bool found() const noexcept { return best_point.size() > 0; }
};

/// Euclidean projection of xp onto `region` by exhaustive search over face
/// subsets of size <= n. Each subset is solved as a minimum-norm least-squares
/// problem and kept only if primal and dual feasible. Throws InputError for an
/// empty region.
OracleResult projection_oracle(const Polytope& region, const StateVector& xp);

inline constexpr std::int64_t kMinSamplingBudget = 10'000;

/// Rejection sampling over the bounding box of ref_region intersected with
/// op_region, followed by a pattern-search polish of the best samples.
/// Feasibility is evaluated with the exact support function of the ellipsoid.
/// Deterministic in `seed`. Throws InputError if budget < kMinSamplingBudget;
/// an empty ref/op intersection reports +inf.
OracleResult sampling_oracle(const OrsopProblem& prob, std::int64_t budget, std::uint64_t seed);

}  // namespace orsop::oracle
