#pragma once

#include "orsop/geometry.hpp"

#include <optional>
#include <vector>

// Analytic projection of a point onto a polytope by enumerating active sets.
//
// For each combination of l constraints assumed active, stationarity of
//   f(x) = ||x - xp||^2 + sum mu_j g_j(x)
// gives x = xp - 1/2 sum mu_j w_j, and the active equalities give the
// l x l system  W mu = 2 d  with W_ij = w_i . w_j and d_i = w_i . xp + b_i.
// A candidate survives if its active constraints hold with equality and every
// other constraint is strictly slack; the survivor with the smallest objective
// is the projection.
namespace orsop::kkt {

/// |g| below this counts as "on the face" in the survivor test.
inline constexpr double kEqualityTol = 1e-8;
/// Largest constraint count accepted (2^20 combinations).
inline constexpr std::size_t kMaxConstraints = 20;
/// Gram matrices with a condition estimate above this are treated as singular.
inline constexpr double kSingularCondition = 1e12;

struct ActiveSet {
    std::vector<std::size_t> indices;  // sorted, distinct

    [[nodiscard]] std::size_t size() const noexcept { return indices.size(); }
    friend bool operator==(const ActiveSet&, const ActiveSet&) = default;
    friend auto operator<=>(const ActiveSet&, const ActiveSet&) = default;
};

struct KktCandidate {
    StateVector point;
    Vector multipliers;  // one per active index, same order
    ActiveSet active_set;
    double objective{0.0};  // ||point - xp||^2
    /// All multipliers >= -kEqualityTol. Diagnostic only; not used for pruning.
    bool dual_feasible{false};
};

/// Candidate for one active set, or nullopt if its Gram matrix is singular.
std::optional<KktCandidate> candidate_for(const ActiveSet& active, const Polytope& region,
                                          const StateVector& xp);

/// All candidates passing the face/slack presumption check. xp must lie outside
/// the region. Throws BudgetError when the region has more than kMaxConstraints
/// constraints.
std::vector<KktCandidate> enumerate_candidates(const Polytope& region, const StateVector& xp,
                                               double tol = kEqualityTol);

/// Minimum-objective survivor; ties go to the lexicographically smallest active
/// set. nullopt when nothing survives.
std::optional<KktCandidate> solve_problem2(const Polytope& region, const StateVector& xp,
                                           double tol = kEqualityTol);

}  // namespace orsop::kkt
