#pragma once

#include "orsop/geometry.hpp"

#include <optional>

// Log-barrier reformulation of the reference-state problem and a damped Newton
// iteration on it.
//
//   F(x) = f(x) - (1/lambda) sum_j ln(-g_j(x)) - (1/lambda) sum_k ln(-q_k(x))
//   f(x)   = ||x - xp||^2
//   g_j(x) = w_j . x + b_j                       (reference-feasible faces)
//   q_k(x) = ||M (x - xp)||^2 - (v_k . x + c_k)^2  (operational faces; M = I by default)
//
// q_k <= 0 together with v_k . x + c_k <= 0 says the sphere through xp centred
// at x stays inside face k. The barrier domain also requires that side
// condition, which keeps iterates out of the mirror-image branch of q_k < 0.
namespace orsop::barrier {

struct NewtonConfig {
    double eta{1.0};        // initial (or fixed) step size
    double epsilon{1e-9};   // stop when ||x_{i+1} - x_i|| < epsilon
    int n_max{200};         // iteration cap
    double lambda{1e6};     // barrier weight
    bool backtracking{true};  // halve eta until strictly feasible and F does not increase
};

class BarrierProblem {
public:
    BarrierProblem(StateVector xp, const Polytope& ref_region, const Polytope& op_region,
                   double lambda, std::optional<Matrix> metric = std::nullopt);

    /// Raw constraint blocks; either block may have zero rows.
    BarrierProblem(StateVector xp, Matrix g_normals, Vector g_offsets, Matrix q_normals,
                   Vector q_offsets, double lambda, std::optional<Matrix> metric = std::nullopt);

    /// Also weight the objective with M'M, i.e. f(x) = ||M (x - xp)||^2.
    BarrierProblem& metric_on_objective(bool on);

    [[nodiscard]] const StateVector& xp() const noexcept { return xp_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return xp_.size(); }
    [[nodiscard]] const Matrix& g_normals() const noexcept { return g_normals_; }
    [[nodiscard]] const Vector& g_offsets() const noexcept { return g_offsets_; }
    [[nodiscard]] const Matrix& q_normals() const noexcept { return q_normals_; }
    [[nodiscard]] const Vector& q_offsets() const noexcept { return q_offsets_; }
    [[nodiscard]] bool has_metric() const noexcept { return has_metric_; }
    /// M'M, or I when no metric was given.
    [[nodiscard]] const Matrix& gram() const noexcept { return gram_; }
    [[nodiscard]] const Matrix& objective_gram() const noexcept { return objective_gram_; }

    [[nodiscard]] double objective(const StateVector& x) const;
    [[nodiscard]] Vector g_values(const StateVector& x) const;
    [[nodiscard]] Vector q_values(const StateVector& x) const;
    /// All g_j < 0, all q_k < 0 and all side conditions v_k . x + c_k < 0.
    [[nodiscard]] bool strictly_feasible(const StateVector& x) const;

private:
    StateVector xp_;
    Matrix g_normals_;
    Vector g_offsets_;
    Matrix q_normals_;
    Vector q_offsets_;
    double lambda_;
    bool has_metric_{false};
    Matrix gram_;
    Matrix objective_gram_;
};

/// Throws DomainError when x is not strictly feasible.
double barrier_value(const BarrierProblem& p, const StateVector& x);
Vector barrier_gradient(const BarrierProblem& p, const StateVector& x);
Matrix barrier_hessian(const BarrierProblem& p, const StateVector& x);

enum class NewtonStatus { Converged, Failure };

struct NewtonOutcome {
    NewtonStatus status{NewtonStatus::Failure};
    std::optional<StateVector> point;
    int iterations{0};
    double final_objective{0.0};  // F at the last iterate
};

/// Newton iteration x <- x - eta H^{-1} grad F. Converged when a step shorter
/// than epsilon is taken at a finite F; Failure at n_max iterations, or when a
/// fixed-step iterate leaves the barrier domain. Indefinite Hessians fall back
/// to a gradient step. Throws InputError if `start` is not strictly feasible.
NewtonOutcome newton_solve(const BarrierProblem& p, const StateVector& start,
                           const NewtonConfig& cfg = {});

}  // namespace orsop::barrier
