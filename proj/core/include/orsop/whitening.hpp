#pragma once

#include "orsop/geometry.hpp"
#include "orsop/lyapunov.hpp"

namespace orsop {

/// Change of coordinates that turns the Lyapunov ellipsoids of P into spheres.
///
///   to_s2(x) = Lambda^{1/2} U' (x - origin)
///   to_s1(z) = U Lambda^{-1/2} z + origin
///
/// with P = U Lambda U'. The origin is normally the pre-change reference
/// state, so the whitened frame is centred on it.
class WhitenTransform {
public:
    static WhitenTransform from_spd(const SpdMatrix& p);
    static WhitenTransform from_spd(const SpdMatrix& p, StateVector origin);

    [[nodiscard]] const Matrix& u() const noexcept { return u_; }
    [[nodiscard]] const Vector& lambda_sqrt() const noexcept { return lambda_sqrt_; }
    [[nodiscard]] const Vector& lambda_inv_sqrt() const noexcept { return lambda_inv_sqrt_; }
    [[nodiscard]] const StateVector& origin() const noexcept { return origin_; }
    /// det(U Lambda^{-1/2}); its magnitude maps S2 volumes to S1 volumes.
    [[nodiscard]] double det_back() const noexcept { return det_back_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return u_.rows(); }

    /// U Lambda^{-1/2}, the linear part of to_s1.
    [[nodiscard]] Matrix back_matrix() const;

    [[nodiscard]] StateVector to_s2(const StateVector& x1) const;
    [[nodiscard]] StateVector to_s1(const StateVector& x2) const;

    /// Image of a half-space under to_s2, renormalized to a unit normal.
    [[nodiscard]] HalfSpace to_s2(const HalfSpace& h) const;
    [[nodiscard]] Polytope to_s2(const Polytope& poly) const;

private:
    WhitenTransform() = default;

    Matrix u_;
    Vector lambda_sqrt_;
    Vector lambda_inv_sqrt_;
    StateVector origin_;
    double det_back_{1.0};
};

struct WhitenedProblem {
    Polytope ref_region;
    Polytope op_region;
    StateVector xp;
    /// U Lambda^{-1/2}. Carried for the literal metric form of the operational
    /// constraint; in the renormalized S2 frame the ellipsoid test is the plain
    /// sphere test and does not need it.
    Matrix metric;
};

WhitenedProblem transform_problem(const WhitenTransform& t, const Polytope& ref_region,
                                  const Polytope& op_region, const StateVector& xp1);

}  // namespace orsop
