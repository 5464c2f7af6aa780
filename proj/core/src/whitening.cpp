#include "orsop/whitening.hpp"

#include "orsop/cost.hpp"

namespace orsop {

WhitenTransform WhitenTransform::from_spd(const SpdMatrix& p) {
    return from_spd(p, StateVector::Zero(p.dimension()));
}

WhitenTransform WhitenTransform::from_spd(const SpdMatrix& p, StateVector origin) {
    require_dim(origin.size(), p.dimension(), "whitening origin");
    WhitenTransform t;
    t.u_ = p.svd_u();
    t.lambda_sqrt_ = p.svd_lambda().cwiseSqrt();
    t.lambda_inv_sqrt_ = t.lambda_sqrt_.cwiseInverse();
    t.origin_ = std::move(origin);
    t.det_back_ = t.u_.determinant() * t.lambda_inv_sqrt_.prod();
    return t;
}

Matrix WhitenTransform::back_matrix() const { return u_ * lambda_inv_sqrt_.asDiagonal(); }

StateVector WhitenTransform::to_s2(const StateVector& x1) const {
    require_dim(x1.size(), dimension(), "to_s2");
    cost::charge(cost::matvec(dimension(), dimension()) + 2 * static_cast<std::uint64_t>(dimension()));
    return lambda_sqrt_.asDiagonal() * (u_.transpose() * (x1 - origin_));
}

StateVector WhitenTransform::to_s1(const StateVector& x2) const {
    require_dim(x2.size(), dimension(), "to_s1");
    cost::charge(cost::matvec(dimension(), dimension()) + 2 * static_cast<std::uint64_t>(dimension()));
    return u_ * lambda_inv_sqrt_.asDiagonal() * x2 + origin_;
}

HalfSpace WhitenTransform::to_s2(const HalfSpace& h) const {
    require_dim(h.dimension(), dimension(), "halfspace to_s2");
    // w . x1 + b = w . (U L^{-1/2} z + o) + b = (L^{-1/2} U' w) . z + (b + w . o)
    const Vector normal = lambda_inv_sqrt_.asDiagonal() * (u_.transpose() * h.normal());
    cost::charge(cost::matvec(dimension(), dimension()) + 4 * static_cast<std::uint64_t>(dimension()));
    return HalfSpace::normalize(normal, h.offset() + h.normal().dot(origin_));
}

Polytope WhitenTransform::to_s2(const Polytope& poly) const {
    std::vector<HalfSpace> out;
    out.reserve(poly.size());
    for (const auto& h : poly) out.push_back(to_s2(h));
    return {std::move(out), poly.kind(), Polytope::AssumeBounded{}};
}

WhitenedProblem transform_problem(const WhitenTransform& t, const Polytope& ref_region,
                                  const Polytope& op_region, const StateVector& xp1) {
    return {t.to_s2(ref_region), t.to_s2(op_region), t.to_s2(xp1), t.back_matrix()};
}

}  // namespace orsop
