#include "orsop/geometry.hpp"

#include "orsop/cost.hpp"
#include "orsop/lp.hpp"

#include <cmath>

namespace orsop {

HalfSpace HalfSpace::normalize(const Vector& raw_normal, double raw_offset) {
    if (raw_normal.size() == 0) throw InputError("halfspace: empty normal");
    if (!raw_normal.allFinite() || !std::isfinite(raw_offset)) {
        throw InputError("halfspace: non-finite coefficients");
    }
    const double norm = raw_normal.norm();
    if (norm <= 0.0) throw InputError("halfspace: zero normal");
    return HalfSpace(raw_normal / norm, raw_offset / norm);
}

double HalfSpace::signed_distance(const StateVector& x) const {
    require_dim(x.size(), normal_.size(), "signed_distance");
    return normal_.dot(x) + offset_;
}

Polytope::Polytope(std::vector<HalfSpace> halfspaces, RegionKind kind, AssumeBounded)
    : halfspaces_(std::move(halfspaces)), kind_(kind) {
    validate();
    const auto r = static_cast<Eigen::Index>(halfspaces_.size());
    const Eigen::Index n = halfspaces_.front().dimension();
    normals_.resize(r, n);
    offsets_.resize(r);
    for (Eigen::Index i = 0; i < r; ++i) {
        normals_.row(i) = halfspaces_[static_cast<std::size_t>(i)].normal().transpose();
        offsets_(i) = halfspaces_[static_cast<std::size_t>(i)].offset();
    }
}

Polytope::Polytope(std::vector<HalfSpace> halfspaces, RegionKind kind)
    : Polytope(std::move(halfspaces), kind, AssumeBounded{}) {
    if (kind_ == RegionKind::Operational && !bounding_box(*this)) {
        throw InputError("operational region is empty or unbounded");
    }
}

void Polytope::validate() const {
    if (halfspaces_.empty()) throw InputError("polytope: no constraints");
    const Eigen::Index n = halfspaces_.front().dimension();
    for (const auto& h : halfspaces_) require_dim(h.dimension(), n, "polytope constraint");
}

Vector Polytope::values(const StateVector& x) const {
    require_dim(x.size(), dimension(), "polytope point");
    cost::charge(cost::matvec(normals_.rows(), normals_.cols()));
    return normals_ * x + offsets_;
}

FeasibilityReport contains(const Polytope& poly, const StateVector& x, double tol) {
    const Vector g = poly.values(x);
    Eigen::Index worst = 0;
    FeasibilityReport report;
    report.worst_violation = g.maxCoeff(&worst);
    report.feasible = report.worst_violation <= tol;
    if (!report.feasible) report.violating_index = static_cast<std::size_t>(worst);
    return report;
}

std::optional<Box> bounding_box(const Polytope& poly) {
    const Eigen::Index n = poly.dimension();
    const Vector rhs = -poly.offsets();
    Box box{Vector(n), Vector(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector c = Vector::Zero(n);
        c(i) = 1.0;
        const auto hi = lp::maximize(c, poly.normals(), rhs);
        if (hi.status != lp::Status::Optimal) return std::nullopt;
        c(i) = -1.0;
        const auto lo = lp::maximize(c, poly.normals(), rhs);
        if (lo.status != lp::Status::Optimal) return std::nullopt;
        box.upper(i) = hi.value;
        box.lower(i) = -lo.value;
    }
    return box;
}

}  // namespace orsop
