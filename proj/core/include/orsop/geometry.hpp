#pragma once

#include "orsop/types.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace orsop {

/// One linear constraint  normal . x + offset <= 0  with a unit-length normal.
///
/// Construction always goes through normalize(), so signed_distance() is a true
/// Euclidean distance to the boundary hyperplane (negative inside).
class HalfSpace {
public:
    /// Scales (raw_normal, raw_offset) by 1/||raw_normal||. Throws InputError on a
    /// zero or non-finite normal.
    static HalfSpace normalize(const Vector& raw_normal, double raw_offset);

    [[nodiscard]] const Vector& normal() const noexcept { return normal_; }
    [[nodiscard]] double offset() const noexcept { return offset_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return normal_.size(); }

    [[nodiscard]] double signed_distance(const StateVector& x) const;

private:
    HalfSpace(Vector normal, double offset) : normal_(std::move(normal)), offset_(offset) {}

    Vector normal_;
    double offset_;
};

enum class RegionKind {
    ReferenceFeasible,  // where the reference state may be placed
    Operational,        // where the plant state must stay; compact
};

/// Conjunction of half-spaces {x : n_i . x + b_i <= 0 for all i}.
class Polytope {
public:
    struct AssumeBounded {};

    /// Operational regions are probed for boundedness with one LP per axis
    /// direction; an unbounded or empty operational region throws InputError.
    Polytope(std::vector<HalfSpace> halfspaces, RegionKind kind);

    /// Skips the boundedness probe. For regions derived from an already-checked
    /// bounded region by an invertible affine map.
    Polytope(std::vector<HalfSpace> halfspaces, RegionKind kind, AssumeBounded);

    [[nodiscard]] RegionKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t size() const noexcept { return halfspaces_.size(); }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return halfspaces_.front().dimension(); }
    [[nodiscard]] const HalfSpace& operator[](std::size_t i) const { return halfspaces_[i]; }
    [[nodiscard]] const std::vector<HalfSpace>& halfspaces() const noexcept { return halfspaces_; }
    [[nodiscard]] auto begin() const noexcept { return halfspaces_.begin(); }
    [[nodiscard]] auto end() const noexcept { return halfspaces_.end(); }

    /// Stacked unit normals, one row per constraint.
    [[nodiscard]] const Matrix& normals() const noexcept { return normals_; }
    [[nodiscard]] const Vector& offsets() const noexcept { return offsets_; }

    /// g(x) for every constraint: normals() * x + offsets().
    [[nodiscard]] Vector values(const StateVector& x) const;

private:
    void validate() const;

    std::vector<HalfSpace> halfspaces_;
    RegionKind kind_;
    Matrix normals_;
    Vector offsets_;
};

struct FeasibilityReport {
    bool feasible{false};
    double worst_violation{0.0};
    std::optional<std::size_t> violating_index;
    /// False when a query's precondition failed (e.g. ellipsoid center outside the
    /// region); the report is then infeasible by definition.
    bool precondition_met{true};
};

/// Membership test: feasible iff max_i g_i(x) <= tol. violating_index names the
/// constraint attaining the maximum when the point is infeasible.
FeasibilityReport contains(const Polytope& poly, const StateVector& x, double tol = kFeasibilityTol);

struct Box {
    Vector lower;
    Vector upper;
};

/// Axis-aligned bounding box via 2n LPs. Empty optional if the region is empty
/// or unbounded along some axis.
std::optional<Box> bounding_box(const Polytope& poly);

}  // namespace orsop
