#include "instances.hpp"

#include "orsop/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace orsop {
namespace {

using testing::unit_box;

Vector v2(double a, double b) { return Vector{{a, b}}; }

TEST(Contains, InteriorPointOfBox) {
    const auto r = contains(unit_box(), v2(0.5, 0.5), 0.0);
    EXPECT_TRUE(r.feasible);
    EXPECT_DOUBLE_EQ(r.worst_violation, -0.5);
}

TEST(Contains, ExteriorPointNamesViolatedFace) {
    const auto r = contains(unit_box(), v2(2.0, 0.5), 0.0);
    EXPECT_FALSE(r.feasible);
    EXPECT_DOUBLE_EQ(r.worst_violation, 1.0);
    ASSERT_TRUE(r.violating_index.has_value());
    EXPECT_EQ(*r.violating_index, 0u);
}

TEST(Contains, CornerIsOnBoundary) {
    const auto r = contains(unit_box(), v2(1.0, 1.0), 1e-12);
    EXPECT_TRUE(r.feasible);
    EXPECT_DOUBLE_EQ(r.worst_violation, 0.0);
}

TEST(Contains, DimensionMismatchThrows) {
    EXPECT_THROW((void)contains(unit_box(), Vector::Zero(3)), InputError);
}

TEST(Contains, MonotoneInTolerance) {
    testing::Rng rng(11);
    const Polytope box = unit_box();
    for (int i = 0; i < 500; ++i) {
        const Vector x = 0.5 * Vector::Ones(2) + testing::gaussian(rng, 2);
        const double t1 = testing::uniform(rng, 0.0, 0.5);
        const double t2 = t1 + testing::uniform(rng, 0.0, 0.5);
        if (contains(box, x, t1).feasible) {
            EXPECT_TRUE(contains(box, x, t2).feasible);
        }
    }
}

TEST(SignedDistance, AlongAxis) {
    const HalfSpace h = HalfSpace::normalize(v2(1, 0), -2.0);
    EXPECT_DOUBLE_EQ(h.signed_distance(v2(0, 0)), -2.0);
    EXPECT_DOUBLE_EQ(h.signed_distance(v2(2, 5)), 0.0);
}

TEST(SignedDistance, RawNormalIsNormalized) {
    const HalfSpace h = HalfSpace::normalize(v2(3, 4), -10.0);
    EXPECT_NEAR(h.normal()(0), 0.6, 1e-15);
    EXPECT_NEAR(h.normal()(1), 0.8, 1e-15);
    EXPECT_NEAR(h.offset(), -2.0, 1e-15);
    EXPECT_NEAR(h.signed_distance(v2(0, 0)), -2.0, 1e-15);
}

TEST(Normalize, ScalesNormalAndOffset) {
    const HalfSpace h = HalfSpace::normalize(v2(2, 0), -4.0);
    EXPECT_EQ(h.normal(), v2(1, 0));
    EXPECT_DOUBLE_EQ(h.offset(), -2.0);

    const HalfSpace d = HalfSpace::normalize(v2(1, 1), 0.0);
    EXPECT_NEAR(d.normal()(0), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(d.normal()(1), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_EQ(d.offset(), 0.0);
}

TEST(Normalize, RejectsZeroAndNonFiniteNormals) {
    EXPECT_THROW(HalfSpace::normalize(v2(0, 0), 1.0), InputError);
    EXPECT_THROW(HalfSpace::normalize(v2(NAN, 1), 1.0), InputError);
}

TEST(Normalize, PreservesTheHalfSpace) {
    testing::Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const Vector raw = 5.0 * testing::gaussian(rng, 4);
        const double raw_offset = 3.0 * testing::gaussian(rng, 1)(0);
        const HalfSpace h = HalfSpace::normalize(raw, raw_offset);
        EXPECT_NEAR(h.normal().norm(), 1.0, 1e-15);
        for (int k = 0; k < 20; ++k) {
            const Vector x = 2.0 * testing::gaussian(rng, 4);
            const double before = raw.dot(x) + raw_offset;
            if (std::abs(before) < 1e-9) continue;
            EXPECT_EQ(std::signbit(before), std::signbit(h.signed_distance(x)));
        }
    }
}

TEST(Polytope, UnboundedOperationalRegionIsRejected) {
    EXPECT_THROW(testing::polytope({{1, 0, -1}, {0, 1, -1}}, RegionKind::Operational), InputError);
    EXPECT_NO_THROW(testing::polytope({{1, 0, -1}, {0, 1, -1}}, RegionKind::ReferenceFeasible));
}

TEST(Polytope, EmptyListAndMixedDimensionsAreRejected) {
    EXPECT_THROW(Polytope({}, RegionKind::ReferenceFeasible), InputError);
    std::vector<HalfSpace> faces{HalfSpace::normalize(v2(1, 0), 0.0),
                                 HalfSpace::normalize(Vector::Ones(3), 0.0)};
    EXPECT_THROW(Polytope(faces, RegionKind::ReferenceFeasible), InputError);
}

TEST(BoundingBox, OperationalRegionsHaveFiniteExtent) {
    testing::Rng rng(5);
    for (int i = 0; i < 30; ++i) {
        const Vector c = testing::gaussian(rng, 3);
        const Polytope p = testing::random_bounded_polytope(rng, c, 6, RegionKind::Operational);
        const auto bb = bounding_box(p);
        ASSERT_TRUE(bb.has_value());
        EXPECT_TRUE(bb->lower.allFinite());
        EXPECT_TRUE(bb->upper.allFinite());
        EXPECT_TRUE((bb->lower.array() <= c.array()).all());
        EXPECT_TRUE((bb->upper.array() >= c.array()).all());
    }
}

TEST(BoundingBox, MatchesBoxBounds) {
    const Polytope p = testing::box(v2(-1, 2), v2(3, 5), RegionKind::Operational);
    const auto bb = bounding_box(p);
    ASSERT_TRUE(bb.has_value());
    EXPECT_NEAR((bb->lower - v2(-1, 2)).norm(), 0.0, 1e-12);
    EXPECT_NEAR((bb->upper - v2(3, 5)).norm(), 0.0, 1e-12);
}

}  // namespace
}  // namespace orsop
