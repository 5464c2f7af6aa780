#include "instances.hpp"

#include "orsop/oracle.hpp"
#include "orsop/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace orsop {
namespace {

using testing::unit_box;

Vector v2(double a, double b) { return Vector{{a, b}}; }
Matrix diag2(double a, double b) { return v2(a, b).asDiagonal(); }

Polytope square(double half) {
    return testing::box(Vector::Constant(2, -half), Vector::Constant(2, half), RegionKind::Operational);
}

TEST(OrsopProblem, RejectsStateOutsideOperationalRegion) {
    EXPECT_THROW(OrsopProblem(unit_box(), square(2), v2(2, 0), SpdMatrix::identity(2)), InputError);
    EXPECT_THROW(OrsopProblem(unit_box(), square(2), v2(3, 0), SpdMatrix::identity(2)), InputError);
    EXPECT_THROW(OrsopProblem(square(2), square(2), v2(0, 0), SpdMatrix::identity(2)), InputError);
    EXPECT_THROW(OrsopProblem(unit_box(), square(2), Vector::Zero(3), SpdMatrix::identity(2)), InputError);
}

TEST(CheckNonlinear, SphereInsideFace) {
    const OrsopProblem prob(testing::box(v2(-1, -1), v2(1, 1), RegionKind::ReferenceFeasible), square(2), v2(0, 0),
                            SpdMatrix::identity(2));
    const auto r = check_nonlinear(v2(0.5, 0), prob);
    EXPECT_TRUE(r.feasible);
    // Face x1 <= 2: 0.25 - 1.5^2 = -2.
    EXPECT_NEAR(sphere_check(prob.op_region(), prob.xp(), v2(0.5, 0)).worst_violation, -2.0, 1e-15);
}

TEST(CheckNonlinear, CandidateAtXpAlwaysPasses) {
    testing::Rng rng(51);
    for (int i = 0; i < 50; ++i) {
        const auto prob = testing::random_sphere_problem(rng, 3);
        const auto r = sphere_check(prob.op_region(), prob.xp(), prob.xp());
        EXPECT_TRUE(r.feasible);
        const Vector d = -prob.op_region().values(prob.xp());
        EXPECT_NEAR(r.worst_violation, (-d.array().square()).maxCoeff(), 1e-15);
    }
}

TEST(CheckNonlinear, SphereCrossingFace) {
    const OrsopProblem prob(testing::box(v2(-2, -1), v2(2, 1), RegionKind::ReferenceFeasible), square(2), v2(0, 0),
                            SpdMatrix::identity(2));
    const auto r = check_nonlinear(v2(1.5, 0), prob);
    EXPECT_FALSE(r.feasible);
    EXPECT_NEAR(r.worst_violation, 2.0, 1e-15);
    EXPECT_EQ(r.violating_index, 0u);
}

TEST(CheckNonlinear, SideConditionRejectsMirrorCentre) {
    // q = ||c - xp||^2 - (v . c + beta)^2 < 0 on the far side of the face.
    const Polytope op = testing::polytope({{1, 0, -1}, {-1, 0, -3}, {0, 1, -3}, {0, -1, -3}}, RegionKind::Operational);
    const Polytope ref = testing::box(v2(-5, -5), v2(5, 5), RegionKind::ReferenceFeasible);
    const OrsopProblem prob(ref, op, v2(0.9, 0), SpdMatrix::identity(2));
    EXPECT_FALSE(check_nonlinear(v2(4, 0), prob).feasible);
}

TEST(CheckNonlinear, EllipsoidUsesItsOwnAxes) {
    // P = diag(4, 1): the ellipsoid through (0.5, 0) centred at 0 has y semi-axis 1,
    // so it crosses y <= 0.6 although the Euclidean sphere of radius 0.5 would not.
    const Polytope op = testing::polytope({{0, 1, -0.6}, {0, -1, -3}, {1, 0, -3}, {-1, 0, -3}}, RegionKind::Operational);
    const Polytope ref = testing::box(v2(-0.1, -0.1), v2(0.1, 0.1), RegionKind::ReferenceFeasible);
    const OrsopProblem prob(ref, op, v2(0.5, 0), SpdMatrix(diag2(4, 1)));
    const auto r = check_nonlinear(v2(0, 0), prob);
    EXPECT_FALSE(r.feasible);
    EXPECT_FALSE(ellipsoid_in_region(ellipsoid_through(v2(0, 0), prob.shape(), prob.xp()), op).feasible);

    // Agreement with the exact support-function test over random candidates.
    testing::Rng rng(52);
    for (int i = 0; i < 300; ++i) {
        const Vector c = v2(testing::uniform(rng, -0.1, 0.1), testing::uniform(rng, -0.1, 0.1));
        const auto e = ellipsoid_through(c, prob.shape(), prob.xp());
        const double support = support_values(e, op).maxCoeff();
        if (std::abs(support) < 1e-9) continue;
        EXPECT_EQ(check_nonlinear(c, prob).feasible, support <= 0.0);
    }
}

TEST(Solve, Case1WhenXpIsAReference) {
    const OrsopProblem prob(unit_box(), square(3), v2(0.5, 0.5), SpdMatrix::identity(2));
    const auto r = solve(prob);
    EXPECT_EQ(r.status, SolveStatus::Case1);
    ASSERT_TRUE(r.reference.has_value());
    EXPECT_EQ(*r.reference, v2(0.5, 0.5));
    EXPECT_EQ(r.level, 0.0);
    EXPECT_EQ(r.objective_volume, 0.0);
}

TEST(Solve, Case1OnTheBoundary) {
    const OrsopProblem prob(unit_box(), square(3), v2(1.0, 0.5), SpdMatrix::identity(2));
    EXPECT_EQ(solve(prob).status, SolveStatus::Case1);
}

TEST(Solve, KktPath) {
    const OrsopProblem prob(unit_box(), square(3), v2(2, 0.5), SpdMatrix::identity(2));
    const auto r = solve(prob);
    ASSERT_EQ(r.status, SolveStatus::KktAnalytic);
    EXPECT_NEAR((*r.reference - v2(1, 0.5)).norm(), 0.0, 1e-15);
    EXPECT_NEAR(r.level, 1.0, 1e-15);
    EXPECT_NEAR(r.margin, -1.0, 1e-15);
    EXPECT_EQ(r.fallback, Fallback::None);
    EXPECT_FALSE(r.whitened);
    EXPECT_GT(r.flops, 0u);
}

// The projection (1, 0.5) is 1 from xp but only 0.7 from y = 1.2; the optimum
// slides down the face x1 = 1 to c2 = 0.19 / 1.4.
OrsopProblem sliding() {
    const Polytope op =
        testing::polytope({{1, 0, -2.4}, {-1, 0, -5}, {0, 1, -1.2}, {0, -1, -5}}, RegionKind::Operational);
    return OrsopProblem(unit_box(), op, v2(2, 0.5), SpdMatrix::identity(2));
}

TEST(Solve, NewtonPathWhenStepTwoFails) {
    const OrsopProblem prob = sliding();
    EXPECT_FALSE(check_nonlinear(v2(1, 0.5), prob).feasible);

    const auto r = solve(prob);
    ASSERT_EQ(r.status, SolveStatus::NewtonNumeric) << r.diagnostic;
    EXPECT_EQ(r.fallback, Fallback::NonlinearCheckFailed);
    EXPECT_TRUE(contains(unit_box(), *r.reference).feasible);
    EXPECT_LE(r.margin, 0.0);
    const double c2 = 0.19 / 1.4;
    EXPECT_LT((*r.reference - v2(1, c2)).norm(), 1e-3);

    const auto o = oracle::sampling_oracle(prob, 1'000'000, 7);
    ASSERT_TRUE(o.found());
    EXPECT_LE(std::abs(r.level - o.best_objective), 0.01 * o.best_objective);
}

TEST(Solve, KktOnlyStopsAtStepTwo) {
    SolveOptions options;
    options.method = Method::KktOnly;
    const auto r = solve(sliding(), options);
    EXPECT_EQ(r.status, SolveStatus::Failure);
    EXPECT_EQ(r.fallback, Fallback::NonlinearCheckFailed);
    EXPECT_FALSE(r.reference.has_value());
}

TEST(Solve, NewtonOnlyApproachesTheProjection) {
    const OrsopProblem prob(unit_box(), square(3), v2(2, 0.5), SpdMatrix::identity(2));
    SolveOptions options;
    options.method = Method::NewtonOnly;
    const auto r = solve(prob, options);
    ASSERT_EQ(r.status, SolveStatus::NewtonNumeric);
    EXPECT_EQ(r.fallback, Fallback::Skipped);
    EXPECT_LT((*r.reference - v2(1, 0.5)).norm(), 1e-3);
}

TEST(Solve, NoSurvivorFallsBackToNewton) {
    const Polytope ref = testing::polytope({{1, 0, -1}, {0, 1, -1}, {1, 1, -2}, {-1, 0, -5}, {0, -1, -5}},
                                           RegionKind::ReferenceFeasible);
    const OrsopProblem prob(ref, square(6), v2(2, 2), SpdMatrix::identity(2));
    const auto r = solve(prob);
    ASSERT_EQ(r.status, SolveStatus::NewtonNumeric);
    EXPECT_EQ(r.fallback, Fallback::NoKktSurvivor);
    EXPECT_LT((*r.reference - v2(1, 1)).norm(), 1e-3);
}

TEST(Solve, FailureWhenNoReferenceFits) {
    // Every reference in the box puts xp on an ellipsoid that leaves the thin region.
    const Polytope op = testing::box(v2(-3, -0.2), v2(3, 0.2), RegionKind::Operational);
    const Polytope ref = testing::box(v2(-0.5, 2), v2(0.5, 3), RegionKind::ReferenceFeasible);
    const OrsopProblem prob(ref, op, v2(0, 0), SpdMatrix::identity(2));
    const auto r = solve(prob);
    EXPECT_EQ(r.status, SolveStatus::Failure);
    EXPECT_FALSE(r.reference.has_value());
    EXPECT_FALSE(r.diagnostic.empty());
}

TEST(Solve, ReportsAreCertified) {
    testing::Rng rng(53);
    int solved = 0;
    for (int i = 0; i < 150; ++i) {
        const Eigen::Index n = testing::uniform_int(rng, 2, 4);
        const auto base = testing::random_sphere_problem(rng, n);
        const OrsopProblem prob(base.ref_region(), base.op_region(), base.xp(), testing::random_spd(rng, n, 20.0),
                                testing::gaussian(rng, n));
        const auto r = solve(prob);
        EXPECT_TRUE(r.whitened);
        if (!r.solved()) continue;
        ++solved;
        ASSERT_TRUE(r.reference && r.ellipsoid);
        EXPECT_TRUE(contains(prob.ref_region(), *r.reference).feasible);
        const auto fit = ellipsoid_in_region(*r.ellipsoid, prob.op_region());
        EXPECT_TRUE(fit.feasible);
        EXPECT_DOUBLE_EQ(r.margin, fit.worst_violation);
        EXPECT_NEAR(r.level, lyap_value(*r.reference, prob.shape(), prob.xp()), 1e-12 * (1.0 + r.level));
        if (r.status == SolveStatus::KktAnalytic) {
            EXPECT_TRUE(check_nonlinear(*r.reference, prob).feasible);
        }
        if (r.status == SolveStatus::NewtonNumeric) {
            EXPECT_NE(r.fallback, Fallback::None);
        }
    }
    EXPECT_GT(solved, 50);
}

TEST(Solve, WhiteningIsTransparentForScaledIdentity) {
    testing::Rng rng(54);
    int kkt = 0, newton = 0;
    for (int i = 0; i < 300; ++i) {
        const Eigen::Index n = testing::uniform_int(rng, 2, 4);
        const auto base = testing::random_sphere_problem(rng, n);
        const double c = std::exp(testing::uniform(rng, -2.0, 2.0));
        const OrsopProblem prob(base.ref_region(), base.op_region(), base.xp(),
                                SpdMatrix(c * Matrix::Identity(n, n)), testing::gaussian(rng, n));
        SolveOptions plain, whitened;
        whitened.force_whitening = true;
        const auto a = solve(prob, plain);
        const auto b = solve(prob, whitened);
        EXPECT_FALSE(a.whitened);
        EXPECT_TRUE(b.whitened);
        ASSERT_EQ(a.status, b.status) << "instance " << i;
        if (!a.solved()) continue;
        kkt += a.status == SolveStatus::KktAnalytic;
        newton += a.status == SolveStatus::NewtonNumeric;
        EXPECT_LT((*a.reference - *b.reference).norm(), 1e-9) << "instance " << i << " " << to_string(a.status);
    }
    EXPECT_GT(kkt, 20);
    EXPECT_GT(newton, 5);
}

TEST(Solve, NamesAreStable) {
    EXPECT_EQ(to_string(SolveStatus::Case1), "case1");
    EXPECT_EQ(to_string(SolveStatus::KktAnalytic), "kkt");
    EXPECT_EQ(to_string(SolveStatus::NewtonNumeric), "newton");
    EXPECT_EQ(to_string(SolveStatus::Failure), "failure");
    EXPECT_EQ(to_string(Fallback::NonlinearCheckFailed), "nonlinear-check-failed");
}

}  // namespace
}  // namespace orsop
