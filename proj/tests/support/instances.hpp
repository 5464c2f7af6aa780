#pragma once

#include "orsop/geometry.hpp"
#include "orsop/lyapunov.hpp"
#include "orsop/solver.hpp"

#include <initializer_list>
#include <random>
#include <vector>

// Seeded random instances shared by the unit and acceptance suites.
namespace orsop::testing {

using Rng = std::mt19937_64;

Vector gaussian(Rng& rng, Eigen::Index n);
Vector unit_vector(Rng& rng, Eigen::Index n);
double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);  // inclusive

/// U diag(lambda) U' with log-uniform eigenvalues spanning at most max_cond.
SpdMatrix random_spd(Rng& rng, Eigen::Index n, double max_cond = 100.0);

/// Random matrix shifted so its spectral abscissa is in [-2, -0.1].
Matrix random_hurwitz(Rng& rng, Eigen::Index n);

/// Halfspaces from rows {normal..., offset}; normals need not be unit.
Polytope polytope(std::initializer_list<std::initializer_list<double>> rows, RegionKind kind);

/// Axis box lower <= x <= upper.
Polytope box(const Vector& lower, const Vector& upper, RegionKind kind);

/// The unit box [0,1]^2 as a reference region.
Polytope unit_box();

/// r random faces at distance scale * U(0.5, 2) from `center`, resampled until
/// the region is bounded. Requires r >= n + 1.
Polytope random_bounded_polytope(Rng& rng, const Vector& center, int r, RegionKind kind,
                                 double scale = 1.0);

/// center + radius * U(0.5, 3) * (random unit direction), resampled until it
/// lies strictly outside `region`.
Vector random_exterior_point(Rng& rng, const Polytope& region, const Vector& center, double radius);

/// Sphere-case (P = I) instance with xp outside the reference region and inside
/// a box-plus-oblique operational region. Mix of KKT, Newton and infeasible cases.
OrsopProblem random_sphere_problem(Rng& rng, Eigen::Index n);

/// Relative error ||a - b|| / max(||b||, floor).
double relative_error(const Matrix& a, const Matrix& b, double floor = 1e-8);

}  // namespace orsop::testing
