#pragma once

#include "orsop/geometry.hpp"
#include "orsop/types.hpp"

namespace orsop {

/// Linear plant  x' = A (x - x_ref) + B u  under state feedback  u = -K (x - x_ref).
///
/// The closed loop A - B K must be Hurwitz; the constructor checks this.
class PlantModel {
public:
    PlantModel(Matrix a, Matrix b, Matrix k);

    [[nodiscard]] const Matrix& a() const noexcept { return a_; }
    [[nodiscard]] const Matrix& b() const noexcept { return b_; }
    [[nodiscard]] const Matrix& k() const noexcept { return k_; }
    [[nodiscard]] const Matrix& closed_loop() const noexcept { return a_cl_; }
    [[nodiscard]] Eigen::Index states() const noexcept { return a_.rows(); }
    [[nodiscard]] Eigen::Index inputs() const noexcept { return b_.cols(); }

    /// Same plant, different gain. Throws StabilityError if the new loop is not Hurwitz.
    [[nodiscard]] PlantModel with_gain(Matrix k) const { return {a_, b_, std::move(k)}; }

private:
    Matrix a_, b_, k_, a_cl_;
};

/// Largest real part among the eigenvalues of m.
double spectral_abscissa(const Matrix& m);

/// Symmetric positive-definite matrix with its eigen-factorization P = U diag(lambda) U'.
///
/// The input is symmetrized on construction. lambda is sorted in descending
/// order and the columns of U follow it.
class SpdMatrix {
public:
    explicit SpdMatrix(const Matrix& p);

    static SpdMatrix identity(Eigen::Index n) { return SpdMatrix(Matrix::Identity(n, n)); }

    [[nodiscard]] const Matrix& dense() const noexcept { return dense_; }
    [[nodiscard]] const Matrix& svd_u() const noexcept { return u_; }
    [[nodiscard]] const Vector& svd_lambda() const noexcept { return lambda_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return dense_.rows(); }

    [[nodiscard]] double determinant() const { return lambda_.prod(); }
    /// v' P^{-1} v through the cached factors.
    [[nodiscard]] double inverse_quadratic(const Vector& v) const;
    /// True when lambda_max / lambda_min <= 1 + rel_tol, i.e. P is a multiple of I.
    [[nodiscard]] bool is_spherical(double rel_tol = 1e-9) const;

private:
    Matrix dense_;
    Matrix u_;
    Vector lambda_;
};

/// Sublevel set {xi : (xi - center)' P (xi - center) <= level}.
class Ellipsoid {
public:
    Ellipsoid(StateVector center, SpdMatrix shape, double level);

    [[nodiscard]] const StateVector& center() const noexcept { return center_; }
    [[nodiscard]] const SpdMatrix& shape() const noexcept { return shape_; }
    [[nodiscard]] double level() const noexcept { return level_; }

private:
    StateVector center_;
    SpdMatrix shape_;
    double level_;
};

/// Solves A_cl' P + P A_cl = -Q by Kronecker vectorization,
///   (I (x) A_cl' + A_cl' (x) I) vec(P) = -vec(Q).
/// That is an n^2 x n^2 dense LU, O(n^6) work; n is capped at 30.
SpdMatrix solve_lyapunov(const Matrix& a_cl, const SpdMatrix& q);

/// V(x) = (x - center)' P (x - center).
double lyap_value(const Ellipsoid& e, const StateVector& x);
double lyap_value(const StateVector& center, const SpdMatrix& shape, const StateVector& x);

/// Ellipsoid centered at `center` whose surface passes through `boundary_point`.
Ellipsoid ellipsoid_through(const StateVector& center, const SpdMatrix& shape,
                            const StateVector& boundary_point);

/// Volume of the unit n-ball.
double unit_ball_volume(Eigen::Index n);

/// V_n * level^{n/2} / sqrt(det P).
double ellipsoid_volume(const Ellipsoid& e);

/// max over the ellipsoid of (nu . xi + beta) for every face:
///   nu . center + beta + sqrt(level * nu' P^{-1} nu).
Vector support_values(const Ellipsoid& e, const Polytope& region);

/// Ellipsoid-in-polytope test through the exact support function. worst_violation
/// is the largest support value (negative means clearance). If the center itself
/// lies outside the region the report is infeasible with precondition_met = false.
FeasibilityReport ellipsoid_in_region(const Ellipsoid& e, const Polytope& region,
                                      double tol = kFeasibilityTol);

}  // namespace orsop
