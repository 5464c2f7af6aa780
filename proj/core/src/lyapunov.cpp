#include "orsop/lyapunov.hpp"

#include "orsop/cost.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace orsop {

double spectral_abscissa(const Matrix& m) {
    Eigen::EigenSolver<Matrix> es(m, false);
    cost::charge(cost::gen_eig(m.rows()));
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
    return es.eigenvalues().real().maxCoeff();
}

PlantModel::PlantModel(Matrix a, Matrix b, Matrix k)
    : a_(std::move(a)), b_(std::move(b)), k_(std::move(k)) {
    const Eigen::Index n = a_.rows();
    if (n < 1 || a_.cols() != n) throw InputError("plant: A must be square and non-empty");
    require_dim(b_.rows(), n, "plant B rows");
    if (b_.cols() < 1) throw InputError("plant: B needs at least one column");
    require_dim(k_.rows(), b_.cols(), "plant K rows");
    require_dim(k_.cols(), n, "plant K cols");
    if (!a_.allFinite() || !b_.allFinite() || !k_.allFinite()) {
        throw InputError("plant: non-finite entries");
    }
    a_cl_ = a_ - b_ * k_;
    if (spectral_abscissa(a_cl_) >= 0.0) throw StabilityError("plant: A - B K is not Hurwitz");
}

SpdMatrix::SpdMatrix(const Matrix& p) {
    if (p.rows() < 1 || p.rows() != p.cols()) throw InputError("spd: matrix must be square");
    if (!p.allFinite()) throw InputError("spd: non-finite entries");
    dense_ = 0.5 * (p + p.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(dense_);
    cost::charge(cost::sym_eig(p.rows()));
    if (es.info() != Eigen::Success) throw NumericalError("spd: eigendecomposition failed");

    const Eigen::Index n = dense_.rows();
    // Descending eigenvalues; the stable sort keeps Eigen's order among ties, so
    // a diagonal P yields U = I. Each column's largest entry is made positive.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return es.eigenvalues()(a) > es.eigenvalues()(b);
    });
    lambda_.resize(n);
    u_.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        lambda_(k) = es.eigenvalues()(src);
        u_.col(k) = es.eigenvectors().col(src);
        Eigen::Index top = 0;
        u_.col(k).cwiseAbs().maxCoeff(&top);
        if (u_(top, k) < 0.0) u_.col(k) *= -1.0;
    }
    if (!(lambda_(n - 1) > 0.0) || lambda_(n - 1) <= 1e-14 * lambda_(0)) {
        throw InputError("spd: matrix is not positive definite");
    }
}

double SpdMatrix::inverse_quadratic(const Vector& v) const {
    require_dim(v.size(), dimension(), "inverse_quadratic");
    cost::charge(cost::matvec(dimension(), dimension()) + 3 * static_cast<std::uint64_t>(dimension()));
    const Vector w = u_.transpose() * v;
    return (w.array().square() / lambda_.array()).sum();
}

bool SpdMatrix::is_spherical(double rel_tol) const {
    return lambda_(0) / lambda_(lambda_.size() - 1) <= 1.0 + rel_tol;
}

Ellipsoid::Ellipsoid(StateVector center, SpdMatrix shape, double level)
    : center_(std::move(center)), shape_(std::move(shape)), level_(level) {
    require_dim(center_.size(), shape_.dimension(), "ellipsoid center");
    if (!(level_ >= 0.0) || !std::isfinite(level_)) throw InputError("ellipsoid: level must be >= 0");
}

SpdMatrix solve_lyapunov(const Matrix& a_cl, const SpdMatrix& q) {
    const Eigen::Index n = a_cl.rows();
    if (a_cl.cols() != n) throw InputError("lyapunov: A_cl must be square");
    require_dim(q.dimension(), n, "lyapunov Q");
    if (n > 30) throw InputError("lyapunov: dense Kronecker solver is limited to n <= 30");
    if (spectral_abscissa(a_cl) >= 0.0) throw StabilityError("lyapunov: A_cl is not Hurwitz");

    const Eigen::Index nn = n * n;
    const Matrix at = a_cl.transpose();
    Matrix kron = Matrix::Zero(nn, nn);
    // I (x) A' : block-diagonal copies of A'.
    for (Eigen::Index b = 0; b < n; ++b) kron.block(b * n, b * n, n, n) = at;
    // A' (x) I : block (i, j) is A'(i, j) * I.
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            kron.block(i * n, j * n, n, n).diagonal().array() += at(i, j);
        }
    }
    const Vector rhs = -Eigen::Map<const Vector>(q.dense().data(), nn);

    Eigen::PartialPivLU<Matrix> lu(kron);
    cost::charge(cost::lu(nn) + 2 * cost::matvec(nn, nn));
    Vector vec_p = lu.solve(rhs);
    // One step of iterative refinement.
    vec_p += lu.solve(rhs - kron * vec_p);
    if (!vec_p.allFinite()) throw NumericalError("lyapunov: singular Kronecker system");

    const Matrix p = Eigen::Map<const Matrix>(vec_p.data(), n, n);
    try {
        return SpdMatrix(p);
    } catch (const InputError&) {
        throw NumericalError("lyapunov: solution is not positive definite");
    }
}

double lyap_value(const StateVector& center, const SpdMatrix& shape, const StateVector& x) {
    require_dim(x.size(), center.size(), "lyap_value");
    const Vector d = x - center;
    cost::charge(cost::matvec(d.size(), d.size()) + cost::dot(d.size()));
    return std::max(0.0, d.dot(shape.dense() * d));
}

double lyap_value(const Ellipsoid& e, const StateVector& x) {
    return lyap_value(e.center(), e.shape(), x);
}

Ellipsoid ellipsoid_through(const StateVector& center, const SpdMatrix& shape,
                            const StateVector& boundary_point) {
    return {center, shape, lyap_value(center, shape, boundary_point)};
}

double unit_ball_volume(Eigen::Index n) {
    const double half = 0.5 * static_cast<double>(n);
    return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double ellipsoid_volume(const Ellipsoid& e) {
    const Eigen::Index n = e.shape().dimension();
    if (e.level() == 0.0) return 0.0;
    return unit_ball_volume(n) * std::pow(e.level(), 0.5 * static_cast<double>(n)) /
           std::sqrt(e.shape().determinant());
}

Vector support_values(const Ellipsoid& e, const Polytope& region) {
    require_dim(region.dimension(), e.shape().dimension(), "support region");
    Vector out = region.values(e.center());
    for (std::size_t k = 0; k < region.size(); ++k) {
        const double spread = e.level() * e.shape().inverse_quadratic(region[k].normal());
        out(static_cast<Eigen::Index>(k)) += std::sqrt(std::max(0.0, spread));
    }
    return out;
}

FeasibilityReport ellipsoid_in_region(const Ellipsoid& e, const Polytope& region, double tol) {
    const Vector support = support_values(e, region);
    Eigen::Index worst = 0;
    FeasibilityReport report;
    report.worst_violation = support.maxCoeff(&worst);
    report.precondition_met = contains(region, e.center(), tol).feasible;
    report.feasible = report.precondition_met && report.worst_violation <= tol;
    if (!report.feasible) report.violating_index = static_cast<std::size_t>(worst);
    return report;
}

}  // namespace orsop
