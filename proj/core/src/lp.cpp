#include "orsop/lp.hpp"

#include "orsop/cost.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace orsop::lp {

namespace {

constexpr double kPivotEps = 1e-11;

struct Tableau {
    Matrix t;                  // (m + 1) x (cols + 1); last column is the rhs, last row the reduced costs
    std::vector<Eigen::Index> basis;
    Eigen::Index cols{0};

    [[nodiscard]] Eigen::Index rows() const { return t.rows() - 1; }
    [[nodiscard]] double rhs(Eigen::Index i) const { return t(i, cols); }

    void pivot(Eigen::Index row, Eigen::Index col) {
        t.row(row) /= t(row, col);
        for (Eigen::Index i = 0; i < t.rows(); ++i) {
            if (i != row && t(i, col) != 0.0) {
                t.row(i) -= t(i, col) * t.row(row);
            }
        }
        basis[static_cast<std::size_t>(row)] = col;
        cost::charge(static_cast<std::uint64_t>(2 * t.rows() * (cols + 1)));
    }

    // Reduced-cost row for the objective cost'z under the current basis.
    void price(const Vector& cost) {
        const Eigen::Index m = rows();
        auto z = t.row(m);
        z.setZero();
        z.head(cols) = cost.transpose();
        for (Eigen::Index i = 0; i < m; ++i) {
            const double cb = cost(basis[static_cast<std::size_t>(i)]);
            if (cb != 0.0) z -= cb * t.row(i);
        }
        cost::charge(static_cast<std::uint64_t>(2 * m * (cols + 1)));
    }
};

enum class Outcome { Optimal, Unbounded, Stalled };

// Maximizes cost'z over the current tableau. Columns with allowed[j] == false
// never enter the basis. Dantzig pricing; Bland's rule after a run of
// degenerate pivots, which rules out cycling.
Outcome run(Tableau& tab, const Vector& cost, const std::vector<bool>& allowed) {
    const Eigen::Index m = tab.rows();
    const Eigen::Index max_iter = 50 * (m + tab.cols) + 100;
    constexpr int kDegenerateLimit = 20;
    tab.price(cost);
    int degenerate = 0;
    for (Eigen::Index iter = 0; iter < max_iter; ++iter) {
        const bool bland = degenerate >= kDegenerateLimit;
        Eigen::Index entering = -1;
        double best_reduced = 1e-10;
        for (Eigen::Index j = 0; j < tab.cols; ++j) {
            if (!allowed[static_cast<std::size_t>(j)]) continue;
            const double reduced = tab.t(m, j);
            if (reduced > best_reduced) {
                entering = j;
                if (bland) break;
                best_reduced = reduced;
            }
        }
        if (entering < 0) return Outcome::Optimal;

        Eigen::Index leaving = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i) {
            const double a = tab.t(i, entering);
            if (a <= kPivotEps) continue;
            const double ratio = tab.rhs(i) / a;
            if (ratio < best_ratio - 1e-13 ||
                (std::abs(ratio - best_ratio) <= 1e-13 &&
                 tab.basis[static_cast<std::size_t>(i)] <
                     tab.basis[static_cast<std::size_t>(leaving)])) {
                best_ratio = ratio;
                leaving = i;
            }
        }
        if (leaving < 0) return Outcome::Unbounded;
        degenerate = best_ratio <= 1e-13 ? degenerate + 1 : 0;
        tab.pivot(leaving, entering);
    }
    return Outcome::Stalled;
}

}  // namespace

Result maximize(const Vector& c, const Matrix& a, const Vector& b) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    require_dim(c.size(), n, "lp objective");
    require_dim(b.size(), m, "lp rhs");

    // Columns: x+ (n), x- (n), slack (m), artificial (one per negative rhs row).
    std::vector<Eigen::Index> art_rows;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (b(i) < 0.0) art_rows.push_back(i);
    }
    const Eigen::Index n_art = static_cast<Eigen::Index>(art_rows.size());
    const Eigen::Index first_slack = 2 * n;
    const Eigen::Index first_art = 2 * n + m;

    Tableau tab;
    tab.cols = first_art + n_art;
    tab.t = Matrix::Zero(m + 1, tab.cols + 1);
    tab.basis.assign(static_cast<std::size_t>(m), 0);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sign = b(i) < 0.0 ? -1.0 : 1.0;
        tab.t.block(i, 0, 1, n) = sign * a.row(i);
        tab.t.block(i, n, 1, n) = -sign * a.row(i);
        tab.t(i, first_slack + i) = sign;
        tab.t(i, tab.cols) = sign * b(i);
        tab.basis[static_cast<std::size_t>(i)] = first_slack + i;
    }
    for (Eigen::Index k = 0; k < n_art; ++k) {
        const Eigen::Index row = art_rows[static_cast<std::size_t>(k)];
        tab.t(row, first_art + k) = 1.0;
        tab.basis[static_cast<std::size_t>(row)] = first_art + k;
    }

    std::vector<bool> allowed(static_cast<std::size_t>(tab.cols), true);
    Result result;

    if (n_art > 0) {
        Vector phase1 = Vector::Zero(tab.cols);
        phase1.tail(n_art).setConstant(-1.0);
        if (run(tab, phase1, allowed) != Outcome::Optimal) {
            result.status = Status::Infeasible;
            return result;
        }
        double infeasibility = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (tab.basis[static_cast<std::size_t>(i)] >= first_art) infeasibility += tab.rhs(i);
        }
        const double scale = 1.0 + b.cwiseAbs().maxCoeff();
        if (infeasibility > 1e-9 * scale) {
            result.status = Status::Infeasible;
            return result;
        }
        // Drive zero-level artificials out of the basis where possible.
        for (Eigen::Index i = 0; i < m; ++i) {
            if (tab.basis[static_cast<std::size_t>(i)] < first_art) continue;
            for (Eigen::Index j = 0; j < first_art; ++j) {
                if (std::abs(tab.t(i, j)) > 1e-9) {
                    tab.pivot(i, j);
                    break;
                }
            }
        }
        for (Eigen::Index k = 0; k < n_art; ++k) allowed[static_cast<std::size_t>(first_art + k)] = false;
    }

    Vector phase2 = Vector::Zero(tab.cols);
    phase2.head(n) = c;
    phase2.segment(n, n) = -c;
    const Outcome outcome = run(tab, phase2, allowed);
    if (outcome == Outcome::Unbounded) {
        result.status = Status::Unbounded;
        return result;
    }
    if (outcome == Outcome::Stalled) {
        throw NumericalError("lp: simplex iteration limit reached");
    }

    Vector z = Vector::Zero(tab.cols);
    for (Eigen::Index i = 0; i < m; ++i) z(tab.basis[static_cast<std::size_t>(i)]) = tab.rhs(i);
    result.status = Status::Optimal;
    result.x = z.head(n) - z.segment(n, n);
    result.value = c.dot(result.x);
    return result;
}

Result maximize_from(const Vector& c, const Matrix& a, const Vector& b, const Vector& x0) {
    require_dim(x0.size(), a.cols(), "lp start");
    require_dim(b.size(), a.rows(), "lp rhs");
    Vector shifted = b - a * x0;
    cost::charge(cost::matvec(a.rows(), a.cols()));
    // Violations at rounding level are clamped; anything larger is an error.
    const double tol = 1e-12 * (1.0 + b.cwiseAbs().maxCoeff() + (a * x0).cwiseAbs().maxCoeff());
    if (shifted.size() > 0 && shifted.minCoeff() < -tol) throw InputError("lp: start point is infeasible");
    shifted = shifted.cwiseMax(0.0);
    Result result = maximize(c, a, shifted);
    if (result.status == Status::Optimal) {
        result.x += x0;
        result.value = c.dot(result.x);
    }
    return result;
}

}  // namespace orsop::lp
