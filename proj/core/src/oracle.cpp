#include "orsop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace orsop::oracle {

namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kUniqueGap = 1e-10;

struct FaceMinimum {
    StateVector point;
    double objective;
    bool dual_feasible;
};

// Minimizer of ||x - xp||^2 on the affine set {x : N x + b = 0}, if consistent.
std::optional<FaceMinimum> face_minimum(const Matrix& n_rows, const Vector& b, const StateVector& xp) {
    if (n_rows.rows() == 0) return FaceMinimum{xp, 0.0, true};
    const Vector rhs = -b - n_rows * xp;
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(n_rows);
    const Vector delta = cod.solve(rhs);
    const StateVector x = xp + delta;
    if ((n_rows * x + b).cwiseAbs().maxCoeff() > kPrimalTol) return std::nullopt;
    // x - xp = -1/2 N' mu
    const Matrix nt = n_rows.transpose();
    const Vector mu = nt.completeOrthogonalDecomposition().solve(-2.0 * delta);
    return FaceMinimum{x, delta.squaredNorm(), mu.minCoeff() >= -kDualTol};
}

template <typename Visit>
void for_each_subset(std::size_t r, std::size_t max_size, Visit&& visit) {
    std::vector<std::size_t> idx;
    visit(idx);
    for (std::size_t k = 1; k <= std::min(r, max_size); ++k) {
        idx.resize(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            visit(idx);
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == r - k + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
}

}  // namespace

OracleResult projection_oracle(const Polytope& region, const StateVector& xp) {
    require_dim(xp.size(), region.dimension(), "projection_oracle xp");
    const Eigen::Index n = xp.size();
    const Matrix& normals = region.normals();
    const Vector& offsets = region.offsets();

    std::vector<FaceMinimum> feasible;
    std::int64_t visited = 0;
    for_each_subset(region.size(), static_cast<std::size_t>(n), [&](const std::vector<std::size_t>& idx) {
        ++visited;
        const auto k = static_cast<Eigen::Index>(idx.size());
        Matrix rows(k, n);
        Vector b(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            rows.row(i) = normals.row(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]));
            b(i) = offsets(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]));
        }
        auto fm = face_minimum(rows, b, xp);
        if (!fm) return;
        if ((normals * fm->point + offsets).maxCoeff() > kPrimalTol) return;
        feasible.push_back(std::move(*fm));
    });
    if (feasible.empty()) throw InputError("projection_oracle: region is empty");

    const FaceMinimum* best = nullptr;
    for (const auto& fm : feasible) {
        if (!fm.dual_feasible) continue;
        if (best == nullptr || fm.objective < best->objective) best = &fm;
    }
    if (best == nullptr) {
        best = &*std::min_element(feasible.begin(), feasible.end(),
                                  [](const auto& a, const auto& b) { return a.objective < b.objective; });
    }

    OracleResult result;
    result.best_point = best->point;
    result.best_objective = best->objective;
    result.samples_used = visited;
    result.feasible_samples = static_cast<std::int64_t>(feasible.size());
    result.certified_unique = std::all_of(feasible.begin(), feasible.end(), [&](const FaceMinimum& fm) {
        return (fm.point - best->point).norm() <= kPrimalTol || fm.objective > best->objective + kUniqueGap;
    });
    return result;
}

namespace {

// Problem data with its own feasibility and objective evaluation; only the
// stored normals and offsets come from the core types.
class Instance {
public:
    explicit Instance(const OrsopProblem& prob)
        : xp_(prob.xp()),
          p_(prob.shape().dense()),
          g_normals_(prob.ref_region().normals()),
          g_offsets_(prob.ref_region().offsets()),
          q_normals_(prob.op_region().normals()),
          q_offsets_(prob.op_region().offsets()) {
        const Eigen::LLT<Matrix> llt(p_);
        const Matrix p_inv = llt.solve(Matrix::Identity(p_.rows(), p_.cols()));
        q_scale_.resize(q_normals_.rows());
        for (Eigen::Index k = 0; k < q_normals_.rows(); ++k) {
            const Vector v = q_normals_.row(k).transpose();
            q_scale_(k) = std::sqrt(v.dot(p_inv * v));
        }
    }

    [[nodiscard]] double objective(const StateVector& c) const {
        const Vector d = xp_ - c;
        return d.dot(p_ * d);
    }

    // Stacked constraint values: reference faces, then ellipsoid support values.
    [[nodiscard]] Vector constraints(const StateVector& c) const {
        Vector h(g_offsets_.size() + q_offsets_.size());
        h.head(g_offsets_.size()) = g_normals_ * c + g_offsets_;
        const double radius = std::sqrt(objective(c));
        h.tail(q_offsets_.size()) = q_normals_ * c + q_offsets_ + radius * q_scale_;
        return h;
    }

    [[nodiscard]] Matrix constraint_jacobian(const StateVector& c) const {
        Matrix j(g_offsets_.size() + q_offsets_.size(), c.size());
        j.topRows(g_offsets_.size()) = g_normals_;
        const double radius = std::sqrt(objective(c));
        const Vector dr = radius > 0.0 ? Vector(-(p_ * (xp_ - c)) / radius) : Vector(Vector::Zero(c.size()));
        for (Eigen::Index k = 0; k < q_offsets_.size(); ++k) {
            j.row(g_offsets_.size() + k) = q_normals_.row(k) + q_scale_(k) * dr.transpose();
        }
        return j;
    }

    [[nodiscard]] Vector objective_gradient(const StateVector& c) const { return -2.0 * (p_ * (xp_ - c)); }

    [[nodiscard]] bool feasible(const StateVector& c) const { return constraints(c).maxCoeff() <= 0.0; }

    // A few cyclic projections onto the violated constraint linearizations.
    [[nodiscard]] StateVector restore(StateVector c) const {
        for (int pass = 0; pass < 4; ++pass) {
            const Vector h = constraints(c);
            if (h.maxCoeff() <= 0.0) break;
            const Matrix j = constraint_jacobian(c);
            for (Eigen::Index i = 0; i < h.size(); ++i) {
                if (h(i) <= 0.0) continue;
                const double g2 = j.row(i).squaredNorm();
                if (g2 <= 0.0) continue;
                const double target = -1e-14 * (1.0 + std::abs(h(i)));
                c -= ((h(i) - target) / g2) * j.row(i).transpose();
            }
        }
        return c;
    }

    [[nodiscard]] Eigen::Index dimension() const { return xp_.size(); }

private:
    StateVector xp_;
    Matrix p_;
    Matrix g_normals_;
    Vector g_offsets_;
    Matrix q_normals_;
    Vector q_offsets_;
    Vector q_scale_;
};

Vector unit(Vector v) {
    const double norm = v.norm();
    return norm > 0.0 ? Vector(v / norm) : v;
}

// Projection of d onto the null space of the rows of j.
Vector tangent(const Matrix& j, const Vector& d) {
    if (j.rows() == 0) return d;
    const Vector coeff = j.transpose().completeOrthogonalDecomposition().solve(d);
    return d - j.transpose() * coeff;
}

struct Polished {
    StateVector point;
    double objective;
};

Polished polish(const Instance& inst, StateVector x, double step, std::mt19937_64& rng) {
    const Eigen::Index n = inst.dimension();
    std::normal_distribution<double> gauss(0.0, 1.0);
    double f = inst.objective(x);
    const double min_step = 1e-13 * (1.0 + step);

    for (int iter = 0; iter < 20'000 && step > min_step; ++iter) {
        std::vector<Vector> dirs;
        for (Eigen::Index i = 0; i < n; ++i) {
            dirs.push_back(Vector::Unit(n, i));
            dirs.push_back(-Vector::Unit(n, i));
        }
        for (Eigen::Index i = 0; i < 2 * n; ++i) {
            Vector r(n);
            for (Eigen::Index k = 0; k < n; ++k) r(k) = gauss(rng);
            dirs.push_back(unit(r));
        }
        const Vector descent = -inst.objective_gradient(x);
        dirs.push_back(unit(descent));

        const Vector h = inst.constraints(x);
        const Matrix jac = inst.constraint_jacobian(x);
        std::vector<Eigen::Index> near;
        for (Eigen::Index i = 0; i < h.size(); ++i) {
            if (h(i) > -2.0 * step * jac.row(i).norm()) near.push_back(i);
        }
        if (!near.empty()) {
            Matrix active(static_cast<Eigen::Index>(near.size()), n);
            for (std::size_t i = 0; i < near.size(); ++i) {
                active.row(static_cast<Eigen::Index>(i)) = jac.row(near[i]);
                dirs.push_back(unit(tangent(jac.row(near[i]), descent)));
            }
            dirs.push_back(unit(tangent(active, descent)));
        }

        StateVector best_x = x;
        double best_f = f;
        for (const auto& d : dirs) {
            if (d.norm() == 0.0) continue;
            StateVector y = x + step * d;
            if (!inst.feasible(y)) y = inst.restore(y);
            if (!inst.feasible(y)) continue;
            const double fy = inst.objective(y);
            if (fy < best_f) {
                best_f = fy;
                best_x = y;
            }
        }
        if (best_f < f) {
            x = best_x;
            f = best_f;
            step *= 2.0;
        } else {
            step *= 0.5;
        }
    }
    return {x, f};
}

}  // namespace

OracleResult sampling_oracle(const OrsopProblem& prob, std::int64_t budget, std::uint64_t seed) {
    if (budget < kMinSamplingBudget) throw InputError("sampling_oracle: budget below 10^4");
    const Instance inst(prob);
    const Eigen::Index n = prob.dimension();

    std::vector<HalfSpace> faces(prob.ref_region().begin(), prob.ref_region().end());
    faces.insert(faces.end(), prob.op_region().begin(), prob.op_region().end());
    const auto box = bounding_box(Polytope(std::move(faces), RegionKind::ReferenceFeasible));
    if (!box) {
        // op_region is bounded, so only an empty intersection gets here.
        OracleResult empty;
        empty.best_objective = std::numeric_limits<double>::infinity();
        return empty;
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    const Vector width = box->upper - box->lower;

    constexpr std::size_t kKeep = 8;
    std::vector<Polished> top;
    OracleResult result;
    result.samples_used = budget;
    StateVector c(n);
    for (std::int64_t s = 0; s < budget; ++s) {
        for (Eigen::Index i = 0; i < n; ++i) c(i) = box->lower(i) + unit01(rng) * width(i);
        if (!inst.feasible(c)) continue;
        ++result.feasible_samples;
        const double f = inst.objective(c);
        if (top.size() < kKeep || f < top.back().objective) {
            if (top.size() == kKeep) top.pop_back();
            const auto pos = std::upper_bound(top.begin(), top.end(), f,
                                              [](double v, const Polished& p) { return v < p.objective; });
            top.insert(pos, Polished{c, f});
        }
    }
    if (top.empty()) {
        result.best_objective = std::numeric_limits<double>::infinity();
        return result;
    }

    const double step0 = 0.05 * width.maxCoeff();
    Polished best{top.front().point, top.front().objective};
    for (const auto& start : top) {
        const auto p = polish(inst, start.point, step0, rng);
        if (p.objective < best.objective) best = p;
    }
    result.best_point = best.point;
    result.best_objective = best.objective;
    return result;
}

}  // namespace orsop::oracle
