#include "orsop/kkt.hpp"

#include "orsop/cost.hpp"

#include <algorithm>
#include <cmath>

namespace orsop::kkt {

namespace {

void check_region(const Polytope& region, const StateVector& xp) {
    if (region.kind() != RegionKind::ReferenceFeasible) {
        throw InputError("kkt: region must be a reference-feasible polytope");
    }
    require_dim(xp.size(), region.dimension(), "kkt xp");
}

// Advances `idx` to the next l-combination of {0..r-1} in lexicographic order.
bool next_combination(std::vector<std::size_t>& idx, std::size_t r) {
    const std::size_t l = idx.size();
    for (std::size_t pos = l; pos-- > 0;) {
        if (idx[pos] < r - l + pos) {
            ++idx[pos];
            for (std::size_t k = pos + 1; k < l; ++k) idx[k] = idx[k - 1] + 1;
            return true;
        }
    }
    return false;
}

// Cholesky of a small SPD matrix with the exact 1-norm condition number
// ||W||_1 ||W^-1||_1, computed from the explicit inverse.
class SmallSpd {
public:
    // w is l x l, row-major, l <= kMaxConstraints.
    bool factor(std::size_t l, const double* w) {
        l_ = l;
        double norm = 0.0;
        for (std::size_t c = 0; c < l; ++c) {
            double col = 0.0;
            for (std::size_t r = 0; r < l; ++r) col += std::abs(w[r * l + c]);
            norm = std::max(norm, col);
        }
        for (std::size_t j = 0; j < l; ++j) {
            double diag = w[j * l + j];
            for (std::size_t k = 0; k < j; ++k) diag -= chol_[j][k] * chol_[j][k];
            if (!(diag > 0.0)) return false;
            chol_[j][j] = std::sqrt(diag);
            for (std::size_t i = j + 1; i < l; ++i) {
                double v = w[i * l + j];
                for (std::size_t k = 0; k < j; ++k) v -= chol_[i][k] * chol_[j][k];
                chol_[i][j] = v / chol_[j][j];
            }
        }
        double inv_norm = 0.0;
        for (std::size_t c = 0; c < l; ++c) {
            double e[kMaxConstraints] = {};
            e[c] = 1.0;
            solve_in_place(e);
            double col = 0.0;
            for (std::size_t r = 0; r < l; ++r) {
                inv_[r][c] = e[r];
                col += std::abs(e[r]);
            }
            inv_norm = std::max(inv_norm, col);
        }
        condition_ = norm * inv_norm;
        return std::isfinite(condition_);
    }

    [[nodiscard]] double condition() const { return condition_; }

    // out = W^-1 b
    void apply_inverse(const double* b, double* out) const {
        for (std::size_t r = 0; r < l_; ++r) {
            double v = 0.0;
            for (std::size_t c = 0; c < l_; ++c) v += inv_[r][c] * b[c];
            out[r] = v;
        }
    }

private:
    void solve_in_place(double* x) const {
        for (std::size_t i = 0; i < l_; ++i) {
            for (std::size_t k = 0; k < i; ++k) x[i] -= chol_[i][k] * x[k];
            x[i] /= chol_[i][i];
        }
        for (std::size_t i = l_; i-- > 0;) {
            for (std::size_t k = i + 1; k < l_; ++k) x[i] -= chol_[k][i] * x[k];
            x[i] /= chol_[i][i];
        }
    }

    std::size_t l_{0};
    double chol_[kMaxConstraints][kMaxConstraints]{};
    double inv_[kMaxConstraints][kMaxConstraints]{};
    double condition_{0.0};
};

}  // namespace

std::optional<KktCandidate> candidate_for(const ActiveSet& active, const Polytope& region,
                                          const StateVector& xp) {
    check_region(region, xp);
    const auto l = static_cast<Eigen::Index>(active.size());
    const Eigen::Index n = region.dimension();
    if (l == 0) throw InputError("kkt: empty active set");
    for (std::size_t k = 0; k < active.size(); ++k) {
        if (active.indices[k] >= region.size()) throw InputError("kkt: active index out of range");
        if (k > 0 && active.indices[k] <= active.indices[k - 1]) {
            throw InputError("kkt: active set must be sorted and distinct");
        }
    }

    Matrix omega(l, n);
    Vector d(l);
    for (Eigen::Index i = 0; i < l; ++i) {
        const HalfSpace& h = region[active.indices[static_cast<std::size_t>(i)]];
        omega.row(i) = h.normal().transpose();
        d(i) = h.normal().dot(xp) + h.offset();
    }
    const Matrix w = omega * omega.transpose();
    cost::charge(cost::matvec(l, n) + static_cast<std::uint64_t>(2 * l * l * n));

    if (active.size() > kMaxConstraints) return std::nullopt;
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w_rows = w;
    SmallSpd spd;
    cost::charge(cost::cholesky(l));
    if (!spd.factor(active.size(), w_rows.data()) || spd.condition() > kSingularCondition) return std::nullopt;

    KktCandidate c;
    c.active_set = active;
    c.multipliers.resize(l);
    spd.apply_inverse(d.data(), c.multipliers.data());
    c.multipliers *= 2.0;
    c.point = xp - 0.5 * omega.transpose() * c.multipliers;
    c.objective = (c.point - xp).squaredNorm();
    c.dual_feasible = (c.multipliers.array() >= -kEqualityTol).all();
    cost::charge(static_cast<std::uint64_t>(2 * l * l) + cost::matvec(n, l) + cost::dot(n));
    return c;
}

std::vector<KktCandidate> enumerate_candidates(const Polytope& region, const StateVector& xp,
                                               double tol) {
    check_region(region, xp);
    const std::size_t r = region.size();
    if (r > kMaxConstraints) {
        throw BudgetError("kkt: " + std::to_string(r) + " constraints exceed the enumeration budget of " +
                          std::to_string(kMaxConstraints));
    }
    if (contains(region, xp, 0.0).feasible) throw InputError("kkt: xp already lies in the region");

    const Eigen::Index n = region.dimension();
    const auto rr = static_cast<Eigen::Index>(r);
    // With W = N N' and d = N xp + b precomputed, an active set S gives
    //   mu = 2 W_SS^{-1} d_S   and   g(point) = d - 1/2 W_{:,S} mu.
    const Matrix gram = region.normals() * region.normals().transpose();
    const Vector d_all = region.values(xp);
    cost::charge(static_cast<std::uint64_t>(2 * rr * rr * n));

    std::vector<KktCandidate> survivors;
    SmallSpd spd;
    double w[kMaxConstraints * kMaxConstraints];
    double d[kMaxConstraints];
    double mu[kMaxConstraints];
    Vector g(rr);
    for (std::size_t l = 1; l <= r; ++l) {
        const auto ll = static_cast<Eigen::Index>(l);
        std::vector<std::size_t> idx(l);
        for (std::size_t k = 0; k < l; ++k) idx[k] = k;
        do {
            for (std::size_t i = 0; i < l; ++i) {
                const auto ii = static_cast<Eigen::Index>(idx[i]);
                d[i] = d_all(ii);
                for (std::size_t j = 0; j < l; ++j) w[i * l + j] = gram(ii, static_cast<Eigen::Index>(idx[j]));
            }
            cost::charge(cost::cholesky(ll) + static_cast<std::uint64_t>(2 * ll * ll * ll + 2 * rr * ll));
            if (!spd.factor(l, w) || spd.condition() > kSingularCondition) continue;
            spd.apply_inverse(d, mu);
            for (std::size_t i = 0; i < l; ++i) mu[i] *= 2.0;

            g = d_all;
            for (std::size_t i = 0; i < l; ++i) g -= (0.5 * mu[i]) * gram.col(static_cast<Eigen::Index>(idx[i]));
            bool survives = true;
            std::size_t next_active = 0;
            for (std::size_t j = 0; j < r && survives; ++j) {
                const double gj = g(static_cast<Eigen::Index>(j));
                if (next_active < l && idx[next_active] == j) {
                    ++next_active;
                    survives = std::abs(gj) <= tol;
                } else {
                    survives = gj < -tol;
                }
            }
            if (!survives) continue;

            KktCandidate cand;
            cand.active_set.indices = idx;
            cand.multipliers = Eigen::Map<const Vector>(mu, ll);
            cand.point = xp;
            for (std::size_t i = 0; i < l; ++i) {
                cand.point -= (0.5 * mu[i]) * region.normals().row(static_cast<Eigen::Index>(idx[i])).transpose();
            }
            cand.objective = (cand.point - xp).squaredNorm();
            cand.dual_feasible = (cand.multipliers.array() >= -kEqualityTol).all();
            cost::charge(cost::matvec(n, ll) + cost::dot(n));
            survivors.push_back(std::move(cand));
        } while (next_combination(idx, r));
        // A projection in R^n has at most n independent active constraints.
        if (ll >= n && !survivors.empty()) break;
    }
    return survivors;
}

std::optional<KktCandidate> solve_problem2(const Polytope& region, const StateVector& xp, double tol) {
    auto survivors = enumerate_candidates(region, xp, tol);
    if (survivors.empty()) return std::nullopt;
    auto best = survivors.begin();
    for (auto it = std::next(survivors.begin()); it != survivors.end(); ++it) {
        const double scale = 1e-12 * (1.0 + best->objective);
        if (it->objective < best->objective - scale ||
            (std::abs(it->objective - best->objective) <= scale && it->active_set < best->active_set)) {
            best = it;
        }
    }
    return std::move(*best);
}

}  // namespace orsop::kkt
