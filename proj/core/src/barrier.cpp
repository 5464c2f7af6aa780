#include "orsop/barrier.hpp"

#include "orsop/cost.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace orsop::barrier {

namespace {

std::uint64_t eval_cost(const BarrierProblem& p) {
    const auto n = p.dimension();
    return cost::matvec(p.g_normals().rows() + p.q_normals().rows(), n) +
           (p.has_metric() ? cost::matvec(n, n) : 0) + 6 * static_cast<std::uint64_t>(n);
}

}  // namespace

BarrierProblem::BarrierProblem(StateVector xp, Matrix g_normals, Vector g_offsets, Matrix q_normals,
                               Vector q_offsets, double lambda, std::optional<Matrix> metric)
    : xp_(std::move(xp)),
      g_normals_(std::move(g_normals)),
      g_offsets_(std::move(g_offsets)),
      q_normals_(std::move(q_normals)),
      q_offsets_(std::move(q_offsets)),
      lambda_(lambda) {
    const Eigen::Index n = xp_.size();
    if (n < 1) throw InputError("barrier: empty state");
    if (!(lambda_ > 0.0)) throw InputError("barrier: lambda must be positive");
    if (g_normals_.rows() > 0) require_dim(g_normals_.cols(), n, "barrier g normals");
    if (q_normals_.rows() > 0) require_dim(q_normals_.cols(), n, "barrier q normals");
    require_dim(g_offsets_.size(), g_normals_.rows(), "barrier g offsets");
    require_dim(q_offsets_.size(), q_normals_.rows(), "barrier q offsets");
    g_normals_.conservativeResize(g_normals_.rows(), n);
    q_normals_.conservativeResize(q_normals_.rows(), n);

    if (metric) {
        if (metric->rows() != n || metric->cols() != n) throw InputError("barrier: metric must be n x n");
        if (std::abs(metric->determinant()) <= 0.0) throw InputError("barrier: singular metric");
        has_metric_ = true;
        gram_ = metric->transpose() * *metric;
    } else {
        gram_ = Matrix::Identity(n, n);
    }
    objective_gram_ = Matrix::Identity(n, n);
}

BarrierProblem::BarrierProblem(StateVector xp, const Polytope& ref_region, const Polytope& op_region,
                               double lambda, std::optional<Matrix> metric)
    : BarrierProblem(std::move(xp), ref_region.normals(), ref_region.offsets(), op_region.normals(),
                     op_region.offsets(), lambda, std::move(metric)) {}

BarrierProblem& BarrierProblem::metric_on_objective(bool on) {
    objective_gram_ = on ? gram_ : Matrix::Identity(dimension(), dimension());
    return *this;
}

double BarrierProblem::objective(const StateVector& x) const {
    const Vector d = x - xp_;
    return d.dot(objective_gram_ * d);
}

Vector BarrierProblem::g_values(const StateVector& x) const {
    require_dim(x.size(), dimension(), "barrier point");
    return g_normals_ * x + g_offsets_;
}

Vector BarrierProblem::q_values(const StateVector& x) const {
    require_dim(x.size(), dimension(), "barrier point");
    const Vector d = x - xp_;
    const double radius2 = d.dot(gram_ * d);
    const Vector s = q_normals_ * x + q_offsets_;
    return radius2 - s.array().square();
}

bool BarrierProblem::strictly_feasible(const StateVector& x) const {
    cost::charge(eval_cost(*this));
    if (!x.allFinite()) return false;
    if (g_normals_.rows() > 0 && !(g_values(x).array() < 0.0).all()) return false;
    if (q_normals_.rows() > 0) {
        const Vector side = q_normals_ * x + q_offsets_;
        if (!(side.array() < 0.0).all()) return false;
        if (!(q_values(x).array() < 0.0).all()) return false;
    }
    return true;
}

namespace {

// Constraint values at one point, shared by the value, gradient and Hessian.
struct Terms {
    Vector d;       // x - xp
    Vector g;       // reference-face values
    Vector side;    // v_k . x + c_k
    Vector q;       // operational-face values
    Vector radial;  // 2 M'M (x - xp)
};

std::optional<Terms> terms_if_feasible(const BarrierProblem& p, const StateVector& x) {
    cost::charge(eval_cost(p));
    if (x.size() != p.dimension() || !x.allFinite()) return std::nullopt;
    Terms t;
    t.d = x - p.xp();
    t.g = p.g_normals() * x + p.g_offsets();
    if ((t.g.array() >= 0.0).any()) return std::nullopt;
    t.side = p.q_normals() * x + p.q_offsets();
    if ((t.side.array() >= 0.0).any()) return std::nullopt;
    t.radial = 2.0 * (p.gram() * t.d);
    const double radius2 = 0.5 * t.d.dot(t.radial);
    t.q = radius2 - t.side.array().square();
    if ((t.q.array() >= 0.0).any()) return std::nullopt;
    return t;
}

Terms require_terms(const BarrierProblem& p, const StateVector& x) {
    require_dim(x.size(), p.dimension(), "barrier point");
    auto t = terms_if_feasible(p, x);
    if (!t) throw DomainError("barrier: point is not strictly feasible");
    return std::move(*t);
}

double value_from(const BarrierProblem& p, const Terms& t) {
    cost::charge(20 * static_cast<std::uint64_t>(t.g.size() + t.q.size()));
    const double inv_lambda = 1.0 / p.lambda();
    double value = t.d.dot(p.objective_gram() * t.d);
    if (t.g.size() > 0) value -= inv_lambda * (-t.g).array().log().sum();
    if (t.q.size() > 0) value -= inv_lambda * (-t.q).array().log().sum();
    return value;
}

Vector gradient_from(const BarrierProblem& p, const Terms& t) {
    const Eigen::Index n = p.dimension();
    cost::charge(cost::matvec(t.g.size() + t.q.size(), n) + cost::matvec(n, n));
    const double inv_lambda = 1.0 / p.lambda();
    Vector grad = 2.0 * (p.objective_gram() * t.d);
    if (t.g.size() > 0) grad.noalias() -= inv_lambda * (p.g_normals().transpose() * t.g.cwiseInverse());
    if (t.q.size() > 0) {
        // grad q_k = 2 M'M (x - xp) - 2 (v_k . x + c_k) v_k
        grad -= (inv_lambda * t.q.cwiseInverse().sum()) * t.radial;
        grad.noalias() += inv_lambda * (p.q_normals().transpose() * (2.0 * t.side.cwiseQuotient(t.q)));
    }
    return grad;
}

Matrix hessian_from(const BarrierProblem& p, const Terms& t) {
    const Eigen::Index n = p.dimension();
    const Eigen::Index s = t.q.size();
    cost::charge(static_cast<std::uint64_t>((t.g.size() + 3 * s) * 2 * n * n));
    const double inv_lambda = 1.0 / p.lambda();
    Matrix h = 2.0 * p.objective_gram();
    if (t.g.size() > 0) {
        // sum_j w_j w_j' / g_j^2
        const Matrix scaled = p.g_normals().transpose() * t.g.cwiseInverse().asDiagonal();
        h.noalias() += inv_lambda * scaled * scaled.transpose();
    }
    if (s > 0) {
        // hess q_k = 2 M'M - 2 v_k v_k'; only the M'M part is shared across k.
        const Matrix grads = (t.radial * Vector::Ones(s).transpose()) -
                             2.0 * p.q_normals().transpose() * t.side.asDiagonal();
        const Vector inv_q = t.q.cwiseInverse();
        const Matrix scaled = grads * inv_q.asDiagonal();
        h.noalias() += inv_lambda * scaled * scaled.transpose();
        h -= (2.0 * inv_lambda * inv_q.sum()) * p.gram();
        const Matrix nu_scaled = p.q_normals().transpose() * inv_q.cwiseAbs().cwiseSqrt().asDiagonal();
        // -hess q_k / q_k contributes +2 v_k v_k' / q_k; q_k < 0 so the sign is negative.
        h.noalias() -= (2.0 * inv_lambda) * nu_scaled * nu_scaled.transpose();
    }
    return 0.5 * (h + h.transpose());
}

}  // namespace

double barrier_value(const BarrierProblem& p, const StateVector& x) { return value_from(p, require_terms(p, x)); }

Vector barrier_gradient(const BarrierProblem& p, const StateVector& x) {
    return gradient_from(p, require_terms(p, x));
}

Matrix barrier_hessian(const BarrierProblem& p, const StateVector& x) {
    return hessian_from(p, require_terms(p, x));
}

NewtonOutcome newton_solve(const BarrierProblem& p, const StateVector& start, const NewtonConfig& cfg) {
    if (!(cfg.eta > 0.0) || !(cfg.epsilon > 0.0) || cfg.n_max < 1 || !(cfg.lambda > 0.0)) {
        throw InputError("newton: eta, epsilon, n_max and lambda must be positive");
    }
    require_dim(start.size(), p.dimension(), "newton start");
    if (!p.strictly_feasible(start)) throw InputError("newton: start point is not strictly feasible");

    const Eigen::Index n = p.dimension();
    NewtonOutcome out;
    StateVector x = start;
    Terms terms = require_terms(p, x);
    double value = value_from(p, terms);

    for (int it = 1; it <= cfg.n_max; ++it) {
        out.iterations = it;
        const Vector grad = gradient_from(p, terms);
        const Matrix hess = hessian_from(p, terms);

        Eigen::LLT<Matrix> llt(hess);
        cost::charge(cost::cholesky(n) + 2 * static_cast<std::uint64_t>(n * n));
        Vector direction = llt.info() == Eigen::Success ? Vector(-llt.solve(grad)) : Vector(-grad);
        if (!direction.allFinite()) {
            direction = -grad;
            if (!direction.allFinite()) break;
        }

        double eta = cfg.eta;
        StateVector next = x + eta * direction;
        std::optional<Terms> next_terms;
        double next_value = value;
        if (cfg.backtracking) {
            const double length = direction.norm();
            // Halvings stop once the trial step is shorter than epsilon: any
            // step accepted beyond that point would end the iteration anyway.
            while (eta * length >= 0.5 * cfg.epsilon) {
                next_terms = terms_if_feasible(p, next);
                if (next_terms) {
                    next_value = value_from(p, *next_terms);
                    if (next_value <= value) break;
                    next_terms.reset();
                }
                eta *= 0.5;
                next = x + eta * direction;
            }
            if (!next_terms) {
                next = x;
                next_value = value;
            }
        } else {
            next_terms = terms_if_feasible(p, next);
            if (!next_terms) {
                out.final_objective = std::numeric_limits<double>::infinity();
                return out;
            }
            next_value = value_from(p, *next_terms);
        }

        const double step = (next - x).norm();
        x = std::move(next);
        if (next_terms) terms = std::move(*next_terms);
        value = next_value;
        if (step < cfg.epsilon && std::isfinite(value)) {
            out.status = NewtonStatus::Converged;
            out.point = x;
            out.final_objective = value;
            return out;
        }
    }
    out.final_objective = value;
    return out;
}

}  // namespace orsop::barrier
