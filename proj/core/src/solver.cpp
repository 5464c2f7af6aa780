#include "orsop/solver.hpp"

#include "orsop/cost.hpp"
#include "orsop/kkt.hpp"
#include "orsop/lp.hpp"
#include "orsop/whitening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orsop {

OrsopProblem::OrsopProblem(Polytope ref_region, Polytope op_region, StateVector xp, SpdMatrix shape,
                           std::optional<StateVector> anchor)
    : ref_region_(std::move(ref_region)),
      op_region_(std::move(op_region)),
      xp_(std::move(xp)),
      shape_(std::move(shape)),
      anchor_(anchor ? std::move(*anchor) : StateVector::Zero(xp_.size())) {
    if (ref_region_.kind() != RegionKind::ReferenceFeasible) {
        throw InputError("problem: ref_region must be reference-feasible");
    }
    if (op_region_.kind() != RegionKind::Operational) {
        throw InputError("problem: op_region must be operational");
    }
    const Eigen::Index n = xp_.size();
    require_dim(ref_region_.dimension(), n, "problem ref_region");
    require_dim(op_region_.dimension(), n, "problem op_region");
    require_dim(shape_.dimension(), n, "problem shape");
    require_dim(anchor_.size(), n, "problem anchor");
    if (!xp_.allFinite()) throw InputError("problem: non-finite present state");
    if (!(op_region_.values(xp_).maxCoeff() < 0.0)) {
        throw InputError("problem: present state is not strictly inside the operational region");
    }
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Case1: return "case1";
        case SolveStatus::KktAnalytic: return "kkt";
        case SolveStatus::NewtonNumeric: return "newton";
        case SolveStatus::Failure: return "failure";
    }
    return "unknown";
}

std::string to_string(Fallback f) {
    switch (f) {
        case Fallback::None: return "none";
        case Fallback::NoKktSurvivor: return "no-kkt-survivor";
        case Fallback::NonlinearCheckFailed: return "nonlinear-check-failed";
        case Fallback::KktBudgetExceeded: return "kkt-budget-exceeded";
        case Fallback::Skipped: return "kkt-skipped";
    }
    return "unknown";
}

FeasibilityReport sphere_check(const Polytope& op_region, const StateVector& xp,
                               const StateVector& candidate, double tol) {
    require_dim(candidate.size(), op_region.dimension(), "sphere_check candidate");
    require_dim(xp.size(), op_region.dimension(), "sphere_check xp");
    const double radius2 = (candidate - xp).squaredNorm();
    const Vector depth = -op_region.values(candidate);
    const Vector v = radius2 - (depth.array() * depth.array().abs()).matrix().array();
    Eigen::Index worst = 0;
    FeasibilityReport report;
    report.worst_violation = v.maxCoeff(&worst);
    report.feasible = report.worst_violation <= tol;
    if (!report.feasible) report.violating_index = static_cast<std::size_t>(worst);
    return report;
}

FeasibilityReport check_nonlinear(const StateVector& candidate, const OrsopProblem& prob, double tol) {
    if (prob.shape().is_spherical()) return sphere_check(prob.op_region(), prob.xp(), candidate, tol);
    const auto t = WhitenTransform::from_spd(prob.shape(), prob.anchor());
    return sphere_check(t.to_s2(prob.op_region()), t.to_s2(prob.xp()), t.to_s2(candidate), tol);
}

namespace {

// Smallest of the reference-face slacks and the sphere-in-face slacks.
double interior_slack(const Polytope& ref_region, const Polytope& op_region, const StateVector& xp,
                      const StateVector& c) {
    const double radius = (c - xp).norm();
    const double ref_slack = -ref_region.values(c).maxCoeff();
    const double op_slack = -op_region.values(c).maxCoeff() - radius;
    return std::min(ref_slack, op_slack);
}

}  // namespace

std::optional<StateVector> interior_start(const Polytope& ref_region, const Polytope& op_region,
                                          const StateVector& xp) {
    const Eigen::Index n = xp.size();
    require_dim(ref_region.dimension(), n, "interior_start ref");
    require_dim(op_region.dimension(), n, "interior_start op");
    const auto r = static_cast<Eigen::Index>(ref_region.size());
    const auto s = static_cast<Eigen::Index>(op_region.size());

    // Variables z = (c, rho, t); maximize t subject to
    //   w_j . c + t <= -b_j
    //   v_k . c + rho + t <= -beta_k
    //   u_m . c - rho <= u_m . xp        (rho >= every cut of ||c - xp||)
    //   t <= cap
    std::vector<Vector> cuts;
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector e = Vector::Zero(n);
        e(i) = 1.0;
        cuts.push_back(e);
        cuts.push_back(-e);
    }
    const double cap = 1e3 * (1.0 + ref_region.offsets().cwiseAbs().maxCoeff() +
                              op_region.offsets().cwiseAbs().maxCoeff() + xp.norm());
    Vector objective = Vector::Zero(n + 2);
    objective(n + 1) = 1.0;
    // (xp, 0, t0) satisfies every row, so the LP never needs phase one.
    Vector feasible = Vector::Zero(n + 2);
    feasible.head(n) = xp;
    feasible(n + 1) = std::min({(-ref_region.values(xp)).minCoeff(), (-op_region.values(xp)).minCoeff(), cap});

    std::optional<StateVector> best;
    double best_slack = 0.0;
    for (int round = 0; round < 40; ++round) {
        const auto m = static_cast<Eigen::Index>(r + s + static_cast<Eigen::Index>(cuts.size()) + 1);
        Matrix a = Matrix::Zero(m, n + 2);
        Vector b(m);
        Eigen::Index row = 0;
        for (Eigen::Index j = 0; j < r; ++j, ++row) {
            a.block(row, 0, 1, n) = ref_region.normals().row(j);
            a(row, n + 1) = 1.0;
            b(row) = -ref_region.offsets()(j);
        }
        for (Eigen::Index k = 0; k < s; ++k, ++row) {
            a.block(row, 0, 1, n) = op_region.normals().row(k);
            a(row, n) = 1.0;
            a(row, n + 1) = 1.0;
            b(row) = -op_region.offsets()(k);
        }
        for (const auto& u : cuts) {
            a.block(row, 0, 1, n) = u.transpose();
            a(row, n) = -1.0;
            b(row) = u.dot(xp);
            ++row;
        }
        a(row, n + 1) = 1.0;
        b(row) = cap;

        const auto lp_result = lp::maximize_from(objective, a, b, feasible);
        if (lp_result.status != lp::Status::Optimal) break;
        // The LP relaxes the ball constraints, so a non-positive optimum proves
        // that no strictly feasible point exists.
        if (lp_result.value <= 1e-12) return best;

        const StateVector c = lp_result.x.head(n);
        const double slack = interior_slack(ref_region, op_region, xp, c);
        if (slack > best_slack) {
            best_slack = slack;
            best = c;
        }
        if (slack >= 0.5 * lp_result.value) return best;

        const Vector d = c - xp;
        const double norm = d.norm();
        if (norm <= 0.0) break;
        cuts.push_back(d / norm);
    }
    if (best) return best;

    // Midpoint of the reference region's bounding box.
    if (auto box = bounding_box(ref_region)) {
        StateVector mid = 0.5 * (box->lower + box->upper);
        if (interior_slack(ref_region, op_region, xp, mid) > 0.0) return mid;
    }
    return std::nullopt;
}

namespace {

struct Frame {
    std::optional<WhitenTransform> transform;
    Polytope ref_region;
    Polytope op_region;
    StateVector xp;
    // Barrier weight multiplier. The whitened objective is measured in units of
    // P, so lambda is divided by the geometric-mean eigenvalue of P; for
    // P = c I both frames then minimize proportional barrier functions.
    double lambda_scale{1.0};

    [[nodiscard]] StateVector to_state(const StateVector& z) const {
        return transform ? transform->to_s1(z) : z;
    }
};

Frame make_frame(const OrsopProblem& prob, bool whiten) {
    if (!whiten) return {std::nullopt, prob.ref_region(), prob.op_region(), prob.xp(), 1.0};
    auto t = WhitenTransform::from_spd(prob.shape(), prob.anchor());
    auto w = transform_problem(t, prob.ref_region(), prob.op_region(), prob.xp());
    const double geometric_mean = std::exp(prob.shape().svd_lambda().array().log().mean());
    return {std::move(t), std::move(w.ref_region), std::move(w.op_region), std::move(w.xp), 1.0 / geometric_mean};
}

void certify(const OrsopProblem& prob, const StateVector& reference, SolveReport& report) {
    const auto r2 = contains(prob.ref_region(), reference);
    Ellipsoid e = ellipsoid_through(reference, prob.shape(), prob.xp());
    const auto r1 = ellipsoid_in_region(e, prob.op_region());
    report.margin = r1.worst_violation;
    report.level = e.level();
    report.objective_volume = ellipsoid_volume(e);
    if (!r2.feasible || !r1.feasible) {
        report.diagnostic = !r2.feasible ? "certificate: reference outside reference region"
                                         : "certificate: ellipsoid leaves operational region";
        report.status = SolveStatus::Failure;
        report.reference.reset();
        report.ellipsoid.reset();
        return;
    }
    report.reference = reference;
    report.ellipsoid = std::move(e);
}

SolveReport solve_impl(const OrsopProblem& prob, const SolveOptions& options) {
    SolveReport report;

    if (contains(prob.ref_region(), prob.xp()).feasible) {
        report.status = SolveStatus::Case1;
        certify(prob, prob.xp(), report);
        return report;
    }

    report.whitened = options.force_whitening || !prob.shape().is_spherical();
    const Frame frame = make_frame(prob, report.whitened);

    if (options.method != Method::NewtonOnly) {
        std::optional<kkt::KktCandidate> candidate;
        try {
            candidate = kkt::solve_problem2(frame.ref_region, frame.xp);
            // A negative multiplier means the projection's own active set was
            // dropped by the presumption check (degenerate vertex); the cheapest
            // survivor is then feasible but not optimal.
            if (candidate && !candidate->dual_feasible) candidate.reset();
            report.fallback = candidate ? Fallback::None : Fallback::NoKktSurvivor;
        } catch (const BudgetError&) {
            report.fallback = Fallback::KktBudgetExceeded;
        }
        if (candidate) {
            if (sphere_check(frame.op_region, frame.xp, candidate->point).feasible) {
                report.status = SolveStatus::KktAnalytic;
                certify(prob, frame.to_state(candidate->point), report);
                return report;
            }
            report.fallback = Fallback::NonlinearCheckFailed;
        }
        if (options.method == Method::KktOnly) {
            report.diagnostic = "kkt-only: " + to_string(report.fallback);
            return report;
        }
    } else {
        report.fallback = Fallback::Skipped;
    }

    const auto start = interior_start(frame.ref_region, frame.op_region, frame.xp);
    if (!start) {
        report.diagnostic = "no strictly feasible reference exists";
        return report;
    }
    barrier::NewtonConfig newton = options.newton;
    newton.lambda *= frame.lambda_scale;
    const barrier::BarrierProblem bp(frame.xp, frame.ref_region, frame.op_region, newton.lambda);
    const auto outcome = barrier::newton_solve(bp, *start, newton);
    report.newton_iterations = outcome.iterations;
    if (outcome.status != barrier::NewtonStatus::Converged) {
        report.diagnostic = "newton: iteration limit reached";
        return report;
    }
    report.status = SolveStatus::NewtonNumeric;
    certify(prob, frame.to_state(*outcome.point), report);
    return report;
}

}  // namespace

SolveReport solve(const OrsopProblem& prob, const SolveOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    const cost::Meter meter;
    SolveReport report;
    try {
        report = solve_impl(prob, options);
    } catch (const Error& e) {
        report = SolveReport{};
        report.diagnostic = e.what();
    }
    report.flops = meter.flops();
    report.elapsed = std::chrono::steady_clock::now() - t0;
    return report;
}

SolveReport solve(const OrsopProblem& prob, const barrier::NewtonConfig& cfg) {
    SolveOptions options;
    options.newton = cfg;
    return solve(prob, options);
}

}  // namespace orsop
