#include "orsop/sim/ocr.hpp"

#include "orsop/cost.hpp"

#include <cmath>

namespace orsop::sim {

namespace {
constexpr int kKleinmanMaxIterations = 100;
constexpr double kKleinmanTol = 1e-10;
}  // namespace

double ocr_rung_weight(int rung) { return std::pow(10.0, rung - 2); }

Matrix lqr_gain(const Matrix& a, const Matrix& b, double state_weight, const Matrix& k0, int* iterations) {
    const Eigen::Index n = a.rows();
    if (!(state_weight > 0.0)) throw InputError("lqr_gain: state weight must be positive");
    Matrix k = k0;
    for (int it = 1; it <= kKleinmanMaxIterations; ++it) {
        const Matrix a_cl = a - b * k;
        const Matrix q = state_weight * Matrix::Identity(n, n) + k.transpose() * k;
        cost::charge(static_cast<std::uint64_t>(2 * n * n * b.cols()) * 2);
        const SpdMatrix p = solve_lyapunov(a_cl, SpdMatrix(q));
        Matrix k_next = b.transpose() * p.dense();
        const double change = (k_next - k).norm();
        k = std::move(k_next);
        if (change <= kKleinmanTol * (1.0 + k.norm())) {
            if (iterations != nullptr) *iterations += it;
            return k;
        }
    }
    throw NumericalError("lqr_gain: Kleinman iteration did not converge");
}

OcrReport ocr_surrogate(const PlantModel& plant, const Polytope& op_after, const StateVector& x_t1,
                        const StateVector& x_ref) {
    const auto t0 = std::chrono::steady_clock::now();
    const cost::Meter meter;
    OcrReport report;
    const Eigen::Index n = plant.states();
    require_dim(x_t1.size(), n, "ocr x_t1");
    require_dim(x_ref.size(), n, "ocr x_ref");

    Matrix k = plant.k();
    const SpdMatrix identity = SpdMatrix::identity(n);
    for (int rung = 0; rung < kOcrRungs; ++rung) {
        try {
            k = lqr_gain(plant.a(), plant.b(), ocr_rung_weight(rung), k, &report.riccati_iterations);
            const Matrix a_cl = plant.a() - plant.b() * k;
            const SpdMatrix p = solve_lyapunov(a_cl, identity);
            const Ellipsoid e = ellipsoid_through(x_ref, p, x_t1);
            const auto fit = ellipsoid_in_region(e, op_after);
            report.margin = fit.worst_violation;
            report.objective_volume = ellipsoid_volume(e);
            if (fit.feasible) {
                report.solved = true;
                report.rung = rung;
                report.gain = k;
                report.shape = p;
                report.ellipsoid = e;
                break;
            }
        } catch (const Error& e) {
            report.diagnostic = e.what();
        }
    }
    if (!report.solved && report.diagnostic.empty()) report.diagnostic = "no rung of the ladder fits op_after";
    report.flops = meter.flops();
    report.elapsed = std::chrono::steady_clock::now() - t0;
    return report;
}

}  // namespace orsop::sim
