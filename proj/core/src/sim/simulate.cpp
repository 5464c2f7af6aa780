#include "orsop/sim/simulate.hpp"

#include "format.hpp"
#include "orsop/sim/ocr.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace orsop::sim {

std::size_t Trajectory::count(EventKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [kind](const Event& e) { return e.kind == kind; }));
}

StateVector step(const Matrix& a_cl, const StateVector& x_ref, const StateVector& x, double dt,
                 Integrator integrator) {
    const auto f = [&](const StateVector& y) -> StateVector { return a_cl * (y - x_ref); };
    if (integrator == Integrator::Euler) return x + dt * f(x);
    const StateVector k1 = f(x);
    const StateVector k2 = f(x + 0.5 * dt * k1);
    const StateVector k3 = f(x + 0.5 * dt * k2);
    const StateVector k4 = f(x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate(const PlantModel& plant, const StateVector& x_ref, const StateVector& x_start,
                     double dt, long steps, Integrator integrator) {
    if (!(dt > 0.0)) throw InputError("integrate: dt must be positive");
    if (steps < 0) throw InputError("integrate: negative step count");
    require_dim(x_ref.size(), plant.states(), "integrate x_ref");
    require_dim(x_start.size(), plant.states(), "integrate x_start");
    Trajectory tr;
    const auto count = static_cast<std::size_t>(steps) + 1;
    tr.times.reserve(count);
    tr.states.reserve(count);
    tr.reference_at.reserve(count);
    StateVector x = x_start;
    for (long k = 0; k <= steps; ++k) {
        tr.times.push_back(static_cast<double>(k) * dt);
        tr.states.push_back(x);
        tr.reference_at.push_back(x_ref);
        if (k < steps) x = step(plant.closed_loop(), x_ref, x, dt, integrator);
    }
    return tr;
}

std::string to_string(Method m) { return m == Method::Orsop ? "orsop" : "ocr"; }
std::string to_string(Clock c) { return c == Clock::Modeled ? "model" : "wall"; }

namespace {

struct Design {
    StateVector reference;
    Matrix a_cl;
    SpdMatrix shape;
};

std::optional<Design> run_solver(const Scenario& s, Method method, const RunConfig& cfg,
                                 const StateVector& x_t1, RunResult& out) {
    if (method == Method::Orsop) {
        SolveReport report;
        try {
            const OrsopProblem prob(s.ref_region, s.op_after, x_t1, s.shape, s.x_ref0);
            report = solve(prob, cfg.solve);
        } catch (const Error& e) {
            report.diagnostic = e.what();
        }
        out.solved = report.solved();
        out.status = to_string(report.status);
        out.wall_elapsed = report.elapsed;
        out.flops = report.flops;
        out.margin = report.margin;
        out.objective_volume = report.objective_volume;
        out.diagnostic = report.diagnostic;
        out.report = report;
        if (!report.solved()) return std::nullopt;
        return Design{*report.reference, s.plant.closed_loop(), s.shape};
    }

    const OcrReport ocr = ocr_surrogate(s.plant, s.op_after, x_t1, s.x_ref0);
    out.solved = ocr.solved;
    out.status = ocr.solved ? "ocr" : "failure";
    out.wall_elapsed = ocr.elapsed;
    out.flops = ocr.flops;
    out.margin = ocr.margin;
    out.objective_volume = ocr.objective_volume;
    out.diagnostic = ocr.diagnostic;
    if (!ocr.solved) return std::nullopt;
    return Design{s.x_ref0, s.plant.a() - s.plant.b() * *ocr.gain, *ocr.shape};
}

}  // namespace

RunResult run_scenario(const Scenario& s, Method method, const RunConfig& cfg) {
    RunResult out;
    out.method = method;
    const double dt = s.sim.dt;
    const long last = s.sim.steps();
    const long change = std::clamp(s.change_step(), 0L, last);

    Trajectory& tr = out.trajectory;
    const auto count = static_cast<std::size_t>(last) + 1;
    tr.times.reserve(count);
    tr.states.reserve(count);
    tr.reference_at.reserve(count);

    StateVector x = s.x0;
    StateVector ref = s.x_ref0;
    Matrix a_cl = s.plant.closed_loop();
    const Polytope* region = &s.op_before;
    std::optional<Design> design;
    long switch_at = -1;
    double level_at_switch = 0.0;
    double prev_v = 0.0;

    for (long k = 0; k <= last; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (k == change) {
            region = &s.op_after;
            tr.events.push_back({t, k, EventKind::ConstraintChange});
            design = run_solver(s, method, cfg, x, out);
            out.latency = cfg.clock == Clock::Modeled ? std::chrono::nanoseconds(out.flops) : out.wall_elapsed;
            if (cfg.deadline) out.deadline_met = out.latency <= *cfg.deadline;
            if (design) {
                const double latency_s = std::chrono::duration<double>(out.latency).count();
                switch_at = change + static_cast<long>(std::ceil(latency_s / dt));
            }
        }
        if (design && k == switch_at) {
            ref = design->reference;
            a_cl = design->a_cl;
            out.switch_sample = k;
            tr.events.push_back({t, k, EventKind::ReferenceSwitch});
            level_at_switch = lyap_value(ref, design->shape, x);
            prev_v = level_at_switch;
        }

        tr.times.push_back(t);
        tr.states.push_back(x);
        tr.reference_at.push_back(ref);
        if (!contains(*region, x).feasible) {
            tr.events.push_back({t, k, EventKind::Violation});
            ++out.violations_total;
            if (out.switch_sample >= 0) ++out.violations_after_switch;
        }
        if (out.switch_sample >= 0 && k > out.switch_sample) {
            const double v = lyap_value(ref, design->shape, x);
            if (v > prev_v + 1e-6 * level_at_switch) out.lyapunov_monotone = false;
            prev_v = v;
        }
        if (k < last) x = step(a_cl, ref, x, dt, s.sim.integrator);
    }
    return out;
}

void write_trajectory_csv(const Trajectory& tr, std::ostream& out) {
    const Eigen::Index n = tr.states.empty() ? 0 : tr.states.front().size();
    out << 't';
    for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
    for (Eigen::Index i = 1; i <= n; ++i) out << ",ref" << i;
    out << ",event\n";
    auto ev = tr.events.begin();
    for (std::size_t k = 0; k < tr.size(); ++k) {
        out << detail::format_double(tr.times[k]);
        for (Eigen::Index i = 0; i < n; ++i) out << ',' << detail::format_double(tr.states[k](i));
        for (Eigen::Index i = 0; i < n; ++i) out << ',' << detail::format_double(tr.reference_at[k](i));
        out << ',';
        bool any = false;
        for (; ev != tr.events.end() && ev->sample == static_cast<long>(k); ++ev) {
            if (any) out << ';';
            any = true;
            switch (ev->kind) {
                case EventKind::ConstraintChange: out << "change"; break;
                case EventKind::ReferenceSwitch: out << "switch"; break;
                case EventKind::Violation: out << "violation"; break;
            }
        }
        if (!any) out << '-';
        out << '\n';
    }
}

}  // namespace orsop::sim
