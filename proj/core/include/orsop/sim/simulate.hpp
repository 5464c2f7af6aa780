#pragma once

#include "orsop/sim/scenario.hpp"
#include "orsop/solver.hpp"

#include <chrono>
#include <iosfwd>
#include <optional>
#include <vector>

namespace orsop::sim {

enum class EventKind { ConstraintChange, ReferenceSwitch, Violation };

struct Event {
    double time;
    long sample;
    EventKind kind;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
    std::vector<StateVector> reference_at;
    std::vector<Event> events;  // ordered by sample

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] std::size_t count(EventKind kind) const;
};

/// One integration step of  x' = A_cl (x - x_ref).
StateVector step(const Matrix& a_cl, const StateVector& x_ref, const StateVector& x, double dt,
                 Integrator integrator);

/// steps + 1 samples starting at x_start, t = 0, dt, ..., steps * dt. No events.
Trajectory integrate(const PlantModel& plant, const StateVector& x_ref, const StateVector& x_start,
                     double dt, long steps, Integrator integrator = Integrator::RK4);

enum class Method { Orsop, OcrSurrogate };

/// Solve latency used to place the reference switch. Modeled latency is the
/// flop count at a nominal rate and is reproducible; wall latency is not.
enum class Clock { Modeled, Wall };

struct RunConfig {
    SolveOptions solve{};
    std::optional<std::chrono::nanoseconds> deadline;
    Clock clock{Clock::Modeled};
};

struct RunResult {
    Trajectory trajectory;
    Method method{Method::Orsop};
    /// A reference (ORSOP) or a new design (surrogate) was produced.
    bool solved{false};
    std::string status;  // "case1", "kkt", "newton", "ocr" or "failure"
    std::optional<SolveReport> report;  // ORSOP only
    std::chrono::nanoseconds wall_elapsed{0};
    std::uint64_t flops{0};
    std::chrono::nanoseconds latency{0};  // by the configured clock
    bool deadline_met{true};
    long switch_sample{-1};  // -1 when no switch happened
    std::size_t violations_after_switch{0};
    std::size_t violations_total{0};
    double margin{0.0};
    double objective_volume{0.0};
    /// V along the post-switch samples never rose by more than 1e-6 * level.
    bool lyapunov_monotone{true};
    std::string diagnostic;

    [[nodiscard]] bool success() const noexcept {
        return solved && deadline_met && switch_sample >= 0 && violations_after_switch == 0;
    }
};

/// Integrates with x_ref0 against op_before up to t_change, swaps the region to
/// op_after, solves from the frozen x(t_change), and applies the result
/// ceil(latency / dt) samples later. Violations are recorded against the
/// region active at each sample.
RunResult run_scenario(const Scenario& s, Method method, const RunConfig& cfg = {});

/// Trajectory CSV: t,x1..xn,ref1..refn,event
void write_trajectory_csv(const Trajectory& tr, std::ostream& out);

std::string to_string(Method m);
std::string to_string(Clock c);

}  // namespace orsop::sim
