// Solve latency by path on generated scenarios. Each benchmark cycles through
// the scenarios of its path so one unlucky instance does not dominate.

#include "orsop/sim/generator.hpp"
#include "orsop/sim/ocr.hpp"
#include "orsop/sim/simulate.hpp"
#include "orsop/solver.hpp"

#include <benchmark/benchmark.h>

#include <map>

namespace {

using namespace orsop;

struct Case {
    sim::Scenario scenario;
    StateVector x_t1;
    OrsopProblem problem;
};

// Scenarios of dimension n grouped by the status solve() gives them.
const std::map<SolveStatus, std::vector<Case>>& cases(int n) {
    static std::map<int, std::map<SolveStatus, std::vector<Case>>> by_n;
    auto [it, fresh] = by_n.try_emplace(n);
    if (!fresh) return it->second;
    sim::GeneratorSpec spec;
    spec.n = n;
    spec.m = n > 2 ? 2 : 1;
    spec.count = 200;
    spec.seed = 11;
    for (auto& s : sim::generate_scenarios(spec)) {
        StateVector x1 = sim::integrate(s.plant, s.x_ref0, s.x0, s.sim.dt, s.change_step(), s.sim.integrator)
                             .states.back();
        OrsopProblem prob(s.ref_region, s.op_after, x1, s.shape, s.x_ref0);
        const SolveStatus status = solve(prob).status;
        it->second[status].push_back({std::move(s), std::move(x1), std::move(prob)});
    }
    return it->second;
}

void run_path(benchmark::State& state, SolveStatus path) {
    const auto& all = cases(static_cast<int>(state.range(0)));
    const auto found = all.find(path);
    if (found == all.end() || found->second.empty()) {
        state.SkipWithError("no scenario takes this path");
        return;
    }
    const auto& list = found->second;
    std::size_t i = 0;
    for (auto _ : state) {
        auto r = solve(list[i].problem);
        benchmark::DoNotOptimize(r);
        i = (i + 1) % list.size();
    }
    state.counters["scenarios"] = static_cast<double>(list.size());
}

void BM_SolveCase1(benchmark::State& state) { run_path(state, SolveStatus::Case1); }
void BM_SolveKkt(benchmark::State& state) { run_path(state, SolveStatus::KktAnalytic); }
void BM_SolveNewton(benchmark::State& state) { run_path(state, SolveStatus::NewtonNumeric); }

void BM_OcrSurrogate(benchmark::State& state) {
    const auto& all = cases(static_cast<int>(state.range(0)));
    std::vector<const Case*> list;
    for (const auto& [status, group] : all) {
        for (const auto& c : group) list.push_back(&c);
    }
    std::size_t i = 0;
    for (auto _ : state) {
        const Case& c = *list[i];
        auto r = sim::ocr_surrogate(c.scenario.plant, c.scenario.op_after, c.x_t1, c.scenario.x_ref0);
        benchmark::DoNotOptimize(r);
        i = (i + 1) % list.size();
    }
}

BENCHMARK(BM_SolveCase1)->DenseRange(2, 4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SolveKkt)->DenseRange(2, 4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SolveNewton)->DenseRange(2, 4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_OcrSurrogate)->DenseRange(2, 4)->Unit(benchmark::kMicrosecond);

}  // namespace
