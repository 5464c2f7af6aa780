#pragma once

#include "orsop/sim/generator.hpp"
#include "orsop/sim/simulate.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace orsop::sim {

struct BenchRow {
    std::string scenario_id;
    Method method;
    std::string status;
    double elapsed_us;  // by the configured clock
    double margin;
    std::size_t violations;
    double objective_volume;
    bool success;
};

struct MethodStats {
    std::size_t success_count{0};
    std::size_t failure_count{0};
    std::vector<double> times_us;
    std::vector<double> margins;
    std::map<std::string, std::size_t> statuses;

    [[nodiscard]] double success_rate() const;
};

struct BenchResult {
    std::vector<BenchRow> rows;  // sorted by scenario id, then method
    std::map<Method, MethodStats> per_method;
    std::optional<std::chrono::nanoseconds> deadline;
    Clock clock{Clock::Modeled};
};

struct BenchConfig {
    std::vector<Method> methods{Method::Orsop, Method::OcrSurrogate};
    RunConfig run{};
    unsigned workers{1};
};

/// Runs every (scenario, method) pair on a worker pool; output order does not
/// depend on scheduling.
BenchResult run_benchmark(const std::vector<Scenario>& suite, const BenchConfig& cfg);

/// Linear-interpolated percentile, q in [0, 100]. NaN for an empty sample.
double percentile(std::vector<double> values, double q);

/// scenario_id,method,status,elapsed_us,margin,violations,objective_volume
void write_results_csv(const BenchResult& result, std::ostream& out);
std::string summary_json(const BenchResult& result);

}  // namespace orsop::sim
