#include "orsop/sim/bench.hpp"

#include "format.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>
#include <tuple>

namespace orsop::sim {

double MethodStats::success_rate() const {
    const std::size_t total = success_count + failure_count;
    return total == 0 ? 0.0 : static_cast<double>(success_count) / static_cast<double>(total);
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

BenchResult run_benchmark(const std::vector<Scenario>& suite, const BenchConfig& cfg) {
    if (suite.empty()) throw InputError("run_benchmark: empty suite");
    if (cfg.methods.empty()) throw InputError("run_benchmark: no methods");

    const std::size_t jobs = suite.size() * cfg.methods.size();
    std::vector<BenchRow> rows(jobs);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            const Scenario& s = suite[j / cfg.methods.size()];
            const Method method = cfg.methods[j % cfg.methods.size()];
            const RunResult r = run_scenario(s, method, cfg.run);
            rows[j] = BenchRow{s.id,
                               method,
                               r.status,
                               std::chrono::duration<double, std::micro>(r.latency).count(),
                               r.margin,
                               r.violations_after_switch,
                               r.objective_volume,
                               r.success()};
        }
    };
    const unsigned workers = std::max(1U, std::min<unsigned>(cfg.workers, static_cast<unsigned>(jobs)));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        return std::tie(a.scenario_id, a.method) < std::tie(b.scenario_id, b.method);
    });

    BenchResult result;
    result.deadline = cfg.run.deadline;
    result.clock = cfg.run.clock;
    for (const Method m : cfg.methods) result.per_method[m];
    for (const auto& row : rows) {
        auto& stats = result.per_method[row.method];
        ++(row.success ? stats.success_count : stats.failure_count);
        stats.times_us.push_back(row.elapsed_us);
        if (row.status != "failure") stats.margins.push_back(row.margin);
        ++stats.statuses[row.status];
    }
    result.rows = std::move(rows);
    return result;
}

void write_results_csv(const BenchResult& result, std::ostream& out) {
    out << "scenario_id,method,status,elapsed_us,margin,violations,objective_volume\n";
    for (const auto& r : result.rows) {
        out << r.scenario_id << ',' << to_string(r.method) << ',' << r.status << ','
            << detail::format_double(r.elapsed_us) << ',' << detail::format_double(r.margin) << ','
            << r.violations << ',' << detail::format_double(r.objective_volume) << '\n';
    }
}

std::string summary_json(const BenchResult& result) {
    using nlohmann::json;
    const auto number = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    j["clock"] = to_string(result.clock);
    j["deadline_us"] = result.deadline
                           ? json(std::chrono::duration<double, std::micro>(*result.deadline).count())
                           : json(nullptr);
    j["scenarios"] = result.per_method.empty()
                         ? 0
                         : result.per_method.begin()->second.success_count +
                               result.per_method.begin()->second.failure_count;
    json methods = json::object();
    for (const auto& [method, stats] : result.per_method) {
        json m;
        m["success_count"] = stats.success_count;
        m["failure_count"] = stats.failure_count;
        m["success_rate"] = stats.success_rate();
        m["elapsed_us"] = {{"p50", number(percentile(stats.times_us, 50))},
                           {"p90", number(percentile(stats.times_us, 90))},
                           {"p99", number(percentile(stats.times_us, 99))}};
        m["margin"] = {{"min", number(percentile(stats.margins, 0))},
                       {"p50", number(percentile(stats.margins, 50))},
                       {"max", number(percentile(stats.margins, 100))}};
        m["statuses"] = stats.statuses;
        if (method == Method::OcrSurrogate) m["note"] = "Riccati-ladder surrogate for controller redesign, not an LMI solver";
        methods[to_string(method)] = std::move(m);
    }
    j["methods"] = std::move(methods);
    return j.dump(2) + "\n";
}

}  // namespace orsop::sim
