// orsop: solve, simulate, benchmark and generate reference-state scenarios.

#include "orsop/sim/bench.hpp"
#include "orsop/sim/generator.hpp"
#include "orsop/sim/scenario.hpp"
#include "orsop/sim/simulate.hpp"
#include "orsop/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace orsop;
namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kSolveFailure = 2, kInputError = 3, kDeadlineExceeded = 4 };

std::optional<std::chrono::nanoseconds> deadline_from_ms(double ms) {
    if (ms < 0.0) return std::nullopt;
    return std::chrono::nanoseconds(static_cast<std::int64_t>(std::llround(ms * 1e6)));
}

const std::map<std::string, Method> kMethods{
    {"auto", Method::Auto}, {"kkt-only", Method::KktOnly}, {"newton-only", Method::NewtonOnly}};
const std::map<std::string, sim::Clock> kClocks{{"model", sim::Clock::Modeled}, {"wall", sim::Clock::Wall}};

nlohmann::json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

struct SolveArgs {
    std::string scenario;
    Method method{Method::Auto};
    double lambda{1e6};
    bool json{false};
    bool force_whitening{false};
    double deadline_ms{-1.0};
};

int run_solve(const SolveArgs& args) {
    const auto s = sim::load_scenario(args.scenario);
    const auto pre = sim::integrate(s.plant, s.x_ref0, s.x0, s.sim.dt, s.change_step(), s.sim.integrator);
    const StateVector x_t1 = pre.states.back();
    const OrsopProblem prob(s.ref_region, s.op_after, x_t1, s.shape, s.x_ref0);

    SolveOptions options;
    options.method = args.method;
    options.force_whitening = args.force_whitening;
    options.newton.lambda = args.lambda;
    const SolveReport r = solve(prob, options);
    const auto deadline = deadline_from_ms(args.deadline_ms);
    const bool late = deadline && r.elapsed > *deadline;
    const double elapsed_us = std::chrono::duration<double, std::micro>(r.elapsed).count();

    if (args.json) {
        nlohmann::json j;
        j["scenario"] = s.id;
        j["status"] = to_string(r.status);
        j["fallback"] = to_string(r.fallback);
        j["reference"] = r.reference ? vector_json(*r.reference) : nlohmann::json(nullptr);
        j["x_t1"] = vector_json(x_t1);
        j["level"] = r.level;
        j["objective_volume"] = r.objective_volume;
        j["margin"] = r.margin;
        j["elapsed_us"] = elapsed_us;
        j["flops"] = r.flops;
        j["newton_iterations"] = r.newton_iterations;
        j["whitened"] = r.whitened;
        j["deadline_met"] = !late;
        if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "scenario   " << s.id << '\n'
                  << "status     " << to_string(r.status) << " (fallback: " << to_string(r.fallback) << ")\n";
        if (r.reference) {
            const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, ", ", ", ", "", "", "[", "]");
            std::cout << "reference  " << r.reference->transpose().format(fmt) << '\n'
                      << "level      " << r.level << '\n'
                      << "volume     " << r.objective_volume << '\n'
                      << "margin     " << r.margin << '\n';
        }
        std::cout << "elapsed    " << elapsed_us << " us (" << r.flops << " flops)\n";
        if (!r.diagnostic.empty()) std::cout << "diagnostic " << r.diagnostic << '\n';
        if (late) std::cout << "deadline   exceeded\n";
    }
    if (!r.solved()) return kSolveFailure;
    return late ? kDeadlineExceeded : kOk;
}

struct SimulateArgs {
    std::string scenario;
    std::string out;
    std::string method{"orsop"};
    sim::Clock clock{sim::Clock::Modeled};
};

int run_simulate(const SimulateArgs& args) {
    const auto s = sim::load_scenario(args.scenario);
    sim::RunConfig cfg;
    cfg.clock = args.clock;
    const auto method = args.method == "ocr" ? sim::Method::OcrSurrogate : sim::Method::Orsop;
    const auto r = sim::run_scenario(s, method, cfg);
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw InputError("cannot write " + args.out);
    sim::write_trajectory_csv(r.trajectory, out);
    std::cerr << s.id << ": " << r.status << ", switch at sample " << r.switch_sample << ", "
              << r.violations_after_switch << " post-switch violations\n";
    return r.solved ? kOk : kSolveFailure;
}

sim::GeneratorSpec spec_from_json(const nlohmann::json& j, std::uint64_t seed) {
    sim::GeneratorSpec g;
    g.n = j.at("n").get<int>();
    g.m = j.at("m").get<int>();
    g.count = j.at("count").get<int>();
    g.seed = j.value("seed", seed);
    if (j.contains("shrink_range")) {
        g.shrink_lo = j["shrink_range"].at(0).get<double>();
        g.shrink_hi = j["shrink_range"].at(1).get<double>();
    }
    g.dt = j.value("dt", g.dt);
    g.t_end = j.value("t_end", g.t_end);
    return g;
}

// A spec file holds one generator spec object or an array of them.
std::vector<sim::Scenario> suite_from_spec(const std::string& path, std::optional<std::uint64_t> seed) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("spec: ") + e.what());
    }
    const auto groups = j.is_array() ? j : nlohmann::json::array({j});
    std::vector<sim::Scenario> suite;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        try {
            auto g = spec_from_json(groups[i], 0);
            if (seed) g.seed = *seed + i;
            auto part = sim::generate_scenarios(g, "g" + std::to_string(i) + "-");
            std::move(part.begin(), part.end(), std::back_inserter(suite));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("spec: ") + e.what());
        }
    }
    return suite;
}

struct BenchArgs {
    std::string spec;
    std::string scenarios;
    std::string methods{"orsop,ocr"};
    double deadline_ms{-1.0};
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string summary;
    unsigned workers{1};
    sim::Clock clock{sim::Clock::Modeled};
    double lambda{1e6};
};

int run_bench(const BenchArgs& args) {
    const auto suite = !args.spec.empty() ? suite_from_spec(args.spec, args.seed) : sim::load_directory(args.scenarios);
    if (suite.empty()) throw InputError("bench: no scenarios");

    sim::BenchConfig cfg;
    cfg.methods.clear();
    std::stringstream list(args.methods);
    for (std::string m; std::getline(list, m, ',');) {
        if (m == "orsop") {
            cfg.methods.push_back(sim::Method::Orsop);
        } else if (m == "ocr") {
            cfg.methods.push_back(sim::Method::OcrSurrogate);
        } else {
            throw InputError("bench: unknown method " + m);
        }
    }
    cfg.run.deadline = deadline_from_ms(args.deadline_ms);
    cfg.run.clock = args.clock;
    cfg.run.solve.newton.lambda = args.lambda;
    cfg.workers = args.workers;

    const auto result = sim::run_benchmark(suite, cfg);
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw InputError("cannot write " + args.out);
    sim::write_results_csv(result, out);
    const std::string summary = sim::summary_json(result);
    if (!args.summary.empty()) {
        std::ofstream js(args.summary, std::ios::binary);
        if (!js) throw InputError("cannot write " + args.summary);
        js << summary;
    }
    for (const auto& [method, stats] : result.per_method) {
        std::cerr << sim::to_string(method) << ": " << stats.success_count << '/'
                  << stats.success_count + stats.failure_count << " succeeded, p50 "
                  << sim::percentile(stats.times_us, 50) << " us\n";
    }
    return kOk;
}

struct GenArgs {
    int n{2};
    int m{1};
    int count{10};
    std::uint64_t seed{0};
    std::string out;
    std::vector<double> shrink{0.3, 1.0};
};

int run_gen(const GenArgs& args) {
    sim::GeneratorSpec g;
    g.n = args.n;
    g.m = args.m;
    g.count = args.count;
    g.seed = args.seed;
    g.shrink_lo = args.shrink.at(0);
    g.shrink_hi = args.shrink.at(1);
    const auto suite = sim::generate_scenarios(g);
    fs::create_directories(args.out);
    for (const auto& s : suite) sim::save_scenario(s, fs::path(args.out) / (s.id + ".json"));
    std::cerr << "wrote " << suite.size() << " scenarios to " << args.out << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online reference-state optimization: solver, simulator and benchmark"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the reference problem at the constraint change of a scenario");
    solve_cmd->add_option("--scenario", solve_args.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--method", solve_args.method, "auto, kkt-only or newton-only")
        ->transform(CLI::CheckedTransformer(kMethods, CLI::ignore_case));
    solve_cmd->add_option("--lambda", solve_args.lambda, "Barrier weight")->check(CLI::PositiveNumber);
    solve_cmd->add_flag("--json", solve_args.json, "Print the report as JSON");
    solve_cmd->add_flag("--force-whitening", solve_args.force_whitening, "Whiten even for spherical P");
    solve_cmd->add_option("--deadline-ms", solve_args.deadline_ms, "Wall-clock deadline; exit 4 when exceeded");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a scenario and write the trajectory CSV");
    sim_cmd->add_option("--scenario", sim_args.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--out", sim_args.out, "Trajectory CSV")->required();
    sim_cmd->add_option("--method", sim_args.method, "orsop or ocr")->check(CLI::IsMember({"orsop", "ocr"}));
    sim_cmd->add_option("--clock", sim_args.clock, "Latency clock: model or wall")
        ->transform(CLI::CheckedTransformer(kClocks, CLI::ignore_case));

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "Run the success-rate and timing benchmark");
    auto* spec_opt = bench_cmd->add_option("--spec", bench_args.spec, "Generator spec JSON")->check(CLI::ExistingFile);
    auto* dir_opt =
        bench_cmd->add_option("--scenarios", bench_args.scenarios, "Directory of scenario files")->check(CLI::ExistingDirectory);
    spec_opt->excludes(dir_opt);
    bench_cmd->add_option("--methods", bench_args.methods, "Comma-separated: orsop,ocr");
    bench_cmd->add_option("--deadline-ms", bench_args.deadline_ms, "Deadline on the solve latency");
    bench_cmd->add_option("--seed", bench_args.seed, "Generator seed (overrides the spec)");
    bench_cmd->add_option("--out", bench_args.out, "Results CSV")->required();
    bench_cmd->add_option("--summary", bench_args.summary, "Summary JSON");
    bench_cmd->add_option("--workers", bench_args.workers, "Worker threads")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--clock", bench_args.clock, "Latency clock: model (reproducible) or wall")
        ->transform(CLI::CheckedTransformer(kClocks, CLI::ignore_case));
    bench_cmd->add_option("--lambda", bench_args.lambda, "Barrier weight")->check(CLI::PositiveNumber);

    GenArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gen", "Generate random scenarios");
    gen_cmd->add_option("--n", gen_args.n, "State dimension")->required()->check(CLI::Range(2, 10));
    gen_cmd->add_option("--m", gen_args.m, "Input dimension")->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--count", gen_args.count, "Number of scenarios")->required()->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--seed", gen_args.seed, "Seed")->required();
    gen_cmd->add_option("--out", gen_args.out, "Output directory")->required();
    gen_cmd->add_option("--shrink", gen_args.shrink, "Shrink factor range lo hi")->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*solve_cmd) return run_solve(solve_args);
        if (*sim_cmd) return run_simulate(sim_args);
        if (*bench_cmd) {
            if (bench_args.spec.empty() && bench_args.scenarios.empty()) {
                throw InputError("bench: one of --spec or --scenarios is required");
            }
            return run_bench(bench_args);
        }
        if (*gen_cmd) return run_gen(gen_args);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolveFailure;
    }
    return kOk;
}
