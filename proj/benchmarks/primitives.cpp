#include "orsop/kkt.hpp"
#include "orsop/lyapunov.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

namespace {

using namespace orsop;

// Regular polygon-like region in R^n: the 2n box faces plus `extra` faces cut
// at 45 degrees through pairs of axes.
Polytope region(Eigen::Index n, int extra) {
    std::vector<HalfSpace> faces;
    for (Eigen::Index i = 0; i < n; ++i) {
        faces.push_back(HalfSpace::normalize(Vector::Unit(n, i), -1.0));
        faces.push_back(HalfSpace::normalize(-Vector::Unit(n, i), -1.0));
    }
    for (int k = 0; k < extra; ++k) {
        Vector v = Vector::Zero(n);
        v(k % n) = 1.0;
        v((k + 1) % n) = k % 2 == 0 ? 1.0 : -1.0;
        faces.push_back(HalfSpace::normalize(v, -1.5));
    }
    return Polytope(faces, RegionKind::ReferenceFeasible);
}

void BM_EnumerateCandidates(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    const Polytope r = region(n, static_cast<int>(state.range(1)));
    const Vector xp = Vector::LinSpaced(n, 3.0, 1.5);
    for (auto _ : state) {
        auto c = kkt::solve_problem2(r, xp);
        benchmark::DoNotOptimize(c);
    }
    state.counters["faces"] = static_cast<double>(r.size());
}

void BM_SolveLyapunov(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = normal(rng);
    a -= (std::abs(spectral_abscissa(a)) + a.norm()) * Matrix::Identity(n, n);
    const SpdMatrix q = SpdMatrix::identity(n);
    for (auto _ : state) {
        auto p = solve_lyapunov(a, q);
        benchmark::DoNotOptimize(p);
    }
}

BENCHMARK(BM_EnumerateCandidates)->Args({2, 2})->Args({3, 3})->Args({4, 4})->Args({6, 2})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SolveLyapunov)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
