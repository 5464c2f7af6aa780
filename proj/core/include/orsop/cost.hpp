#pragma once

#include <cstdint>

// Deterministic work accounting.
//
// Solvers charge an approximate floating-point operation count to a
// thread-local counter. A Meter reads the counter delta over its lifetime,
// which gives a hardware-independent, reproducible "elapsed" figure for the
// benchmark harness. Wall-clock time is measured separately.
namespace orsop::cost {

void charge(std::uint64_t flops) noexcept;
std::uint64_t counter() noexcept;

class Meter {
public:
    Meter() noexcept : start_(counter()) {}
    [[nodiscard]] std::uint64_t flops() const noexcept { return counter() - start_; }

private:
    std::uint64_t start_;
};

/// Nominal machine throughput used to convert flops to modeled seconds.
inline constexpr double kNominalFlopsPerSecond = 1e9;

inline double modeled_seconds(std::uint64_t flops, double rate = kNominalFlopsPerSecond) {
    return static_cast<double>(flops) / rate;
}

// Rough counts for common dense kernels.
inline std::uint64_t dot(long n) { return static_cast<std::uint64_t>(2 * n); }
inline std::uint64_t matvec(long rows, long cols) { return static_cast<std::uint64_t>(2 * rows * cols); }
inline std::uint64_t cholesky(long n) { return static_cast<std::uint64_t>(n * n * n / 3 + n * n); }
inline std::uint64_t lu(long n) { return static_cast<std::uint64_t>(2 * n * n * n / 3 + 2 * n * n); }
inline std::uint64_t sym_eig(long n) { return static_cast<std::uint64_t>(9 * n * n * n); }
inline std::uint64_t gen_eig(long n) { return static_cast<std::uint64_t>(25 * n * n * n); }

}  // namespace orsop::cost
