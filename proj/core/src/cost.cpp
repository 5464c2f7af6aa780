#include "orsop/cost.hpp"

namespace orsop::cost {

namespace {
thread_local std::uint64_t g_flops = 0;
}

void charge(std::uint64_t flops) noexcept { g_flops += flops; }

std::uint64_t counter() noexcept { return g_flops; }

}  // namespace orsop::cost
