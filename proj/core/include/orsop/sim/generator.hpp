#pragma once

#include "orsop/sim/scenario.hpp"

#include <cstdint>
#include <vector>

namespace orsop::sim {

struct GeneratorSpec {
    int n{2};
    int m{1};
    int count{1};
    std::uint64_t seed{0};
    /// Each operational face's distance from x_ref0 is multiplied by a factor
    /// drawn from this range when forming op_after.
    double shrink_lo{0.3};
    double shrink_hi{1.0};
    double dt{1e-3};
    double t_end{3.0};
};

/// Random closed loops from pole placement at negative real poles, Q = I, a
/// box-plus-oblique-faces operational region, a reference box around x_ref0 and
/// a shrunken op_after that keeps x(t_change) strictly inside. Resamples a
/// scenario up to 100 times; throws NumericalError past that. Deterministic in
/// spec.seed. Scenario ids are "<prefix>n<n>m<m>-<index>".
std::vector<Scenario> generate_scenarios(const GeneratorSpec& spec, const std::string& prefix = "");

/// Gain placing the eigenvalues of A - B K at `poles` (real, distinct), from
/// the Sylvester equation A X - X diag(poles) = B G for a given G.
Matrix place_poles(const Matrix& a, const Matrix& b, const Vector& poles, const Matrix& g);

}  // namespace orsop::sim
