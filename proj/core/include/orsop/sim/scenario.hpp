#pragma once

#include "orsop/geometry.hpp"
#include "orsop/lyapunov.hpp"

#include <filesystem>
#include <string>

namespace orsop::sim {

enum class Integrator { RK4, Euler };

struct SimSettings {
    double dt{1e-3};
    double t_end{1.0};
    Integrator integrator{Integrator::RK4};

    /// Number of integration steps covering [0, t_end].
    [[nodiscard]] long steps() const;
};

/// Which matrix the scenario file carried.
enum class ShapeSource { GivenP, FromQ };

/// One abrupt-constraint-change experiment.
///
/// Invariant checked by validate(): the design-time ellipsoid through x0
/// centred at x_ref0 lies inside op_before.
struct Scenario {
    std::string id;
    PlantModel plant;
    ShapeSource source;
    SpdMatrix weight;  // P or Q as given in the file
    SpdMatrix shape;   // P; equals weight when source == GivenP
    StateVector x0;
    StateVector x_ref0;
    Polytope ref_region;
    Polytope op_before;
    Polytope op_after;
    double t_change;
    SimSettings sim;

    [[nodiscard]] Eigen::Index states() const noexcept { return plant.states(); }
    [[nodiscard]] long change_step() const;
};

/// Builds a scenario, derives P from Q when needed and runs validate().
Scenario make_scenario(std::string id, PlantModel plant, ShapeSource source, const SpdMatrix& weight,
                       StateVector x0, StateVector x_ref0, Polytope ref_region, Polytope op_before,
                       Polytope op_after, double t_change, SimSettings sim);

/// Throws InputError when a scenario invariant fails.
void validate(const Scenario& s);

/// Parses the versioned JSON format (schema 1). Throws InputError on schema,
/// dimension or invariant violations. `id` falls back to `fallback_id` when the
/// document has no "id" field.
Scenario parse_scenario(const std::string& json_text, const std::string& fallback_id = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

/// Serializes with two-space indentation and shortest round-trip doubles.
std::string to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// Every *.json file in `dir`, sorted by file name.
std::vector<Scenario> load_directory(const std::filesystem::path& dir);

std::string to_string(Integrator i);

}  // namespace orsop::sim
