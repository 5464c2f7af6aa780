#include "orsop/sim/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace orsop::sim {

using nlohmann::json;

long SimSettings::steps() const { return std::lround(t_end / dt); }

long Scenario::change_step() const { return std::lround(t_change / sim.dt); }

std::string to_string(Integrator i) { return i == Integrator::RK4 ? "rk4" : "euler"; }

Scenario make_scenario(std::string id, PlantModel plant, ShapeSource source, const SpdMatrix& weight,
                       StateVector x0, StateVector x_ref0, Polytope ref_region, Polytope op_before,
                       Polytope op_after, double t_change, SimSettings sim) {
    require_dim(weight.dimension(), plant.states(), "scenario weight");
    SpdMatrix shape = source == ShapeSource::GivenP ? weight : solve_lyapunov(plant.closed_loop(), weight);
    Scenario s{std::move(id),       std::move(plant),     source,
               weight,              std::move(shape),     std::move(x0),
               std::move(x_ref0),   std::move(ref_region), std::move(op_before),
               std::move(op_after), t_change,             sim};
    validate(s);
    return s;
}

void validate(const Scenario& s) {
    const Eigen::Index n = s.states();
    require_dim(s.x0.size(), n, "scenario x0");
    require_dim(s.x_ref0.size(), n, "scenario x_ref0");
    require_dim(s.ref_region.dimension(), n, "scenario ref_region");
    require_dim(s.op_before.dimension(), n, "scenario op_before");
    require_dim(s.op_after.dimension(), n, "scenario op_after");
    if (s.ref_region.kind() != RegionKind::ReferenceFeasible) throw InputError("scenario: ref_region kind");
    if (s.op_before.kind() != RegionKind::Operational || s.op_after.kind() != RegionKind::Operational) {
        throw InputError("scenario: operational region kind");
    }
    if (!(s.sim.dt > 0.0) || !std::isfinite(s.sim.dt)) throw InputError("scenario: dt must be positive");
    if (!(s.t_change >= 0.0) || !(s.sim.t_end > s.t_change)) {
        throw InputError("scenario: need 0 <= t_change < t_end");
    }
    if (!s.x0.allFinite() || !s.x_ref0.allFinite()) throw InputError("scenario: non-finite state");
    const Ellipsoid design = ellipsoid_through(s.x_ref0, s.shape, s.x0);
    if (!ellipsoid_in_region(design, s.op_before).feasible) {
        throw InputError("scenario: design ellipsoid is not inside op_before");
    }
}

namespace {

Matrix read_matrix(const json& j, const char* key, Eigen::Index rows, Eigen::Index cols) {
    if (!j.contains(key) || !j[key].is_array()) throw InputError(std::string("scenario: missing matrix ") + key);
    const auto& m = j[key];
    if (static_cast<Eigen::Index>(m.size()) != rows) throw InputError(std::string("scenario: row count of ") + key);
    Matrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = m[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw InputError(std::string("scenario: column count of ") + key);
        }
        for (Eigen::Index c = 0; c < cols; ++c) out(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return out;
}

Vector read_vector(const json& j, const char* key, Eigen::Index size) {
    if (!j.contains(key) || !j[key].is_array()) throw InputError(std::string("scenario: missing vector ") + key);
    const auto& v = j[key];
    if (static_cast<Eigen::Index>(v.size()) != size) throw InputError(std::string("scenario: length of ") + key);
    Vector out(size);
    for (Eigen::Index i = 0; i < size; ++i) out(i) = v[static_cast<std::size_t>(i)].get<double>();
    return out;
}

Polytope read_region(const json& j, const char* key, Eigen::Index n, RegionKind kind) {
    if (!j.contains(key) || !j[key].is_array() || j[key].empty()) {
        throw InputError(std::string("scenario: missing region ") + key);
    }
    std::vector<HalfSpace> faces;
    for (const auto& face : j[key]) {
        faces.push_back(HalfSpace::normalize(read_vector(face, "normal", n), face.at("offset").get<double>()));
    }
    return Polytope(std::move(faces), kind);
}

json write_matrix(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
        out.push_back(std::move(row));
    }
    return out;
}

json write_vector(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json write_region(const Polytope& p) {
    json out = json::array();
    for (const auto& h : p) out.push_back({{"normal", write_vector(h.normal())}, {"offset", h.offset()}});
    return out;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& fallback_id) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InputError(std::string("scenario: ") + e.what());
    }
    try {
        if (!j.is_object()) throw InputError("scenario: document is not an object");
        if (j.value("schema", 0) != 1) throw InputError("scenario: unsupported schema (expected 1)");
        const auto n = j.at("n").get<Eigen::Index>();
        const auto m = j.at("m").get<Eigen::Index>();
        if (n < 1 || m < 1) throw InputError("scenario: n and m must be positive");

        const bool has_p = j.contains("P");
        const bool has_q = j.contains("Q");
        if (has_p == has_q) throw InputError("scenario: exactly one of P and Q is required");

        PlantModel plant = [&] {
            try {
                return PlantModel(read_matrix(j, "A", n, n), read_matrix(j, "B", n, m), read_matrix(j, "K", m, n));
            } catch (const StabilityError& e) {
                throw InputError(std::string("scenario: ") + e.what());
            }
        }();
        const SpdMatrix weight(read_matrix(j, has_p ? "P" : "Q", n, n));

        const auto& sim_j = j.at("sim");
        SimSettings sim;
        sim.dt = sim_j.at("dt").get<double>();
        sim.t_end = sim_j.at("t_end").get<double>();
        const std::string integrator = sim_j.value("integrator", "rk4");
        if (integrator == "rk4") {
            sim.integrator = Integrator::RK4;
        } else if (integrator == "euler") {
            sim.integrator = Integrator::Euler;
        } else {
            throw InputError("scenario: unknown integrator " + integrator);
        }

        return make_scenario(j.value("id", fallback_id), std::move(plant),
                             has_p ? ShapeSource::GivenP : ShapeSource::FromQ, weight, read_vector(j, "x0", n),
                             read_vector(j, "x_ref0", n), read_region(j, "ref_region", n, RegionKind::ReferenceFeasible),
                             read_region(j, "op_before", n, RegionKind::Operational),
                             read_region(j, "op_after", n, RegionKind::Operational), j.at("t_change").get<double>(),
                             sim);
    } catch (const json::exception& e) {
        throw InputError(std::string("scenario: ") + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("scenario: cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), path.stem().string());
}

std::string to_json(const Scenario& s) {
    json j;
    j["schema"] = 1;
    j["id"] = s.id;
    j["n"] = s.states();
    j["m"] = s.plant.inputs();
    j["A"] = write_matrix(s.plant.a());
    j["B"] = write_matrix(s.plant.b());
    j["K"] = write_matrix(s.plant.k());
    j[s.source == ShapeSource::GivenP ? "P" : "Q"] = write_matrix(s.weight.dense());
    j["x0"] = write_vector(s.x0);
    j["x_ref0"] = write_vector(s.x_ref0);
    j["ref_region"] = write_region(s.ref_region);
    j["op_before"] = write_region(s.op_before);
    j["op_after"] = write_region(s.op_after);
    j["t_change"] = s.t_change;
    j["sim"] = {{"dt", s.sim.dt}, {"t_end", s.sim.t_end}, {"integrator", to_string(s.sim.integrator)}};
    return j.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("scenario: cannot write " + path.string());
    out << to_json(s);
}

std::vector<Scenario> load_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw InputError("scenario: not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Scenario> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(load_scenario(f));
    return out;
}

}  // namespace orsop::sim
