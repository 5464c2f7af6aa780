#include "orsop/sim/generator.hpp"

#include "orsop/sim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace orsop::sim {

Matrix place_poles(const Matrix& a, const Matrix& b, const Vector& poles, const Matrix& g) {
    const Eigen::Index n = a.rows();
    require_dim(poles.size(), n, "place_poles poles");
    require_dim(g.cols(), n, "place_poles G");
    require_dim(g.rows(), b.cols(), "place_poles G rows");
    // Column i of A X - X diag(p) = B G:  (A - p_i I) x_i = B g_i.
    Matrix x(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::PartialPivLU<Matrix> lu(a - poles(i) * Matrix::Identity(n, n));
        x.col(i) = lu.solve(b * g.col(i));
    }
    // K = G X^{-1}, i.e. X' K' = G'.
    const Eigen::FullPivLU<Matrix> xlu(x.transpose());
    if (!xlu.isInvertible() || xlu.rcond() < 1e-12) throw NumericalError("place_poles: singular eigenvector matrix");
    return xlu.solve(g.transpose()).transpose();
}

namespace {

constexpr int kMaxAttempts = 100;

class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Matrix normal(Eigen::Index rows, Eigen::Index cols) {
        std::normal_distribution<double> d(0.0, 1.0);
        Matrix m(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c) {
            for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = d(rng_);
        }
        return m;
    }

    Vector unit_vector(Eigen::Index n) {
        Vector v = normal(n, 1);
        while (v.norm() < 1e-6) v = normal(n, 1);
        return v.normalized();
    }

private:
    std::mt19937_64 rng_;
};

std::uint64_t scenario_seed(std::uint64_t seed, int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

HalfSpace face(const Vector& normal, double offset) { return HalfSpace::normalize(normal, offset); }

std::optional<Scenario> attempt(const GeneratorSpec& spec, const std::string& id, Draw& draw) {
    const Eigen::Index n = spec.n;
    const Eigen::Index m = spec.m;

    const Matrix a = draw.normal(n, n);
    const Matrix b = draw.normal(n, m);
    Vector poles(n);
    for (Eigen::Index i = 0; i < n; ++i) poles(i) = -draw.uniform(0.5, 3.0);
    std::vector<double> sorted(poles.data(), poles.data() + n);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] - sorted[i - 1] < 0.05) return std::nullopt;
    }
    const Matrix k = place_poles(a, b, poles, draw.normal(m, n));
    if (!k.allFinite() || k.norm() > 1e3) return std::nullopt;
    PlantModel plant(a, b, k);
    if (spectral_abscissa(plant.closed_loop()) > -0.25) return std::nullopt;
    const SpdMatrix q = SpdMatrix::identity(n);
    const SpdMatrix p = solve_lyapunov(plant.closed_loop(), q);

    // op_before: a box around a point near x_ref0 plus up to two oblique faces.
    Vector x_ref0(n);
    Vector half(n);
    Vector shift(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x_ref0(i) = draw.uniform(-0.5, 0.5);
        half(i) = draw.uniform(1.0, 2.0);
        shift(i) = draw.uniform(-0.3, 0.3) * half(i);
    }
    std::vector<HalfSpace> before;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector e = Vector::Unit(n, i);
        before.push_back(face(e, -(x_ref0(i) + shift(i) + half(i))));
        before.push_back(face(-e, x_ref0(i) + shift(i) - half(i)));
    }
    const int oblique = draw.integer(0, 2);
    for (int j = 0; j < oblique; ++j) {
        const Vector v = draw.unit_vector(n);
        const double dist = draw.uniform(0.7, 1.0) * half.minCoeff();
        before.push_back(face(v, -v.dot(x_ref0) - dist));
    }
    const Polytope op_before(before, RegionKind::Operational);

    // x0 on a Lyapunov level set that fits op_before.
    double max_level = std::numeric_limits<double>::infinity();
    for (const auto& h : op_before) {
        const double dist = -h.signed_distance(x_ref0);
        if (dist <= 0.0) return std::nullopt;
        max_level = std::min(max_level, dist * dist / p.inverse_quadratic(h.normal()));
    }
    const Vector dir = draw.unit_vector(n);
    const double level = draw.uniform(0.3, 0.95) * max_level;
    const StateVector x0 = x_ref0 + std::sqrt(level / dir.dot(p.dense() * dir)) * dir;

    SimSettings sim{spec.dt, spec.t_end, Integrator::RK4};
    const double t_change = std::round(draw.uniform(0.05, 0.5) / spec.dt) * spec.dt;
    const long change_steps = std::lround(t_change / spec.dt);
    const StateVector x_t1 = integrate(plant, x_ref0, x0, spec.dt, change_steps).states.back();

    // Reference box containing x_ref0 and lying inside op_before.
    Vector width(n);
    Vector center(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        width(i) = draw.uniform(0.05, 0.25) * half(i);
        center(i) = x_ref0(i) + draw.uniform(-0.9, 0.9) * width(i);
    }
    for (int shrink = 0;; ++shrink) {
        bool inside = true;
        for (const auto& h : op_before) {
            if (h.normal().dot(center) + h.normal().cwiseAbs().dot(width) + h.offset() > 0.0) inside = false;
        }
        if (inside) break;
        if (shrink == 30) return std::nullopt;
        width *= 0.5;
        center = x_ref0 + 0.5 * (center - x_ref0);
    }
    std::vector<HalfSpace> ref_faces;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector e = Vector::Unit(n, i);
        ref_faces.push_back(face(e, -(center(i) + width(i))));
        ref_faces.push_back(face(-e, center(i) - width(i)));
    }
    Polytope ref_region(ref_faces, RegionKind::ReferenceFeasible);

    // op_after: every face pulled toward x_ref0, x(t_change) kept strictly inside.
    const double scale = 1.0 + x_t1.cwiseAbs().maxCoeff();
    for (int tries = 0; tries < kMaxAttempts; ++tries) {
        std::vector<HalfSpace> after;
        bool keeps_state = true;
        for (const auto& h : op_before) {
            const double factor = draw.uniform(spec.shrink_lo, spec.shrink_hi);
            if (factor == 1.0) {
                after.push_back(h);
            } else {
                const double dist = -h.signed_distance(x_ref0);
                after.push_back(face(h.normal(), -h.normal().dot(x_ref0) - factor * dist));
            }
            if (after.back().signed_distance(x_t1) > -1e-6 * scale) keeps_state = false;
        }
        if (!keeps_state) continue;
        try {
            return make_scenario(id, plant, ShapeSource::FromQ, q, x0, x_ref0, ref_region, op_before,
                                 Polytope(after, RegionKind::Operational), t_change, sim);
        } catch (const InputError&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace

std::vector<Scenario> generate_scenarios(const GeneratorSpec& spec, const std::string& prefix) {
    if (spec.n < 2 || spec.n > 10) throw InputError("generate_scenarios: n must be in [2, 10]");
    if (spec.m < 1 || spec.m > spec.n) throw InputError("generate_scenarios: m must be in [1, n]");
    if (spec.count < 0) throw InputError("generate_scenarios: negative count");
    if (!(spec.shrink_lo > 0.0) || spec.shrink_lo > spec.shrink_hi || spec.shrink_hi > 1.0) {
        throw InputError("generate_scenarios: shrink range must satisfy 0 < lo <= hi <= 1");
    }
    if (!(spec.dt > 0.0) || !(spec.t_end > 0.5)) throw InputError("generate_scenarios: need dt > 0, t_end > 0.5");

    std::vector<Scenario> out;
    out.reserve(static_cast<std::size_t>(spec.count));
    for (int i = 0; i < spec.count; ++i) {
        char index[16];
        std::snprintf(index, sizeof index, "%05d", i);
        const std::string id = prefix + "n" + std::to_string(spec.n) + "m" + std::to_string(spec.m) + "-" + index;
        Draw draw(scenario_seed(spec.seed, i));
        std::optional<Scenario> s;
        for (int a = 0; a < kMaxAttempts && !s; ++a) {
            try {
                s = attempt(spec, id, draw);
            } catch (const Error&) {
                s.reset();
            }
        }
        if (!s) throw NumericalError("generate_scenarios: attempt budget exhausted for " + id);
        out.push_back(std::move(*s));
    }
    return out;
}

}  // namespace orsop::sim
