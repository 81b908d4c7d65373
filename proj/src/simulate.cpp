#include "ranklt/simulate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ranklt {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Per-stream generator. Normal draws use a cache-free Box-Muller transform so
// every draw consumes exactly two 64-bit words; the draw count per step is
// then fixed, which keeps streams reproducible independent of call sites.
struct RngStream {
    std::mt19937_64 gen;
    explicit RngStream(std::uint64_t seed) : gen(seed) {}

    double uniform01() {  // [0, 1)
        return static_cast<double>(gen() >> 11) * 0x1.0p-53;
    }
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0, 1]: keeps log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }
    bool coin() { return (gen() >> 63) != 0; }
    int poisson(double mean) {  // Knuth multiplication method; mean is small here
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01();
        } while (p > limit);
        return k - 1;
    }
};

}  // namespace

std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::Brownian: return "brownian";
        case ModelKind::AffineDiffusion: return "affine_diffusion";
        case ModelKind::JumpDiffusion: return "jump_diffusion";
        case ModelKind::LatticeWalk: return "lattice_walk";
        case ModelKind::Fixture: return "fixture";
    }
    throw std::logic_error("model_kind_name: unreachable");
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "brownian") return ModelKind::Brownian;
    if (name == "affine_diffusion") return ModelKind::AffineDiffusion;
    if (name == "jump_diffusion") return ModelKind::JumpDiffusion;
    if (name == "lattice_walk") return ModelKind::LatticeWalk;
    if (name == "fixture") return ModelKind::Fixture;
    throw std::invalid_argument("unknown model kind: " + name);
}

void ModelSpec::validate(int n_paths) const {
    if (kind == ModelKind::Fixture) {
        require(!fixture.empty(), "ModelSpec: fixture kind needs a fixture name");
        return;
    }
    require(n_paths >= 1, "ModelSpec: n_paths must be >= 1");
    require(!x0.empty(), "ModelSpec: x0 must have at least one entry");
    require(x0.size() == 1 || x0.size() == static_cast<size_t>(n_paths),
            "ModelSpec: x0 must hold one entry or one entry per path");
    for (double v : x0) require(std::isfinite(v), "ModelSpec: x0 entries must be finite");
    require(rho >= 0.0 && rho <= 1.0,
            "ModelSpec: rho must lie in [0, 1] (single common-factor correlation)");
    require(jump_intensity >= 0.0, "ModelSpec: jump intensity must be >= 0");
    if (kind == ModelKind::LatticeWalk)
        require(lattice_h > 0.0, "ModelSpec: lattice step h must be > 0");
    if (jump_law.kind == JumpLaw::Kind::Normal)
        require(jump_law.sd >= 0.0, "ModelSpec: jump law sd must be >= 0");
}

nlohmann::json ModelSpec::to_json() const {
    nlohmann::json j;
    j["kind"] = model_kind_name(kind);
    j["x0"] = x0;
    j["a"] = drift_a;
    j["b"] = drift_b;
    j["c"] = vol_c;
    j["d"] = vol_d;
    j["rho"] = rho;
    j["lambda"] = jump_intensity;
    if (jump_law.kind == JumpLaw::Kind::Fixed)
        j["jump"] = {{"law", "fixed"}, {"size", jump_law.size}};
    else
        j["jump"] = {{"law", "normal"}, {"mean", jump_law.mean}, {"sd", jump_law.sd}};
    j["h"] = lattice_h;
    j["fixture"] = fixture;
    return j;
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
    ModelSpec s;
    require(j.is_object(), "ModelSpec: expected a JSON object");
    require(j.contains("kind"), "ModelSpec: missing key 'kind'");
    s.kind = model_kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("x0")) {
        if (j.at("x0").is_array())
            s.x0 = j.at("x0").get<std::vector<double>>();
        else
            s.x0 = {j.at("x0").get<double>()};
    }
    s.drift_a = j.value("a", 0.0);
    s.drift_b = j.value("b", 0.0);
    s.vol_c = j.value("c", 1.0);
    s.vol_d = j.value("d", 0.0);
    s.rho = j.value("rho", 0.0);
    s.jump_intensity = j.value("lambda", 0.0);
    if (j.contains("jump")) {
        const auto& jl = j.at("jump");
        const std::string law = jl.value("law", "fixed");
        if (law == "fixed") {
            s.jump_law.kind = JumpLaw::Kind::Fixed;
            s.jump_law.size = jl.value("size", 1.0);
        } else if (law == "normal") {
            s.jump_law.kind = JumpLaw::Kind::Normal;
            s.jump_law.mean = jl.value("mean", 0.0);
            s.jump_law.sd = jl.value("sd", 1.0);
        } else {
            throw std::invalid_argument("ModelSpec: unknown jump law: " + law);
        }
    }
    s.lattice_h = j.value("h", 0.0625);
    s.fixture = j.value("fixture", std::string{});
    return s;
}

std::uint64_t SeedPolicy::stream(std::uint64_t path, std::uint64_t replication) const {
    std::uint64_t h = splitmix64(master_seed ^ 0xd1b54a32d192ed03ULL);
    h = splitmix64(h ^ (path * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL));
    h = splitmix64(h ^ (replication * 0xbf58476d1ce4e5b9ULL + 0x27d4eb2f165667c5ULL));
    return h;
}

namespace {

std::vector<std::string> default_labels(int n) {
    std::vector<std::string> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) out.push_back("x" + std::to_string(i));
    return out;
}

}  // namespace

Ensemble simulate(const ModelSpec& spec, GridPtr grid, int n_paths, const SeedPolicy& seeds,
                  std::uint64_t replication) {
    require(grid != nullptr, "simulate: null grid");
    spec.validate(n_paths);

    if (spec.kind == ModelKind::Fixture) {
        Ensemble e = fixture(spec.fixture, std::move(grid));
        e.params = spec.to_json();
        e.seed = seeds.master_seed;
        return e;
    }

    const int n = grid->n_steps;
    const double dt = grid->dt;
    const double sqdt = std::sqrt(dt);

    // Correlation factor drawn once from its own stream so that path streams
    // stay independent of each other and of the path count.
    std::vector<double> common;
    const bool correlated = spec.rho > 0.0 &&
                            (spec.kind == ModelKind::Brownian ||
                             spec.kind == ModelKind::AffineDiffusion ||
                             spec.kind == ModelKind::JumpDiffusion);
    if (correlated) {
        RngStream cg(seeds.stream(SeedPolicy::kCommonFactorStream, replication));
        common.resize(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) common[static_cast<size_t>(j)] = cg.normal();
    }
    const double w_common = correlated ? std::sqrt(spec.rho) : 0.0;
    const double w_own = correlated ? std::sqrt(1.0 - spec.rho) : 1.0;

    Ensemble e;
    e.grid = grid;
    e.model = model_kind_name(spec.kind);
    e.params = spec.to_json();
    e.seed = seeds.master_seed;
    e.labels = default_labels(n_paths);
    e.paths.reserve(static_cast<size_t>(n_paths));

    for (int i = 0; i < n_paths; ++i) {
        RngStream g(seeds.stream(static_cast<std::uint64_t>(i), replication));
        const double x0 = spec.x0.size() == 1 ? spec.x0[0] : spec.x0[static_cast<size_t>(i)];
        std::vector<double> values(static_cast<size_t>(n) + 1);
        std::vector<double> jumps(static_cast<size_t>(n) + 1, 0.0);
        values[0] = x0;

        switch (spec.kind) {
            case ModelKind::Brownian: {
                for (int j = 1; j <= n; ++j) {
                    double z = g.normal();
                    if (correlated) z = w_common * common[static_cast<size_t>(j - 1)] + w_own * z;
                    values[static_cast<size_t>(j)] =
                        values[static_cast<size_t>(j - 1)] + spec.vol_c * sqdt * z;
                }
                break;
            }
            case ModelKind::AffineDiffusion:
            case ModelKind::JumpDiffusion: {
                const bool with_jumps = spec.kind == ModelKind::JumpDiffusion;
                const double mean_per_step = spec.jump_intensity * dt;
                for (int j = 1; j <= n; ++j) {
                    const double v = values[static_cast<size_t>(j - 1)];
                    double z = g.normal();
                    if (correlated) z = w_common * common[static_cast<size_t>(j - 1)] + w_own * z;
                    const double left =
                        v + (spec.drift_a + spec.drift_b * v) * dt +
                        (spec.vol_c + spec.vol_d * v) * sqdt * z;
                    double jump = 0.0;
                    if (with_jumps) {
                        const int count = g.poisson(mean_per_step);
                        if (spec.jump_law.kind == JumpLaw::Kind::Fixed) {
                            for (int c = 0; c < count; ++c) jump += spec.jump_law.size;
                        } else {
                            for (int c = 0; c < count; ++c)
                                jump += spec.jump_law.mean + spec.jump_law.sd * g.normal();
                        }
                    }
                    jumps[static_cast<size_t>(j)] = jump;
                    values[static_cast<size_t>(j)] = left + jump;
                }
                break;
            }
            case ModelKind::LatticeWalk: {
                for (int j = 1; j <= n; ++j) {
                    const double step = g.coin() ? spec.lattice_h : -spec.lattice_h;
                    values[static_cast<size_t>(j)] = values[static_cast<size_t>(j - 1)] + step;
                }
                break;
            }
            case ModelKind::Fixture:
                throw std::logic_error("simulate: fixture handled above");
        }
        e.paths.push_back(CadlagPath::from_values_jumps(grid, std::move(values), std::move(jumps)));
    }
    return e;
}

namespace {

Ensemble make_fixture_ensemble(GridPtr grid, std::string name,
                               std::vector<CadlagPath> paths) {
    Ensemble e;
    e.grid = std::move(grid);
    e.model = "fixture:" + name;
    e.params = {{"kind", "fixture"}, {"fixture", name}};
    e.labels = default_labels(static_cast<int>(paths.size()));
    e.paths = std::move(paths);
    return e;
}

}  // namespace

Ensemble fixture(const std::string& name, GridPtr grid) {
    require(grid != nullptr, "fixture: null grid");
    const int n = grid->n_steps;
    const size_t len = static_cast<size_t>(n) + 1;

    if (name == "sawtooth_cross") {
        require(n % 4 == 0, "fixture sawtooth_cross: n_steps must be divisible by 4");
        std::vector<double> v(len);
        for (int j = 0; j <= n; ++j) {
            // 1 -> -1 over the first half, back to 1 over the second, so the
            // path sits exactly at 0 at t = T/4 and t = 3T/4.
            v[static_cast<size_t>(j)] =
                j <= n / 2 ? 1.0 - (4.0 * j) / n : (4.0 * j) / n - 3.0;
        }
        return make_fixture_ensemble(grid, name, {CadlagPath::continuous(grid, std::move(v))});
    }
    if (name == "triple_point") {
        require(n % 2 == 0, "fixture triple_point: n_steps must be even");
        std::vector<double> p1(len), p2(len), p3(len);
        for (int j = 0; j <= n; ++j) {
            const double s = static_cast<double>(j) / n;
            p1[static_cast<size_t>(j)] = s - 0.5;
            p2[static_cast<size_t>(j)] = 0.5 - s;
            p3[static_cast<size_t>(j)] = 2.0 * s - 1.0;
        }
        std::vector<CadlagPath> paths;
        paths.push_back(CadlagPath::continuous(grid, std::move(p1)));
        paths.push_back(CadlagPath::continuous(grid, std::move(p2)));
        paths.push_back(CadlagPath::continuous(grid, std::move(p3)));
        return make_fixture_ensemble(grid, name, std::move(paths));
    }
    if (name == "pinned_zero") {
        std::vector<double> v(len, 0.0);
        return make_fixture_ensemble(grid, name, {CadlagPath::continuous(grid, std::move(v))});
    }
    if (name == "separated_cross") {
        require(n % 4 == 0, "fixture separated_cross: n_steps must be divisible by 4");
        std::vector<double> p1(len), p2(len), p3(len);
        const int q = n / 4;
        for (int j = 0; j <= n; ++j) {
            double v;
            if (j < q)
                v = 0.5 * static_cast<double>(q - j) / q;   // 0.5 down to 0
            else if (j <= 3 * q)
                v = 0.0;                                    // resting at zero
            else
                v = 0.5 * static_cast<double>(j - 3 * q) / q;  // 0 back up to 0.5
            p1[static_cast<size_t>(j)] = v;
            p2[static_cast<size_t>(j)] = 2.0;
            p3[static_cast<size_t>(j)] = -2.0;
        }
        std::vector<CadlagPath> paths;
        paths.push_back(CadlagPath::continuous(grid, std::move(p1)));
        paths.push_back(CadlagPath::continuous(grid, std::move(p2)));
        paths.push_back(CadlagPath::continuous(grid, std::move(p3)));
        return make_fixture_ensemble(grid, name, std::move(paths));
    }
    if (name == "jump_from_zero") {
        require(n % 2 == 0, "fixture jump_from_zero: n_steps must be even");
        std::vector<double> v(len, 0.0), jp(len, 0.0);
        for (int j = n / 2; j <= n; ++j) v[static_cast<size_t>(j)] = 1.0;
        jp[static_cast<size_t>(n / 2)] = 1.0;
        return make_fixture_ensemble(
            grid, name, {CadlagPath::from_values_jumps(grid, std::move(v), std::move(jp))});
    }
    throw std::invalid_argument("fixture: unknown fixture name: " + name);
}

}  // namespace ranklt
