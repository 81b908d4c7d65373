#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ranklt/grid_paths.hpp"

namespace ranklt {

enum class ModelKind { Brownian, AffineDiffusion, JumpDiffusion, LatticeWalk, Fixture };

std::string model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

struct JumpLaw {
    enum class Kind { Fixed, Normal } kind = Kind::Fixed;
    double size = 1.0;  // fixed law
    double mean = 0.0;  // normal law
    double sd = 1.0;    // normal law
};

// Model parameters. Drift is a + b*x, volatility is c + d*x (Euler scheme).
// Correlation uses one common factor: Z_i = sqrt(rho) * W + sqrt(1 - rho) * xi_i,
// which restricts rho to [0, 1]. x0 holds one entry per path, or a single
// entry broadcast to every path.
struct ModelSpec {
    ModelKind kind = ModelKind::Brownian;
    std::vector<double> x0 = {0.0};
    double drift_a = 0.0;
    double drift_b = 0.0;
    double vol_c = 1.0;
    double vol_d = 0.0;
    double rho = 0.0;
    double jump_intensity = 0.0;       // expected jumps per unit time
    JumpLaw jump_law;
    double lattice_h = 0.0625;         // lattice_walk step size
    std::string fixture;               // fixture name when kind == Fixture

    void validate(int n_paths) const;  // throws std::invalid_argument
    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& j);
};

// Deterministic stream assignment: the RNG stream for a path depends only on
// (master_seed, path index, replication index), never on thread or evaluation
// order. The common correlation factor uses a reserved stream id.
struct SeedPolicy {
    std::uint64_t master_seed = 0;
    static constexpr std::uint64_t kCommonFactorStream = ~std::uint64_t{0};
    std::uint64_t stream(std::uint64_t path, std::uint64_t replication) const;
};

/// Simulate n_paths paths of the model on the grid. For kind == Fixture the
/// fixture defines its own path count and n_paths is ignored.
Ensemble simulate(const ModelSpec& spec, GridPtr grid, int n_paths, const SeedPolicy& seeds,
                  std::uint64_t replication = 0);

// Deterministic test ensembles. Names:
//   sawtooth_cross   one path 1 -> -1 -> 1, zero hit exactly at grid points
//                    (n_steps divisible by 4)
//   triple_point     three lines through zero at t = T/2 (n_steps even)
//   pinned_zero      one path identically zero
//   separated_cross  three paths; one touches zero on [T/4, 3T/4] while the
//                    others stay at distance >= 1 (n_steps divisible by 4)
//   jump_from_zero   one path resting at zero, jumping to 1 at t = T/2
//                    (n_steps even)
Ensemble fixture(const std::string& name, GridPtr grid);

}  // namespace ranklt
