#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ranklt/identities.hpp"
#include "ranklt/persist.hpp"
#include "ranklt/rank.hpp"
#include "ranklt/simulate.hpp"

namespace ranklt {

// One experiment = one model + grid + policy + identity list, optionally swept
// over grid resolutions. The JSON document is the source of truth; CLI flags
// override individual keys after parsing.
struct ExperimentConfig {
    ModelSpec model;
    double T = 1.0;
    int n_steps = 256;
    int n_paths = 1;
    int replications = 1;
    std::uint64_t master_seed = 1;
    EpsilonPolicy policy = EpsilonPolicy::exact();
    std::string estimator = "tanaka";     // tanaka | indicator | occupation | crossing
    std::vector<std::string> identities;  // ids from identity_ids()
    int rank_k = 1;                       // k used by the rank-k checkers
    std::vector<int> sweep;               // optional n_steps ladder, strictly increasing
    bool save_paths = false;
    std::string out_dir = "out";
    int workers = 0;                      // 0 = hardware concurrency
    std::map<std::string, double> thresholds;  // identity -> max rel_residual at finest level

    void validate() const;  // throws std::invalid_argument
    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& file);

    /// Resolutions actually run: the sweep ladder, or {n_steps} if none.
    std::vector<int> levels() const;
};

// Run fn(0..n-1) on a small thread pool. Work items must not touch shared
// mutable state; results must go into per-index slots so that the caller can
// reduce them in a fixed order afterwards. Determinism contract: the visible
// outcome is independent of the worker count.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

// Everything run_experiment produces, before any file is written.
struct RunResult {
    std::vector<SummaryRow> rows;  // level-major, identity order as configured
    // Reports of replication 0 at the finest level, one per identity.
    std::vector<ResidualReport> reports;
    // Replication-0 ensembles per level, kept only when save_paths is set.
    std::vector<Ensemble> saved_ensembles;
    std::vector<int> saved_levels;
    bool thresholds_ok = true;
};

/// Evaluate one identity on one ensemble, using the config's policy and rank k.
ResidualReport run_identity(const std::string& id, const Ensemble& e, const ExperimentConfig& cfg);

/// Pure part of `verify`/`sweep`: simulate, check, aggregate. No file output.
RunResult run_experiment(const ExperimentConfig& cfg);

// Full `verify` pipeline: run, then write summary.csv, per-identity report
// JSON + residual CSV, resolved config.json, and (with save_paths) ensemble
// files into out_dir. Returns 0, or 2 when a configured threshold fails.
int run_and_write(const ExperimentConfig& cfg);

// Least-squares slope of log(mean_sup_residual) against log(dt) across the
// rows of one identity. Needs >= 3 levels and positive residuals.
double sweep_rate(const std::vector<SummaryRow>& rows_one_identity);

}  // namespace ranklt
