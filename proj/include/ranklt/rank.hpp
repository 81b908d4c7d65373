#pragma once

#include <cstdint>
#include <vector>

#include "ranklt/grid_paths.hpp"

namespace ranklt {

// Tie / coincidence detection policy. Exact mode tests floating equality
// (epsilon = 0); band mode widens the test to |x - y| <= c * sqrt(dt).
struct EpsilonPolicy {
    enum class Mode { Exact, Band } mode = Mode::Exact;
    double band_coeff = 0.5;

    static EpsilonPolicy exact() { return {Mode::Exact, 0.0}; }
    static EpsilonPolicy band(double c = 0.5) { return {Mode::Band, c}; }

    double epsilon(const TimeGrid& grid) const;
    nlohmann::json to_json() const;
    static EpsilonPolicy from_json(const nlohmann::json& j);
    /// Parse "exact", "band", or "band:<c>" (the CLI flag syntax).
    static EpsilonPolicy parse(const std::string& s);
};

// Rank processes in descending order: ranked[0] is the running maximum path,
// ranked[n-1] the running minimum. perm[k][j] is the original index holding
// rank k+1 at t_j when ordering by values; left_perm[k][j] orders by left
// limits. Ties go to the smaller original index. Ranked paths store ranked
// values and ranked left limits; their jumps are value minus left limit.
struct RankedEnsemble {
    GridPtr grid;
    std::vector<CadlagPath> ranked;
    std::vector<std::vector<int>> perm;
    std::vector<std::vector<int>> left_perm;

    int size() const { return static_cast<int>(ranked.size()); }
};

RankedEnsemble rank_ensemble(const Ensemble& e);

/// Wrap ranked paths back into an ensemble (labels rank_1..rank_n).
Ensemble as_ensemble(const RankedEnsemble& r);

// Occupancy of each rank level, computed from left limits: count[k][j] is the
// number of original paths within epsilon of the rank-(k+1) left limit at t_j,
// members[k][j] the corresponding index set as a bitmask (bit i = path i).
// Requires n <= 64.
struct RankOccupancy {
    std::vector<std::vector<int>> count;
    std::vector<std::vector<std::uint64_t>> members;
};

RankOccupancy occupancy(const Ensemble& e, const EpsilonPolicy& policy);

}  // namespace ranklt
