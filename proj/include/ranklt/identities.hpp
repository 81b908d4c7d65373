#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ranklt/grid_paths.hpp"
#include "ranklt/local_time.hpp"
#include "ranklt/rank.hpp"

namespace ranklt {

// Outcome of one identity check on one ensemble. Both sides are cumulative
// paths on the grid; residual[j] = lhs[j] - rhs[j]. rhs is always the
// left-to-right fold of term_paths, so the stored breakdown re-sums to
// lhs - residual bitwise. normalizer is the mean magnitude of lhs across the
// grid, for relative residuals. Checkers of equalities aim at residual == 0;
// checkers of inequalities (norm_bounds) report signed slack as the residual.
struct ResidualReport {
    std::string identity;
    std::vector<double> residual;
    std::vector<double> lhs;
    std::vector<double> rhs;
    double sup_residual = 0.0;
    double terminal_residual = 0.0;
    double normalizer = 0.0;

    std::vector<std::pair<std::string, double>> terms;  // terminal contribution per term
    std::vector<std::vector<double>> term_paths;        // aligned with terms

    // Secondary channel for the decomposition checkers: the same identity with
    // each contribution divided by the occupancy count instead of the left side
    // carrying the count as a weight.
    bool has_divided = false;
    std::vector<double> residual_divided;
    double sup_residual_divided = 0.0;
    double terminal_residual_divided = 0.0;

    std::map<std::string, double> extras;
    nlohmann::json meta;

    void finalize();  // fills sup/terminal/normalizer from the stored paths
    nlohmann::json to_json() const;
};

// Decomposition of the rank-k process (1-based k), occupancy-weighted form:
//   lhs: cumulative sum of N[k] * d(rank-k path)
//   rhs: sum over ranks of 1{rank i meets rank k} d(rank-i path)
//        + script-L terms of the ranked differences (tanaka based)
// The divided channel divides every rhs contribution by the occupancy count
// and compares against the raw rank-k increments.
ResidualReport check_decomposition_ranked(const Ensemble& e, int k, const EpsilonPolicy& policy);

// Same left side, right side written against the original paths, with the
// script-L terms taken as indicator estimates on the positive and negative
// parts of (rank-k minus original-i).
ResidualReport check_decomposition_original(const Ensemble& e, int k, const EpsilonPolicy& policy);

// Sum over ranks of 1{rank-i left state at zero} d(rank-i)^+ versus the same
// sum over original paths.
ResidualReport check_indicator_sum(const Ensemble& e, const EpsilonPolicy& policy);

// Sum of tanaka local times over ranked paths versus over original paths.
ResidualReport check_local_time_sum(const Ensemble& e);

// L(max(X,Y)) + L(min(X,Y)) versus L(X) + L(Y), tanaka based.
ResidualReport check_yan_ouknine(const CadlagPath& x, const CadlagPath& y);

// Indicator sums of positive-part increments of (rank-k minus rank-i) versus
// (rank-k minus original-i). Continuous ensembles only.
ResidualReport check_ranked_diff_indicators(const Ensemble& e, int k, const EpsilonPolicy& policy);

// Indicator sums against the running maximum: ranks versus originals.
// Continuous ensembles only.
ResidualReport check_max_identity(const Ensemble& e, const EpsilonPolicy& policy);

// Inequality chain for local times of |.|-aggregates:
//   L(max|X_i|) <= L(sum|X_i|) <= n * L(max|X_i|)
// plus, for nonnegative continuous ensembles, L(sum X_i) <= n * sum L(X_i).
// residual = L(sum|X_i|) - L(max|X_i|) (the lower slack); the other slacks and
// the sum/max ratio are reported in extras, not asserted here.
ResidualReport check_norm_bounds(const Ensemble& e);

/// Identity ids understood by the harness.
const std::vector<std::string>& identity_ids();

}  // namespace ranklt
