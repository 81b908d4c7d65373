#include "ranklt/identities.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace ranklt {

namespace {

std::size_t path_len(const Ensemble& e) { return static_cast<std::size_t>(e.grid->n_steps) + 1; }

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("identities: " + what);
}

void require_continuous(const Ensemble& e, const char* who) {
    for (int i = 0; i < e.size(); ++i) {
        if (e.path(i).has_jumps())
            throw std::invalid_argument(std::string("identities: ") + who +
                                        " requires continuous paths (path " + std::to_string(i) +
                                        " has jumps)");
    }
}

// Left-to-right fold of cumulative term paths. The order is part of the
// contract: a re-fold of the reported terms in listed order reproduces rhs
// bitwise.
std::vector<double> fold_paths(const std::vector<std::vector<double>>& terms, std::size_t len) {
    std::vector<double> out(len, 0.0);
    for (const auto& t : terms)
        for (std::size_t j = 0; j < len; ++j) out[j] += t[j];
    return out;
}

std::vector<double> subtract(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] - b[j];
    return out;
}

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Occupancy counts of the rank-k level among a family of paths, at node values
// and at left limits separately. Counts are >= 1 (the level path itself is in
// every family passed here).
struct LevelCounts {
    std::vector<int> at_values;
    std::vector<int> at_lefts;
};

LevelCounts level_counts(const std::vector<CadlagPath>& family, const CadlagPath& level,
                         double eps, std::size_t len) {
    LevelCounts c;
    c.at_values.assign(len, 0);
    c.at_lefts.assign(len, 0);
    for (const auto& p : family) {
        for (std::size_t j = 0; j < len; ++j) {
            const int jj = static_cast<int>(j);
            if (std::abs(p.value(jj) - level.value(jj)) <= eps) ++c.at_values[j];
            if (std::abs(p.left_limit(jj) - level.left_limit(jj)) <= eps) ++c.at_lefts[j];
        }
    }
    return c;
}

// Shared state while assembling one decomposition report. Every term records a
// cumulative path and its count-divided twin; rhs comes from folding them.
struct DecompBuild {
    std::size_t len;
    double eps;
    const LevelCounts* counts;
    std::vector<std::pair<std::string, double>> names_and_terminals;
    std::vector<std::vector<double>> paths;
    std::vector<std::vector<double>> paths_div;

    // Indicator term: 1{path meets the level} against the path's increments,
    // state at the previous node for continuous moves, at the left limit for
    // jumps.
    void add_indicator_term(const std::string& name, const CadlagPath& p, const CadlagPath& level) {
        std::vector<double> acc(len, 0.0), accd(len, 0.0);
        double a = 0.0, ad = 0.0;
        for (std::size_t j = 1; j < len; ++j) {
            const int jj = static_cast<int>(j);
            if (std::abs(p.value(jj - 1) - level.value(jj - 1)) <= eps) {
                const double dc = p.cont_increment(jj);
                a += dc;
                ad += dc / counts->at_values[j - 1];
            }
            if (std::abs(p.left_limit(jj) - level.left_limit(jj)) <= eps) {
                // displacement read back from the stored (value, left) pair,
                // so paths built from either factory compare identically
                const double dj = p.value(jj) - p.left_limit(jj);
                a += dj;
                ad += dj / counts->at_lefts[j];
            }
            acc[j] = a;
            accd[j] = ad;
        }
        push(name, std::move(acc), std::move(accd));
    }

    // Signed script-L term of a rank-difference path d (nonnegative by the
    // rank ordering). The two channels estimate it differently on purpose:
    // the weighted channel uses the absolute-value decomposition of d, whose
    // discretization error is genuine and shrinks under refinement; the
    // divided channel uses the band-indicator integral of d, which for a
    // one-signed path is the tight discrete reading of script-L and keeps the
    // reconstruction of the ranked path from drifting.
    void add_tanaka_term(const std::string& name, const CadlagPath& d, double sign) {
        const TanakaSteps ts = tanaka_steps(d, eps);
        std::vector<double> acc(len, 0.0), accd(len, 0.0);
        double a = 0.0, ad = 0.0;
        for (std::size_t j = 1; j < len; ++j) {
            a += sign * 0.5 * ts.dL[j];
            a += sign * ts.corr[j];
            const int jj = static_cast<int>(j);
            if (d.value(jj - 1) <= eps) ad += sign * d.cont_increment(jj) / counts->at_values[j - 1];
            if (d.left_limit(jj) <= eps) ad += sign * d.jump(jj) / counts->at_lefts[j];
            acc[j] = a;
            accd[j] = ad;
        }
        push(name, std::move(acc), std::move(accd));
    }

    // Signed script-L term from the indicator estimator applied to a
    // nonnegative part path.
    void add_indicator_lt_term(const std::string& name, const CadlagPath& part, double sign) {
        std::vector<double> acc(len, 0.0), accd(len, 0.0);
        double a = 0.0, ad = 0.0;
        for (std::size_t j = 1; j < len; ++j) {
            const int jj = static_cast<int>(j);
            if (part.value(jj - 1) <= eps) {
                const double dc = sign * part.cont_increment(jj);
                a += dc;
                ad += dc / counts->at_values[j - 1];
            }
            if (part.left_limit(jj) <= eps) {
                const double dj = sign * part.jump(jj);
                a += dj;
                ad += dj / counts->at_lefts[j];
            }
            acc[j] = a;
            accd[j] = ad;
        }
        push(name, std::move(acc), std::move(accd));
    }

    void push(const std::string& name, std::vector<double> p, std::vector<double> pd) {
        names_and_terminals.emplace_back(name, p.back());
        paths.push_back(std::move(p));
        paths_div.push_back(std::move(pd));
    }
};

// Assemble the two-channel report shared by both decomposition checkers.
ResidualReport finish_decomposition(const std::string& id, const CadlagPath& level,
                                    const LevelCounts& counts, DecompBuild& b, int k,
                                    const EpsilonPolicy& policy) {
    const std::size_t len = b.len;

    ResidualReport r;
    r.identity = id;
    r.lhs.assign(len, 0.0);
    std::vector<double> lhs_div(len, 0.0);
    double a = 0.0, ad = 0.0;
    for (std::size_t j = 1; j < len; ++j) {
        const int jj = static_cast<int>(j);
        const double dc = level.cont_increment(jj);
        const double dj = level.jump(jj);
        a += counts.at_values[j - 1] * dc;
        a += counts.at_lefts[j] * dj;
        ad += dc;
        ad += dj;
        r.lhs[j] = a;
        lhs_div[j] = ad;
    }

    r.rhs = fold_paths(b.paths, len);
    r.residual = subtract(r.lhs, r.rhs);
    r.terms = std::move(b.names_and_terminals);
    r.term_paths = std::move(b.paths);

    r.has_divided = true;
    const std::vector<double> rhs_div = fold_paths(b.paths_div, len);
    r.residual_divided = subtract(lhs_div, rhs_div);

    // Divided-channel reconstruction: start the right side at the initial
    // value and compare against the ranked path itself.
    double recon_err = 0.0;
    const double x0 = level.value(0);
    for (std::size_t j = 0; j < len; ++j)
        recon_err = std::max(recon_err, std::abs(x0 + rhs_div[j] - level.value(static_cast<int>(j))));
    r.extras["recon_sup_err"] = recon_err;

    double sup_level = 0.0;
    for (std::size_t j = 0; j < len; ++j)
        sup_level = std::max(sup_level, std::abs(level.value(static_cast<int>(j))));
    r.extras["sup_abs_ranked"] = sup_level;

    r.meta = {{"k", k}, {"policy", policy.to_json()}};
    r.finalize();
    return r;
}

}  // namespace

void ResidualReport::finalize() {
    sup_residual = sup_abs(residual);
    terminal_residual = residual.empty() ? 0.0 : residual.back();
    double acc = 0.0;
    for (double x : lhs) acc += std::abs(x);
    normalizer = lhs.empty() ? 0.0 : acc / static_cast<double>(lhs.size());
    if (has_divided) {
        sup_residual_divided = sup_abs(residual_divided);
        terminal_residual_divided = residual_divided.empty() ? 0.0 : residual_divided.back();
    }
}

nlohmann::json ResidualReport::to_json() const {
    nlohmann::json terms_json = nlohmann::json::array();
    for (const auto& [name, value] : terms) terms_json.push_back({{"name", name}, {"value", value}});
    nlohmann::json out = {
        {"identity", identity},
        {"sup_residual", sup_residual},
        {"terminal_residual", terminal_residual},
        {"normalizer", normalizer},
        {"rel_residual", normalizer > 0.0 ? sup_residual / normalizer : 0.0},
        {"terms", std::move(terms_json)},
        {"extras", extras},
    };
    if (!meta.is_null()) out["meta"] = meta;
    if (has_divided)
        out["divided"] = {{"sup_residual", sup_residual_divided},
                          {"terminal_residual", terminal_residual_divided}};
    return out;
}

ResidualReport check_decomposition_ranked(const Ensemble& e, int k, const EpsilonPolicy& policy) {
    const int n = e.size();
    require(n >= 1, "empty ensemble");
    require(k >= 1 && k <= n, "rank k out of range");
    const RankedEnsemble R = rank_ensemble(e);
    const int K = k - 1;
    const CadlagPath& level = R.ranked[static_cast<std::size_t>(K)];
    const std::size_t len = path_len(e);
    const double eps = policy.epsilon(*e.grid);
    const LevelCounts counts = level_counts(R.ranked, level, eps, len);

    DecompBuild b{len, eps, &counts, {}, {}, {}};
    for (int i = 0; i < n; ++i)
        b.add_indicator_term("ind_rank_" + std::to_string(i + 1),
                             R.ranked[static_cast<std::size_t>(i)], level);
    // Ranks below k sit under the level: the difference level - ranked_i is
    // nonnegative and its local time enters positively. Ranks above k enter
    // with the opposite sign.
    for (int i = K + 1; i < n; ++i)
        b.add_tanaka_term("lt_pos_rank_" + std::to_string(i + 1),
                          diff_paths(level, R.ranked[static_cast<std::size_t>(i)]), +1.0);
    for (int i = 0; i < K; ++i)
        b.add_tanaka_term("lt_neg_rank_" + std::to_string(i + 1),
                          diff_paths(R.ranked[static_cast<std::size_t>(i)], level), -1.0);

    return finish_decomposition("thm22_ranked", level, counts, b, k, policy);
}

ResidualReport check_decomposition_original(const Ensemble& e, int k, const EpsilonPolicy& policy) {
    const int n = e.size();
    require(n >= 1, "empty ensemble");
    require(k >= 1 && k <= n, "rank k out of range");
    const RankedEnsemble R = rank_ensemble(e);
    const CadlagPath& level = R.ranked[static_cast<std::size_t>(k - 1)];
    const std::size_t len = path_len(e);
    const double eps = policy.epsilon(*e.grid);
    const LevelCounts counts = level_counts(e.paths, level, eps, len);

    DecompBuild b{len, eps, &counts, {}, {}, {}};
    for (int i = 0; i < n; ++i)
        b.add_indicator_term("ind_orig_" + std::to_string(i + 1), e.path(i), level);
    // Against original paths the sign of level - X_i is not fixed, so both
    // one-sided local times appear: the positive part pushes the level up
    // through the crowd, the negative part pulls it down.
    for (int i = 0; i < n; ++i) {
        const CadlagPath d = diff_paths(level, e.path(i));
        b.add_indicator_lt_term("lt_pos_orig_" + std::to_string(i + 1), pos_part(d), +1.0);
        b.add_indicator_lt_term("lt_neg_orig_" + std::to_string(i + 1), neg_part(d), -1.0);
    }

    return finish_decomposition("thm22_original", level, counts, b, k, policy);
}

ResidualReport check_indicator_sum(const Ensemble& e, const EpsilonPolicy& policy) {
    const int n = e.size();
    require(n >= 1, "empty ensemble");
    const RankedEnsemble R = rank_ensemble(e);
    const std::size_t len = path_len(e);
    const double eps = policy.epsilon(*e.grid);

    // 1{path in the zero band} against the increments of its positive part;
    // the band is two-sided, the integrand one-sided.
    const auto side_term = [&](const CadlagPath& x) {
        const CadlagPath p = pos_part(x);
        std::vector<double> acc(len, 0.0);
        double a = 0.0;
        for (std::size_t j = 1; j < len; ++j) {
            const int jj = static_cast<int>(j);
            if (std::abs(x.value(jj - 1)) <= eps) a += p.cont_increment(jj);
            if (std::abs(x.left_limit(jj)) <= eps) a += p.jump(jj);
            acc[j] = a;
        }
        return acc;
    };

    std::vector<std::vector<double>> lhs_terms, rhs_terms;
    for (int i = 0; i < n; ++i) lhs_terms.push_back(side_term(R.ranked[static_cast<std::size_t>(i)]));
    for (int i = 0; i < n; ++i) rhs_terms.push_back(side_term(e.path(i)));

    ResidualReport r;
    r.identity = "thm31_indicator";
    r.lhs = fold_paths(lhs_terms, len);
    r.rhs = fold_paths(rhs_terms, len);
    r.residual = subtract(r.lhs, r.rhs);
    for (int i = 0; i < n; ++i) {
        r.terms.emplace_back("orig_" + std::to_string(i + 1), rhs_terms[static_cast<std::size_t>(i)].back());
        r.term_paths.push_back(std::move(rhs_terms[static_cast<std::size_t>(i)]));
    }
    r.meta = {{"policy", policy.to_json()}};
    r.finalize();
    return r;
}

ResidualReport check_local_time_sum(const Ensemble& e) {
    const int n = e.size();
    require(n >= 1, "empty ensemble");
    const RankedEnsemble R = rank_ensemble(e);
    const std::size_t len = path_len(e);

    std::vector<std::vector<double>> lhs_terms, rhs_terms;
    for (int i = 0; i < n; ++i)
        lhs_terms.push_back(tanaka_local_time(R.ranked[static_cast<std::size_t>(i)]).L);
    for (int i = 0; i < n; ++i) rhs_terms.push_back(tanaka_local_time(e.path(i)).L);

    ResidualReport r;
    r.identity = "thm32_ltsum";
    r.lhs = fold_paths(lhs_terms, len);
    r.rhs = fold_paths(rhs_terms, len);
    r.residual = subtract(r.lhs, r.rhs);
    for (int i = 0; i < n; ++i) {
        r.terms.emplace_back("L_orig_" + std::to_string(i + 1), rhs_terms[static_cast<std::size_t>(i)].back());
        r.term_paths.push_back(std::move(rhs_terms[static_cast<std::size_t>(i)]));
    }
    r.meta = {{"estimator", "tanaka"}};
    r.finalize();
    return r;
}

ResidualReport check_yan_ouknine(const CadlagPath& x, const CadlagPath& y) {
    require(x.grid().same_shape(y.grid()), "paths on different grids");
    const std::size_t len = static_cast<std::size_t>(x.n_steps()) + 1;

    std::vector<std::vector<double>> lhs_terms, rhs_terms;
    lhs_terms.push_back(tanaka_local_time(pmax(x, y)).L);
    lhs_terms.push_back(tanaka_local_time(pmin(x, y)).L);
    rhs_terms.push_back(tanaka_local_time(x).L);
    rhs_terms.push_back(tanaka_local_time(y).L);

    ResidualReport r;
    r.identity = "cor33_yan_ouknine";
    r.lhs = fold_paths(lhs_terms, len);
    r.rhs = fold_paths(rhs_terms, len);
    r.residual = subtract(r.lhs, r.rhs);
    r.extras["L_max_T"] = lhs_terms[0].back();
    r.extras["L_min_T"] = lhs_terms[1].back();
    r.terms.emplace_back("L_x", rhs_terms[0].back());
    r.terms.emplace_back("L_y", rhs_terms[1].back());
    r.term_paths.push_back(std::move(rhs_terms[0]));
    r.term_paths.push_back(std::move(rhs_terms[1]));
    r.finalize();
    return r;
}

ResidualReport check_ranked_diff_indicators(const Ensemble& e, int k, const EpsilonPolicy& policy) {
    const int n = e.size();
    require(n >= 1, "empty ensemble");
    require(k >= 1 && k <= n, "rank k out of range");
    require_continuous(e, "ranked-difference indicator comparison");
    const RankedEnsemble R = rank_ensemble(e);
    const CadlagPath& level = R.ranked[static_cast<std::size_t>(k - 1)];
    const std::size_t len = path_len(e);
    const double eps = policy.epsilon(*e.grid);

    // 1{difference in the zero band at the previous node} against the
    // increments of the difference's positive part. Inputs are continuous by
    // precondition, so there is no jump leg.
    const auto side_term = [&](const CadlagPath& other) {
        const CadlagPath d = diff_paths(level, other);
        const CadlagPath p = pos_part(d);
        std::vector<double> acc(len, 0.0);
        double a = 0.0;
        for (std::size_t j = 1; j < len; ++j) {
            const int jj = static_cast<int>(j);
            if (std::abs(d.value(jj - 1)) <= eps) a += p.cont_increment(jj);
            acc[j] = a;
        }
        return acc;
    };

    std::vector<std::vector<double>> lhs_terms, rhs_terms;
    for (int i = 0; i < n; ++i) lhs_terms.push_back(side_term(R.ranked[static_cast<std::size_t>(i)]));
    for (int i = 0; i < n; ++i) rhs_terms.push_back(side_term(e.path(i)));

    ResidualReport r;
    r.identity = "cor31_ranked_diff";
    r.lhs = fold_paths(lhs_terms, len);
    r.rhs = fold_paths(rhs_terms, len);
    r.residual = subtract(r.lhs, r.rhs);
    for (int i = 0; i < n; ++i) {
        r.terms.emplace_back("orig_diff_" + std::to_string(i + 1),
                             rhs_terms[static_cast<std::size_t>(i)].back());
        r.term_paths.push_back(std::move(rhs_terms[static_cast<std::size_t>(i)]));
    }
    r.meta = {{"k", k}, {"policy", policy.to_json()}};
    r.finalize();
    return r;
}

ResidualReport check_max_identity(const Ensemble& e, const EpsilonPolicy& policy) {
    const int n = e.size();
    require(n >= 1, "empty ensemble");
    require_continuous(e, "running-max identity");
    const RankedEnsemble R = rank_ensemble(e);
    const CadlagPath& top = R.ranked[0];
    const std::size_t len = path_len(e);
    const double eps = policy.epsilon(*e.grid);

    const auto side_term = [&](const CadlagPath& x) {
        std::vector<double> acc(len, 0.0);
        double a = 0.0;
        for (std::size_t j = 1; j < len; ++j) {
            const int jj = static_cast<int>(j);
            if (std::abs(x.value(jj - 1) - top.value(jj - 1)) <= eps) a += x.cont_increment(jj);
            acc[j] = a;
        }
        return acc;
    };

    std::vector<std::vector<double>> lhs_terms, rhs_terms;
    for (int i = 0; i < n; ++i) lhs_terms.push_back(side_term(R.ranked[static_cast<std::size_t>(i)]));
    for (int i = 0; i < n; ++i) rhs_terms.push_back(side_term(e.path(i)));

    ResidualReport r;
    r.identity = "rem21_max";
    r.lhs = fold_paths(lhs_terms, len);
    r.rhs = fold_paths(rhs_terms, len);
    r.residual = subtract(r.lhs, r.rhs);
    for (int i = 0; i < n; ++i) {
        r.terms.emplace_back("orig_" + std::to_string(i + 1), rhs_terms[static_cast<std::size_t>(i)].back());
        r.term_paths.push_back(std::move(rhs_terms[static_cast<std::size_t>(i)]));
    }
    r.meta = {{"policy", policy.to_json()}};
    r.finalize();
    return r;
}

ResidualReport check_norm_bounds(const Ensemble& e) {
    const int n = e.size();
    require(n >= 1, "empty ensemble");

    std::vector<CadlagPath> abs_paths;
    abs_paths.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) abs_paths.push_back(abs_path(e.path(i)));
    std::vector<const CadlagPath*> ptrs;
    for (const auto& p : abs_paths) ptrs.push_back(&p);

    const CadlagPath max_abs = pointwise(PointwiseOp::Max, ptrs);
    const CadlagPath sum_abs = pointwise(PointwiseOp::Sum, ptrs);
    std::vector<double> L_max = tanaka_local_time(max_abs).L;
    std::vector<double> L_sum = tanaka_local_time(sum_abs).L;

    ResidualReport r;
    r.identity = "norm_bounds";
    // residual = L(sum) - L(max): the lower slack of the chain, expected >= 0.
    r.lhs = L_sum;
    r.rhs = L_max;
    r.residual = subtract(r.lhs, r.rhs);
    const double lmax_T = L_max.back();
    const double lsum_T = L_sum.back();
    r.extras["slack_lower_T"] = lsum_T - lmax_T;
    r.extras["slack_upper_T"] = static_cast<double>(n) * lmax_T - lsum_T;
    if (lmax_T > 0.0) r.extras["ratio_sum_over_max"] = lsum_T / lmax_T;

    // With nonnegative continuous paths the plain sum is its own |.|-sum, and
    // a second chain links it to the individual local times.
    bool nonneg_continuous = true;
    for (int i = 0; i < n && nonneg_continuous; ++i) {
        const CadlagPath& p = e.path(i);
        if (p.has_jumps()) nonneg_continuous = false;
        for (double v : p.values())
            if (v < 0.0) {
                nonneg_continuous = false;
                break;
            }
    }
    r.extras["cor22_applicable"] = nonneg_continuous ? 1.0 : 0.0;
    if (nonneg_continuous) {
        std::vector<const CadlagPath*> orig_ptrs;
        for (int i = 0; i < n; ++i) orig_ptrs.push_back(&e.path(i));
        const double L_plain_sum_T = tanaka_local_time(sum_paths(orig_ptrs)).L.back();
        double sum_L_T = 0.0;
        for (int i = 0; i < n; ++i) sum_L_T += tanaka_local_time(e.path(i)).L.back();
        r.extras["cor22_slack_T"] = static_cast<double>(n) * sum_L_T - L_plain_sum_T;
    }

    r.terms.emplace_back("L_max_abs", lmax_T);
    r.term_paths.push_back(std::move(L_max));
    r.meta = {{"n", n}};
    r.finalize();
    return r;
}

const std::vector<std::string>& identity_ids() {
    static const std::vector<std::string> ids = {
        "thm22_ranked",   "thm22_original", "thm31_indicator",  "thm32_ltsum",
        "cor33_yan_ouknine", "cor31_ranked_diff", "rem21_max", "norm_bounds",
    };
    return ids;
}

}  // namespace ranklt
