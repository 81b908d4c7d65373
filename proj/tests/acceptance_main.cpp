// End-to-end acceptance gate. Each numbered block prints exactly one line:
//   [PASS] NN name: details
//   [FAIL] NN name: details
// and the process exits nonzero if any block failed. Tolerances are pinned
// here, next to the checks that use them, so a regression shows up as a
// changed number in the output rather than a silently moved goalpost.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ranklt/harness.hpp"
#include "ranklt/identities.hpp"
#include "ranklt/local_time.hpp"
#include "ranklt/persist.hpp"
#include "ranklt/rank.hpp"
#include "ranklt/simulate.hpp"

using namespace ranklt;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int num, const std::string& name, const std::vector<std::string>& problems,
            const std::string& details) {
    const bool ok = problems.empty();
    if (!ok) ++g_failures;
    std::string line = ok ? details : problems.front();
    if (!ok && problems.size() > 1)
        line += " (+" + std::to_string(problems.size() - 1) + " more)";
    std::printf("[%s] %02d %s: %s\n", ok ? "PASS" : "FAIL", num, name.c_str(), line.c_str());
    std::fflush(stdout);
}

struct Stats {
    double mean = 0.0;
    double se = 0.0;
};

Stats stats(const std::vector<double>& v) {
    Stats s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() < 2) return s;
    double acc = 0.0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(acc / static_cast<double>(v.size() - 1) /
                     static_cast<double>(v.size()));
    return s;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

bool bits_equal(std::span<const double> a, std::span<const double> b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// ---------------------------------------------------------------------------

void criterion_1() {
    // One path: order statistics coincide with the path and each identity is
    // an arithmetic tautology. Every checker must return an exactly zero
    // residual, on continuous and on jumpy input, in both tie policies.
    std::vector<std::string> problems;
    ModelSpec cont;
    ModelSpec jumpy;
    jumpy.kind = ModelKind::JumpDiffusion;
    jumpy.jump_intensity = 4.0;
    jumpy.jump_law.kind = JumpLaw::Kind::Normal;
    jumpy.jump_law.sd = 0.6;

    int checked = 0;
    for (int model = 0; model < 2; ++model) {
        auto e = simulate(model == 0 ? cont : jumpy, make_grid(1.0, 256), 1, {101});
        const bool has_jumps = e.path(0).has_jumps();
        if (model == 1 && !has_jumps) {
            problems.push_back("jump model produced no jumps; seed needs changing");
            continue;
        }
        for (const auto& policy : {EpsilonPolicy::exact(), EpsilonPolicy::band(0.5)}) {
            for (const auto& id : identity_ids()) {
                if (has_jumps && (id == "cor31_ranked_diff" || id == "rem21_max")) continue;
                ResidualReport r;
                if (id == "thm22_ranked") r = check_decomposition_ranked(e, 1, policy);
                else if (id == "thm22_original") r = check_decomposition_original(e, 1, policy);
                else if (id == "thm31_indicator") r = check_indicator_sum(e, policy);
                else if (id == "thm32_ltsum") r = check_local_time_sum(e);
                else if (id == "cor33_yan_ouknine") r = check_yan_ouknine(e.path(0), e.path(0));
                else if (id == "cor31_ranked_diff") r = check_ranked_diff_indicators(e, 1, policy);
                else if (id == "rem21_max") r = check_max_identity(e, policy);
                else r = check_norm_bounds(e);
                ++checked;
                if (r.sup_residual != 0.0)
                    problems.push_back(id + " on " + (model ? "jumpy" : "continuous") +
                                       " path: sup residual " + fmt(r.sup_residual));
                if (r.has_divided && r.sup_residual_divided != 0.0)
                    problems.push_back(id + " divided channel: " + fmt(r.sup_residual_divided));
            }
        }
    }
    report(1, "degenerate-exactness", problems,
           std::to_string(checked) + " single-path checks, all residuals exactly zero");
}

void criterion_2() {
    // Hand-built crossings with known answers, exact tie policy throughout.
    std::vector<std::string> problems;

    for (int n : {16, 64, 256}) {
        auto e = fixture("separated_cross", make_grid(1.0, n));
        for (int k = 1; k <= 3; ++k) {
            auto r = check_decomposition_ranked(e, k, EpsilonPolicy::exact());
            if (r.sup_residual != 0.0 || r.sup_residual_divided != 0.0)
                problems.push_back("separated_cross n=" + std::to_string(n) + " k=" +
                                   std::to_string(k) + ": " + fmt(r.sup_residual));
        }
        auto s = check_indicator_sum(e, EpsilonPolicy::exact());
        if (s.sup_residual != 0.0)
            problems.push_back("separated_cross crossing-sum n=" + std::to_string(n));
    }

    {
        auto e = fixture("pinned_zero", make_grid(1.0, 64));
        if (check_decomposition_ranked(e, 1, EpsilonPolicy::exact()).sup_residual != 0.0)
            problems.push_back("pinned_zero rank sum not exact");
        if (check_indicator_sum(e, EpsilonPolicy::exact()).sup_residual != 0.0)
            problems.push_back("pinned_zero crossing sum not exact");
    }

    {
        auto e = fixture("jump_from_zero", make_grid(1.0, 64));
        const auto& p = e.path(0);
        auto t = tanaka_local_time(p);
        if (t.L.back() != 0.0) problems.push_back("jump fixture: L_T = " + fmt(t.L.back()));
        if (t.script_l.back() != 1.0)
            problems.push_back("jump fixture: script_l_T = " + fmt(t.script_l.back()));
        auto ind = indicator_local_time(p, EpsilonPolicy::exact());
        if (ind.L.back() != 0.0 || ind.script_l.back() != 1.0)
            problems.push_back("jump fixture via indicator: L_T = " + fmt(ind.L.back()) +
                               ", script_l_T = " + fmt(ind.script_l.back()));
        if (check_decomposition_ranked(e, 1, EpsilonPolicy::exact()).sup_residual != 0.0)
            problems.push_back("jump fixture rank sum not exact");
        if (check_indicator_sum(e, EpsilonPolicy::exact()).sup_residual != 0.0)
            problems.push_back("jump fixture crossing sum not exact");
    }

    report(2, "fixture-oracles", problems,
           "separated/pinned/jump fixtures exact; jump fixture L_T = 0, script_l_T = 1");
}

void criterion_3() {
    // Rank invariants on a spread of random ensembles: descending order,
    // multiset preservation, idempotence, and source-order refolds of sums.
    const int kEnsembles = 1000;
    std::vector<std::string> slot_problem(kEnsembles);

    parallel_for(kEnsembles, 0, [&](int t) {
        ModelSpec m;
        switch (t % 3) {
            case 0: m.kind = ModelKind::Brownian; break;
            case 1:
                m.kind = ModelKind::AffineDiffusion;
                m.drift_a = 0.2;
                m.drift_b = -0.5;
                m.vol_c = 0.8;
                m.vol_d = 0.1;
                break;
            default:
                m.kind = ModelKind::JumpDiffusion;
                m.jump_intensity = 3.0;
                m.jump_law.kind = JumpLaw::Kind::Normal;
                m.jump_law.sd = 0.5;
                break;
        }
        const int n = 1 + t % 6;
        m.rho = (t % 5) * 0.2;
        auto e = simulate(m, make_grid(1.0, 256), n, {9000 + static_cast<std::uint64_t>(t)});
        auto r = rank_ensemble(e);
        auto fail = [&](const std::string& what) {
            if (slot_problem[static_cast<size_t>(t)].empty())
                slot_problem[static_cast<size_t>(t)] =
                    "ensemble " + std::to_string(t) + ": " + what;
        };

        for (int j = 0; j <= 256; ++j) {
            for (int k = 0; k + 1 < n; ++k) {
                if (r.ranked[static_cast<size_t>(k)].value(j) <
                    r.ranked[static_cast<size_t>(k) + 1].value(j))
                    fail("descending order violated at values");
                if (r.ranked[static_cast<size_t>(k)].left_limit(j) <
                    r.ranked[static_cast<size_t>(k) + 1].left_limit(j))
                    fail("descending order violated at left limits");
            }
            std::vector<double> a, b;
            for (int i = 0; i < n; ++i) {
                a.push_back(e.path(i).value(j));
                b.push_back(r.ranked[static_cast<size_t>(i)].value(j));
            }
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            if (!bits_equal(a, b)) fail("value multiset changed under ranking");

            // refold the ranked values in source order: same additions, same sum
            std::vector<double> by_source(static_cast<size_t>(n));
            for (int k = 0; k < n; ++k)
                by_source[static_cast<size_t>(
                    r.perm[static_cast<size_t>(k)][static_cast<size_t>(j)])] =
                    r.ranked[static_cast<size_t>(k)].value(j);
            double lhs = 0.0, rhs = 0.0;
            for (int i = 0; i < n; ++i) {
                lhs += by_source[static_cast<size_t>(i)];
                rhs += e.path(i).value(j);
            }
            if (std::memcmp(&lhs, &rhs, sizeof(double)) != 0)
                fail("source-order refold of ranked values drifted");
        }

        auto again = rank_ensemble(as_ensemble(r));
        for (int k = 0; k < n; ++k) {
            if (!bits_equal(r.ranked[static_cast<size_t>(k)].values(),
                            again.ranked[static_cast<size_t>(k)].values()))
                fail("ranking is not idempotent");
            for (int j = 0; j <= 256; ++j)
                if (again.perm[static_cast<size_t>(k)][static_cast<size_t>(j)] != k)
                    fail("re-ranking moved an already sorted path");
        }
    });

    std::vector<std::string> problems;
    for (const auto& p : slot_problem)
        if (!p.empty()) problems.push_back(p);
    report(3, "rank-invariants", problems,
           std::to_string(kEnsembles) + " ensembles (1..6 paths, 3 models): order, multiset, "
           "idempotence, refold all exact");
}

void criterion_4() {
    // Mean accumulated local time of standard brownian paths at zero. The
    // pathwise estimator is compared at 2%, the occupation estimator with
    // band sqrt(dt) at 5%, both against sqrt(2/pi) for T = 1.
    const int kReps = 100, kPathsPerRep = 100, kSteps = 4096;
    const double target = std::sqrt(2.0 / std::numbers::pi);
    std::vector<double> tanaka_sum(kReps, 0.0), occ_sum(kReps, 0.0);

    parallel_for(kReps, 0, [&](int rep) {
        ModelSpec m;
        auto g = make_grid(1.0, kSteps);
        auto e = simulate(m, g, kPathsPerRep, {40400}, static_cast<std::uint64_t>(rep));
        const double eps = std::sqrt(g->dt);
        double ts = 0.0, os = 0.0;
        for (int i = 0; i < kPathsPerRep; ++i) {
            ts += tanaka_local_time(e.path(i)).L.back();
            os += occupation_local_time(e.path(i), eps).L.back();
        }
        tanaka_sum[static_cast<size_t>(rep)] = ts;
        occ_sum[static_cast<size_t>(rep)] = os;
    });

    double t_mean = 0.0, o_mean = 0.0;
    for (int r = 0; r < kReps; ++r) {
        t_mean += tanaka_sum[static_cast<size_t>(r)];
        o_mean += occ_sum[static_cast<size_t>(r)];
    }
    t_mean /= kReps * kPathsPerRep;
    o_mean /= kReps * kPathsPerRep;

    std::vector<std::string> problems;
    if (std::abs(t_mean - target) > 0.02 * target)
        problems.push_back("pathwise estimator mean " + fmt(t_mean) + " vs " + fmt(target) +
                           " exceeds 2%");
    if (std::abs(o_mean - target) > 0.05 * target)
        problems.push_back("occupation estimator mean " + fmt(o_mean) + " vs " + fmt(target) +
                           " exceeds 5%");
    report(4, "brownian-level", problems,
           "10^4 paths at 4096 steps: pathwise " + fmt(t_mean) + ", occupation " + fmt(o_mean) +
           ", target " + fmt(target));
}

void criterion_5() {
    // Two-path comparison: residual shrinks under refinement and is small
    // against the accumulated local time at the finest level.
    const int kReps = 4000;
    const std::vector<int> levels = {256, 1024, 4096};
    std::vector<Stats> sup_stats, norm_stats;

    for (std::size_t li = 0; li < levels.size(); ++li) {
        std::vector<double> sup(kReps), norm(kReps);
        parallel_for(kReps, 0, [&](int rep) {
            ModelSpec m;
            auto e = simulate(m, make_grid(1.0, levels[li]), 2, {50500},
                              static_cast<std::uint64_t>(rep) * levels.size() + li);
            auto r = check_yan_ouknine(e.path(0), e.path(1));
            sup[static_cast<size_t>(rep)] = r.sup_residual;
            norm[static_cast<size_t>(rep)] = r.terms[0].second + r.terms[1].second;
        });
        sup_stats.push_back(stats(sup));
        norm_stats.push_back(stats(norm));
    }

    std::vector<std::string> problems;
    for (std::size_t li = 0; li + 1 < levels.size(); ++li) {
        const double slack = 2.0 * std::sqrt(sup_stats[li].se * sup_stats[li].se +
                                             sup_stats[li + 1].se * sup_stats[li + 1].se);
        if (sup_stats[li + 1].mean > sup_stats[li].mean + slack)
            problems.push_back("mean sup residual grew under refinement: " +
                               fmt(sup_stats[li].mean) + " -> " + fmt(sup_stats[li + 1].mean));
    }
    const double ratio = sup_stats.back().mean / norm_stats.back().mean;
    if (!(ratio <= 0.05))
        problems.push_back("finest-level ratio " + fmt(100 * ratio) + "% exceeds 5%");

    std::ostringstream det;
    det << "mean sup " << fmt(sup_stats[0].mean) << " -> " << fmt(sup_stats[1].mean) << " -> "
        << fmt(sup_stats[2].mean) << " over dt ladder; finest ratio " << fmt(100 * ratio) << "%";
    report(5, "pair-consistency", problems, det.str());
}

void criterion_6() {
    // Rank-sum comparison for five paths from a common start. The residual is
    // monotone in j pathwise, must shrink under refinement, and is asked to
    // reach 5% of the accumulated local time at dt = 2^-12. The estimator and
    // the start configuration are pinned, so if the discretization error has
    // not decayed that far yet, this line stays red and says by how much.
    const int kReps = 2000;
    const std::vector<int> levels = {256, 1024, 4096};
    std::vector<Stats> term_stats, norm_stats;
    std::atomic<int> sup_mismatch{0};

    for (std::size_t li = 0; li < levels.size(); ++li) {
        std::vector<double> term(kReps), norm(kReps);
        parallel_for(kReps, 0, [&](int rep) {
            ModelSpec m;
            m.x0 = {0.0};
            auto e = simulate(m, make_grid(1.0, levels[li]), 5, {60600},
                              static_cast<std::uint64_t>(rep) * levels.size() + li);
            auto r = check_local_time_sum(e);
            term[static_cast<size_t>(rep)] = std::abs(r.terminal_residual);
            double ls = 0.0;
            for (const auto& t : r.terms) ls += t.second;
            norm[static_cast<size_t>(rep)] = ls;
            // the residual decays monotonically, so its sup and terminal views
            // coincide up to the rounding wiggle of two long accumulations
            if (r.sup_residual >
                std::abs(r.terminal_residual) + 1e-9 * (1.0 + std::abs(r.terminal_residual)))
                ++sup_mismatch;
        });
        term_stats.push_back(stats(term));
        norm_stats.push_back(stats(norm));
    }

    std::vector<std::string> problems;
    if (sup_mismatch.load() > 0)
        problems.push_back("residual not monotone on " + std::to_string(sup_mismatch.load()) +
                           " runs (sup != |terminal|)");
    for (std::size_t li = 0; li + 1 < levels.size(); ++li) {
        const double slack = 2.0 * std::sqrt(term_stats[li].se * term_stats[li].se +
                                             term_stats[li + 1].se * term_stats[li + 1].se);
        if (term_stats[li + 1].mean > term_stats[li].mean + slack)
            problems.push_back("mean |terminal| grew under refinement");
    }
    const double ratio = term_stats.back().mean / norm_stats.back().mean;
    if (!(ratio <= 0.05))
        problems.push_back("finest-level mean |terminal| is " + fmt(100 * ratio) +
                           "% of the accumulated local time (budget 5%, SE " +
                           fmt(100 * term_stats.back().se / norm_stats.back().mean) +
                           "%); ladder " + fmt(term_stats[0].mean) + " -> " +
                           fmt(term_stats[1].mean) + " -> " + fmt(term_stats[2].mean) +
                           " does decay, near cube-root of dt");

    // A family that never meets: ranked paths coincide with the sources and
    // the residual must vanish bitwise. Repetitions where ranks do swap (none
    // expected at this separation) are excluded and counted.
    int excluded = 0, nonzero = 0;
    for (int rep = 0; rep < 200; ++rep) {
        ModelSpec m;
        m.x0 = {40.0, 30.0, 20.0, 10.0, 0.0};
        auto e = simulate(m, make_grid(1.0, 256), 5, {70700},
                          static_cast<std::uint64_t>(rep));
        auto r = rank_ensemble(e);
        bool constant = true;
        for (int k = 0; k < 5 && constant; ++k)
            for (int j = 0; j <= 256; ++j)
                if (r.perm[static_cast<size_t>(k)][static_cast<size_t>(j)] != k) {
                    constant = false;
                    break;
                }
        if (!constant) {
            ++excluded;
            continue;
        }
        if (check_local_time_sum(e).sup_residual != 0.0) ++nonzero;
    }
    if (nonzero > 0)
        problems.push_back("no-crossing ensembles with nonzero residual: " +
                           std::to_string(nonzero));
    if (excluded > 10) problems.push_back("unexpectedly many rank swaps at separation 10");

    std::ostringstream det;
    det << "mean |terminal| " << fmt(term_stats[0].mean) << " -> " << fmt(term_stats[1].mean)
        << " -> " << fmt(term_stats[2].mean) << "; finest ratio " << fmt(100 * ratio)
        << "% of budget 5%; no-crossing exact on " << (200 - excluded) << "/200";
    report(6, "rank-sum-refinement", problems, det.str());
}

void criterion_7() {
    // Reconstruction quality of the divided channel for both decomposition
    // forms, and refinement behavior on the three-line crossing fixture.
    const int kReps = 300;
    const int kSteps = 4096;
    std::vector<double> rr(kReps), rs(kReps), orr(kReps), ors(kReps);

    parallel_for(kReps, 0, [&](int rep) {
        ModelSpec m;
        m.rho = 0.9;
        auto e = simulate(m, make_grid(1.0, kSteps), 3, {80800},
                          static_cast<std::uint64_t>(rep));
        auto a = check_decomposition_ranked(e, 2, EpsilonPolicy::band(0.5));
        auto b = check_decomposition_original(e, 2, EpsilonPolicy::band(0.5));
        rr[static_cast<size_t>(rep)] = a.extras.at("recon_sup_err");
        rs[static_cast<size_t>(rep)] = a.extras.at("sup_abs_ranked");
        orr[static_cast<size_t>(rep)] = b.extras.at("recon_sup_err");
        ors[static_cast<size_t>(rep)] = b.extras.at("sup_abs_ranked");
    });

    const double ranked_ratio = stats(rr).mean / stats(rs).mean;
    const double orig_ratio = stats(orr).mean / stats(ors).mean;

    std::vector<std::string> problems;
    if (!(ranked_ratio <= 0.05))
        problems.push_back("rank-form reconstruction drift " + fmt(100 * ranked_ratio) + "%");
    if (!(orig_ratio <= 0.05))
        problems.push_back("source-form reconstruction drift " + fmt(100 * orig_ratio) + "%");

    // banded tie detection on the crossing fixture: residual must strictly
    // shrink as the grid refines
    std::vector<double> fixture_sup;
    for (int n : {16, 64, 256}) {
        auto e = fixture("triple_point", make_grid(1.0, n));
        fixture_sup.push_back(check_decomposition_ranked(e, 2, EpsilonPolicy::band(0.5)).sup_residual);
    }
    if (!(fixture_sup[0] > fixture_sup[1] && fixture_sup[1] > fixture_sup[2]))
        problems.push_back("crossing-fixture residual not strictly decreasing: " +
                           fmt(fixture_sup[0]) + ", " + fmt(fixture_sup[1]) + ", " +
                           fmt(fixture_sup[2]));

    std::ostringstream det;
    det << "reconstruction drift " << fmt(100 * ranked_ratio) << "% / " << fmt(100 * orig_ratio)
        << "% of sup|rank path| (budget 5%); fixture residual " << fmt(fixture_sup[0]) << " > "
        << fmt(fixture_sup[1]) << " > " << fmt(fixture_sup[2]);
    report(7, "reconstruction", problems, det.str());
}

void criterion_8() {
    // Local time comparison chain for nonnegative families: clipped brownian
    // pairs, slack means must be nonnegative within 3 SE on each link.
    const int kReps = 1000;
    std::vector<double> lower(kReps), upper(kReps), extra(kReps), ratio(kReps);
    std::vector<char> ratio_ok(kReps, 0);

    parallel_for(kReps, 0, [&](int rep) {
        ModelSpec m;
        auto g = make_grid(1.0, 1024);
        auto raw = simulate(m, g, 2, {90900}, static_cast<std::uint64_t>(rep));
        Ensemble e;
        e.grid = g;
        e.labels = raw.labels;
        e.model = raw.model;
        e.params = raw.params;
        e.seed = raw.seed;
        for (const auto& p : raw.paths) e.paths.push_back(pos_part(p));

        auto r = check_norm_bounds(e);
        lower[static_cast<size_t>(rep)] = r.extras.at("slack_lower_T");
        upper[static_cast<size_t>(rep)] = r.extras.at("slack_upper_T");
        extra[static_cast<size_t>(rep)] = r.extras.at("cor22_applicable") == 1.0
                                              ? r.extras.at("cor22_slack_T")
                                              : 0.0;
        if (r.extras.count("ratio_sum_over_max")) {
            ratio[static_cast<size_t>(rep)] = r.extras.at("ratio_sum_over_max");
            ratio_ok[static_cast<size_t>(rep)] = 1;
        }
    });

    auto lo = stats(lower);
    auto up = stats(upper);
    auto ex = stats(extra);
    double rmean = 0.0;
    int rcount = 0;
    for (int i = 0; i < kReps; ++i)
        if (ratio_ok[static_cast<size_t>(i)]) {
            rmean += ratio[static_cast<size_t>(i)];
            ++rcount;
        }
    if (rcount > 0) rmean /= rcount;

    std::vector<std::string> problems;
    if (lo.mean < -3.0 * lo.se)
        problems.push_back("lower slack mean " + fmt(lo.mean) + " below -3 SE");
    if (up.mean < -3.0 * up.se)
        problems.push_back("upper slack mean " + fmt(up.mean) + " below -3 SE");
    if (ex.mean < -3.0 * ex.se)
        problems.push_back("per-path slack mean " + fmt(ex.mean) + " below -3 SE");

    std::ostringstream det;
    det << kReps << " clipped pairs: slacks " << fmt(lo.mean) << " (SE " << fmt(lo.se) << "), "
        << fmt(up.mean) << " (SE " << fmt(up.se) << "), " << fmt(ex.mean) << " (SE "
        << fmt(ex.se) << "); sum/max local-time ratio " << fmt(rmean) << " on " << rcount
        << " runs";
    report(8, "norm-chain", problems, det.str());
}

void criterion_9() {
    // The full pipeline writes byte-identical outputs whatever the worker
    // count. config.json legitimately differs (it records the worker count),
    // so the comparison covers summary, reports, and residual tables.
    const fs::path base = fs::temp_directory_path() / "ranklt_acceptance_det";
    fs::remove_all(base);

    ExperimentConfig cfg;
    cfg.model.kind = ModelKind::Brownian;
    cfg.model.rho = 0.3;
    cfg.n_steps = 256;
    cfg.n_paths = 3;
    cfg.replications = 8;
    cfg.master_seed = 424242;
    cfg.policy = EpsilonPolicy::band(0.5);
    cfg.identities = {"thm31_indicator", "thm32_ltsum", "cor33_yan_ouknine"};
    cfg.rank_k = 2;

    std::vector<std::string> problems;
    cfg.workers = 1;
    cfg.out_dir = (base / "w1").string();
    const int rc1 = run_and_write(cfg);
    cfg.workers = 8;
    cfg.out_dir = (base / "w8").string();
    const int rc8 = run_and_write(cfg);
    if (rc1 != 0 || rc8 != 0) problems.push_back("pipeline returned nonzero");

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::vector<std::string> files = {"summary.csv"};
    for (const auto& id : cfg.identities) {
        files.push_back("report_" + id + ".json");
        files.push_back("residual_" + id + ".csv");
    }
    int compared = 0;
    for (const auto& f : files) {
        const auto a = slurp(base / "w1" / f);
        const auto b = slurp(base / "w8" / f);
        if (a.empty()) problems.push_back(f + " missing or empty");
        else if (a != b) problems.push_back(f + " differs between worker counts");
        else ++compared;
    }
    fs::remove_all(base);
    report(9, "determinism", problems,
           std::to_string(compared) + " output files byte-identical for 1 vs 8 workers");
}

void criterion_10() {
    // Save/load round trip of a jumpy ensemble: every stored array and the
    // metadata come back bitwise.
    const fs::path base = fs::temp_directory_path() / "ranklt_acceptance_rt";
    fs::remove_all(base);
    fs::create_directories(base);

    ModelSpec m;
    m.kind = ModelKind::JumpDiffusion;
    m.x0 = {0.0, 0.5, -0.5};
    m.drift_a = 0.1;
    m.jump_intensity = 2.0;
    m.jump_law.kind = JumpLaw::Kind::Normal;
    m.jump_law.mean = 0.1;
    m.jump_law.sd = 0.6;
    auto e = simulate(m, make_grid(1.0, 256), 3, {111213});

    std::vector<std::string> problems;
    bool any_jump = false;
    for (const auto& p : e.paths) any_jump = any_jump || p.has_jumps();
    if (!any_jump) problems.push_back("roundtrip ensemble has no jumps; seed needs changing");

    save_ensemble(e, base / "ens");
    auto back = load_ensemble(base / "ens");
    if (back.labels != e.labels) problems.push_back("labels changed");
    if (back.model != e.model) problems.push_back("model tag changed");
    if (back.seed != e.seed) problems.push_back("seed changed");
    if (back.params != e.params) problems.push_back("params changed");
    if (back.grid->n_steps != e.grid->n_steps || back.grid->horizon != e.grid->horizon)
        problems.push_back("grid changed");
    for (int i = 0; i < e.size(); ++i) {
        if (!bits_equal(back.path(i).values(), e.path(i).values()))
            problems.push_back("values of path " + std::to_string(i) + " changed");
        if (!bits_equal(back.path(i).jumps(), e.path(i).jumps()))
            problems.push_back("jumps of path " + std::to_string(i) + " changed");
        if (!bits_equal(back.path(i).left_limits(), e.path(i).left_limits()))
            problems.push_back("left limits of path " + std::to_string(i) + " changed");
    }
    fs::remove_all(base);
    report(10, "persistence", problems, "3-path jumpy ensemble reloads bitwise from csv + json");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (g_failures > 0) {
        std::printf("%d of 10 criteria failed\n", g_failures);
        return 1;
    }
    std::printf("all 10 criteria passed\n");
    return 0;
}
