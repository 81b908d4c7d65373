// Command-line front end: simulate ensembles, rank them, estimate local
// times, and check the decomposition identities, all driven by a JSON config
// with flag overrides. Subcommands write CSV/JSON artifacts into --out.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ranklt/harness.hpp"
#include "ranklt/local_time.hpp"
#include "ranklt/persist.hpp"

namespace fs = std::filesystem;
using namespace ranklt;

namespace {

struct SharedFlags {
    std::string config_file;
    std::string in_stem;
    int n_steps = 0;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string policy;
    std::string estimator;
    bool save_paths = false;
    std::string out;
    int workers = -1;
};

// Shared option block; every subcommand gets the same knobs so that a config
// written for `verify` can be pointed at any other subcommand unchanged.
void add_shared(CLI::App* cmd, SharedFlags& f, bool config_required) {
    auto* cfg = cmd->add_option("--config", f.config_file, "experiment config JSON");
    if (config_required) cfg->required();
    cmd->add_option("--n-steps", f.n_steps, "override grid.n_steps");
    cmd->add_option("--seed", f.seed, "override master seed")->each([&f](const std::string&) {
        f.has_seed = true;
    });
    cmd->add_option("--policy", f.policy, "override policy: exact | band | band:<c>");
    cmd->add_option("--estimator", f.estimator,
                    "override estimator: tanaka | indicator | occupation | crossing");
    cmd->add_flag("--save-paths", f.save_paths, "persist replication-0 ensembles");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--workers", f.workers, "worker threads (0 = hardware)");
}

ExperimentConfig make_config(const SharedFlags& f) {
    ExperimentConfig cfg;
    if (!f.config_file.empty()) cfg = ExperimentConfig::load(f.config_file);
    if (f.n_steps > 0) cfg.n_steps = f.n_steps;
    if (f.has_seed) cfg.master_seed = f.seed;
    if (!f.policy.empty()) cfg.policy = EpsilonPolicy::parse(f.policy);
    if (!f.estimator.empty()) cfg.estimator = f.estimator;
    if (f.save_paths) cfg.save_paths = true;
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (f.workers >= 0) cfg.workers = f.workers;
    return cfg;
}

// Ensemble for the inspection subcommands: an explicit --in stem wins,
// otherwise replication 0 of the configured model.
Ensemble input_ensemble(const SharedFlags& f, const ExperimentConfig& cfg) {
    if (!f.in_stem.empty()) return load_ensemble(f.in_stem);
    if (f.config_file.empty())
        throw std::invalid_argument("either --config or --in is required");
    cfg.model.validate(cfg.n_paths);
    return simulate(cfg.model, make_grid(cfg.T, cfg.n_steps), cfg.n_paths,
                    SeedPolicy{cfg.master_seed}, 0);
}

fs::path ensure_out(const ExperimentConfig& cfg) {
    fs::path out(cfg.out_dir);
    fs::create_directories(out);
    return out;
}

int cmd_simulate(const SharedFlags& f) {
    const ExperimentConfig cfg = make_config(f);
    cfg.model.validate(cfg.n_paths);
    const Ensemble e = simulate(cfg.model, make_grid(cfg.T, cfg.n_steps), cfg.n_paths,
                                SeedPolicy{cfg.master_seed}, 0);
    const fs::path out = ensure_out(cfg);
    save_ensemble(e, out / "ensemble");
    std::cout << "wrote " << e.size() << " paths, " << cfg.n_steps << " steps -> "
              << (out / "ensemble").string() << ".{csv,jumps.csv,meta.json}\n";
    return 0;
}

int cmd_rank(const SharedFlags& f) {
    const ExperimentConfig cfg = make_config(f);
    const Ensemble e = input_ensemble(f, cfg);
    const RankedEnsemble r = rank_ensemble(e);
    const fs::path out = ensure_out(cfg);
    save_ensemble(as_ensemble(r), out / "ranked");

    const RankOccupancy occ = occupancy(e, cfg.policy);
    std::string csv = "time";
    for (int k = 1; k <= e.size(); ++k) csv += ",count_rank_" + std::to_string(k);
    csv += '\n';
    for (int j = 0; j <= e.grid->n_steps; ++j) {
        csv += format_double(e.grid->times[static_cast<std::size_t>(j)]);
        for (int k = 0; k < e.size(); ++k) {
            csv += ',';
            csv += std::to_string(occ.count[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
        }
        csv += '\n';
    }
    std::ofstream occf(out / "occupancy.csv", std::ios::binary);
    occf << csv;
    std::cout << "ranked " << e.size() << " paths -> " << (out / "ranked").string()
              << ".*, occupancy.csv\n";
    return 0;
}

int cmd_localtime(const SharedFlags& f) {
    const ExperimentConfig cfg = make_config(f);
    const Ensemble e = input_ensemble(f, cfg);
    const double eps = cfg.policy.epsilon(*e.grid);

    std::vector<LocalTimePath> lts;
    for (int i = 0; i < e.size(); ++i) {
        const CadlagPath& p = e.path(i);
        if (cfg.estimator == "tanaka")
            lts.push_back(tanaka_local_time(p, cfg.policy));
        else if (cfg.estimator == "indicator")
            lts.push_back(indicator_local_time(p, cfg.policy));
        else if (cfg.estimator == "occupation") {
            if (!(eps > 0.0))
                throw std::invalid_argument(
                    "occupation estimator needs a band policy (try --policy band)");
            lts.push_back(occupation_local_time(p, eps));
        } else if (cfg.estimator == "crossing")
            lts.push_back(crossing_local_time(p, cfg.model.lattice_h));
        else
            throw std::invalid_argument("unknown estimator '" + cfg.estimator + "'");
    }

    std::string csv = "time";
    for (const auto& l : e.labels) csv += ",L_" + l;
    for (const auto& l : e.labels) csv += ",scriptl_" + l;
    csv += '\n';
    for (int j = 0; j <= e.grid->n_steps; ++j) {
        csv += format_double(e.grid->times[static_cast<std::size_t>(j)]);
        for (const auto& lt : lts) {
            csv += ',';
            csv += format_double(lt.L[static_cast<std::size_t>(j)]);
        }
        for (const auto& lt : lts) {
            csv += ',';
            csv += format_double(lt.script_l[static_cast<std::size_t>(j)]);
        }
        csv += '\n';
    }
    const fs::path out = ensure_out(cfg);
    std::ofstream ltf(out / "localtime.csv", std::ios::binary);
    ltf << csv;
    std::cout << cfg.estimator << " local times for " << e.size() << " paths -> "
              << (out / "localtime.csv").string() << "\n";
    return 0;
}

int cmd_verify(const SharedFlags& f) {
    const ExperimentConfig cfg = make_config(f);
    const int status = run_and_write(cfg);
    const auto rows = read_summary_csv(fs::path(cfg.out_dir) / "summary.csv");
    for (const auto& r : rows)
        std::cout << r.identity << " dt=" << format_double(r.dt)
                  << " mean_sup_residual=" << format_double(r.mean_sup_residual)
                  << " rel=" << format_double(r.rel_residual) << "\n";
    std::cout << (status == 0 ? "verify: ok" : "verify: threshold failure") << "\n";
    return status;
}

int cmd_sweep(const SharedFlags& f) {
    const ExperimentConfig cfg = make_config(f);
    if (cfg.sweep.size() < 3)
        throw std::invalid_argument("sweep: config must list at least 3 sweep levels");
    const int status = run_and_write(cfg);
    const auto rows = read_summary_csv(fs::path(cfg.out_dir) / "summary.csv");
    for (const auto& id : cfg.identities) {
        std::vector<SummaryRow> mine;
        for (const auto& r : rows)
            if (r.identity == id) mine.push_back(r);
        std::cout << id << " slope=" << format_double(sweep_rate(mine)) << "\n";
    }
    return status;
}

bool same_paths(const CadlagPath& a, const CadlagPath& b) {
    for (int j = 0; j <= a.n_steps(); ++j)
        if (a.value(j) != b.value(j) || a.jump(j) != b.jump(j) ||
            a.left_limit(j) != b.left_limit(j))
            return false;
    return true;
}

int cmd_roundtrip(const SharedFlags& f) {
    const ExperimentConfig cfg = make_config(f);
    const Ensemble src = input_ensemble(f, cfg);
    const fs::path out = ensure_out(cfg);
    const fs::path stem = out / "roundtrip";
    save_ensemble(src, stem);
    const Ensemble back = load_ensemble(stem);

    bool ok = back.size() == src.size() && back.labels == src.labels &&
              back.model == src.model && back.seed == src.seed &&
              back.params == src.params && back.grid->same_shape(*src.grid);
    if (ok)
        for (int j = 0; j <= src.grid->n_steps && ok; ++j)
            ok = back.grid->times[static_cast<std::size_t>(j)] ==
                 src.grid->times[static_cast<std::size_t>(j)];
    for (int i = 0; ok && i < src.size(); ++i) ok = same_paths(src.path(i), back.path(i));

    std::cout << (ok ? "roundtrip: ok (bitwise)" : "roundtrip: MISMATCH") << "\n";
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ranked-path local time toolkit"};
    app.require_subcommand(1);

    SharedFlags f;
    int code = 0;
    const auto guard = [&code](const std::function<int()>& body) {
        try {
            code = body();
        } catch (const std::exception& ex) {
            std::cerr << "error: " << ex.what() << "\n";
            code = 1;
        }
    };

    auto* sim = app.add_subcommand("simulate", "simulate one ensemble and persist it");
    add_shared(sim, f, /*config_required=*/true);
    sim->callback([&] { guard([&] { return cmd_simulate(f); }); });

    auto* rank = app.add_subcommand("rank", "rank an ensemble; write ranked paths + occupancy");
    add_shared(rank, f, false);
    rank->add_option("--in", f.in_stem, "ensemble stem to load instead of simulating");
    rank->callback([&] { guard([&] { return cmd_rank(f); }); });

    auto* lt = app.add_subcommand("localtime", "per-path local time estimates");
    add_shared(lt, f, false);
    lt->add_option("--in", f.in_stem, "ensemble stem to load instead of simulating");
    lt->callback([&] { guard([&] { return cmd_localtime(f); }); });

    auto* ver = app.add_subcommand("verify", "run identity checks, write reports + summary");
    add_shared(ver, f, true);
    ver->callback([&] { guard([&] { return cmd_verify(f); }); });

    auto* sw = app.add_subcommand("sweep", "refinement sweep; reports per-identity rate");
    add_shared(sw, f, true);
    sw->callback([&] { guard([&] { return cmd_sweep(f); }); });

    auto* rt = app.add_subcommand("roundtrip-check", "persist + reload + bitwise compare");
    add_shared(rt, f, false);
    rt->add_option("--in", f.in_stem, "ensemble stem to load instead of simulating");
    rt->callback([&] { guard([&] { return cmd_roundtrip(f); }); });

    CLI11_PARSE(app, argc, argv);
    return code;
}
