#include "ranklt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ranklt/local_time.hpp"

namespace ranklt {

namespace fs = std::filesystem;

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("config: " + what);
}

}  // namespace

void ExperimentConfig::validate() const {
    model.validate(n_paths);
    require(T > 0.0, "T must be positive");
    require(n_steps >= 1, "n_steps must be >= 1");
    require(n_paths >= 1, "n_paths must be >= 1");
    require(replications >= 1, "replications must be >= 1");
    require(rank_k >= 1, "rank_k must be >= 1");
    require(workers >= 0, "workers must be >= 0");
    require(estimator == "tanaka" || estimator == "indicator" || estimator == "occupation" ||
                estimator == "crossing",
            "unknown estimator '" + estimator + "'");
    const auto& known = identity_ids();
    for (const auto& id : identities)
        require(std::find(known.begin(), known.end(), id) != known.end(),
                "unknown identity '" + id + "'");
    for (const auto& [id, thr] : thresholds) {
        require(std::find(known.begin(), known.end(), id) != known.end(),
                "threshold for unknown identity '" + id + "'");
        require(thr >= 0.0, "threshold for '" + id + "' must be >= 0");
    }
    for (std::size_t i = 1; i < sweep.size(); ++i)
        require(sweep[i] > sweep[i - 1], "sweep values must be strictly increasing");
    for (int s : sweep) require(s >= 1, "sweep values must be >= 1");
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j = {
        {"model", model.to_json()},
        {"grid", {{"T", T}, {"n_steps", n_steps}}},
        {"n_paths", n_paths},
        {"replications", replications},
        {"seed", master_seed},
        {"policy", policy.to_json()},
        {"estimator", estimator},
        {"identities", identities},
        {"rank_k", rank_k},
        {"save_paths", save_paths},
        {"out_dir", out_dir},
        {"workers", workers},
    };
    if (!sweep.empty()) j["sweep"] = sweep;
    if (!thresholds.empty()) j["thresholds"] = thresholds;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        c.model = ModelSpec::from_json(j.at("model"));
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            if (g.contains("T")) c.T = g.at("T").get<double>();
            if (g.contains("n_steps")) c.n_steps = g.at("n_steps").get<int>();
        }
        if (j.contains("n_paths")) c.n_paths = j.at("n_paths").get<int>();
        if (j.contains("replications")) c.replications = j.at("replications").get<int>();
        if (j.contains("seed")) c.master_seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("policy")) c.policy = EpsilonPolicy::from_json(j.at("policy"));
        if (j.contains("estimator")) c.estimator = j.at("estimator").get<std::string>();
        if (j.contains("identities"))
            c.identities = j.at("identities").get<std::vector<std::string>>();
        if (j.contains("rank_k")) c.rank_k = j.at("rank_k").get<int>();
        if (j.contains("sweep")) c.sweep = j.at("sweep").get<std::vector<int>>();
        if (j.contains("save_paths")) c.save_paths = j.at("save_paths").get<bool>();
        if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("workers")) c.workers = j.at("workers").get<int>();
        if (j.contains("thresholds"))
            c.thresholds = j.at("thresholds").get<std::map<std::string, double>>();
    } catch (const nlohmann::json::exception& ex) {
        throw std::invalid_argument(std::string("config: ") + ex.what());
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("config: cannot open " + file);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw std::invalid_argument(file + ": " + ex.what());
    }
    return from_json(j);
}

std::vector<int> ExperimentConfig::levels() const {
    if (!sweep.empty()) return sweep;
    return {n_steps};
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    int w = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    w = std::clamp(w, 1, n);
    if (w == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    const auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                // Keep exactly one error; letting it escape a worker thread
                // would terminate the process.
                if (!failed.exchange(true)) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(first_error);
}

ResidualReport run_identity(const std::string& id, const Ensemble& e,
                            const ExperimentConfig& cfg) {
    const int k = std::min(cfg.rank_k, e.size());
    if (id == "thm22_ranked") return check_decomposition_ranked(e, k, cfg.policy);
    if (id == "thm22_original") return check_decomposition_original(e, k, cfg.policy);
    if (id == "thm31_indicator") return check_indicator_sum(e, cfg.policy);
    if (id == "thm32_ltsum") return check_local_time_sum(e);
    if (id == "cor33_yan_ouknine") {
        // Pair the first two paths; a singleton pairs with itself.
        const CadlagPath& x = e.path(0);
        const CadlagPath& y = e.path(e.size() >= 2 ? 1 : 0);
        return check_yan_ouknine(x, y);
    }
    if (id == "cor31_ranked_diff") return check_ranked_diff_indicators(e, k, cfg.policy);
    if (id == "rem21_max") return check_max_identity(e, cfg.policy);
    if (id == "norm_bounds") return check_norm_bounds(e);
    throw std::invalid_argument("unknown identity '" + id + "'");
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    require(!cfg.identities.empty(), "no identities requested");

    RunResult res;
    const SeedPolicy seeds{cfg.master_seed};
    const std::vector<int> levels = cfg.levels();
    const int R = cfg.replications;
    const int n_ids = static_cast<int>(cfg.identities.size());

    for (std::size_t li = 0; li < levels.size(); ++li) {
        const GridPtr grid = make_grid(cfg.T, levels[li]);
        const bool finest = li + 1 == levels.size();

        // Per-replication slots filled in parallel, reduced sequentially below
        // so that results do not depend on the worker count.
        struct Slot {
            std::vector<double> sup, norm;
        };
        std::vector<Slot> slots(static_cast<std::size_t>(R));
        std::vector<ResidualReport> rep0_reports;

        parallel_for(R, cfg.workers, [&](int rep) {
            const Ensemble e = simulate(cfg.model, grid, cfg.n_paths, seeds,
                                        static_cast<std::uint64_t>(rep));
            Slot& s = slots[static_cast<std::size_t>(rep)];
            s.sup.resize(static_cast<std::size_t>(n_ids));
            s.norm.resize(static_cast<std::size_t>(n_ids));
            for (int q = 0; q < n_ids; ++q) {
                ResidualReport r = run_identity(cfg.identities[static_cast<std::size_t>(q)], e, cfg);
                s.sup[static_cast<std::size_t>(q)] = r.sup_residual;
                s.norm[static_cast<std::size_t>(q)] = r.normalizer;
                if (rep == 0 && finest) {
                    if (rep0_reports.empty()) rep0_reports.resize(static_cast<std::size_t>(n_ids));
                    rep0_reports[static_cast<std::size_t>(q)] = std::move(r);
                }
            }
        });

        if (cfg.save_paths) {
            res.saved_ensembles.push_back(simulate(cfg.model, grid, cfg.n_paths, seeds, 0));
            res.saved_levels.push_back(levels[li]);
        }
        if (finest) res.reports = std::move(rep0_reports);

        for (int q = 0; q < n_ids; ++q) {
            double mean_sup = 0.0, mean_norm = 0.0;
            for (int rep = 0; rep < R; ++rep) {
                mean_sup += slots[static_cast<std::size_t>(rep)].sup[static_cast<std::size_t>(q)];
                mean_norm += slots[static_cast<std::size_t>(rep)].norm[static_cast<std::size_t>(q)];
            }
            mean_sup /= R;
            mean_norm /= R;
            double var = 0.0;
            for (int rep = 0; rep < R; ++rep) {
                const double d =
                    slots[static_cast<std::size_t>(rep)].sup[static_cast<std::size_t>(q)] - mean_sup;
                var += d * d;
            }
            const double std_err = R > 1 ? std::sqrt(var / (R - 1)) / std::sqrt(double(R)) : 0.0;

            SummaryRow row;
            row.identity = cfg.identities[static_cast<std::size_t>(q)];
            row.dt = grid->dt;
            row.mean_sup_residual = mean_sup;
            row.std_err = std_err;
            row.mean_normalizer = mean_norm;
            row.rel_residual = mean_norm > 0.0 ? mean_sup / mean_norm : 0.0;
            res.rows.push_back(std::move(row));

            if (finest) {
                const auto it = cfg.thresholds.find(cfg.identities[static_cast<std::size_t>(q)]);
                if (it != cfg.thresholds.end() && !(res.rows.back().rel_residual <= it->second))
                    res.thresholds_ok = false;
            }
        }
    }
    return res;
}

int run_and_write(const ExperimentConfig& cfg) {
    const RunResult res = run_experiment(cfg);
    const fs::path out(cfg.out_dir);
    fs::create_directories(out);

    write_summary_csv(res.rows, out / "summary.csv");
    {
        std::ofstream f(out / "config.json", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (out / "config.json").string());
        f << cfg.to_json().dump(2) << "\n";
    }
    const GridPtr finest = make_grid(cfg.T, cfg.levels().back());
    for (std::size_t q = 0; q < res.reports.size(); ++q) {
        const auto& rep = res.reports[q];
        write_report_json(rep, out / ("report_" + rep.identity + ".json"));
        write_residual_csv(rep, *finest, out / ("residual_" + rep.identity + ".csv"));
    }
    for (std::size_t s = 0; s < res.saved_ensembles.size(); ++s) {
        std::ostringstream stem;
        stem << "ensemble_n" << res.saved_levels[s];
        save_ensemble(res.saved_ensembles[s], out / stem.str());
    }
    return res.thresholds_ok ? 0 : 2;
}

double sweep_rate(const std::vector<SummaryRow>& rows_one_identity) {
    if (rows_one_identity.size() < 3)
        throw std::invalid_argument("sweep_rate: need at least 3 refinement levels");
    std::vector<double> x, y;
    for (const auto& r : rows_one_identity) {
        if (!(r.mean_sup_residual > 0.0))
            throw std::invalid_argument("sweep_rate: nonpositive mean residual at dt = " +
                                        format_double(r.dt));
        x.push_back(std::log(r.dt));
        y.push_back(std::log(r.mean_sup_residual));
    }
    const std::size_t m = x.size();
    double xb = 0.0, yb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        xb += x[i];
        yb += y[i];
    }
    xb /= static_cast<double>(m);
    yb /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - xb) * (x[i] - xb);
        sxy += (x[i] - xb) * (y[i] - yb);
    }
    if (sxx == 0.0) throw std::invalid_argument("sweep_rate: all levels share one dt");
    return sxy / sxx;
}

}  // namespace ranklt
