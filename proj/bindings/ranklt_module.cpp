// Python bindings for the core operations: simulation, ranking, local time
// estimation, identity checks, and the experiment runner. Grids stay behind
// (T, n_steps) pairs and structured results cross the boundary as JSON
// strings; the package wrapper turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ranklt/harness.hpp"
#include "ranklt/local_time.hpp"
#include "ranklt/persist.hpp"

namespace py = pybind11;
using namespace ranklt;

namespace {

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

py::dict grid_dict(const TimeGrid& g) {
    py::dict d;
    d["T"] = g.horizon;
    d["n_steps"] = g.n_steps;
    d["dt"] = g.dt;
    return d;
}

py::dict localtime_dict(const LocalTimePath& lt) {
    py::dict d;
    d["L"] = lt.L;
    d["script_l"] = lt.script_l;
    d["estimator"] = lt.estimator;
    d["epsilon"] = lt.epsilon;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "ranked paths, local times, and their decomposition identities";

    py::class_<CadlagPath>(m, "CadlagPath")
        .def_property_readonly("values", [](const CadlagPath& p) { return as_vector(p.values()); })
        .def_property_readonly("jumps", [](const CadlagPath& p) { return as_vector(p.jumps()); })
        .def_property_readonly("left_limits",
                               [](const CadlagPath& p) { return as_vector(p.left_limits()); })
        .def("has_jumps", &CadlagPath::has_jumps)
        .def("__len__", [](const CadlagPath& p) { return p.n_steps() + 1; });

    m.def(
        "path_from_values_jumps",
        [](double T, int n_steps, std::vector<double> values, std::vector<double> jumps) {
            return CadlagPath::from_values_jumps(make_grid(T, n_steps), std::move(values),
                                                 std::move(jumps));
        },
        py::arg("T"), py::arg("n_steps"), py::arg("values"), py::arg("jumps"));
    m.def(
        "path_continuous",
        [](double T, int n_steps, std::vector<double> values) {
            return CadlagPath::continuous(make_grid(T, n_steps), std::move(values));
        },
        py::arg("T"), py::arg("n_steps"), py::arg("values"));

    py::class_<Ensemble>(m, "Ensemble")
        .def_readonly("paths", &Ensemble::paths)
        .def_readonly("labels", &Ensemble::labels)
        .def_readonly("model", &Ensemble::model)
        .def_readonly("seed", &Ensemble::seed)
        .def_property_readonly("grid", [](const Ensemble& e) { return grid_dict(*e.grid); })
        .def("__len__", &Ensemble::size);

    m.def(
        "simulate",
        [](const std::string& model_json, double T, int n_steps, int n_paths, std::uint64_t seed,
           std::uint64_t replication) {
            const ModelSpec spec = ModelSpec::from_json(nlohmann::json::parse(model_json));
            spec.validate(n_paths);
            return simulate(spec, make_grid(T, n_steps), n_paths, SeedPolicy{seed}, replication);
        },
        py::arg("model_json"), py::arg("T"), py::arg("n_steps"), py::arg("n_paths"),
        py::arg("seed"), py::arg("replication") = 0,
        "simulate an ensemble from a model spec given as a JSON string");
    m.def(
        "fixture",
        [](const std::string& name, double T, int n_steps) {
            return fixture(name, make_grid(T, n_steps));
        },
        py::arg("name"), py::arg("T"), py::arg("n_steps"));

    m.def(
        "rank", [](const Ensemble& e) { return as_ensemble(rank_ensemble(e)); },
        py::arg("ensemble"), "ranked ensemble, descending: rank_1 is the running maximum");

    m.def(
        "tanaka_local_time",
        [](const CadlagPath& p, const std::string& policy) {
            return localtime_dict(tanaka_local_time(p, EpsilonPolicy::parse(policy)));
        },
        py::arg("path"), py::arg("policy") = "exact");
    m.def(
        "indicator_local_time",
        [](const CadlagPath& p, const std::string& policy) {
            return localtime_dict(indicator_local_time(p, EpsilonPolicy::parse(policy)));
        },
        py::arg("path"), py::arg("policy") = "exact");
    m.def(
        "occupation_local_time",
        [](const CadlagPath& p, double eps) {
            return localtime_dict(occupation_local_time(p, eps));
        },
        py::arg("path"), py::arg("eps"));
    m.def(
        "crossing_local_time",
        [](const CadlagPath& p, double h) { return localtime_dict(crossing_local_time(p, h)); },
        py::arg("path"), py::arg("h"));

    m.def("identity_ids", [] { return identity_ids(); });
    m.def(
        "check",
        [](const std::string& id, const Ensemble& e, int k, const std::string& policy) {
            ExperimentConfig cfg;
            cfg.policy = EpsilonPolicy::parse(policy);
            cfg.rank_k = k;
            return run_identity(id, e, cfg).to_json().dump();
        },
        py::arg("identity"), py::arg("ensemble"), py::arg("k") = 1, py::arg("policy") = "exact",
        "run one identity checker; returns the report as a JSON string");

    m.def(
        "run_config",
        [](const std::string& config_json) {
            const ExperimentConfig cfg =
                ExperimentConfig::from_json(nlohmann::json::parse(config_json));
            const RunResult res = run_experiment(cfg);
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& r : res.rows)
                rows.push_back({{"identity", r.identity},
                                {"dt", r.dt},
                                {"mean_sup_residual", r.mean_sup_residual},
                                {"std_err", r.std_err},
                                {"mean_normalizer", r.mean_normalizer},
                                {"rel_residual", r.rel_residual}});
            const nlohmann::json out = {{"rows", rows}, {"thresholds_ok", res.thresholds_ok}};
            return out.dump();
        },
        py::arg("config_json"),
        "run a full experiment config in memory; returns summary rows as a JSON string");

    m.def(
        "save_ensemble", [](const Ensemble& e, const std::string& stem) { save_ensemble(e, stem); },
        py::arg("ensemble"), py::arg("stem"));
    m.def(
        "load_ensemble", [](const std::string& stem) { return load_ensemble(stem); },
        py::arg("stem"));
}
