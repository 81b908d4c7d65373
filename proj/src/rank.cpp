#include "ranklt/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ranklt {

double EpsilonPolicy::epsilon(const TimeGrid& grid) const {
    if (mode == Mode::Exact) return 0.0;
    if (!(band_coeff > 0.0))
        throw std::invalid_argument("EpsilonPolicy: band coefficient must be > 0");
    return band_coeff * std::sqrt(grid.dt);
}

nlohmann::json EpsilonPolicy::to_json() const {
    if (mode == Mode::Exact) return {{"mode", "exact"}};
    return {{"mode", "band"}, {"c", band_coeff}};
}

EpsilonPolicy EpsilonPolicy::from_json(const nlohmann::json& j) {
    const std::string mode = j.value("mode", "exact");
    if (mode == "exact") return exact();
    if (mode == "band") return band(j.value("c", 0.5));
    throw std::invalid_argument("EpsilonPolicy: unknown mode: " + mode);
}

EpsilonPolicy EpsilonPolicy::parse(const std::string& s) {
    if (s == "exact") return exact();
    if (s == "band") return band();
    if (s.rfind("band:", 0) == 0) {
        const std::string num = s.substr(5);
        std::size_t pos = 0;
        double c = 0.0;
        try {
            c = std::stod(num, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != num.size() || !(c > 0.0))
            throw std::invalid_argument("policy: band coefficient must be a number > 0, got '" +
                                        num + "'");
        return band(c);
    }
    throw std::invalid_argument("policy: expected 'exact', 'band', or 'band:<c>', got '" + s + "'");
}

RankedEnsemble rank_ensemble(const Ensemble& e) {
    const int n = e.size();
    if (n < 1) throw std::invalid_argument("rank_ensemble: empty ensemble");
    const int steps = e.grid->n_steps;
    const size_t len = static_cast<size_t>(steps) + 1;

    RankedEnsemble r;
    r.grid = e.grid;
    r.perm.assign(static_cast<size_t>(n), std::vector<int>(len));
    r.left_perm.assign(static_cast<size_t>(n), std::vector<int>(len));

    std::vector<std::vector<double>> rv(static_cast<size_t>(n), std::vector<double>(len));
    std::vector<std::vector<double>> rl(static_cast<size_t>(n), std::vector<double>(len));

    std::vector<int> order(static_cast<size_t>(n));
    for (size_t j = 0; j < len; ++j) {
        const int jj = static_cast<int>(j);
        // values: descending, ties by ascending original index
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double va = e.path(a).value(jj), vb = e.path(b).value(jj);
            if (va != vb) return va > vb;
            return a < b;
        });
        for (int k = 0; k < n; ++k) {
            r.perm[static_cast<size_t>(k)][j] = order[static_cast<size_t>(k)];
            rv[static_cast<size_t>(k)][j] = e.path(order[static_cast<size_t>(k)]).value(jj);
        }
        // left limits, same rule
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double va = e.path(a).left_limit(jj), vb = e.path(b).left_limit(jj);
            if (va != vb) return va > vb;
            return a < b;
        });
        for (int k = 0; k < n; ++k) {
            r.left_perm[static_cast<size_t>(k)][j] = order[static_cast<size_t>(k)];
            rl[static_cast<size_t>(k)][j] = e.path(order[static_cast<size_t>(k)]).left_limit(jj);
        }
    }

    r.ranked.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        r.ranked.push_back(CadlagPath::from_values_lefts(
            e.grid, std::move(rv[static_cast<size_t>(k)]), std::move(rl[static_cast<size_t>(k)])));
    return r;
}

Ensemble as_ensemble(const RankedEnsemble& r) {
    Ensemble e;
    e.grid = r.grid;
    e.paths = r.ranked;
    e.model = "ranked";
    for (int k = 1; k <= r.size(); ++k) e.labels.push_back("rank_" + std::to_string(k));
    return e;
}

RankOccupancy occupancy(const Ensemble& e, const EpsilonPolicy& policy) {
    const int n = e.size();
    if (n < 1) throw std::invalid_argument("occupancy: empty ensemble");
    if (n > 64) throw std::invalid_argument("occupancy: at most 64 paths supported");
    const double eps = policy.epsilon(*e.grid);
    const size_t len = static_cast<size_t>(e.grid->n_steps) + 1;

    const RankedEnsemble r = rank_ensemble(e);
    RankOccupancy occ;
    occ.count.assign(static_cast<size_t>(n), std::vector<int>(len, 0));
    occ.members.assign(static_cast<size_t>(n), std::vector<std::uint64_t>(len, 0));

    for (size_t j = 0; j < len; ++j) {
        const int jj = static_cast<int>(j);
        for (int k = 0; k < n; ++k) {
            const double level = r.ranked[static_cast<size_t>(k)].left_limit(jj);
            int c = 0;
            std::uint64_t mask = 0;
            for (int i = 0; i < n; ++i) {
                if (std::abs(e.path(i).left_limit(jj) - level) <= eps) {
                    ++c;
                    mask |= (std::uint64_t{1} << i);
                }
            }
            occ.count[static_cast<size_t>(k)][j] = c;
            occ.members[static_cast<size_t>(k)][j] = mask;
        }
    }
    return occ;
}

}  // namespace ranklt
