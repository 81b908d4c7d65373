#include "ranklt/local_time.hpp"

#include <cmath>
#include <stdexcept>

namespace ranklt {

TanakaSteps tanaka_steps(const CadlagPath& x, double eps) {
    const size_t len = static_cast<size_t>(x.n_steps()) + 1;
    TanakaSteps s;
    s.dL.assign(len, 0.0);
    s.corr.assign(len, 0.0);
    for (size_t j = 1; j < len; ++j) {
        const int jj = static_cast<int>(j);
        const double lj = x.left_limit(jj);
        const double vp = x.value(jj - 1);
        const double dc = lj - vp;
        // Written so that a path staying on one side of zero cancels exactly:
        // |lj| - |vp| then reproduces the same rounding as sgn(vp) * dc.
        s.dL[j] = (std::abs(lj) - std::abs(vp)) - sgn(vp) * dc;
        if (std::abs(lj) <= eps) s.corr[j] = x.jump(jj);
    }
    return s;
}

LocalTimePath tanaka_local_time(const CadlagPath& x, const EpsilonPolicy& policy) {
    const double eps = policy.epsilon(x.grid());
    const TanakaSteps s = tanaka_steps(x, eps);
    const size_t len = s.dL.size();

    LocalTimePath out;
    out.grid = x.grid_ptr();
    out.estimator = "tanaka";
    out.policy = policy;
    out.epsilon = eps;
    out.L.assign(len, 0.0);
    out.script_l.assign(len, 0.0);
    double acc = 0.0, sl = 0.0;
    for (size_t j = 1; j < len; ++j) {
        acc += s.dL[j];
        sl += 0.5 * s.dL[j];
        sl += s.corr[j];
        out.L[j] = acc;
        out.script_l[j] = sl;
    }
    return out;
}

LocalTimePath indicator_local_time(const CadlagPath& z, const EpsilonPolicy& policy) {
    const double eps = policy.epsilon(z.grid());
    const size_t len = static_cast<size_t>(z.n_steps()) + 1;
    for (size_t j = 0; j < len; ++j) {
        if (z.value(static_cast<int>(j)) < -eps)
            throw std::invalid_argument(
                "indicator_local_time: path is negative beyond tolerance at index " +
                std::to_string(j));
    }

    LocalTimePath out;
    out.grid = z.grid_ptr();
    out.estimator = "indicator";
    out.policy = policy;
    out.epsilon = eps;
    out.L.assign(len, 0.0);
    out.script_l.assign(len, 0.0);
    double acc = 0.0;   // indicator ito sum
    double corr = 0.0;  // cumulated in-band jumps
    for (size_t j = 1; j < len; ++j) {
        const int jj = static_cast<int>(j);
        if (z.value(jj - 1) <= eps) acc += z.cont_increment(jj);
        if (z.left_limit(jj) <= eps) {
            const double jp = z.jump(jj);
            acc += jp;
            corr += jp;
        }
        out.script_l[j] = acc;
        out.L[j] = 2.0 * (acc - corr);
    }
    return out;
}

LocalTimePath occupation_local_time(const CadlagPath& x, double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("occupation_local_time: eps must be > 0");
    const size_t len = static_cast<size_t>(x.n_steps()) + 1;

    LocalTimePath out;
    out.grid = x.grid_ptr();
    out.estimator = "occupation";
    out.policy = EpsilonPolicy::band(eps / std::sqrt(x.grid().dt));
    out.epsilon = eps;
    out.L.assign(len, 0.0);
    out.script_l.assign(len, 0.0);
    double acc = 0.0, corr = 0.0;
    const double inv = 1.0 / (2.0 * eps);
    for (size_t j = 1; j < len; ++j) {
        const int jj = static_cast<int>(j);
        if (std::abs(x.value(jj - 1)) <= eps) {
            const double dc = x.cont_increment(jj);
            acc += dc * dc;
        }
        if (std::abs(x.left_limit(jj)) <= eps) corr += x.jump(jj);
        out.L[j] = acc * inv;
        out.script_l[j] = 0.5 * out.L[j] + corr;
    }
    return out;
}

LocalTimePath crossing_local_time(const CadlagPath& x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("crossing_local_time: h must be > 0");
    const size_t len = static_cast<size_t>(x.n_steps()) + 1;
    const double tol = 1e-9 * h;
    // Lattice check: every value on h*Z, every move in {0, +-h}.
    for (size_t j = 0; j < len; ++j) {
        const double v = x.value(static_cast<int>(j));
        const double m = std::round(v / h);
        if (std::abs(v - m * h) > tol)
            throw std::invalid_argument("crossing_local_time: value off the lattice at index " +
                                        std::to_string(j));
        if (j > 0) {
            const double step = std::abs(v - x.value(static_cast<int>(j) - 1));
            if (!(step <= tol || std::abs(step - h) <= tol))
                throw std::invalid_argument(
                    "crossing_local_time: step size not in {0, h} at index " + std::to_string(j));
        }
    }

    LocalTimePath out;
    out.grid = x.grid_ptr();
    out.estimator = "crossing";
    out.policy = EpsilonPolicy::exact();
    out.epsilon = 0.0;
    out.L.assign(len, 0.0);
    out.script_l.assign(len, 0.0);
    long visits = 0;
    for (size_t j = 1; j < len; ++j) {
        const double prev = x.value(static_cast<int>(j) - 1);
        if (std::llround(prev / h) == 0) ++visits;
        out.L[j] = h * static_cast<double>(visits);
        out.script_l[j] = 0.5 * out.L[j];
    }
    return out;
}

LocalTimePath difference_local_time(const CadlagPath& x, const CadlagPath& y, DiffChannel which,
                                    const EpsilonPolicy& policy) {
    const CadlagPath d = diff_paths(x, y);
    switch (which) {
        case DiffChannel::Plain: return tanaka_local_time(d, policy);
        case DiffChannel::Pos: return indicator_local_time(pos_part(d), policy);
        case DiffChannel::Neg: return indicator_local_time(neg_part(d), policy);
    }
    throw std::logic_error("difference_local_time: unreachable");
}

}  // namespace ranklt
