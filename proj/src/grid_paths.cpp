#include "ranklt/grid_paths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ranklt {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_finite(std::span<const double> xs, const char* what) {
    for (size_t j = 0; j < xs.size(); ++j) {
        if (!std::isfinite(xs[j]))
            throw std::invalid_argument(std::string(what) + " contains a non-finite entry at index " +
                                        std::to_string(j));
    }
}

}  // namespace

GridPtr make_grid(double T, int n_steps) {
    require(std::isfinite(T) && T > 0.0, "make_grid: horizon T must be positive and finite");
    require(n_steps >= 1, "make_grid: n_steps must be >= 1");
    auto g = std::make_shared<TimeGrid>();
    g->horizon = T;
    g->n_steps = n_steps;
    g->dt = T / n_steps;
    g->times.resize(static_cast<size_t>(n_steps) + 1);
    for (int j = 0; j < n_steps; ++j) g->times[static_cast<size_t>(j)] = j * g->dt;
    g->times[static_cast<size_t>(n_steps)] = T;  // exact right endpoint
    return g;
}

CadlagPath::CadlagPath(GridPtr grid, std::vector<double> values, std::vector<double> jumps,
                       std::vector<double> lefts)
    : grid_(std::move(grid)), values_(std::move(values)), jumps_(std::move(jumps)),
      lefts_(std::move(lefts)) {}

CadlagPath CadlagPath::from_values_jumps(GridPtr grid, std::vector<double> values,
                                         std::vector<double> jumps) {
    require(grid != nullptr, "CadlagPath: null grid");
    const size_t n = static_cast<size_t>(grid->n_steps) + 1;
    require(values.size() == n, "CadlagPath: values length must be n_steps + 1");
    require(jumps.size() == n, "CadlagPath: jumps length must be n_steps + 1");
    require(jumps[0] == 0.0, "CadlagPath: jumps[0] must be zero");
    check_finite(values, "CadlagPath values");
    check_finite(jumps, "CadlagPath jumps");
    std::vector<double> lefts(n);
    lefts[0] = values[0];
    for (size_t j = 1; j < n; ++j) lefts[j] = values[j] - jumps[j];
    return CadlagPath(std::move(grid), std::move(values), std::move(jumps), std::move(lefts));
}

CadlagPath CadlagPath::from_values_lefts(GridPtr grid, std::vector<double> values,
                                         std::vector<double> lefts) {
    require(grid != nullptr, "CadlagPath: null grid");
    const size_t n = static_cast<size_t>(grid->n_steps) + 1;
    require(values.size() == n, "CadlagPath: values length must be n_steps + 1");
    require(lefts.size() == n, "CadlagPath: left limits length must be n_steps + 1");
    check_finite(values, "CadlagPath values");
    check_finite(lefts, "CadlagPath left limits");
    require(lefts[0] == values[0], "CadlagPath: left limit at index 0 must equal values[0]");
    std::vector<double> jumps(n);
    jumps[0] = 0.0;
    for (size_t j = 1; j < n; ++j) jumps[j] = values[j] - lefts[j];
    return CadlagPath(std::move(grid), std::move(values), std::move(jumps), std::move(lefts));
}

CadlagPath CadlagPath::continuous(GridPtr grid, std::vector<double> values) {
    const size_t n = values.size();
    return from_values_jumps(std::move(grid), std::move(values), std::vector<double>(n, 0.0));
}

bool CadlagPath::has_jumps() const {
    return std::any_of(jumps_.begin(), jumps_.end(), [](double j) { return j != 0.0; });
}

std::vector<double> ito_sum(std::span<const double> h, std::span<const double> h_left,
                            const CadlagPath& x) {
    const size_t n = static_cast<size_t>(x.n_steps()) + 1;
    require(h.size() == n, "ito_sum: integrand length must be n_steps + 1");
    require(h_left.size() == n, "ito_sum: left-state integrand length must be n_steps + 1");
    std::vector<double> out(n);
    double acc = 0.0;
    out[0] = 0.0;
    for (size_t j = 1; j < n; ++j) {
        acc += h[j - 1] * x.cont_increment(static_cast<int>(j));
        acc += h_left[j] * x.jump(static_cast<int>(j));
        out[j] = acc;
    }
    return out;
}

std::vector<double> ito_sum(std::span<const double> h, const CadlagPath& x) {
    const size_t n = static_cast<size_t>(x.n_steps()) + 1;
    require(h.size() == n, "ito_sum: integrand length must be n_steps + 1");
    std::vector<double> out(n);
    double acc = 0.0;
    out[0] = 0.0;
    for (size_t j = 1; j < n; ++j) {
        acc += h[j - 1] * x.cont_increment(static_cast<int>(j));
        acc += h[j - 1] * x.jump(static_cast<int>(j));
        out[j] = acc;
    }
    return out;
}

std::vector<double> quadratic_variation(const CadlagPath& x) {
    const size_t n = static_cast<size_t>(x.n_steps()) + 1;
    std::vector<double> out(n);
    double acc = 0.0;
    out[0] = 0.0;
    for (size_t j = 1; j < n; ++j) {
        const double d = x.value(static_cast<int>(j)) - x.value(static_cast<int>(j) - 1);
        acc += d * d;
        out[j] = acc;
    }
    return out;
}

namespace {

using ApplyFn = double (*)(std::span<const double> state, double coeff);

double apply_max(std::span<const double> s, double) {
    double m = s[0];
    for (size_t i = 1; i < s.size(); ++i) m = std::max(m, s[i]);
    return m;
}
double apply_min(std::span<const double> s, double) {
    double m = s[0];
    for (size_t i = 1; i < s.size(); ++i) m = std::min(m, s[i]);
    return m;
}
double apply_pos(std::span<const double> s, double) { return std::max(s[0], 0.0); }
double apply_neg(std::span<const double> s, double) { return std::max(-s[0], 0.0); }
double apply_abs(std::span<const double> s, double) { return std::abs(s[0]); }
double apply_sum(std::span<const double> s, double) {
    double acc = 0.0;
    for (double v : s) acc += v;
    return acc;
}
double apply_scale(std::span<const double> s, double c) { return c * s[0]; }
double apply_diff(std::span<const double> s, double) { return s[0] - s[1]; }

}  // namespace

CadlagPath pointwise(PointwiseOp op, std::span<const CadlagPath* const> inputs, double coeff) {
    require(!inputs.empty(), "pointwise: at least one input path required");
    const size_t arity = inputs.size();
    switch (op) {
        case PointwiseOp::Max:
        case PointwiseOp::Min:
        case PointwiseOp::Sum:
            break;
        case PointwiseOp::Diff:
            require(arity == 2, "pointwise: diff takes exactly two paths");
            break;
        case PointwiseOp::Scale:
            require(std::isfinite(coeff), "pointwise: scale coefficient must be finite");
            [[fallthrough]];
        default:
            require(arity == 1, "pointwise: this operation takes exactly one path");
            break;
    }
    const GridPtr& grid = inputs[0]->grid_ptr();
    for (const CadlagPath* p : inputs)
        require(p->grid().same_shape(*grid), "pointwise: all inputs must share one grid");

    ApplyFn fn = nullptr;
    switch (op) {
        case PointwiseOp::Max: fn = apply_max; break;
        case PointwiseOp::Min: fn = apply_min; break;
        case PointwiseOp::PosPart: fn = apply_pos; break;
        case PointwiseOp::NegPart: fn = apply_neg; break;
        case PointwiseOp::Abs: fn = apply_abs; break;
        case PointwiseOp::Sum: fn = apply_sum; break;
        case PointwiseOp::Scale: fn = apply_scale; break;
        case PointwiseOp::Diff: fn = apply_diff; break;
    }

    const size_t n = static_cast<size_t>(grid->n_steps) + 1;
    std::vector<double> out_values(n), out_lefts(n);
    std::vector<double> state(arity);
    for (size_t j = 0; j < n; ++j) {
        for (size_t i = 0; i < arity; ++i) state[i] = inputs[i]->value(static_cast<int>(j));
        out_values[j] = fn(state, coeff);
        for (size_t i = 0; i < arity; ++i) state[i] = inputs[i]->left_limit(static_cast<int>(j));
        out_lefts[j] = fn(state, coeff);
    }
    return CadlagPath::from_values_lefts(grid, std::move(out_values), std::move(out_lefts));
}

namespace {
CadlagPath apply2(PointwiseOp op, const CadlagPath& a, const CadlagPath& b) {
    const CadlagPath* in[2] = {&a, &b};
    return pointwise(op, in);
}
CadlagPath apply1(PointwiseOp op, const CadlagPath& x, double coeff = 0.0) {
    const CadlagPath* in[1] = {&x};
    return pointwise(op, in, coeff);
}
}  // namespace

CadlagPath pmax(const CadlagPath& a, const CadlagPath& b) { return apply2(PointwiseOp::Max, a, b); }
CadlagPath pmin(const CadlagPath& a, const CadlagPath& b) { return apply2(PointwiseOp::Min, a, b); }
CadlagPath pos_part(const CadlagPath& x) { return apply1(PointwiseOp::PosPart, x); }
CadlagPath neg_part(const CadlagPath& x) { return apply1(PointwiseOp::NegPart, x); }
CadlagPath abs_path(const CadlagPath& x) { return apply1(PointwiseOp::Abs, x); }
CadlagPath sum_paths(const std::vector<const CadlagPath*>& xs) {
    return pointwise(PointwiseOp::Sum, xs);
}
CadlagPath scale_path(const CadlagPath& x, double c) { return apply1(PointwiseOp::Scale, x, c); }
CadlagPath diff_paths(const CadlagPath& a, const CadlagPath& b) {
    return apply2(PointwiseOp::Diff, a, b);
}

}  // namespace ranklt
