#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace ranklt {

// Uniform time grid on [0, T] with n_steps steps of width dt = T / n_steps.
// times[j] = j * dt for j < n_steps; the last entry is forced to T so both
// endpoints are exact.
struct TimeGrid {
    double horizon = 1.0;
    int n_steps = 1;
    double dt = 1.0;
    std::vector<double> times;

    bool same_shape(const TimeGrid& other) const {
        return horizon == other.horizon && n_steps == other.n_steps;
    }
};

using GridPtr = std::shared_ptr<const TimeGrid>;

/// Build a grid. Throws std::invalid_argument for T <= 0 or n_steps < 1.
GridPtr make_grid(double T, int n_steps);

// A cadlag path sampled on a grid. Stored state per grid index j:
//   values[j]  value at t_j (post-jump),
//   jumps[j]   jump at t_j (jumps[0] == 0; jumps may only sit on grid points),
//   lefts[j]   left limit at t_j, lefts[0] == values[0].
// Exactly one of jumps/lefts is derived at construction time so that the
// representation stays consistent:
//   from_values_jumps:  lefts[j] = values[j] - jumps[j]
//   from_values_lefts:  jumps[j] = values[j] - lefts[j]
// The continuous move over step j is cont_increment(j) = lefts[j] - values[j-1].
class CadlagPath {
public:
    static CadlagPath from_values_jumps(GridPtr grid, std::vector<double> values,
                                        std::vector<double> jumps);
    static CadlagPath from_values_lefts(GridPtr grid, std::vector<double> values,
                                        std::vector<double> lefts);
    /// Continuous path: all jumps zero.
    static CadlagPath continuous(GridPtr grid, std::vector<double> values);

    const TimeGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    int n_steps() const { return grid_->n_steps; }

    std::span<const double> values() const { return values_; }
    std::span<const double> jumps() const { return jumps_; }
    std::span<const double> left_limits() const { return lefts_; }

    double value(int j) const { return values_[static_cast<size_t>(j)]; }
    double jump(int j) const { return jumps_[static_cast<size_t>(j)]; }
    double left_limit(int j) const { return lefts_[static_cast<size_t>(j)]; }
    double cont_increment(int j) const {
        return lefts_[static_cast<size_t>(j)] - values_[static_cast<size_t>(j) - 1];
    }

    bool has_jumps() const;

private:
    CadlagPath(GridPtr grid, std::vector<double> values, std::vector<double> jumps,
               std::vector<double> lefts);
    GridPtr grid_;
    std::vector<double> values_;
    std::vector<double> jumps_;
    std::vector<double> lefts_;
};

// A finite family of paths on one shared grid, plus the metadata needed to
// reproduce or persist it.
struct Ensemble {
    GridPtr grid;
    std::vector<CadlagPath> paths;
    std::vector<std::string> labels;
    std::string model;          // model kind name, "fixture:<name>" for fixtures
    nlohmann::json params;      // full model parameters as configured
    std::uint64_t seed = 0;     // master seed used to generate it

    int size() const { return static_cast<int>(paths.size()); }
    const CadlagPath& path(int i) const { return paths[static_cast<size_t>(i)]; }
};

// Cumulative discrete stochastic integral of a predictable integrand H
// against X. Step j (j >= 1) adds
//   h[j-1]      * cont_increment(j)     (state sampled at the previous node)
//   h_left[j]   * jumps[j]              (state sampled at the left limit)
// and I[0] = 0. The two-array overload is for indicator-style integrands whose
// value at a left limit differs from the value at the previous node; the
// single-array overload uses h_left[j] = h[j-1].
std::vector<double> ito_sum(std::span<const double> h, std::span<const double> h_left,
                            const CadlagPath& x);
std::vector<double> ito_sum(std::span<const double> h, const CadlagPath& x);

/// Cumulative realized quadratic variation: QV[j] = sum_{i<=j} (values[i] - values[i-1])^2.
std::vector<double> quadratic_variation(const CadlagPath& x);

enum class PointwiseOp { Max, Min, PosPart, NegPart, Abs, Sum, Scale, Diff };

// Lattice operations applied at values and left limits independently; the
// output jump at j is then value[j] - left[j], so a jump appears exactly where
// f(values) and f(left limits) disagree. Scale takes one input and the
// coefficient; Diff takes exactly two (first minus second); Max/Min/Sum accept
// one or more; the rest take one.
CadlagPath pointwise(PointwiseOp op, std::span<const CadlagPath* const> inputs,
                     double coeff = 0.0);

CadlagPath pmax(const CadlagPath& a, const CadlagPath& b);
CadlagPath pmin(const CadlagPath& a, const CadlagPath& b);
CadlagPath pos_part(const CadlagPath& x);
CadlagPath neg_part(const CadlagPath& x);
CadlagPath abs_path(const CadlagPath& x);
CadlagPath sum_paths(const std::vector<const CadlagPath*>& xs);
CadlagPath scale_path(const CadlagPath& x, double c);
CadlagPath diff_paths(const CadlagPath& a, const CadlagPath& b);

}  // namespace ranklt
