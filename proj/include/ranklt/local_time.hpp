#pragma once

#include <string>
#include <vector>

#include "ranklt/grid_paths.hpp"
#include "ranklt/rank.hpp"

namespace ranklt {

// Sign convention used throughout: sgn(x) = -1 for x <= 0, +1 for x > 0.
// The value at zero is load-bearing; several exact cancellations below depend
// on it and it must not be changed independently of them.
inline double sgn(double x) { return x > 0.0 ? 1.0 : -1.0; }

// Local time accumulations along one path. Two channels:
//   L        the raw accumulation of the chosen estimator,
//   script_l the jump-adjusted variant: script_l = L/2 + sum of jumps taken
//            from a left limit inside the zero band.
// Estimators that natively produce one channel derive the other through that
// relation, so script_l[j] - script_l[j-1] = (L[j] - L[j-1])/2 + corr_j holds
// by construction for all of them.
struct LocalTimePath {
    GridPtr grid;
    std::vector<double> L;
    std::vector<double> script_l;
    std::string estimator;
    EpsilonPolicy policy;
    double epsilon = 0.0;  // resolved band width actually used
};

// Per-step pieces of the threshold-free estimator below; exposed separately
// because the identity checkers need the raw increments.
//   dL[j]   = |left(j)| - |value(j-1)| - sgn(value(j-1)) * cont_increment(j)
//   corr[j] = jump(j) if |left(j)| <= eps else 0
// dL[0] = corr[0] = 0. Note dL contains no jump term: the candidate jump
// correction cancels against the increment decomposition, so L is continuous.
struct TanakaSteps {
    std::vector<double> dL;
    std::vector<double> corr;
};
TanakaSteps tanaka_steps(const CadlagPath& x, double eps);

// Pathwise estimator from the absolute-value decomposition. L accumulates dL,
// script_l accumulates dL/2 + corr. Works for any path; needs no band for L
// itself (the policy only feeds the jump correction in script_l).
LocalTimePath tanaka_local_time(const CadlagPath& x,
                                const EpsilonPolicy& policy = EpsilonPolicy::exact());

// Indicator-integral estimator for nonnegative paths: script_l is the ito_sum
// of 1{state in the zero band} against z, with the indicator taken at the
// previous node for continuous moves and at the left limit for jumps. L is
// derived as 2 * (script_l - jump corrections). Throws if z drops below -eps.
LocalTimePath indicator_local_time(const CadlagPath& z, const EpsilonPolicy& policy);

// Occupation-density estimator: L[j] = (1/(2 eps)) * sum of squared continuous
// increments started inside the band (jump displacements excluded).
LocalTimePath occupation_local_time(const CadlagPath& x, double eps);

// Level-visit estimator for lattice paths with step size h:
// L[j] = h * #{ i <= j : value(i-1) == 0 }. Throws if the path does not live
// on the lattice h*Z with per-step moves in {0, +-h}.
LocalTimePath crossing_local_time(const CadlagPath& x, double h);

// Local time of the difference X - Y.
//   Plain  tanaka estimator on X - Y
//   Pos    indicator estimator on (X - Y)^+
//   Neg    indicator estimator on (X - Y)^-
enum class DiffChannel { Plain, Pos, Neg };
LocalTimePath difference_local_time(const CadlagPath& x, const CadlagPath& y, DiffChannel which,
                                    const EpsilonPolicy& policy);

}  // namespace ranklt
