#pragma once

#include "vspan/spanset.hpp"

namespace vspan {

/// The level-n circle product u ∘_n w = Σ_{j>=0} C(wt(u)+n, j) u_{j-2n-2} w
/// for homogeneous u (VOA coordinates at weight wu) and homogeneous module
/// w at depth delta. The sum is finite (the binomial vanishes past
/// wt(u)+n); component j lands at depth delta + wu + 2n + 1 - j. Unit u
/// yields zero (its only candidate mode needs j = 2n+1 where the binomial
/// vanishes). Throws OutOfWindow when the top component escapes the module
/// window.
GradedVec circ_n(const Context& ctx, int wu, const SparseVec& cu, int n, int delta,
                 const SparseVec& cw);

/// Flattened coordinates for the graded window M_{<=W}.
struct FlatWindow {
    std::vector<int> offsets; ///< offsets[d] = dim M(0) + ... + dim M(d-1)
    int total = 0;
};
FlatWindow flat_window(const Context& ctx, int W);
SparseVec flatten(const FlatWindow& fw, const GradedVec& gv);

/// Echelon basis (in flattened coordinates) of the span of every
/// u ∘_n w whose top component lies at depth <= W, u and w running over
/// graded bases. Levels n >= 0 only.
EchelonBasis on_span(const Context& ctx, int n, int W);

/// Window-family estimate of dim A_n(M) = dim(M / O_n(M)).
struct AnEstimate {
    std::vector<int> window_sizes;
    std::vector<int> dims; ///< dim(M_{<=W} / on_span) per window
    /// Depth above which every spanning element has leading index
    /// n1 >= 2n+2 and hence reduces modulo O_n(M).
    int rep_bound = 0;
    bool stabilized = false;
    int value = -1; ///< dims.back() when stabilized, else -1
};

/// Smallest depth bound such that every spanning element of depth >= bound
/// has its deepest mode at or below -(2n+2): the maximum weight over words
/// confined to modes in [-(2n+1), L-1] (negatives strict, nonnegatives at
/// most Q-1 per value, heaviest generators), plus one. Such shallow words
/// are the only spanning elements that escape the reduction.
int an_representative_bound(const Context& ctx, const CofiniteData& data, int L, int n);

/// Runs the schedule (strictly increasing, max <= module window) and
/// reports the quotient dimension per window. Stabilized means the last
/// three dims agree and the representative bound fits under the largest
/// window; without both, the dims are upper-bound estimates only. Requires
/// a simple-quotient module.
AnEstimate an_dim_estimate(Context& ctx, const CofiniteData& data, int L, int n,
                           const std::vector<int>& schedule);

} // namespace vspan
