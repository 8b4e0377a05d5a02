#pragma once

#include "vspan/modeexpr.hpp"

namespace vspan {

/// A split of {1..n} into lambda (increasing, size i) and its complement
/// lambda_bar (decreasing, size n-i).
struct IndexSplit {
    int n = 0;
    int i = 0;
    std::vector<int> lambda;
    std::vector<int> lambda_bar;
};

/// All C(n,i) splits, lambda enumerated in lexicographic order. With i < 0,
/// all 2^n splits ordered by i then lexicographically.
std::vector<IndexSplit> lambda_splits(int n, int i = -1);

/// Transposes the ops at p, p+1 and adds the commutator corrections
///   u_a v_b = v_b u_a + sum_{i>=0} C(a,i) (u_i v)_{a+b-i},
/// each correction a one-op word (strictly lower filtration level).
Expression commutator_swap(Context& ctx, const ModeWord& w, int p);

/// Expands the mode (u_{-r} v)_n of a composite with stored provenance into
/// two-op words:
///   (u_{-r}v)_n = sum_i (-1)^i C(-r,i) { u_{-r-i} v_{n+i} - (-1)^r v_{n-r-i} u_i }.
/// The sums are truncated by the window-kill bound for the rightmost op
/// (sound: dropped terms annihilate every vector in the window).
Expression iterate_expand(Context& ctx, int comp_id, int n, Ket ket);
Expression iterate_expand(Context& ctx, int u, int r, int v, int n, Ket ket);

/// Rewrites the adjacent equal-index pair u_{-n} v_{-n} at p, p+1 via the
/// r=1, q=2n-1 specialization of the iterate identity:
///   u_{-n}v_{-n} = (u_{-1}v)_{-(2n-1)}
///                  - sum_{i>=0, i != n-1} u_{-1-i} v_{-(2n-1)+i}
///                  - sum_{i>=0} v_{-2n-i} u_i,
/// spliced into the host word.
Expression repeat_reduce(Context& ctx, const ModeWord& w, int p);

/// Normal-ordered expansion of Y(x^1_{-1}...x^n_{-1}v, z): one family per split,
/// each a left product of creation modes x^{lambda_j}_{-1-m}, the Y(v,z)
/// factor, and a right product x^{lambda_bar_j}_{m} (lambda_bar order), with
/// the z-exponent ledger sum(m_lambda) + (-p-1) + sum(-1-m_lambda_bar).
struct ZExpansion {
    std::vector<int> xs; // x^1..x^n (vec ids)
    int v = 0;           // vec id; may be the vacuum
    std::vector<IndexSplit> splits;
};
ZExpansion expand_minus_one_product(Context& ctx, const std::vector<int>& xs, int v);

/// Concrete words of overall mode s (the z^{-s-1} coefficient) from a
/// ZExpansion, multi-indices enumerated within the window-kill bounds.
Expression zexpansion_mode(Context& ctx, const ZExpansion& zx, int s, Ket ket);

/// Coefficient of z^{-s-1} of Y(x^1_{-r_1}( ... (x^l_{-r_l} base)), z) as
/// words of length l (plus the base mode when base is not the vacuum),
/// by nested application of the iterate identity.
Expression word_mode_expand(Context& ctx, const std::vector<std::pair<int, int>>& nested,
                            int base, int s, Ket ket);

/// Expresses the canonical block x^Q_m ... x^1_m (xs listed left to right,
/// all modes m >= 0) through strictly shorter-length mode words:
/// class (i) the z^{Q(-1-m)} coefficient of Y(rhs, z) for a given shorter-word
/// rewriting rhs of x^1_{-1}...x^Q_{-1}|0>, minus (ii) all split terms with a
/// creation mode, minus (iii) all i=0 terms with equal mode sum but some
/// index != m. Evaluate-equal to the block on every window vector.
Expression residue_repeat_identity(Context& ctx, const std::vector<int>& xs, int m,
                                   const Expression& rhs, Ket ket);

/// LHS - RHS of the Borcherds identity
///   sum_i C(-k,i) (u_{-r+i}v)_{-k-q-i} t
///   = sum_i (-1)^i C(-r,i) { u_{-k-r-i}(v_{-q+i} t) - (-1)^r v_{-q-r-i}(u_{-k+i} t) }
/// evaluated on target. Must be zero; returned for the caller to check.
VectorInModel borcherds_residual(Context& ctx, int u, int v, int k, int q, int r,
                                 const VectorInModel& target);

/// Fully sorts a word by (mode index, vector id) ascending via adjacent
/// commutator swaps; corrections are recursively sorted. Exact.
Expression sort_word(Context& ctx, const ModeWord& w);

/// Replaces the ops in [p, p+count) of host by each term of repl (bare op
/// words over the same ket), keeping the surrounding ops.
Expression splice(const ModeWord& host, int p, int count, const Expression& repl);

} // namespace vspan
