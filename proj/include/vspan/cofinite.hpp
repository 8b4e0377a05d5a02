#pragma once

#include "vspan/rewrite.hpp"

#include <vector>

namespace vspan {

/// Structural constants of a truncated VOA, certified within its window.
struct CofiniteData {
    /// Strong generating set X: interned ids of homogeneous representatives
    /// completing the degree-2 subspace to V, weight ascending then basis
    /// index ascending. The vacuum is excluded.
    std::vector<int> gens;
    int B = 0; ///< max generator weight
    /// Every weight-d piece with N <= d <= window lies in the degree-2
    /// subspace C2(V).
    int N = 0;
    int Q = 0;      ///< repeat threshold, max{N, 2B-1} + 1
    int window = 0; ///< w_max the constants were certified in
    /// codim of C2(V) in V per weight, indices 0..window.
    std::vector<int> c2_codim;

    bool is_gen(int vec_id) const;
};

/// Basis rows (quotient coordinates at weight d) spanning the degree-n
/// subspace C_n(V) at weight d: all a_{-n} b with a homogeneous of weight
/// >= 1 and b homogeneous of weight d - wt(a) - n + 1.
std::vector<SparseVec> cn_space(const Context& ctx, int n, int d);

/// Module analog at depth d: all u_{-n} m with u in V of weight >= 1 and m
/// in M of depth d - wt(u) - n + 1.
std::vector<SparseVec> cn_space_module(const Context& ctx, int n, int d);

/// Per-weight codimension of C_n in the VOA, indices 0..up_to.
std::vector<int> cn_codims_voa(const Context& ctx, int n, int up_to);
/// Per-depth codimension of C_n in the module, indices 0..up_to.
std::vector<int> cn_codims_module(const Context& ctx, int n, int up_to);

/// Deterministic strong generating set: for each weight d = 1..window the
/// quotient basis vectors indexed by the echelon complement of
/// C2(V) at weight d. Lowest weight first.
std::vector<int> choose_gens(Context& ctx);

/// Smallest N such that every weight-i piece with N <= i <= window lies in
/// C2(V). Throws NotCofiniteInWindow when the top weight still has positive
/// codimension (N would not be certified by the window). Optionally returns
/// the per-weight codimensions.
int find_N(const Context& ctx, std::vector<int>* codims = nullptr);

/// Computes X, B, N, Q and validates the weight arithmetic they rely on:
/// products of k generators have weight <= Bk, a length-l spanning word has
/// weight >= l(l+1)/2, and l(l+1)/2 > Bk for 2B-1 < k <= l.
CofiniteData compute_constants(Context& ctx);

/// All spanning words x^1_{-n_1} ... x^l_{-n_l} |0> of weight d with
/// strictly decreasing n_1 > ... > n_l > 0 and each x^j a generator.
/// Ops are stored modes ascending; d = 0 yields the bare vacuum word.
/// Deterministic order.
std::vector<ModeWord> enumerate_voa_spanset(const Context& ctx, const CofiniteData& data,
                                            int d);

/// Per-weight dimensions and spanning ranks, 0..up_to.
struct SpanCheck {
    std::vector<int> dims;
    std::vector<int> ranks;
};

/// Evaluates every spanning word per weight and checks full rank. Throws
/// SpanDeficit the first time the rank falls short of the dimension.
SpanCheck verify_voa_span(Context& ctx, const CofiniteData& data, int up_to);

/// Rewrites the nested product xs[0]_{-1}(xs[1]_{-1}( ... xs[k-1]_{-1}|0>))
/// of k >= Q generators as a combination of spanning words of length < k.
/// Uses the deterministic solve against the enumerated spanning set at the
/// product's weight, columns ordered shortest word first. Throws SpanDeficit
/// if the product escapes that span, PreconditionViolation for k < Q, and
/// WindowTooSmall when the product's weight exceeds the window.
Expression singular_like_rewrite(Context& ctx, const CofiniteData& data,
                                 const std::vector<int>& xs);

/// u split along V = span(1) + span(X at wt u) + C2(V): a unit multiple
/// (weight 0 only), generator multiples, and degree-2 products a_{-2} b
/// interned as composites.
struct C2Parts {
    Scalar unit_coeff;
    std::vector<std::pair<int, Scalar>> gen_part;  // (gen id, coeff)
    // (a, b, coeff) standing for coeff * a_{-2} b; the pair form keeps the
    // degree-2 structure explicit so callers expand by it, not by whatever
    // product expression the store happens to hold for the same vector
    std::vector<std::tuple<int, int, Scalar>> prod_part;
};

/// Deterministic decomposition of homogeneous VOA vectors modulo the
/// degree-2 subspace. Generator coefficients are the unique coordinates in
/// the complement; the degree-2 remainder is resolved against the columns
/// a_{-2} b in a fixed order (wt(a) ascending, then basis indices) with free
/// coefficients zero. Caches one solver per weight.
class C2Decomposer {
  public:
    C2Decomposer(Context& ctx, const CofiniteData& data);

    /// Decomposes the weight-wt vector with the given quotient coordinates.
    C2Parts decompose(int wt, const SparseVec& coords);

  private:
    struct WeightCache {
        std::vector<int> ids; // gen ids first, then composite ids
        std::vector<std::pair<int, int>> pairs; // (a, b) for each composite column
        std::vector<SparseVec> cols;
        int n_gens = 0;
    };
    const WeightCache& cache_for(int wt);

    Context& ctx_;
    const CofiniteData& data_;
    std::map<int, WeightCache> cache_;
};

} // namespace vspan
