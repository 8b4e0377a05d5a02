#pragma once

#include "vspan/cofinite.hpp"

#include <set>
#include <tuple>

namespace vspan {

/// Annihilation threshold of the module generator: one more than the
/// largest nonnegative mode of any generator that acts nonzero on it, or 0
/// when every nonnegative generator mode annihilates it. The vacuum ket
/// always has threshold 0.
int compute_L(Context& ctx, const CofiniteData& data);

/// Spanning-form predicate: every vector is a generator, ops are sorted
/// ascending by (mode, vector), all modes are below the ket's annihilation
/// threshold, negative mode values never repeat, and each nonnegative mode
/// value occurs at most Q-1 times.
bool is_spanning_word(const Context& ctx, const CofiniteData& data, int L, const ModeWord& w);

/// All spanning words of operator weight d over the generator ket, in a
/// deterministic order. Finite for every d: nonnegative modes are confined
/// to {0..L-1} with at most Q-1 occurrences each, and negative modes are
/// strictly decreasing.
std::vector<ModeWord> enumerate_module_spanset(const Context& ctx, const CofiniteData& data,
                                               int L, int d);

/// Per-call rewrite log: one line per applied rule with the filtration
/// level, the active horizon, and the term count it produced.
struct NormTrace {
    std::vector<std::string> lines;
};

/// Filtration level of a word: the summed weights of its vector entries.
int filtration_level(const Context& ctx, const ModeWord& w);

/// Rewrites mode words into the spanning form, exactly. The strategy per
/// word: (1) drop unit modes (delta at -1); (2) sort ascending by adjacent
/// commutator swaps; (3) replace non-generator vectors through the
/// degree-2 decomposition, re-expanding the a_{-2}b parts; (4) annihilate
/// words whose rightmost mode reaches the ket's threshold; (5) fix repeat
/// violations value by value, shallowest first: a nonnegative value with Q
/// or more ops is rewritten through residue_repeat_identity against the
/// singular-like rewrite of its block, a repeated negative value through
/// repeat_reduce, and a violation below ops that are still deeper is
/// handled by normalizing the shallow suffix on its own (the front split;
/// the suffix has strictly smaller filtration level).
///
/// Termination: recursive steps strictly decrease (filtration level,
/// horizon) lexicographically, and the fixed-level repeat loops strictly
/// decrease the op count at the violated value (asserted). Revisiting a
/// word already in progress at the same horizon throws (the measure would
/// have failed); results are memoized across calls.
class Normalizer {
  public:
    Normalizer(Context& ctx, const CofiniteData& data, int L_gen);

    /// Throws WindowTooSmall when the word's operator weight (its final
    /// depth) exceeds the ket's window.
    Expression normalize(const ModeWord& w, NormTrace* trace = nullptr);
    Expression normalize(const Expression& e, NormTrace* trace = nullptr);

  private:
    using SrKey = std::pair<std::vector<ModeOp>, Ket>;
    using Key = std::tuple<std::vector<ModeOp>, Ket, int>;

    int level(Ket k) const { return k == Ket::Generator ? L_ : 0; }
    void tr(const char* rule, int t, int K, int terms);

    Expression sortreplace(const ModeWord& w);
    Expression np(const ModeWord& w, int K);
    Expression impose_one(const ModeWord& w, int K);
    Expression impose_impl(const ModeWord& w, int K);

    Context& ctx_;
    const CofiniteData& data_;
    int L_;
    C2Decomposer c2_;
    std::map<SrKey, Expression> sr_memo_;
    std::map<Key, Expression> np_memo_;
    std::map<Key, Expression> imp_memo_;
    std::set<Key> in_progress_;
    NormTrace* trace_ = nullptr;
};

/// One-shot convenience wrapper; safe to run concurrently on independent
/// inputs since each call builds its own state.
Expression normalize(Context& ctx, const CofiniteData& data, int L, const Expression& e,
                     NormTrace* trace = nullptr);

/// Per-depth dimensions, achieved spanning ranks, and spanning-set sizes
/// (the finiteness certificate).
struct ModuleSpanCheck {
    std::vector<int> dims;
    std::vector<int> ranks;
    std::vector<int> counts;
};

/// Evaluates every spanning word per depth and checks full rank against the
/// module dimensions. Throws SpanDeficit at the first shortfall.
ModuleSpanCheck verify_module_span(Context& ctx, const CofiniteData& data, int L, int up_to);

} // namespace vspan
