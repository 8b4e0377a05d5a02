#pragma once

#include "vspan/errors.hpp"
#include "vspan/linalg.hpp"
#include "vspan/scalar.hpp"

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace vspan {

/// PBW monomial exponents: weakly decreasing positive parts (n1 >= n2 >= ...),
/// each >= the space's minimal part. The word stands for L(-n1)...L(-nk)|base>.
using Partition = std::vector<int>;

enum class SpaceKind {
    Verma,         // free lowest-weight space, no relations beyond PBW
    SimpleQuotient // Verma modulo the radical of the contravariant form
};

/// Graded lowest-weight space over the Virasoro algebra, truncated to
/// depths 0..w_max. min_part = 2 with a vacuum base (L(-1)|0> = 0 is baked
/// in), min_part = 1 with a module generator |h>.
///
/// Two coordinate systems per depth d:
///  - Verma coordinates: one per PBW word, in descending-lex word order;
///  - quotient coordinates: one per kept word (echelon complement of the
///    form radical). For Verma kind the two coincide.
///
/// The radical at each depth is assembled exactly: images L(-1)r, L(-2)r of
/// the radical one and two levels up (these generate, since L(-1), L(-2)
/// generate the lowering subalgebra), completed by the kernel of the
/// contravariant form restricted to the complement of those images. The
/// kernel step is exact, not heuristic: a residual vector pairs to zero
/// against the radical automatically, so vanishing against the complement
/// is vanishing against everything.
class LiePbwSpace {
  public:
    LiePbwSpace(Scalar c, Scalar h, int min_part, int w_max, SpaceKind kind);

    Scalar c() const { return c_; }
    Scalar h() const { return h_; }
    int min_part() const { return min_part_; }
    int w_max() const { return w_max_; }
    SpaceKind kind() const { return kind_; }
    bool vacuum_base() const { return min_part_ >= 2; }

    int verma_dim(int d) const;
    int dim(int d) const; // quotient dimension
    const Partition& word(int d, int i) const;
    int word_index(int d, const Partition& p) const; // throws if absent
    /// Verma-coordinate indices of the kept (quotient basis) words, ascending.
    const std::vector<int>& kept(int d) const;
    const std::vector<SparseVec>& radical_rows(int d) const;

    /// L(k) applied to one PBW word, exact, in Verma coordinates at depth d-k.
    const SparseVec& act_word(int k, int d, int i) const;

    /// L(k) on a Verma-coordinate vector at depth d. Result at depth d-k.
    /// Depth below zero is annihilation (empty result); a nonzero result
    /// beyond w_max throws OutOfWindow.
    SparseVec act_verma(int k, int d, const SparseVec& v) const;

    /// L(k) in the space's own coordinates (quotient coordinates for
    /// SimpleQuotient; same as act_verma for Verma kind).
    SparseVec act(int k, int d, const SparseVec& v) const;

    /// Canonical section of the quotient map: kept words with the given
    /// coefficients, as a Verma-coordinate vector.
    SparseVec lift(int d, const SparseVec& qv) const;
    /// Quotient coordinates of a Verma-coordinate vector.
    SparseVec project(int d, SparseVec v) const;

    /// Contravariant form of two PBW words at depth d (adjoint of L(-n) is
    /// L(n), <base, base> = 1).
    Scalar gram_entry(int d, int i, int j) const;
    /// Full Gram matrix on the depth-d PBW basis.
    SparseMatrix gram(int d) const;

  private:
    void build_words();
    void build_quotient();
    SparseVec act_base(int k) const;
    const SparseVec& act_word_impl(int k, int d, int i) const;

    Scalar c_, h_;
    int min_part_, w_max_;
    SpaceKind kind_;
    std::vector<std::vector<Partition>> words_;           // [d][i]
    std::vector<std::map<Partition, int>> index_;         // [d]
    std::vector<std::vector<int>> kept_;                  // [d] ascending
    std::vector<std::vector<SparseVec>> radical_;         // [d] rref rows
    std::vector<std::vector<int>> radical_pivots_;        // [d] ascending
    mutable std::map<std::tuple<int, int, int>, SparseVec> act_cache_;
    mutable std::mutex mu_;
};

} // namespace vspan
