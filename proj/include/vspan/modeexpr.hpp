#pragma once

#include "vspan/model.hpp"

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vspan {

/// Which ket a mode word ends in: the VOA vacuum |0> or the module
/// generator |h>.
enum class Ket { Vacuum, Generator };

/// One homogeneous VOA vector interned for use in mode expressions.
/// Composites u_{-r} v keep their provenance so iterate-style rewrites can
/// re-expand them.
struct StoredVec {
    int weight = 0;
    SparseVec coords; // VOA quotient coordinates at `weight`
    std::string name;
    bool is_unit = false; // 𝟙 (weight 0, the vacuum itself)
    // provenance of a composite u_{-r} v; -1 when primitive
    int prov_u = -1;
    int prov_r = 0;
    int prov_v = -1;
};

/// Intern store for VOA vectors, keyed by canonical quotient coordinates.
/// Shared mutable state of the symbolic layer; synchronized internally.
class VecStore {
  public:
    explicit VecStore(std::shared_ptr<const VOAModel> voa);

    int unit_id() const { return 0; }  // 𝟙
    int omega_id() const { return 1; } // conformal vector, printed "w"

    const StoredVec& get(int id) const;
    int size() const;

    /// Interns the depth-\p wt quotient basis vector number \p idx
    /// (named b<wt>.<idx>; weight-2 index 0 is the conformal vector "w").
    int intern_basis(int wt, int idx);

    /// Interns an arbitrary homogeneous vector under the given display name
    /// (reuses an existing id when the coordinates are already present).
    int intern_named(int wt, SparseVec coords, const std::string& name);

    /// Computes and interns u_{-r} v. Returns nullopt if the product is the
    /// zero vector. Throws UnresolvableProduct if its weight escapes the
    /// window.
    std::optional<int> intern_composite(int u, int r, int v);

    const VOAModel& voa() const { return *voa_; }

  private:
    int add(StoredVec sv);
    std::shared_ptr<const VOAModel> voa_;
    std::deque<StoredVec> vecs_; // deque: ids and references stay valid as the store grows
    std::map<std::pair<int, SparseVec>, int> by_coords_;
    mutable std::mutex mu_;
};

/// One mode u_n of an interned vector. Operator weight wt(vec) - n - 1.
struct ModeOp {
    int vec;
    int n;
    friend bool operator==(const ModeOp& a, const ModeOp& b) {
        return a.vec == b.vec && a.n == b.n;
    }
    friend bool operator<(const ModeOp& a, const ModeOp& b) {
        if (a.n != b.n) return a.n < b.n;
        return a.vec < b.vec;
    }
};

/// A product of modes applied to a ket, x^1_{n_1} ... x^k_{n_k} |base>.
struct ModeWord {
    std::vector<ModeOp> ops;
    Ket ket = Ket::Generator;
    friend bool operator==(const ModeWord& a, const ModeWord& b) {
        return a.ket == b.ket && a.ops == b.ops;
    }
    friend bool operator<(const ModeWord& a, const ModeWord& b) {
        if (a.ket != b.ket) return a.ket < b.ket;
        return a.ops < b.ops;
    }
};

/// Canonical finite sum of mode words: like terms merged, zeros dropped,
/// deterministic order.
class Expression {
  public:
    Expression() = default;
    void add(const Scalar& coeff, ModeWord w);
    void add(const Expression& e) {
        for (const auto& [w, c] : e.terms_) add(c, w);
    }
    void scale(const Scalar& c);
    const std::map<ModeWord, Scalar>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    int size() const { return static_cast<int>(terms_.size()); }

    static Expression single(ModeWord w) {
        Expression e;
        e.add(Scalar(1), std::move(w));
        return e;
    }

  private:
    std::map<ModeWord, Scalar> terms_;
};

/// A homogeneous vector tagged with the space it lives in.
struct VectorInModel {
    Ket ket = Ket::Generator;
    int depth = 0;
    SparseVec coords; // quotient coordinates
};

/// Graded evaluation result: depth -> quotient coordinates.
using GradedVec = std::map<int, SparseVec>;

/// Evaluation target: the space and engine a ket resolves to.
struct TargetView {
    const LiePbwSpace* space = nullptr;
    const ModeActionEngine* engine = nullptr;
};

/// Shared handle on a VOA (+ optional module) plus the intern store. The
/// module may be absent for pure-VOA work; Generator-ket operations then
/// throw PreconditionViolation.
struct Context {
    std::shared_ptr<const VOAModel> voa;
    std::shared_ptr<const ModuleModel> module; // may be null
    std::shared_ptr<VecStore> store;

    Context(std::shared_ptr<const VOAModel> v, std::shared_ptr<const ModuleModel> m);

    TargetView view(Ket k) const;
    int wt(int vec_id) const { return store->get(vec_id).weight; }
};

/// Operator weight wt(v) - n - 1 of the mode v_n.
int wt_mode(const Context& ctx, int vec_id, int n);
int word_weight(const Context& ctx, const ModeWord& w);

/// Applies a word's ops right-to-left to an explicit start vector in the
/// space `view`. Returns the resulting vector (empty coords if annihilated).
SparseVec apply_ops_to(const Context& ctx, const TargetView& view,
                       const std::vector<ModeOp>& ops, int depth, const SparseVec& start,
                       int* out_depth);

/// Evaluates a word from its ket: |0> or |h> at depth 0.
VectorInModel evaluate(const Context& ctx, const ModeWord& w);
/// Evaluates an expression; terms of equal final depth are combined.
GradedVec evaluate(const Context& ctx, const Expression& e);
/// True when both expressions evaluate to the same graded vector.
bool evaluate_equal(const Context& ctx, const Expression& a, const Expression& b);

/// Plain-text syntax: `w[-1] w[-1] |0>`, `L[-2] L[-2] |h>`, optional
/// rational coefficients and +/- between words, `b<wt>.<idx>[n]` for other
/// basis vectors. L[k] is the Virasoro mode, i.e. w[k+1].
Expression parse_expression(Context& ctx, const std::string& text);
std::string print_word(const Context& ctx, const ModeWord& w);
std::string print_expression(const Context& ctx, const Expression& e);

} // namespace vspan
