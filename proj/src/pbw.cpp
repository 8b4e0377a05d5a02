#include "vspan/pbw.hpp"

#include <algorithm>
#include <sstream>

namespace vspan {

namespace {

void gen_partitions(int d, int max_part, int min_part, Partition& prefix,
                    std::vector<Partition>& out) {
    if (d == 0) {
        out.push_back(prefix);
        return;
    }
    for (int p = std::min(d, max_part); p >= min_part; --p) {
        prefix.push_back(p);
        gen_partitions(d - p, p, min_part, prefix, out);
        prefix.pop_back();
    }
}

std::string word_str(const Partition& p) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    os << "]";
    return os.str();
}

} // namespace

LiePbwSpace::LiePbwSpace(Scalar c, Scalar h, int min_part, int w_max, SpaceKind kind)
    : c_(std::move(c)), h_(std::move(h)), min_part_(min_part), w_max_(w_max), kind_(kind) {
    if (min_part_ != 1 && min_part_ != 2)
        throw PreconditionViolation("LiePbwSpace: min_part must be 1 (module) or 2 (vacuum)");
    if (w_max_ < 0) throw PreconditionViolation("LiePbwSpace: negative window");
    if (vacuum_base() && !h_.is_zero())
        throw PreconditionViolation("LiePbwSpace: vacuum base has h = 0");
    build_words();
    build_quotient();
}

void LiePbwSpace::build_words() {
    words_.resize(static_cast<std::size_t>(w_max_) + 1);
    index_.resize(static_cast<std::size_t>(w_max_) + 1);
    for (int d = 0; d <= w_max_; ++d) {
        Partition prefix;
        gen_partitions(d, d, min_part_, prefix, words_[static_cast<std::size_t>(d)]);
        for (int i = 0; i < static_cast<int>(words_[static_cast<std::size_t>(d)].size()); ++i)
            index_[static_cast<std::size_t>(d)][words_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)]] = i;
    }
}

int LiePbwSpace::verma_dim(int d) const {
    if (d < 0 || d > w_max_) throw PreconditionViolation("verma_dim: depth outside window");
    return static_cast<int>(words_[static_cast<std::size_t>(d)].size());
}

int LiePbwSpace::dim(int d) const {
    if (d < 0 || d > w_max_) throw PreconditionViolation("dim: depth outside window");
    return static_cast<int>(kept_[static_cast<std::size_t>(d)].size());
}

const Partition& LiePbwSpace::word(int d, int i) const {
    if (d < 0 || d > w_max_ || i < 0 || i >= verma_dim(d))
        throw PreconditionViolation("word: index outside window");
    return words_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)];
}

int LiePbwSpace::word_index(int d, const Partition& p) const {
    if (d < 0 || d > w_max_) throw PreconditionViolation("word_index: depth outside window");
    auto it = index_[static_cast<std::size_t>(d)].find(p);
    if (it == index_[static_cast<std::size_t>(d)].end())
        throw PreconditionViolation("word_index: no word " + word_str(p) + " at depth " + std::to_string(d));
    return it->second;
}

const std::vector<int>& LiePbwSpace::kept(int d) const {
    if (d < 0 || d > w_max_) throw PreconditionViolation("kept: depth outside window");
    return kept_[static_cast<std::size_t>(d)];
}

const std::vector<SparseVec>& LiePbwSpace::radical_rows(int d) const {
    if (d < 0 || d > w_max_) throw PreconditionViolation("radical_rows: depth outside window");
    return radical_[static_cast<std::size_t>(d)];
}

SparseVec LiePbwSpace::act_base(int k) const {
    if (vacuum_base()) {
        if (k <= -2) return sv_unit(word_index(-k, Partition{-k}));
        return {};
    }
    if (k <= -1) return sv_unit(word_index(-k, Partition{-k}));
    if (k == 0) return h_.is_zero() ? SparseVec{} : sv_scaled(sv_unit(0), h_);
    return {};
}

const SparseVec& LiePbwSpace::act_word(int k, int d, int i) const {
    std::lock_guard<std::mutex> lock(mu_);
    return act_word_impl(k, d, i);
}

// Precondition (maintained by act_verma and the recursion): 0 <= d-k <= w_max
// or the result is empty. Called with mu_ held; recursion is single-threaded
// under the lock.
const SparseVec& LiePbwSpace::act_word_impl(int k, int d, int i) const {
    auto key = std::make_tuple(k, d, i);
    auto it = act_cache_.find(key);
    if (it != act_cache_.end()) return it->second;

    SparseVec out;
    int target = d - k;
    const Partition& w = word(d, i);
    if (target < 0) {
        // annihilated: every PBW word bottoms out at depth >= 0
    } else if (w.empty()) {
        out = act_base(k);
    } else {
        int n1 = w[0];
        if (k <= -1 && -k >= n1) {
            Partition p;
            p.reserve(w.size() + 1);
            p.push_back(-k);
            p.insert(p.end(), w.begin(), w.end());
            out = sv_unit(word_index(target, p));
        } else {
            Partition rest(w.begin() + 1, w.end());
            int dr = d - n1;
            int ri = word_index(dr, rest);
            // L(k)L(-n1) = L(-n1)L(k) + (k+n1)L(k-n1) + delta_{k,n1} (c/12)(k^3-k)
            SparseVec inner = act_word_impl(k, dr, ri); // depth dr-k < target
            for (const auto& [j, coef] : inner) {
                const SparseVec& up = act_word_impl(-n1, dr - k, j); // depth target
                sv_axpy(out, coef, up);
            }
            if (k + n1 != 0) {
                const SparseVec& t2 = act_word_impl(k - n1, dr, ri); // depth target
                sv_axpy(out, Scalar(k + n1), t2);
            }
            if (k == n1) {
                Scalar cc = c_ * Scalar(static_cast<long>(k) * k * k - k, 12);
                if (!cc.is_zero()) sv_axpy(out, cc, sv_unit(ri));
            }
        }
    }
    return act_cache_.emplace(key, std::move(out)).first->second;
}

SparseVec LiePbwSpace::act_verma(int k, int d, const SparseVec& v) const {
    if (d < 0 || d > w_max_) throw PreconditionViolation("act_verma: depth outside window");
    if (v.empty()) return {};
    int target = d - k;
    if (target < 0) return {};
    if (target > w_max_)
        throw OutOfWindow("act_verma: L(" + std::to_string(k) + ") sends depth " + std::to_string(d) +
                          " to " + std::to_string(target) + " > window " + std::to_string(w_max_));
    SparseVec out;
    for (const auto& [i, coef] : v) sv_axpy(out, coef, act_word(k, d, i));
    return out;
}

SparseVec LiePbwSpace::act(int k, int d, const SparseVec& v) const {
    if (kind_ == SpaceKind::Verma) return act_verma(k, d, v);
    if (v.empty()) return {};
    int target = d - k;
    if (target < 0) return {};
    SparseVec res = act_verma(k, d, lift(d, v));
    return project(target, std::move(res));
}

SparseVec LiePbwSpace::lift(int d, const SparseVec& qv) const {
    if (kind_ == SpaceKind::Verma) return qv;
    const std::vector<int>& k = kept(d);
    SparseVec out;
    out.reserve(qv.size());
    for (const auto& [pos, val] : qv) {
        if (pos < 0 || pos >= static_cast<int>(k.size()))
            throw PreconditionViolation("lift: coordinate outside quotient basis");
        out.emplace_back(k[static_cast<std::size_t>(pos)], val);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

SparseVec LiePbwSpace::project(int d, SparseVec v) const {
    if (kind_ == SpaceKind::Verma) return v;
    const auto& rows = radical_[static_cast<std::size_t>(d)];
    const auto& pivots = radical_pivots_[static_cast<std::size_t>(d)];
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Scalar coef = sv_get(v, pivots[r]);
        if (!coef.is_zero()) sv_axpy(v, -coef, rows[r]);
    }
    const std::vector<int>& k = kept(d);
    SparseVec out;
    out.reserve(v.size());
    for (const auto& [idx, val] : v) {
        auto it = std::lower_bound(k.begin(), k.end(), idx);
        if (it == k.end() || *it != idx)
            throw PreconditionViolation("project: residual outside the kept complement");
        out.emplace_back(static_cast<int>(it - k.begin()), val);
    }
    return out;
}

Scalar LiePbwSpace::gram_entry(int d, int i, int j) const {
    SparseVec v = sv_unit(j);
    int dep = d;
    for (int p : word(d, i)) {
        v = act_verma(p, dep, v);
        dep -= p;
        if (v.empty()) return Scalar(0);
    }
    return sv_get(v, 0);
}

SparseMatrix LiePbwSpace::gram(int d) const {
    int n = verma_dim(d);
    SparseMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.set(i, j, gram_entry(d, i, j));
    return g;
}

void LiePbwSpace::build_quotient() {
    kept_.resize(static_cast<std::size_t>(w_max_) + 1);
    radical_.resize(static_cast<std::size_t>(w_max_) + 1);
    radical_pivots_.resize(static_cast<std::size_t>(w_max_) + 1);
    for (int d = 0; d <= w_max_; ++d) {
        int n = verma_dim(d);
        if (kind_ == SpaceKind::Verma) {
            kept_[static_cast<std::size_t>(d)].resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) kept_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)] = i;
            continue;
        }
        EchelonBasis rad(n);
        // Images of the radical below; L(-1) and L(-2) generate all lowering.
        for (int k = 1; k <= 2 && k <= d; ++k)
            for (const auto& row : radical_[static_cast<std::size_t>(d - k)])
                rad.insert(act_verma(-k, d - k, row));
        // Kernel of the form on the complement of those images.
        std::vector<int> comp = rad.complement();
        int m = static_cast<int>(comp.size());
        SparseMatrix g(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b) {
                Scalar v = gram_entry(d, comp[static_cast<std::size_t>(a)], comp[static_cast<std::size_t>(b)]);
                if (!v.is_zero()) {
                    g.set(a, b, v);
                    if (a != b) g.set(b, a, v);
                }
            }
        for (const auto& x : nullspace(g)) {
            SparseVec full;
            for (const auto& [t, val] : x) full.emplace_back(comp[static_cast<std::size_t>(t)], val);
            std::sort(full.begin(), full.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            rad.insert(std::move(full));
        }
        radical_[static_cast<std::size_t>(d)] = rad.rows();
        radical_pivots_[static_cast<std::size_t>(d)] = rad.pivots();
        kept_[static_cast<std::size_t>(d)] = rad.complement();
    }
}

} // namespace vspan
