#include "vspan/rewrite.hpp"

#include "vspan/errors.hpp"

#include <algorithm>
#include <functional>
#include <optional>

namespace vspan {

namespace {

bool odd(long x) { return (x & 1L) != 0; }

void check_range(const ModeWord& w, int p, int count) {
    if (p < 0 || count < 0 || p + count > static_cast<int>(w.ops.size()))
        throw PreconditionViolation("op position out of range");
}

/// Calls fn for every vector m with m[j] in [0, caps[j]] and sum == total.
void compositions(int total, const std::vector<int>& caps, size_t pos, std::vector<int>& cur,
                  const std::function<void(const std::vector<int>&)>& fn) {
    if (total < 0) return;
    if (pos == caps.size()) {
        if (total == 0) fn(cur);
        return;
    }
    int rest_cap = 0;
    for (size_t j = pos; j < caps.size(); ++j) rest_cap += caps[j];
    if (total > rest_cap) return;
    const int hi = std::min(total, caps[pos]);
    for (int m = 0; m <= hi; ++m) {
        cur[pos] = m;
        compositions(total - m, caps, pos + 1, cur, fn);
    }
}

} // namespace

std::vector<IndexSplit> lambda_splits(int n, int i) {
    if (n < 0) throw PreconditionViolation("lambda_splits: negative n");
    if (i < 0) {
        std::vector<IndexSplit> all;
        for (int j = 0; j <= n; ++j) {
            auto part = lambda_splits(n, j);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    if (i > n) return {};
    std::vector<IndexSplit> out;
    std::vector<int> lam(i);
    // enumerate increasing i-subsets of {1..n} in lexicographic order
    std::function<void(int, int)> rec = [&](int pos, int lo) {
        if (pos == i) {
            IndexSplit sp;
            sp.n = n;
            sp.i = i;
            sp.lambda = lam;
            std::vector<bool> used(n + 1, false);
            for (int x : lam) used[x] = true;
            for (int x = n; x >= 1; --x)
                if (!used[x]) sp.lambda_bar.push_back(x);
            out.push_back(std::move(sp));
            return;
        }
        for (int x = lo; x <= n - (i - pos - 1); ++x) {
            lam[pos] = x;
            rec(pos + 1, x + 1);
        }
    };
    rec(0, 1);
    return out;
}

Expression splice(const ModeWord& host, int p, int count, const Expression& repl) {
    check_range(host, p, count);
    Expression out;
    for (const auto& [wr, c] : repl.terms()) {
        if (wr.ket != host.ket) throw PreconditionViolation("splice: ket mismatch");
        ModeWord nw;
        nw.ket = host.ket;
        nw.ops.reserve(host.ops.size() - count + wr.ops.size());
        nw.ops.insert(nw.ops.end(), host.ops.begin(), host.ops.begin() + p);
        nw.ops.insert(nw.ops.end(), wr.ops.begin(), wr.ops.end());
        nw.ops.insert(nw.ops.end(), host.ops.begin() + p + count, host.ops.end());
        out.add(c, std::move(nw));
    }
    return out;
}

Expression commutator_swap(Context& ctx, const ModeWord& w, int p) {
    check_range(w, p, 2);
    const ModeOp u = w.ops[p];
    const ModeOp v = w.ops[p + 1];
    Expression repl;
    repl.add(Scalar(1), ModeWord{{v, u}, w.ket});
    const StoredVec& su = ctx.store->get(u.vec);
    const StoredVec& sv = ctx.store->get(v.vec);
    // modes of the vacuum commute with everything (1_i = 0 for i >= 0)
    if (!su.is_unit && !sv.is_unit) {
        const int top = su.weight + sv.weight - 1; // weight of u_0 v
        if (top > ctx.voa->w_max())
            throw UnresolvableProduct("commutator of " + su.name + ", " + sv.name +
                                      " needs weight " + std::to_string(top) + " > window " +
                                      std::to_string(ctx.voa->w_max()));
        for (int i = 0; i <= top; ++i) {
            Scalar c = binom(u.n, i);
            if (c.is_zero()) continue;
            auto comp = ctx.store->intern_composite(u.vec, -i, v.vec);
            if (!comp) continue;
            repl.add(c, ModeWord{{ModeOp{*comp, u.n + v.n - i}}, w.ket});
        }
    }
    return splice(w, p, 2, repl);
}

Expression iterate_expand(Context& ctx, int comp_id, int n, Ket ket) {
    const StoredVec sc = ctx.store->get(comp_id);
    if (sc.prov_u < 0)
        throw PreconditionViolation("iterate_expand: " + sc.name + " has no product provenance");
    return iterate_expand(ctx, sc.prov_u, sc.prov_r, sc.prov_v, n, ket);
}

Expression iterate_expand(Context& ctx, int u, int r, int v, int n, Ket ket) {
    const int wu = ctx.wt(u);
    const int wv = ctx.wt(v);
    const int win = ctx.view(ket).space->w_max();
    Expression out;
    // first family: u_{-r-i} v_{n+i}; dropped tails have v_{n+i} annihilating
    // the whole window
    const int imax1 = win + wv - 1 - n;
    for (int i = 0; i <= imax1; ++i) {
        Scalar c = binom(-r, i);
        if (odd(i)) c = -c;
        if (c.is_zero()) continue;
        out.add(c, ModeWord{{ModeOp{u, -r - i}, ModeOp{v, n + i}}, ket});
    }
    // second family: v_{n-r-i} u_i
    const int imax2 = win + wu - 1;
    for (int i = 0; i <= imax2; ++i) {
        Scalar c = binom(-r, i);
        if (!odd(i + r)) c = -c; // times -(-1)^r
        if (c.is_zero()) continue;
        out.add(c, ModeWord{{ModeOp{v, n - r - i}, ModeOp{u, i}}, ket});
    }
    return out;
}

Expression repeat_reduce(Context& ctx, const ModeWord& w, int p) {
    check_range(w, p, 2);
    const ModeOp a = w.ops[p];
    const ModeOp b = w.ops[p + 1];
    if (a.n != b.n)
        throw NotARepeat("ops at " + std::to_string(p) + ", " + std::to_string(p + 1) +
                         " have indices " + std::to_string(a.n) + ", " + std::to_string(b.n));
    const int n = -a.n; // the pair is u_{-n} v_{-n}
    const int wu = ctx.wt(a.vec);
    const int wv = ctx.wt(b.vec);
    if (wu + wv > ctx.voa->w_max())
        throw UnresolvableProduct("repeat_reduce needs the weight-" + std::to_string(wu + wv) +
                                  " product, window is " + std::to_string(ctx.voa->w_max()));
    const int win = ctx.view(w.ket).space->w_max();
    Expression repl;
    auto comp = ctx.store->intern_composite(a.vec, 1, b.vec);
    if (comp) repl.add(Scalar(1), ModeWord{{ModeOp{*comp, -(2 * n - 1)}}, w.ket});
    // u_{-n}v_{-n} is the i = n-1 term of (u_{-1}v)_{-(2n-1)} = sum_i u_{-1-i} v_{-(2n-1)+i}
    //                                                         + sum_i v_{-2n-i} u_i
    const int imax1 = win + wv - 1 + (2 * n - 1);
    for (int i = 0; i <= imax1; ++i) {
        if (i == n - 1) continue;
        repl.add(Scalar(-1), ModeWord{{ModeOp{a.vec, -1 - i}, ModeOp{b.vec, -(2 * n - 1) + i}}, w.ket});
    }
    const int imax2 = win + wu - 1;
    for (int i = 0; i <= imax2; ++i)
        repl.add(Scalar(-1), ModeWord{{ModeOp{b.vec, -2 * n - i}, ModeOp{a.vec, i}}, w.ket});
    return splice(w, p, 2, repl);
}

ZExpansion expand_minus_one_product(Context& ctx, const std::vector<int>& xs, int v) {
    if (xs.empty()) throw PreconditionViolation("expand_minus_one_product: empty factor list");
    for (int x : xs)
        if (ctx.store->get(x).is_unit)
            throw PreconditionViolation("expand_minus_one_product: vacuum factor");
    ZExpansion zx;
    zx.xs = xs;
    zx.v = v;
    zx.splits = lambda_splits(static_cast<int>(xs.size()));
    return zx;
}

Expression zexpansion_mode(Context& ctx, const ZExpansion& zx, int s, Ket ket) {
    const int win = ctx.view(ket).space->w_max();
    const StoredVec svv = ctx.store->get(zx.v);
    const bool vac = svv.is_unit;
    Expression out;
    for (const IndexSplit& sp : zx.splits) {
        const int nl = sp.i;
        const int nb = sp.n - sp.i;
        // annihilation-side indices are window-bounded; creation-side indices
        // are tied to them through the z-exponent ledger
        std::vector<int> caps(nb);
        int capsum = 0;
        for (int j = 0; j < nb; ++j) {
            caps[j] = win + ctx.wt(zx.xs[sp.lambda_bar[j] - 1]) - 1;
            capsum += caps[j];
        }
        std::vector<int> mb(nb);
        std::vector<int> ml(nl);
        auto emit = [&](const std::vector<int>& mbar, const std::vector<int>& mlam,
                        std::optional<int> pmode) {
            ModeWord mw;
            mw.ket = ket;
            for (int j = 0; j < nl; ++j)
                mw.ops.push_back(ModeOp{zx.xs[sp.lambda[j] - 1], -1 - mlam[j]});
            if (pmode) mw.ops.push_back(ModeOp{zx.v, *pmode});
            for (int j = 0; j < nb; ++j)
                mw.ops.push_back(ModeOp{zx.xs[sp.lambda_bar[j] - 1], mbar[j]});
            out.add(Scalar(1), std::move(mw));
        };
        for (int t = 0; t <= capsum; ++t) {
            compositions(t, caps, 0, mb, [&](const std::vector<int>& mbar) {
                const int sum_bar = nb + t; // sum of (1 + mbar_j)
                std::vector<int> lcaps(nl);
                if (vac) {
                    // Y(1,z) = id contributes z^0, so the ledger fixes the
                    // creation-side sum exactly
                    const int set = sum_bar - 1 - s;
                    if (set < 0) return;
                    lcaps.assign(nl, set);
                    compositions(set, lcaps, 0, ml,
                                 [&](const std::vector<int>& mlam) { emit(mbar, mlam, std::nullopt); });
                } else {
                    const int pmax = win + svv.weight - 1;
                    const int smax = pmax - s + sum_bar;
                    for (int set = 0; set <= smax; ++set) {
                        lcaps.assign(nl, set);
                        compositions(set, lcaps, 0, ml, [&](const std::vector<int>& mlam) {
                            emit(mbar, mlam, s + set - sum_bar);
                        });
                    }
                }
            });
        }
    }
    return out;
}

Expression word_mode_expand(Context& ctx, const std::vector<std::pair<int, int>>& nested,
                            int base, int s, Ket ket) {
    const int win = ctx.view(ket).space->w_max();
    const bool base_unit = ctx.store->get(base).is_unit;
    std::map<std::pair<size_t, int>, Expression> memo;
    // rec(k, n): mode n of the composite x^k_{-r_k}( ... (x^l_{-r_l} base))
    std::function<const Expression&(size_t, int)> rec = [&](size_t k, int n) -> const Expression& {
        auto key = std::make_pair(k, n);
        auto found = memo.find(key);
        if (found != memo.end()) return found->second;
        Expression out;
        if (k == nested.size()) {
            if (base_unit) {
                if (n == -1) out.add(Scalar(1), ModeWord{{}, ket});
            } else {
                out.add(Scalar(1), ModeWord{{ModeOp{base, n}}, ket});
            }
        } else {
            const int a = nested[k].first;
            const int r = nested[k].second;
            int restwt = ctx.wt(base);
            for (size_t j = k + 1; j < nested.size(); ++j)
                restwt += ctx.wt(nested[j].first) + nested[j].second - 1;
            const int imax1 = win + restwt - 1 - n;
            for (int i = 0; i <= imax1; ++i) {
                Scalar c = binom(-r, i);
                if (odd(i)) c = -c;
                if (c.is_zero()) continue;
                const Expression& inner = rec(k + 1, n + i);
                for (const auto& [iw, ic] : inner.terms()) {
                    ModeWord nw;
                    nw.ket = ket;
                    nw.ops.reserve(iw.ops.size() + 1);
                    nw.ops.push_back(ModeOp{a, -r - i});
                    nw.ops.insert(nw.ops.end(), iw.ops.begin(), iw.ops.end());
                    out.add(c * ic, std::move(nw));
                }
            }
            const int imax2 = win + ctx.wt(a) - 1;
            for (int i = 0; i <= imax2; ++i) {
                Scalar c = binom(-r, i);
                if (!odd(i + r)) c = -c; // times -(-1)^r
                if (c.is_zero()) continue;
                const Expression& inner = rec(k + 1, n - r - i);
                for (const auto& [iw, ic] : inner.terms()) {
                    ModeWord nw = iw;
                    nw.ops.push_back(ModeOp{a, i});
                    out.add(c * ic, std::move(nw));
                }
            }
        }
        return memo.emplace(key, std::move(out)).first->second;
    };
    return rec(0, s);
}

Expression residue_repeat_identity(Context& ctx, const std::vector<int>& xs, int m,
                                   const Expression& rhs, Ket ket) {
    const int q = static_cast<int>(xs.size());
    if (q < 2) throw PreconditionViolation("residue_repeat_identity: need at least two factors");
    if (m < 0) throw PreconditionViolation("residue_repeat_identity: repeated index must be >= 0");
    // the nested product x^1_{-1}( x^2_{-1} ( ... x^q )) the rhs must equal
    std::optional<int> nested = xs[q - 1];
    for (int j = q - 2; j >= 0 && nested; --j) nested = ctx.store->intern_composite(xs[j], 1, *nested);
    for (const auto& [wr, cr] : rhs.terms()) {
        (void)cr;
        if (wr.ket != Ket::Vacuum) throw BadRewrite("rhs must end in the vacuum ket");
        if (static_cast<int>(wr.ops.size()) >= q)
            throw BadRewrite("rhs word as long as the block it replaces");
        for (const ModeOp& op : wr.ops) {
            if (op.n >= 0) throw BadRewrite("rhs must use creation modes only");
            if (ctx.store->get(op.vec).is_unit) throw BadRewrite("rhs op on the vacuum");
        }
    }
    GradedVec want;
    if (nested) {
        const StoredVec& sn = ctx.store->get(*nested);
        want[sn.weight] = sn.coords;
    }
    if (evaluate(ctx, rhs) != want)
        throw BadRewrite("rhs does not evaluate to the nested product of the block factors");
    // coefficient of z^{q(-1-m)} in Y(x^1_{-1}...x^q_{-1}|0>, z)
    const int s = q * (m + 1) - 1;
    const Expression full = zexpansion_mode(ctx, expand_minus_one_product(ctx, xs, ctx.store->unit_id()), s, ket);
    ModeWord diag;
    diag.ket = ket;
    for (int j = q - 1; j >= 0; --j) diag.ops.push_back(ModeOp{xs[j], m});
    const auto dit = full.terms().find(diag);
    if (dit == full.terms().end() || dit->second != Scalar(1))
        throw BadRewrite("diagonal term missing from the product expansion");
    // block = (rhs modes at s) - (all non-diagonal expansion terms)
    Expression out;
    for (const auto& [wr, cr] : rhs.terms()) {
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(wr.ops.size());
        for (const ModeOp& op : wr.ops) pairs.emplace_back(op.vec, -op.n);
        const Expression ex = word_mode_expand(ctx, pairs, ctx.store->unit_id(), s, ket);
        for (const auto& [ww, cc] : ex.terms()) out.add(cr * cc, ww);
    }
    for (const auto& [ww, cc] : full.terms()) {
        if (ww == diag) continue;
        out.add(-cc, ww);
    }
    return out;
}

VectorInModel borcherds_residual(Context& ctx, int u, int v, int k, int q, int r,
                                 const VectorInModel& target) {
    const TargetView view = ctx.view(target.ket);
    const StoredVec su = ctx.store->get(u);
    const StoredVec sv = ctx.store->get(v);
    const int wu = su.weight;
    const int wv = sv.weight;
    const int delta = target.depth;
    const int dres = delta + wu + wv + k + q + r - 2;
    SparseVec acc;
    // sum_i C(-k,i) (u_{-r+i} v)_{-k-q-i}; composites of negative weight vanish
    for (int i = 0; i <= wu + wv + r - 1; ++i) {
        Scalar c = binom(-k, i);
        if (c.is_zero()) continue;
        auto comp = ctx.store->intern_composite(u, r - i, v);
        if (!comp) continue;
        const StoredVec& sc = ctx.store->get(*comp);
        sv_axpy(acc, c, view.engine->apply(sc.weight, sc.coords, -k - q - i, delta, target.coords));
    }
    // minus sum_i (-1)^i C(-r,i) u_{-k-r-i} (v_{-q+i} t)
    for (int i = 0; i <= delta + wv + q - 1; ++i) {
        Scalar c = binom(-r, i);
        if (!odd(i)) c = -c;
        if (c.is_zero()) continue;
        SparseVec inner = view.engine->apply(wv, sv.coords, -q + i, delta, target.coords);
        if (inner.empty()) continue;
        sv_axpy(acc, c, view.engine->apply(wu, su.coords, -k - r - i, delta + wv + q - i - 1, inner));
    }
    // plus sum_i (-1)^{i+r} C(-r,i) v_{-q-r-i} (u_{-k+i} t)
    for (int i = 0; i <= delta + wu + k - 1; ++i) {
        Scalar c = binom(-r, i);
        if (odd(i + r)) c = -c;
        if (c.is_zero()) continue;
        SparseVec inner = view.engine->apply(wu, su.coords, -k + i, delta, target.coords);
        if (inner.empty()) continue;
        sv_axpy(acc, c, view.engine->apply(wv, sv.coords, -q - r - i, delta + wu + k - i - 1, inner));
    }
    return VectorInModel{target.ket, std::max(dres, 0), acc};
}

Expression sort_word(Context& ctx, const ModeWord& w) {
    for (size_t p = 0; p + 1 < w.ops.size(); ++p) {
        if (!(w.ops[p + 1] < w.ops[p])) continue;
        Expression out;
        Expression swapped = commutator_swap(ctx, w, static_cast<int>(p));
        for (const auto& [ww, cc] : swapped.terms()) {
            Expression rest = sort_word(ctx, ww);
            for (const auto& [w2, c2] : rest.terms()) out.add(cc * c2, w2);
        }
        return out;
    }
    return Expression::single(w);
}

} // namespace vspan
