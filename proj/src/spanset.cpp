#include "vspan/spanset.hpp"

#include "vspan/errors.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <sstream>

namespace vspan {

int compute_L(Context& ctx, const CofiniteData& data) {
    TargetView tv = ctx.view(Ket::Generator);
    int maxl = -1;
    for (int g : data.gens) {
        const StoredVec& sv = ctx.store->get(g);
        for (int l = sv.weight - 1; l >= 0; --l) {
            SparseVec r = tv.engine->apply(sv.weight, sv.coords, l, 0, sv_unit(0));
            if (!sv_is_zero(r)) {
                maxl = std::max(maxl, l);
                break;
            }
        }
    }
    return maxl + 1;
}

int filtration_level(const Context& ctx, const ModeWord& w) {
    int t = 0;
    for (const ModeOp& op : w.ops) t += ctx.wt(op.vec);
    return t;
}

bool is_spanning_word(const Context& /*ctx*/, const CofiniteData& data, int L,
                      const ModeWord& w) {
    int lev = (w.ket == Ket::Generator) ? L : 0;
    std::map<int, int> cnt;
    for (size_t i = 0; i < w.ops.size(); ++i) {
        const ModeOp& op = w.ops[i];
        if (!data.is_gen(op.vec)) return false;
        if (op.n >= lev) return false;
        if (i > 0 && op < w.ops[i - 1]) return false;
        ++cnt[op.n];
    }
    for (const auto& [n, c] : cnt) {
        if (n < 0 && c > 1) return false;
        if (n >= 0 && c > data.Q - 1) return false;
    }
    return true;
}

namespace {

// Strictly decreasing negative part of weight `remaining`, deepest op
// first; each completed word is the negative part followed by the fixed
// nonnegative suffix.
void neg_part(const Context& ctx, const CofiniteData& data, int remaining, int max_n,
              std::vector<ModeOp>& acc, const std::vector<ModeOp>& nn_ops,
              std::vector<ModeWord>& out) {
    if (remaining == 0) {
        ModeWord w;
        w.ket = Ket::Generator;
        w.ops.assign(acc.begin(), acc.end()); // deepest op first: modes ascending
        w.ops.insert(w.ops.end(), nn_ops.begin(), nn_ops.end());
        out.push_back(std::move(w));
        return;
    }
    for (int n = std::min(max_n, remaining); n >= 1; --n) {
        for (int g : data.gens) {
            int op_wt = ctx.wt(g) + n - 1;
            if (op_wt > remaining) continue;
            acc.push_back(ModeOp{g, -n});
            neg_part(ctx, data, remaining - op_wt, n - 1, acc, nn_ops, out);
            acc.pop_back();
        }
    }
}

// All admissible nonnegative-mode suffixes: per mode value 0..lev-1 up to
// Q-1 ops, generators nondecreasing within a value.
void collect_nonneg(const CofiniteData& data, int lev, std::vector<std::vector<ModeOp>>& out) {
    std::vector<ModeOp> acc;
    std::function<void(int, int, size_t)> go = [&](int m, int used, size_t gmin) {
        if (m == lev) {
            out.push_back(acc);
            return;
        }
        go(m + 1, 0, 0);
        if (used < data.Q - 1) {
            for (size_t gi = gmin; gi < data.gens.size(); ++gi) {
                acc.push_back(ModeOp{data.gens[gi], m});
                go(m, used + 1, gi);
                acc.pop_back();
            }
        }
    };
    go(0, 0, 0);
}

} // namespace

std::vector<ModeWord> enumerate_module_spanset(const Context& ctx, const CofiniteData& data,
                                               int L, int d) {
    std::vector<std::vector<ModeOp>> suffixes;
    collect_nonneg(data, L, suffixes);
    std::vector<ModeWord> out;
    for (const auto& nn : suffixes) {
        int w_nn = 0;
        for (const ModeOp& op : nn) w_nn += ctx.wt(op.vec) - op.n - 1;
        int rem = d - w_nn;
        if (rem < 0) continue;
        std::vector<ModeOp> acc;
        neg_part(ctx, data, rem, rem, acc, nn, out);
    }
    return out;
}

Normalizer::Normalizer(Context& ctx, const CofiniteData& data, int L_gen)
    : ctx_(ctx), data_(data), L_(L_gen), c2_(ctx, data) {}

void Normalizer::tr(const char* rule, int t, int K, int terms) {
    if (!trace_) return;
    std::ostringstream os;
    os << rule << " t=" << t << " K=" << K << " terms=" << terms;
    trace_->lines.push_back(os.str());
}

Expression Normalizer::sortreplace(const ModeWord& w) {
    SrKey key{w.ops, w.ket};
    auto it = sr_memo_.find(key);
    if (it != sr_memo_.end()) return it->second;

    int t = filtration_level(ctx_, w);
    Expression out;
    bool handled = false;

    // unit modes are deltas at -1
    for (size_t p = 0; p < w.ops.size() && !handled; ++p) {
        if (!ctx_.store->get(w.ops[p].vec).is_unit) continue;
        handled = true;
        if (w.ops[p].n == -1) {
            ModeWord w2 = w;
            w2.ops.erase(w2.ops.begin() + static_cast<long>(p));
            out = sortreplace(w2);
        }
        tr("unit-mode", t, -level(w.ket), out.size());
    }

    // reorder: first adjacent inversion
    for (size_t p = 0; p + 1 < w.ops.size() && !handled; ++p) {
        if (!(w.ops[p + 1] < w.ops[p])) continue;
        handled = true;
        Expression e = commutator_swap(ctx_, w, static_cast<int>(p));
        tr("reorder", t, -level(w.ket), e.size());
        for (const auto& [tw, c] : e.terms()) {
            Expression s = sortreplace(tw);
            s.scale(c);
            out.add(s);
        }
    }

    // replace: leftmost non-generator vector modulo the degree-2 subspace
    for (size_t p = 0; p < w.ops.size() && !handled; ++p) {
        int vec = w.ops[p].vec;
        if (data_.is_gen(vec)) continue;
        handled = true;
        const StoredVec& sv = ctx_.store->get(vec);
        C2Parts parts = c2_.decompose(sv.weight, sv.coords);
        Expression repl;
        if (!parts.unit_coeff.is_zero())
            repl.add(parts.unit_coeff,
                     ModeWord{{ModeOp{ctx_.store->unit_id(), w.ops[p].n}}, w.ket});
        for (const auto& [g, c] : parts.gen_part)
            repl.add(c, ModeWord{{ModeOp{g, w.ops[p].n}}, w.ket});
        for (const auto& [a, b, c] : parts.prod_part) {
            Expression ie = iterate_expand(ctx_, a, 2, b, w.ops[p].n, w.ket);
            ie.scale(c);
            repl.add(ie);
        }
        Expression spl = splice(w, static_cast<int>(p), 1, repl);
        tr("replace-mod-c2", t, -level(w.ket), spl.size());
        for (const auto& [tw, c] : spl.terms()) {
            Expression s = sortreplace(tw);
            s.scale(c);
            out.add(s);
        }
    }

    if (!handled) {
        if (!w.ops.empty() && w.ops.back().n >= level(w.ket)) {
            tr("annihilate", t, -level(w.ket), 0);
        } else {
            out = Expression::single(w);
        }
    }

    sr_memo_[key] = out;
    return out;
}

Expression Normalizer::np(const ModeWord& w, int K) {
    Key key{w.ops, w.ket, K};
    auto it = np_memo_.find(key);
    if (it != np_memo_.end()) return it->second;
    Expression sr = sortreplace(w);
    Expression out;
    for (const auto& [tw, c] : sr.terms()) {
        Expression s = impose_one(tw, K);
        s.scale(c);
        out.add(s);
    }
    np_memo_[key] = out;
    return out;
}

Expression Normalizer::impose_one(const ModeWord& w, int K) {
    Key key{w.ops, w.ket, K};
    auto it = imp_memo_.find(key);
    if (it != imp_memo_.end()) return it->second;
    if (!in_progress_.insert(key).second)
        throw PreconditionViolation(
            "normalization revisited a word in progress: the repeat measure failed");
    Expression out;
    try {
        out = impose_impl(w, K);
    } catch (...) {
        in_progress_.erase(key);
        throw;
    }
    in_progress_.erase(key);
    imp_memo_[key] = out;
    return out;
}

Expression Normalizer::impose_impl(const ModeWord& w, int K) {
    // shallowest violated value not deeper than the horizon
    std::map<int, int> cnt;
    for (const ModeOp& op : w.ops) ++cnt[op.n];
    bool found = false;
    int vio = 0;
    for (auto it = cnt.rbegin(); it != cnt.rend(); ++it) {
        if (it->first < -K) break;
        int limit = (it->first >= 0) ? data_.Q - 1 : 1;
        if (it->second > limit) {
            vio = it->first;
            found = true;
            break;
        }
    }
    if (!found) return Expression::single(w);

    int t = filtration_level(ctx_, w);

    // front split: ops deeper than the violated value stay put while the
    // shallow suffix (strictly smaller filtration level) is normalized at
    // the violation's own horizon
    size_t split = 0;
    while (split < w.ops.size() && w.ops[split].n < vio) ++split;
    if (split > 0) {
        std::vector<ModeOp> front(w.ops.begin(), w.ops.begin() + static_cast<long>(split));
        ModeWord back{{w.ops.begin() + static_cast<long>(split), w.ops.end()}, w.ket};
        if (!(filtration_level(ctx_, back) < t))
            throw PreconditionViolation("front split failed to lower the filtration level");
        Expression eb = np(back, -vio);
        tr("front-split", t, -vio, eb.size());
        Expression out;
        for (const auto& [wb, cb] : eb.terms()) {
            ModeWord raw{front, w.ket};
            raw.ops.insert(raw.ops.end(), wb.ops.begin(), wb.ops.end());
            Expression sr = sortreplace(raw);
            for (const auto& [w2, c2] : sr.terms()) {
                Expression piece = (filtration_level(ctx_, w2) == t) ? impose_one(w2, K)
                                                                     : np(w2, K);
                piece.scale(cb * c2);
                out.add(piece);
            }
        }
        return out;
    }

    // the violated value leads the word: rewrite its repeat block
    int p_at = cnt[vio];
    Expression spliced;
    if (vio >= 0) {
        if (p_at < data_.Q)
            throw PreconditionViolation("nonnegative repeat below the threshold");
        std::vector<int> xs(static_cast<size_t>(data_.Q));
        for (int j = 0; j < data_.Q; ++j) {
            if (w.ops[static_cast<size_t>(j)].n != vio)
                throw PreconditionViolation("repeat block not contiguous");
            xs[static_cast<size_t>(data_.Q - 1 - j)] = w.ops[static_cast<size_t>(j)].vec;
        }
        Expression rhs = singular_like_rewrite(ctx_, data_, xs);
        Expression repl = residue_repeat_identity(ctx_, xs, vio, rhs, w.ket);
        spliced = splice(w, 0, data_.Q, repl);
        tr("nonneg-repeat", t, -vio, spliced.size());
    } else {
        if (w.ops[0].n != vio || w.ops[1].n != vio)
            throw PreconditionViolation("repeat block not contiguous");
        spliced = repeat_reduce(ctx_, w, 0);
        tr("neg-repeat", t, -vio, spliced.size());
    }

    Expression out;
    for (const auto& [ws, cs] : spliced.terms()) {
        Expression sr = sortreplace(ws);
        for (const auto& [w2, c2] : sr.terms()) {
            Expression piece;
            if (filtration_level(ctx_, w2) == t) {
                int c2v = 0;
                for (const ModeOp& op : w2.ops)
                    if (op.n == vio) ++c2v;
                if (!(c2v < p_at))
                    throw PreconditionViolation(
                        "repeat rewrite failed to lower the count at its value");
                piece = impose_one(w2, K);
            } else {
                piece = np(w2, K);
            }
            piece.scale(cs * c2);
            out.add(piece);
        }
    }
    return out;
}

Expression Normalizer::normalize(const ModeWord& w, NormTrace* trace) {
    int t = filtration_level(ctx_, w);
    int D = word_weight(ctx_, w);
    int lev = level(w.ket);
    int win = ctx_.view(w.ket).space->w_max();
    if (D > win) {
        std::ostringstream os;
        os << "operator weight " << D << " exceeds the window " << win;
        throw WindowTooSmall(os.str());
    }
    int k_top = D + std::max(0, t - 1) * lev + 1;
    if (k_top < -lev) k_top = -lev;

    trace_ = trace;
    Expression out;
    try {
        out = np(w, k_top);
    } catch (...) {
        trace_ = nullptr;
        throw;
    }
    trace_ = nullptr;

    int n1_bound = D + std::max(0, t - 1) * lev;
    for (const auto& [tw, c] : out.terms()) {
        if (!is_spanning_word(ctx_, data_, L_, tw))
            throw PreconditionViolation("normalized term escapes the spanning form");
        if (!tw.ops.empty() && tw.ops.front().n < -n1_bound)
            throw PreconditionViolation("normalized term exceeds the leading-index bound");
    }
    if (trace) {
        std::ostringstream os;
        os << "done t=" << t << " K=" << k_top << " terms=" << out.size();
        trace->lines.push_back(os.str());
    }
    return out;
}

Expression Normalizer::normalize(const Expression& e, NormTrace* trace) {
    Expression out;
    for (const auto& [w, c] : e.terms()) {
        Expression s = normalize(w, trace);
        s.scale(c);
        out.add(s);
    }
    return out;
}

Expression normalize(Context& ctx, const CofiniteData& data, int L, const Expression& e,
                     NormTrace* trace) {
    Normalizer nz(ctx, data, L);
    return nz.normalize(e, trace);
}

ModuleSpanCheck verify_module_span(Context& ctx, const CofiniteData& data, int L, int up_to) {
    ModuleSpanCheck sc;
    TargetView tv = ctx.view(Ket::Generator);
    for (int d = 0; d <= up_to; ++d) {
        std::vector<ModeWord> words = enumerate_module_spanset(ctx, data, L, d);
        EchelonBasis eb(tv.space->dim(d));
        for (const ModeWord& w : words) {
            VectorInModel v = evaluate(ctx, w);
            if (!sv_is_zero(v.coords) && v.depth != d)
                throw PreconditionViolation("spanning word evaluated off its depth");
            eb.insert(v.coords);
        }
        sc.dims.push_back(tv.space->dim(d));
        sc.ranks.push_back(eb.rank());
        sc.counts.push_back(static_cast<int>(words.size()));
        if (eb.rank() < tv.space->dim(d)) {
            std::ostringstream os;
            os << "module spanning set misses depth " << d << ": rank " << eb.rank() << " of "
               << tv.space->dim(d);
            throw SpanDeficit(os.str());
        }
    }
    return sc;
}

} // namespace vspan
