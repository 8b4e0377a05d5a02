#include "vspan/cofinite.hpp"

#include "vspan/errors.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace vspan {

bool CofiniteData::is_gen(int vec_id) const {
    return std::find(gens.begin(), gens.end(), vec_id) != gens.end();
}

std::vector<SparseVec> cn_space(const Context& ctx, int n, int d) {
    const LiePbwSpace& v = ctx.voa->space();
    const ModeActionEngine& eng = ctx.voa->engine();
    std::vector<SparseVec> rows;
    for (int alpha = 1; alpha <= v.w_max(); ++alpha) {
        int beta = d - alpha - n + 1;
        if (beta < 0) continue;
        if (beta > v.w_max()) continue;
        for (int i = 0; i < v.dim(alpha); ++i) {
            SparseVec a = sv_unit(i);
            for (int j = 0; j < v.dim(beta); ++j) {
                SparseVec r = eng.apply(alpha, a, -n, beta, sv_unit(j));
                if (!sv_is_zero(r)) rows.push_back(std::move(r));
            }
        }
    }
    return rows;
}

std::vector<SparseVec> cn_space_module(const Context& ctx, int n, int d) {
    const LiePbwSpace& v = ctx.voa->space();
    TargetView tv = ctx.view(Ket::Generator);
    std::vector<SparseVec> rows;
    for (int alpha = 1; alpha <= v.w_max(); ++alpha) {
        int delta = d - alpha - n + 1;
        if (delta < 0) continue;
        if (delta > tv.space->w_max()) continue;
        for (int i = 0; i < v.dim(alpha); ++i) {
            SparseVec a = sv_unit(i);
            for (int j = 0; j < tv.space->dim(delta); ++j) {
                SparseVec r = tv.engine->apply(alpha, a, -n, delta, sv_unit(j));
                if (!sv_is_zero(r)) rows.push_back(std::move(r));
            }
        }
    }
    return rows;
}

namespace {

std::vector<int> codims_from(const std::vector<int>& dims,
                             const std::function<std::vector<SparseVec>(int)>& rows_at) {
    std::vector<int> out;
    for (int d = 0; d < static_cast<int>(dims.size()); ++d) {
        EchelonBasis eb(dims[d]);
        for (auto& r : rows_at(d)) eb.insert(r);
        out.push_back(dims[d] - eb.rank());
    }
    return out;
}

} // namespace

std::vector<int> cn_codims_voa(const Context& ctx, int n, int up_to) {
    std::vector<int> dims;
    for (int d = 0; d <= up_to; ++d) dims.push_back(ctx.voa->dim(d));
    return codims_from(dims, [&](int d) { return cn_space(ctx, n, d); });
}

std::vector<int> cn_codims_module(const Context& ctx, int n, int up_to) {
    TargetView tv = ctx.view(Ket::Generator);
    std::vector<int> dims;
    for (int d = 0; d <= up_to; ++d) dims.push_back(tv.space->dim(d));
    return codims_from(dims, [&](int d) { return cn_space_module(ctx, n, d); });
}

std::vector<int> choose_gens(Context& ctx) {
    const LiePbwSpace& v = ctx.voa->space();
    std::vector<int> gens;
    for (int d = 1; d <= v.w_max(); ++d) {
        EchelonBasis eb(v.dim(d));
        for (auto& r : cn_space(ctx, 2, d)) eb.insert(r);
        for (int col : eb.complement()) gens.push_back(ctx.store->intern_basis(d, col));
    }
    return gens;
}

int find_N(const Context& ctx, std::vector<int>* codims) {
    const LiePbwSpace& v = ctx.voa->space();
    std::vector<int> cod = cn_codims_voa(ctx, 2, v.w_max());
    if (codims) *codims = cod;
    if (cod[v.w_max()] > 0) {
        std::ostringstream os;
        os << "weight " << v.w_max() << " still has degree-2 codimension " << cod[v.w_max()]
           << "; no stability weight is certified by this window";
        throw NotCofiniteInWindow(os.str());
    }
    int maxd = 0; // weight 0 is never inside C2, so N >= 1 always
    for (int d = 0; d <= v.w_max(); ++d)
        if (cod[d] > 0) maxd = d;
    return maxd + 1;
}

CofiniteData compute_constants(Context& ctx) {
    CofiniteData data;
    data.window = ctx.voa->w_max();
    data.gens = choose_gens(ctx);
    if (data.gens.empty())
        throw PreconditionViolation("no generators: the window has no weight completing C2");
    data.B = 0;
    for (int g : data.gens) data.B = std::max(data.B, ctx.wt(g));
    data.N = find_N(ctx, &data.c2_codim);
    data.Q = std::max(data.N, 2 * data.B - 1) + 1;

    // Products of k generators have weight <= Bk: check all pairs and the
    // triples that stay inside the window. The weight of u_{-1} v is
    // wt(u) + wt(v), so this is exact arithmetic on stored weights.
    for (int x : data.gens) {
        for (int y : data.gens) {
            int w2 = ctx.wt(x) + ctx.wt(y);
            if (w2 > 2 * data.B) throw PreconditionViolation("pair product exceeds 2B");
            if (w2 > data.window) continue;
            auto p2 = ctx.store->intern_composite(x, 1, y);
            if (p2 && ctx.wt(*p2) != w2)
                throw PreconditionViolation("product weight disagrees with stored weights");
            for (int z : data.gens) {
                int w3 = w2 + ctx.wt(z);
                if (w3 > 3 * data.B) throw PreconditionViolation("triple product exceeds 3B");
                if (!p2 || w3 > data.window) continue;
                auto p3 = ctx.store->intern_composite(z, 1, *p2);
                if (p3 && ctx.wt(*p3) != w3)
                    throw PreconditionViolation("product weight disagrees with stored weights");
            }
        }
    }

    // A length-l word with strictly decreasing indices n_1 > ... > n_l > 0
    // has weight >= l + sum n_i >= l(l+1)/2 (generator weights >= 1); checked
    // per word in enumerate_voa_spanset. Here check the comparison driving
    // the repeat threshold: l(l+1)/2 > Bk for 2B-1 < k <= l.
    for (int k = 2 * data.B; k <= 2 * data.B + 6; ++k) {
        for (int l = k; l <= k + 3; ++l) {
            if (!(static_cast<long>(l) * (l + 1) / 2 > static_cast<long>(data.B) * k))
                throw PreconditionViolation("length/weight comparison failed");
        }
    }
    return data;
}

namespace {

void enumerate_rec(const Context& ctx, const CofiniteData& data, int remaining, int max_n,
                   std::vector<ModeOp>& acc, std::vector<ModeWord>& out) {
    if (remaining == 0) {
        ModeWord w;
        w.ket = Ket::Vacuum;
        w.ops.assign(acc.begin(), acc.end()); // deepest op first: modes ascending
        int l = static_cast<int>(w.ops.size());
        int wt = word_weight(ctx, w);
        if (static_cast<long>(l) * (l + 1) / 2 > wt)
            throw PreconditionViolation("spanning word below its length-weight bound");
        out.push_back(std::move(w));
        return;
    }
    for (int n = std::min(max_n, remaining); n >= 1; --n) {
        for (int g : data.gens) {
            int op_wt = ctx.wt(g) + n - 1;
            if (op_wt > remaining) continue;
            acc.push_back(ModeOp{g, -n});
            enumerate_rec(ctx, data, remaining - op_wt, n - 1, acc, out);
            acc.pop_back();
        }
    }
}

} // namespace

std::vector<ModeWord> enumerate_voa_spanset(const Context& ctx, const CofiniteData& data,
                                            int d) {
    std::vector<ModeWord> out;
    if (d == 0) {
        ModeWord w;
        w.ket = Ket::Vacuum;
        out.push_back(w);
        return out;
    }
    std::vector<ModeOp> acc;
    enumerate_rec(ctx, data, d, d, acc, out);
    return out;
}

SpanCheck verify_voa_span(Context& ctx, const CofiniteData& data, int up_to) {
    SpanCheck sc;
    for (int d = 0; d <= up_to; ++d) {
        EchelonBasis eb(ctx.voa->dim(d));
        for (const ModeWord& w : enumerate_voa_spanset(ctx, data, d)) {
            VectorInModel v = evaluate(ctx, w);
            if (!sv_is_zero(v.coords) && v.depth != d)
                throw PreconditionViolation("spanning word evaluated off its weight");
            eb.insert(v.coords);
        }
        sc.dims.push_back(ctx.voa->dim(d));
        sc.ranks.push_back(eb.rank());
        if (eb.rank() < ctx.voa->dim(d)) {
            std::ostringstream os;
            os << "spanning set misses weight " << d << ": rank " << eb.rank() << " of "
               << ctx.voa->dim(d);
            throw SpanDeficit(os.str());
        }
    }
    return sc;
}

Expression singular_like_rewrite(Context& ctx, const CofiniteData& data,
                                 const std::vector<int>& xs) {
    int k = static_cast<int>(xs.size());
    if (k < data.Q) throw PreconditionViolation("product shorter than the repeat threshold");
    int w_total = 0;
    for (int x : xs) {
        if (!data.is_gen(x)) throw PreconditionViolation("factor outside the generating set");
        w_total += ctx.wt(x);
    }
    if (w_total > data.window) {
        std::ostringstream os;
        os << "product weight " << w_total << " exceeds window " << data.window;
        throw WindowTooSmall(os.str());
    }

    // Nested -1 product, built right to left; zero products shortcut to the
    // empty combination.
    std::optional<int> nested = xs[k - 1];
    for (int j = k - 2; j >= 0 && nested; --j)
        nested = ctx.store->intern_composite(xs[j], 1, *nested);
    Expression out;
    if (!nested) return out;

    std::vector<ModeWord> words = enumerate_voa_spanset(ctx, data, w_total);
    std::stable_sort(words.begin(), words.end(), [](const ModeWord& a, const ModeWord& b) {
        return a.ops.size() < b.ops.size();
    });
    std::vector<SparseVec> cols;
    cols.reserve(words.size());
    for (const ModeWord& w : words) cols.push_back(evaluate(ctx, w).coords);

    auto sol = solve_in_span(cols, ctx.store->get(*nested).coords, ctx.voa->dim(w_total));
    if (!sol) {
        std::ostringstream os;
        os << "length-" << k << " product of weight " << w_total
           << " escapes the spanning set";
        throw SpanDeficit(os.str());
    }
    for (size_t i = 0; i < words.size(); ++i) {
        if ((*sol)[i].is_zero()) continue;
        if (static_cast<int>(words[i].ops.size()) >= k)
            throw SpanDeficit("rewrite failed to shorten the product");
        out.add((*sol)[i], words[i]);
    }
    return out;
}

C2Decomposer::C2Decomposer(Context& ctx, const CofiniteData& data) : ctx_(ctx), data_(data) {}

const C2Decomposer::WeightCache& C2Decomposer::cache_for(int wt) {
    auto it = cache_.find(wt);
    if (it != cache_.end()) return it->second;

    WeightCache wc;
    const LiePbwSpace& v = ctx_.voa->space();
    for (int g : data_.gens) {
        if (ctx_.wt(g) != wt) continue;
        wc.ids.push_back(g);
        wc.cols.push_back(ctx_.store->get(g).coords);
    }
    wc.n_gens = static_cast<int>(wc.ids.size());
    for (int alpha = 1; alpha <= v.w_max(); ++alpha) {
        int beta = wt - alpha - 1;
        if (beta < 0) continue;
        for (int i = 0; i < v.dim(alpha); ++i) {
            int a = ctx_.store->intern_basis(alpha, i);
            for (int j = 0; j < v.dim(beta); ++j) {
                int b = ctx_.store->intern_basis(beta, j);
                auto comp = ctx_.store->intern_composite(a, 2, b);
                if (!comp) continue;
                wc.ids.push_back(*comp);
                wc.pairs.emplace_back(a, b);
                wc.cols.push_back(ctx_.store->get(*comp).coords);
            }
        }
    }
    return cache_.emplace(wt, std::move(wc)).first->second;
}

C2Parts C2Decomposer::decompose(int wt, const SparseVec& coords) {
    C2Parts parts;
    parts.unit_coeff = Scalar(0);
    if (sv_is_zero(coords)) return parts;
    if (wt == 0) {
        parts.unit_coeff = sv_get(coords, 0);
        return parts;
    }
    const WeightCache& wc = cache_for(wt);
    auto sol = solve_in_span(wc.cols, coords, ctx_.voa->dim(wt));
    if (!sol)
        throw SpanDeficit("vector escapes generators plus the degree-2 subspace");
    for (size_t i = 0; i < wc.ids.size(); ++i) {
        if ((*sol)[i].is_zero()) continue;
        if (static_cast<int>(i) < wc.n_gens) {
            parts.gen_part.emplace_back(wc.ids[i], (*sol)[i]);
        } else {
            const auto& [a, b] = wc.pairs[i - static_cast<size_t>(wc.n_gens)];
            parts.prod_part.emplace_back(a, b, (*sol)[i]);
        }
    }
    return parts;
}

} // namespace vspan
