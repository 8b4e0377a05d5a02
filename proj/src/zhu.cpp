#include "vspan/zhu.hpp"

#include "vspan/errors.hpp"

#include <algorithm>
#include <sstream>

namespace vspan {

GradedVec circ_n(const Context& ctx, int wu, const SparseVec& cu, int n, int delta,
                 const SparseVec& cw) {
    if (n < 0) throw PreconditionViolation("circle products are defined for levels n >= 0");
    GradedVec out;
    if (sv_is_zero(cu) || sv_is_zero(cw)) return out;
    if (wu == 0) return out; // unit: the only candidate term has a zero binomial

    TargetView tv = ctx.view(Ket::Generator);
    int top = delta + wu + 2 * n + 1;
    if (top > tv.space->w_max()) {
        std::ostringstream os;
        os << "top component depth " << top << " exceeds the module window "
           << tv.space->w_max();
        throw OutOfWindow(os.str());
    }
    for (int j = 0; j <= wu + n; ++j) {
        int d = top - j;
        if (d < 0) continue;
        Scalar c = binom(wu + n, static_cast<unsigned long>(j));
        if (c.is_zero()) continue;
        SparseVec comp = tv.engine->apply(wu, cu, j - 2 * n - 2, delta, cw);
        if (sv_is_zero(comp)) continue;
        auto it = out.find(d);
        if (it == out.end())
            out[d] = sv_scaled(comp, c);
        else {
            sv_axpy(it->second, c, comp);
            if (sv_is_zero(it->second)) out.erase(it);
        }
    }
    return out;
}

FlatWindow flat_window(const Context& ctx, int W) {
    TargetView tv = ctx.view(Ket::Generator);
    FlatWindow fw;
    int off = 0;
    for (int d = 0; d <= W; ++d) {
        fw.offsets.push_back(off);
        off += tv.space->dim(d);
    }
    fw.total = off;
    return fw;
}

SparseVec flatten(const FlatWindow& fw, const GradedVec& gv) {
    SparseVec out;
    for (const auto& [d, coords] : gv) {
        if (d >= static_cast<int>(fw.offsets.size()))
            throw PreconditionViolation("graded component beyond the flattened window");
        for (const auto& [i, c] : coords)
            out.emplace_back(fw.offsets[static_cast<size_t>(d)] + i, c);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

EchelonBasis on_span(const Context& ctx, int n, int W) {
    if (n < 0) throw PreconditionViolation("levels n >= 0 only");
    TargetView tv = ctx.view(Ket::Generator);
    if (W > tv.space->w_max()) throw PreconditionViolation("window exceeds the module");
    const LiePbwSpace& v = ctx.voa->space();
    FlatWindow fw = flat_window(ctx, W);
    EchelonBasis eb(fw.total);
    for (int wu = 1; wu <= std::min(v.w_max(), W - 2 * n - 1); ++wu) {
        for (int i = 0; i < v.dim(wu); ++i) {
            SparseVec cu = sv_unit(i);
            int dmax = W - wu - 2 * n - 1;
            for (int delta = 0; delta <= dmax; ++delta) {
                for (int j = 0; j < tv.space->dim(delta); ++j) {
                    GradedVec gv = circ_n(ctx, wu, cu, n, delta, sv_unit(j));
                    if (gv.empty()) continue;
                    eb.insert(flatten(fw, gv));
                }
            }
        }
    }
    return eb;
}

int an_representative_bound(const Context& ctx, const CofiniteData& data, int L, int n) {
    // Max weight of a word confined to modes in [-(2n+1), L-1]: one op per
    // negative value, Q-1 per nonnegative value, heaviest generator in each
    // slot, slots with negative op weight left empty.
    int bound = 0;
    for (int np = 1; np <= 2 * n + 1; ++np) {
        int best = 0;
        for (int g : data.gens) best = std::max(best, ctx.wt(g) + np - 1);
        bound += best;
    }
    for (int m = 0; m < L; ++m) {
        int best = 0;
        for (int g : data.gens) best = std::max(best, ctx.wt(g) - m - 1);
        bound += (data.Q - 1) * best;
    }
    return bound + 1;
}

AnEstimate an_dim_estimate(Context& ctx, const CofiniteData& data, int L, int n,
                           const std::vector<int>& schedule) {
    TargetView tv = ctx.view(Ket::Generator);
    if (tv.space->kind() != SpaceKind::SimpleQuotient)
        throw PreconditionViolation("quotient dimension estimates need a simple module");
    if (schedule.empty()) throw PreconditionViolation("empty window schedule");
    for (size_t i = 0; i + 1 < schedule.size(); ++i)
        if (schedule[i] >= schedule[i + 1])
            throw PreconditionViolation("window schedule must increase");
    if (schedule.back() > tv.space->w_max())
        throw PreconditionViolation("window schedule exceeds the module window");

    AnEstimate est;
    est.window_sizes = schedule;
    for (int W : schedule) {
        FlatWindow fw = flat_window(ctx, W);
        EchelonBasis eb = on_span(ctx, n, W);
        est.dims.push_back(fw.total - eb.rank());
    }
    est.rep_bound = an_representative_bound(ctx, data, L, n);
    size_t k = est.dims.size();
    bool last_three = k >= 3 && est.dims[k - 1] == est.dims[k - 2] &&
                      est.dims[k - 2] == est.dims[k - 3];
    est.stabilized = last_three && est.rep_bound <= schedule.back();
    est.value = est.stabilized ? est.dims.back() : -1;
    return est;
}

} // namespace vspan
