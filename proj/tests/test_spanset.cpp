#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vspan/errors.hpp"
#include "vspan/spanset.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>

using namespace vspan;

namespace {

/// Shared (2,5)-minimal-model fixture at window 10 with h = -1/5.
struct Fix {
    std::shared_ptr<const VOAModel> voa;
    std::shared_ptr<const ModuleModel> mod;
    Context ctx;
    CofiniteData data;
    int L;
    int w, b3, unit;

    Fix()
        : voa(build_virasoro_voa(Scalar(-22, 5), 10, SpaceKind::SimpleQuotient)),
          mod(build_module(voa, Scalar(-1, 5), 10, SpaceKind::SimpleQuotient)),
          ctx(voa, mod) {
        data = compute_constants(ctx);
        L = compute_L(ctx, data);
        w = ctx.store->omega_id();
        b3 = ctx.store->intern_basis(3, 0);
        unit = ctx.store->unit_id();
    }
};

Fix& fix() {
    static Fix f;
    return f;
}

ModeWord mw(std::vector<ModeOp> ops, Ket ket) {
    ModeWord w;
    w.ops = std::move(ops);
    w.ket = ket;
    return w;
}

/// Brute-force listing of every mode-value sequence of a spanning word of
/// weight d over a single weight-2 generator: specified directly from the
/// predicate, independent of the production enumeration.
std::vector<std::vector<int>> all_mode_seqs(int d, int L, int Q) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    // choose counts per mode value ascending from 1-d up to L-1
    std::function<void(int, int)> go = [&](int m, int rem) {
        if (m >= L) {
            if (rem == 0) out.push_back(cur);
            return;
        }
        const int op_wt = 1 - m; // weight of w_m
        const int cap = (m < 0) ? 1 : Q - 1;
        for (int c = 0; c <= cap; ++c) {
            if (op_wt * c > rem && op_wt > 0) break;
            if (op_wt == 0 && c > cap) break;
            const int used = op_wt * c;
            if (used > rem) break;
            for (int i = 0; i < c; ++i) cur.push_back(m);
            go(m + 1, rem - used);
            for (int i = 0; i < c; ++i) cur.pop_back();
        }
    };
    go(d > 0 ? 1 - d : 0, d);
    return out;
}

} // namespace

TEST_CASE("annihilation threshold of the module generator") {
    auto& f = fix();
    CHECK(f.L == 2); // w_1 |h> = h |h> != 0, w_2 |h> = 0

    // with h = 0 every nonnegative generator mode kills the ground state
    auto mod0 = build_module(f.voa, Scalar(0), 10, SpaceKind::SimpleQuotient);
    Context ctx0(f.voa, mod0);
    CofiniteData d0 = compute_constants(ctx0);
    CHECK(compute_L(ctx0, d0) == 0);
}

TEST_CASE("spanning-form predicate") {
    auto& f = fix();
    auto ok = [&](const ModeWord& wd) { return is_spanning_word(f.ctx, f.data, f.L, wd); };

    CHECK(ok(mw({}, Ket::Generator)));
    CHECK(ok(mw({{f.w, -3}, {f.w, -1}}, Ket::Generator)));
    CHECK(ok(mw({{f.w, -1}, {f.w, 1}}, Ket::Generator)));
    CHECK(ok(mw({{f.w, 0}, {f.w, 0}, {f.w, 0}}, Ket::Generator)));
    CHECK(ok(mw({{f.w, 1}, {f.w, 1}, {f.w, 1}}, Ket::Generator)));

    // Q = 4 caps a nonnegative value at 3 occurrences
    CHECK(!ok(mw({{f.w, 1}, {f.w, 1}, {f.w, 1}, {f.w, 1}}, Ket::Generator)));
    // negative values never repeat
    CHECK(!ok(mw({{f.w, -2}, {f.w, -2}}, Ket::Generator)));
    // ops must be sorted ascending
    CHECK(!ok(mw({{f.w, -1}, {f.w, -3}}, Ket::Generator)));
    // modes at or above the threshold are excluded
    CHECK(!ok(mw({{f.w, 2}}, Ket::Generator)));
    // only generators may appear
    CHECK(!ok(mw({{f.b3, -2}}, Ket::Generator)));
    CHECK(!ok(mw({{f.unit, -1}}, Ket::Generator)));

    // the vacuum ket has threshold 0
    CHECK(ok(mw({{f.w, -2}, {f.w, -1}}, Ket::Vacuum)));
    CHECK(!ok(mw({{f.w, 0}}, Ket::Vacuum)));
}

TEST_CASE("module spanning words: frozen counts and completeness") {
    auto& f = fix();

    std::vector<int> counts;
    for (int d = 0; d <= 8; ++d) {
        auto words = enumerate_module_spanset(f.ctx, f.data, f.L, d);
        counts.push_back(static_cast<int>(words.size()));
        for (const ModeWord& wd : words) {
            CHECK(wd.ket == Ket::Generator);
            CHECK(word_weight(f.ctx, wd) == d);
            CHECK(is_spanning_word(f.ctx, f.data, f.L, wd));
        }
        // deterministic order
        auto again = enumerate_module_spanset(f.ctx, f.data, f.L, d);
        CHECK(words == again);
    }
    CHECK(counts == std::vector<int>{4, 4, 8, 12, 12, 20, 24, 32, 40});

    // completeness against the brute-force predicate listing
    for (int d = 0; d <= 6; ++d) {
        std::set<std::vector<int>> brute;
        for (auto& seq : all_mode_seqs(d, f.L, f.data.Q)) brute.insert(seq);
        std::set<std::vector<int>> got;
        for (const ModeWord& wd : enumerate_module_spanset(f.ctx, f.data, f.L, d)) {
            std::vector<int> seq;
            for (const ModeOp& op : wd.ops) seq.push_back(op.n);
            got.insert(seq);
        }
        CHECK(got == brute);
    }
}

TEST_CASE("normalization: frozen rewrites") {
    auto& f = fix();

    auto same = [&](const char* in, const char* out) {
        Expression a = normalize(f.ctx, f.data, f.L, parse_expression(f.ctx, in));
        Expression b = parse_expression(f.ctx, out);
        CHECK(a.terms() == b.terms());
        CHECK(evaluate_equal(f.ctx, a, parse_expression(f.ctx, in)));
    };

    // the weight-4 relation of the simple quotient
    same("w[-1] w[-1] |0>", "3/5 w[-3] |0>");
    // two passes of it
    same("w[-1] w[-1] w[-1] w[-1] |0>",
         "147/25 w[-7] |0> + 42/25 w[-5] w[-1] |0> - 18/25 w[-4] w[-2] |0>");
    // a commutator reorder on the module
    same("w[0] w[-3] |h>", "3 w[-4] |h> + w[-3] w[0] |h>");
    // a repeated negative mode on the module
    same("w[-2] w[-2] |h>",
         "8/5 w[-5] |h> - 2 w[-5] w[1] |h> - 2 w[-4] w[0] |h> - 2 w[-3] w[-1] |h>");
    // linearity over expressions
    same("w[-1] w[-1] |0> + 2 w[-3] |0>", "13/5 w[-3] |0>");
}

TEST_CASE("normalization: randomized soundness, completeness, termination") {
    auto& f = fix();
    std::mt19937_64 rng(9001);
    auto rnd = [&](int lo, int hi) { return lo + static_cast<int>(rng() % (hi - lo + 1)); };

    // spanning pools per weight for membership checks
    std::map<std::pair<Ket, int>, std::set<ModeWord>> pools;
    auto pool = [&](Ket ket, int d) -> const std::set<ModeWord>& {
        auto key = std::make_pair(ket, d);
        auto it = pools.find(key);
        if (it != pools.end()) return it->second;
        std::set<ModeWord> s;
        if (ket == Ket::Generator)
            for (const ModeWord& wd : enumerate_module_spanset(f.ctx, f.data, f.L, d))
                s.insert(wd);
        else
            for (const ModeWord& wd : enumerate_voa_spanset(f.ctx, f.data, d)) s.insert(wd);
        return pools.emplace(key, std::move(s)).first->second;
    };

    Normalizer norm(f.ctx, f.data, f.L);
    int done = 0, guard = 0, nontrivial = 0;
    while (done < 60 && guard < 8000) {
        ++guard;
        const Ket ket = rng() % 2 ? Ket::Generator : Ket::Vacuum;
        const int len = rnd(1, 4);
        ModeWord wrd;
        wrd.ket = ket;
        for (int i = 0; i < len; ++i) {
            const int pick = rnd(0, 5);
            const int vec = pick == 0 ? f.b3 : (pick == 1 ? f.unit : f.w);
            wrd.ops.push_back(ModeOp{vec, rnd(-4, 3)});
        }
        const int win = f.ctx.view(ket).space->w_max();
        const int D = word_weight(f.ctx, wrd);
        if (D < 0 || D > win) continue;
        int pos = 0;
        for (const ModeOp& op : wrd.ops) pos += std::max(wt_mode(f.ctx, op.vec, op.n), 0);
        if (pos > win) continue;
        ++done;

        NormTrace trace;
        Expression out = norm.normalize(wrd, &trace);
        CHECK(evaluate_equal(f.ctx, Expression::single(wrd), out));
        for (const auto& [ww, cc] : out.terms()) {
            (void)cc;
            CHECK(is_spanning_word(f.ctx, f.data, f.L, ww));
            CHECK(word_weight(f.ctx, ww) == D);
            CHECK(pool(ket, D).count(ww) == 1);
        }
        if (!is_spanning_word(f.ctx, f.data, f.L, wrd)) {
            ++nontrivial;
            CHECK(!trace.lines.empty());
        }
        // memoized second run agrees; fresh-state run agrees too
        CHECK(norm.normalize(wrd).terms() == out.terms());
        CHECK(normalize(f.ctx, f.data, f.L, Expression::single(wrd)).terms() == out.terms());
    }
    CHECK(done == 60);
    CHECK(nontrivial > 20);
}

TEST_CASE("normalization: spanning words are fixed points") {
    auto& f = fix();
    Normalizer norm(f.ctx, f.data, f.L);
    for (int d = 0; d <= 6; ++d)
        for (const ModeWord& wd : enumerate_module_spanset(f.ctx, f.data, f.L, d)) {
            Expression out = norm.normalize(wd);
            REQUIRE(out.size() == 1);
            CHECK(out.terms().count(wd) == 1);
            CHECK(out.terms().at(wd) == Scalar(1));
        }
}

TEST_CASE("normalization: repeat thresholds at nonnegative modes") {
    auto& f = fix();
    Normalizer norm(f.ctx, f.data, f.L);

    // Q = 4 equal nonnegative modes must be rewritten away
    ModeWord four1 = mw({{f.w, 1}, {f.w, 1}, {f.w, 1}, {f.w, 1}}, Ket::Generator);
    Expression out = norm.normalize(four1);
    CHECK(evaluate_equal(f.ctx, Expression::single(four1), out));
    for (const auto& [ww, cc] : out.terms()) {
        (void)cc;
        CHECK(is_spanning_word(f.ctx, f.data, f.L, ww));
    }

    // five copies of mode zero, and a deeper op in front forcing the
    // shallow suffix to be handled on its own first
    for (ModeWord wd : {mw({{f.w, 0}, {f.w, 0}, {f.w, 0}, {f.w, 0}, {f.w, 0}}, Ket::Generator),
                        mw({{f.w, -2}, {f.w, 1}, {f.w, 1}, {f.w, 1}, {f.w, 1}}, Ket::Generator)}) {
        Expression o = norm.normalize(wd);
        CHECK(evaluate_equal(f.ctx, Expression::single(wd), o));
        for (const auto& [ww, cc] : o.terms()) {
            (void)cc;
            CHECK(is_spanning_word(f.ctx, f.data, f.L, ww));
        }
    }
}

TEST_CASE("normalization refuses words deeper than the window") {
    auto& f = fix();
    Normalizer norm(f.ctx, f.data, f.L);
    CHECK_THROWS_AS(norm.normalize(mw({{f.w, -6}, {f.w, -5}}, Ket::Generator)),
                    WindowTooSmall);
    CHECK_THROWS_AS(norm.normalize(mw({{f.w, -6}, {f.w, -5}}, Ket::Vacuum)), WindowTooSmall);
}

TEST_CASE("module spanning set achieves full rank in the window") {
    auto& f = fix();
    ModuleSpanCheck sc = verify_module_span(f.ctx, f.data, f.L, 8);
    REQUIRE(sc.dims.size() == 9);
    CHECK(sc.dims == std::vector<int>{1, 1, 1, 1, 2, 2, 3, 3, 4});
    CHECK(sc.ranks == sc.dims);
    CHECK(sc.counts == std::vector<int>{4, 4, 8, 12, 12, 20, 24, 32, 40});

    // with the threshold forced to zero the listed words cannot span
    CHECK_THROWS_AS(verify_module_span(f.ctx, f.data, 0, 4), SpanDeficit);
}
