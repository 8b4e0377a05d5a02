// Acceptance gate: nine exact end-to-end criteria, one PASS/FAIL line each.
// Every check is zero-tolerance over rationals; the binary exits nonzero if
// any criterion fails. Setup progress goes to stderr, results to stdout.
#include "vspan/cofinite.hpp"
#include "vspan/errors.hpp"
#include "vspan/rewrite.hpp"
#include "vspan/spanset.hpp"
#include "vspan/zhu.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <utility>
#include <vector>

namespace fs = std::filesystem;
using namespace vspan;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

struct Env {
    std::shared_ptr<const VOAModel> voa;       // central charge -22/5, window 12
    std::shared_ptr<const ModuleModel> mod0;   // h = 0, window 20
    std::shared_ptr<const ModuleModel> modm;   // h = -1/5, window 20
    std::shared_ptr<const ModuleModel> modm12; // h = -1/5, window 12
    Context ctx0;
    Context ctxm;
    Context ctx12;
    CofiniteData data12;
    CofiniteData data0;
    int L12 = -1;
    int L0 = -1;

    Env()
        : voa((std::cerr << "setup: vacuum model, window 12\n",
               build_virasoro_voa(Scalar(-22, 5), 12, SpaceKind::SimpleQuotient))),
          mod0((std::cerr << "setup: h=0 module, window 20 (exact radical per depth)\n",
                build_module(voa, Scalar(0), 20, SpaceKind::SimpleQuotient))),
          modm((std::cerr << "setup: h=-1/5 module, window 20 (exact radical per depth)\n",
                build_module(voa, Scalar(-1, 5), 20, SpaceKind::SimpleQuotient))),
          modm12((std::cerr << "setup: h=-1/5 module, window 12\n",
                  build_module(voa, Scalar(-1, 5), 12, SpaceKind::SimpleQuotient))),
          ctx0(voa, mod0), ctxm(voa, modm), ctx12(voa, modm12) {
        std::cerr << "setup: structural constants\n";
        data12 = compute_constants(ctx12);
        data0 = compute_constants(ctx0);
        L12 = compute_L(ctx12, data12);
        L0 = compute_L(ctx0, data0);
    }
};

std::string ket_name(Ket k) { return k == Ket::Vacuum ? "|0>" : "|h>"; }

// Applies every term of an expression to a start vector at a given depth,
// accumulating the graded result exactly.
GradedVec act_expression(const Context& ctx, const Expression& e, int d0,
                         const SparseVec& start) {
    TargetView view = ctx.view(Ket::Generator);
    GradedVec out;
    for (const auto& [w, c] : e.terms()) {
        int dout = d0;
        SparseVec r = apply_ops_to(ctx, view, w.ops, d0, start, &dout);
        if (r.empty()) continue;
        sv_axpy(out[dout], c, r);
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.empty() ? out.erase(it) : std::next(it);
    return out;
}

int trace_level(const std::string& line) {
    auto pos = line.find(" t=");
    if (pos == std::string::npos) return -1;
    return std::atoi(line.c_str() + pos + 3);
}

// ---- criterion 1: the component identity on the full parameter grid ------

Outcome borcherds_grid(Env& env) {
    long checked = 0;
    for (Context* pc : {&env.ctx0, &env.ctxm}) {
        Context& ctx = *pc;
        for (int wu = 2; wu <= 4; ++wu)
            for (int wv = 2; wv <= 4; ++wv) {
                int u = ctx.store->intern_basis(wu, 0);
                int v = ctx.store->intern_basis(wv, 0);
                for (int k = -3; k <= 3; ++k)
                    for (int q = -3; q <= 3; ++q)
                        for (int r = -3; r <= 3; ++r)
                            for (int d = 0; d <= 5; ++d)
                                for (int i = 0; i < ctx.module->dim(d); ++i) {
                                    VectorInModel tgt{Ket::Generator, d, sv_unit(i)};
                                    VectorInModel res =
                                        borcherds_residual(ctx, u, v, k, q, r, tgt);
                                    if (!sv_is_zero(res.coords)) {
                                        std::ostringstream os;
                                        os << "nonzero residual at wu=" << wu << " wv=" << wv
                                           << " (k,q,r)=(" << k << "," << q << "," << r
                                           << ") depth " << d << " h-module "
                                           << ctx.module->h().str();
                                        return {false, os.str()};
                                    }
                                    ++checked;
                                }
            }
    }
    return {true, std::to_string(checked) +
                      " weight/mode/target combinations, every residual exactly zero"};
}

// ---- criterion 2: commutator, iterate, and equal-index specializations ---

Outcome specializations(Env& env) {
    Context& ctx = env.ctxm;
    const Scalar c(-22, 5);
    const SparseVec om = ctx.voa->omega();
    std::mt19937_64 rng(2026);

    // (a) the bracket recovered from adjacent transposition
    const std::vector<std::pair<int, int>> forced{{3, -1}, {-1, 3}, {1, 1}, {2, 0}};
    int bracket_done = 0;
    for (int it = 0; bracket_done < 50 && it < 4000; ++it) {
        int a, b;
        if (static_cast<size_t>(bracket_done) < forced.size()) {
            a = forced[static_cast<size_t>(bracket_done)].first;
            b = forced[static_cast<size_t>(bracket_done)].second;
        } else {
            a = static_cast<int>(rng() % 7) - 3;
            b = static_cast<int>(rng() % 7) - 3;
        }
        Ket ket = (rng() % 2) ? Ket::Generator : Ket::Vacuum;
        TargetView view = ctx.view(ket);
        int d = static_cast<int>(rng() % 5);
        if (view.space->dim(d) == 0) continue;
        SparseVec t = sv_unit(static_cast<int>(rng() % view.space->dim(d)));

        auto mode = [&](int m, int dep, const SparseVec& v0) {
            return v0.empty() ? SparseVec{} : view.engine->apply(2, om, m, dep, v0);
        };
        SparseVec diff = mode(a, d + 1 - b, mode(b, d, t));
        sv_axpy(diff, Scalar(-1), mode(b, d + 1 - a, mode(a, d, t)));
        sv_axpy(diff, Scalar(-(a - b)), mode(a + b - 1, d, t));
        if (a + b == 2) {
            int m = a - 1;
            sv_axpy(diff, Scalar(-m * m * m + m) * c / Scalar(12), t);
        }
        if (!sv_is_zero(diff))
            return {false, "bracket mismatch at modes (" + std::to_string(a) + "," +
                               std::to_string(b) + ") depth " + std::to_string(d) + " " +
                               ket_name(ket)};
        if (a > b) {
            ModeWord w{{ModeOp{ctx.store->omega_id(), a}, ModeOp{ctx.store->omega_id(), b}},
                       ket};
            if (!evaluate_equal(ctx, Expression::single(w), commutator_swap(ctx, w, 0)))
                return {false, "adjacent transposition is not evaluation-equal"};
        }
        ++bracket_done;
    }

    // (b) composite modes match their iterate expansion
    int iterate_done = 0;
    for (int it = 0; iterate_done < 50 && it < 4000; ++it) {
        int wu = 2 + static_cast<int>(rng() % 2);
        int wv = 2 + static_cast<int>(rng() % 2);
        int u = ctx.store->intern_basis(wu, 0);
        int v = ctx.store->intern_basis(wv, 0);
        int r = 1 + static_cast<int>(rng() % 2);
        int n = -1 - static_cast<int>(rng() % 4);
        Ket ket = (rng() % 2) ? Ket::Generator : Ket::Vacuum;
        auto comp = ctx.store->intern_composite(u, r, v);
        if (!comp) continue;
        Expression direct = Expression::single(ModeWord{{ModeOp{*comp, n}}, ket});
        if (!evaluate_equal(ctx, direct, iterate_expand(ctx, *comp, n, ket)))
            return {false, "iterate expansion mismatch"};
        ++iterate_done;
    }

    // (c) adjacent equal-index pairs match their reduction
    int repeat_done = 0;
    for (int it = 0; repeat_done < 50 && it < 4000; ++it) {
        int wu = 2 + static_cast<int>(rng() % 2);
        int wv = 2 + static_cast<int>(rng() % 2);
        int u = ctx.store->intern_basis(wu, 0);
        int v = ctx.store->intern_basis(wv, 0);
        int n = 1 + static_cast<int>(rng() % 3);
        Ket ket = (rng() % 2) ? Ket::Generator : Ket::Vacuum;
        ModeWord w{{ModeOp{u, -n}, ModeOp{v, -n}}, ket};
        if (!evaluate_equal(ctx, Expression::single(w), repeat_reduce(ctx, w, 0)))
            return {false, "equal-index reduction mismatch"};
        ++repeat_done;
    }

    std::ostringstream os;
    os << bracket_done << " bracket + " << iterate_done << " iterate + " << repeat_done
       << " equal-index instances, all exact";
    return {true, os.str()};
}

// ---- criterion 3: z-coefficients of (-1)-products vs nested iterates -----

Outcome product_expansion(Env& env) {
    Context& ctx = env.ctxm;
    const int w = ctx.store->omega_id();
    const int b3 = ctx.store->intern_basis(3, 0);
    const int unit = ctx.store->unit_id();
    struct Case {
        std::vector<int> xs;
        int base;
    };
    const std::vector<Case> cases{{{w}, unit},    {{w}, w},    {{b3}, w},   {{w, w}, unit},
                                  {{w, b3}, unit}, {{w, w}, w}, {{w, w, w}, unit}};
    long compared = 0;
    for (const Case& cs : cases) {
        ZExpansion zx = expand_minus_one_product(ctx, cs.xs, cs.base);
        std::vector<std::pair<int, int>> nested;
        for (int x : cs.xs) nested.emplace_back(x, 1);
        for (int s = -4; s <= 10; ++s) {
            Expression e1 = zexpansion_mode(ctx, zx, s, Ket::Generator);
            Expression e2 = word_mode_expand(ctx, nested, cs.base, s, Ket::Generator);
            if (cs.xs.size() == 1 && cs.base == unit) {
                // a single factor over the vacuum is the factor's own mode
                ModeWord want{{ModeOp{w, s}}, Ket::Generator};
                if (e1.size() != 1 || e1.terms().begin()->first != want ||
                    e1.terms().begin()->second != Scalar(1))
                    return {false, "single-factor expansion is not the bare mode at s=" +
                                       std::to_string(s)};
            }
            for (int d0 = 0; d0 <= 6; ++d0)
                for (int i = 0; i < ctx.module->dim(d0); ++i) {
                    SparseVec start = sv_unit(i);
                    if (act_expression(ctx, e1, d0, start) !=
                        act_expression(ctx, e2, d0, start)) {
                        std::ostringstream os;
                        os << "coefficient mismatch: " << cs.xs.size()
                           << " factors, s=" << s << ", target depth " << d0 << " index "
                           << i;
                        return {false, os.str()};
                    }
                    ++compared;
                }
        }
    }
    return {true, std::to_string(compared) +
                      " coefficient/target comparisons across 7 factor lists, all equal"};
}

// ---- criterion 4: vacuum spanning set at full rank -----------------------

Outcome voa_span(Env& env) {
    SpanCheck sc = verify_voa_span(env.ctx12, env.data12, 12);
    const std::vector<int> want{1, 0, 1, 1, 1, 1, 2, 2, 3, 3, 4, 4, 6};
    if (sc.dims != want) return {false, "graded dimensions changed"};
    if (sc.ranks != sc.dims) return {false, "spanning rank below dimension"};
    return {true, "strictly-decreasing words reach full rank in weights 0..12"};
}

// ---- criterion 5: structural constants ------------------------------------

Outcome structural_constants(Env& env) {
    const CofiniteData& D = env.data12;
    if (D.gens.size() != 1 || env.ctx12.store->get(D.gens[0]).name != "w" ||
        env.ctx12.store->get(D.gens[0]).weight != 2)
        return {false, "generator set is not the conformal vector alone"};
    if (D.B != 2 || D.N != 3 || D.Q != 4) {
        std::ostringstream os;
        os << "got B=" << D.B << " N=" << D.N << " Q=" << D.Q;
        return {false, os.str()};
    }
    if (D.Q != std::max(D.N, 2 * D.B - 1) + 1)
        return {false, "threshold does not match its defining bound"};
    std::vector<int> codims;
    if (find_N(env.ctx12, &codims) != 3) return {false, "stability weight is not 3"};
    const std::vector<int> want{1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
    if (codims != want) return {false, "degree-2 codimension profile changed"};
    return {true, "X={w} B=2 N=3 Q=4, with Q = max(N, 2B-1)+1 and stability at 3"};
}

// ---- criterion 6: module spanning set and the normalizer ------------------

Outcome module_span_and_normalize(Env& env) {
    Context& ctx = env.ctx12;
    const CofiniteData& D = env.data12;
    const int L = env.L12;
    if (L != 2) return {false, "generator level is not 2"};

    ModuleSpanCheck ms = verify_module_span(ctx, D, L, 8);
    const std::vector<int> dims{1, 1, 1, 1, 2, 2, 3, 3, 4};
    const std::vector<int> counts{4, 4, 8, 12, 12, 20, 24, 32, 40};
    if (ms.dims != dims || ms.ranks != dims) return {false, "module spanning rank deficit"};
    if (ms.counts != counts) return {false, "spanning-element counts changed"};

    // randomized words: sound, spanning-complete, terminating
    Normalizer nm(ctx, D, L);
    const int w = ctx.store->omega_id();
    const int b3 = ctx.store->intern_basis(3, 0);
    const int unit = ctx.store->unit_id();
    const std::vector<int> pool{w, b3, unit};
    std::map<std::pair<Ket, int>, std::set<std::vector<std::pair<int, int>>>> pools;
    auto in_pool = [&](const ModeWord& mw) {
        int d = word_weight(ctx, mw);
        auto key = std::make_pair(mw.ket, d);
        auto it = pools.find(key);
        if (it == pools.end()) {
            std::set<std::vector<std::pair<int, int>>> s;
            std::vector<ModeWord> all = mw.ket == Ket::Vacuum
                                            ? enumerate_voa_spanset(ctx, D, d)
                                            : enumerate_module_spanset(ctx, D, L, d);
            for (const ModeWord& e : all) {
                std::vector<std::pair<int, int>> sig;
                for (const ModeOp& op : e.ops) sig.emplace_back(op.n, op.vec);
                s.insert(std::move(sig));
            }
            it = pools.emplace(key, std::move(s)).first;
        }
        std::vector<std::pair<int, int>> sig;
        for (const ModeOp& op : mw.ops) sig.emplace_back(op.n, op.vec);
        return it->second.count(sig) > 0;
    };

    std::mt19937_64 rng(9157);
    int done = 0, nontrivial = 0;
    long trace_lines = 0;
    while (done < 100) {
        size_t len = 1 + rng() % 4;
        Ket ket = (rng() % 2) ? Ket::Generator : Ket::Vacuum;
        ModeWord mw;
        mw.ket = ket;
        int posw = 0;
        for (size_t j = 0; j < len; ++j) {
            int vec = pool[rng() % pool.size()];
            int n = static_cast<int>(rng() % 8) - 4;
            mw.ops.push_back(ModeOp{vec, n});
            posw += std::max(ctx.wt(vec) - n - 1, 0);
        }
        if (posw > 12) continue;

        int t_in = filtration_level(ctx, mw);
        NormTrace trace;
        Expression out = nm.normalize(mw, &trace);
        if (!evaluate_equal(ctx, Expression::single(mw), out))
            return {false, "normalization changed the value of a word"};
        int d_in = word_weight(ctx, mw);
        for (const auto& [tw, tc] : out.terms()) {
            (void)tc;
            if (!is_spanning_word(ctx, D, L, tw))
                return {false, "normalized term escapes the spanning form"};
            if (word_weight(ctx, tw) != d_in)
                return {false, "normalized term changed weight"};
            if (!in_pool(tw)) return {false, "normalized term missing from the enumeration"};
        }
        bool changed = out.size() != 1 || !(out.terms().begin()->first == mw) ||
                       out.terms().begin()->second != Scalar(1);
        if (changed && trace.lines.empty())
            return {false, "a rewriting produced no trace"};
        for (const std::string& line : trace.lines)
            if (trace_level(line) > t_in)
                return {false, "trace exceeded the input filtration level"};
        trace_lines += static_cast<long>(trace.lines.size());
        if (changed) ++nontrivial;
        ++done;
    }
    std::ostringstream os;
    os << "full rank to depth 8; 100 random words normalized exactly (" << nontrivial
       << " nontrivial, " << trace_lines << " trace lines within the level bound)";
    return {true, os.str()};
}

// ---- criterion 7: the maximal repeated power rewrites shorter -------------

Outcome max_repeat_rewrite(Env& env) {
    Context& ctx = env.ctx12;
    const int w = ctx.store->omega_id();
    std::vector<int> xs(static_cast<size_t>(env.data12.Q), w);
    Expression rhs = singular_like_rewrite(ctx, env.data12, xs);
    ModeWord block;
    block.ket = Ket::Vacuum;
    for (int j = 0; j < env.data12.Q; ++j) block.ops.push_back(ModeOp{w, -1});
    if (!evaluate_equal(ctx, Expression::single(block), rhs))
        return {false, "rewrite is not evaluation-equal to the power"};
    for (const auto& [tw, tc] : rhs.terms()) {
        (void)tc;
        if (static_cast<int>(tw.ops.size()) >= env.data12.Q)
            return {false, "rewrite term as long as the power"};
        for (size_t j = 0; j < tw.ops.size(); ++j) {
            if (tw.ops[j].n >= 0) return {false, "rewrite term uses a nonnegative mode"};
            if (j + 1 < tw.ops.size() && !(tw.ops[j].n < tw.ops[j + 1].n))
                return {false, "rewrite term is not strictly decreasing"};
            if (!env.data12.is_gen(tw.ops[j].vec))
                return {false, "rewrite term uses a non-generator"};
        }
    }
    return {true, "generator^" + std::to_string(env.data12.Q) + " |0> = " +
                      std::to_string(rhs.size()) +
                      " strictly shorter strictly-decreasing words, exactly"};
}

// ---- criterion 8: finiteness of the graded quotients -----------------------

Outcome finite_quotients(Env& env) {
    const std::map<int, std::vector<int>> frozen{
        {2, {1, 1, 1, 0, 0, 0, 0, 0, 0}},
        {3, {1, 1, 1, 1, 1, 0, 0, 0, 0}},
        {4, {1, 1, 1, 1, 2, 1, 1, 0, 0}}};
    for (int n : {2, 3, 4}) {
        std::vector<int> cod = cn_codims_module(env.ctx12, n, 12);
        if (cod.size() != 13) return {false, "codimension table has the wrong span"};
        for (size_t d = 0; d < 9; ++d)
            if (cod[d] != frozen.at(n)[d])
                return {false, "degree-" + std::to_string(n) + " codimension changed"};
        if (cod[10] != 0 || cod[11] != 0 || cod[12] != 0)
            return {false, "degree-" + std::to_string(n) +
                               " codimension has not stabilized at zero in the window"};
    }

    AnEstimate est =
        an_dim_estimate(env.ctx0, env.data0, env.L0, 0, {4, 5, 6, 7, 8, 9, 10});
    if (!est.stabilized || est.value != 2)
        return {false, "level-0 quotient of the vacuum module did not stabilize at 2"};

    // independent count: a free choice of 0..3 weight-zero ops times
    // distinct negative modes (weight >= 2) and 0..3 weight-one ops
    std::vector<long> dp(13, 0);
    dp[0] = 1;
    for (int part = 2; part <= 12; ++part)
        for (int m = 12; m >= part; --m) dp[static_cast<size_t>(m)] += dp[static_cast<size_t>(m - part)];
    for (int d = 0; d <= 12; ++d) {
        long want = 0;
        for (int a = 0; a <= std::min(3, d); ++a) want += dp[static_cast<size_t>(d - a)];
        want *= 4;
        long got = static_cast<long>(
            enumerate_module_spanset(env.ctx12, env.data12, env.L12, d).size());
        if (got != want)
            return {false, "spanning count at depth " + std::to_string(d) + " is " +
                               std::to_string(got) + ", expected " + std::to_string(want)};
    }
    return {true, "degree 2/3/4 quotients stabilize (total 3/5/8); level-0 vacuum "
                  "quotient = 2; per-depth spanning counts finite and exact to 12"};
}

// ---- criterion 9: byte-identical reports -----------------------------------

Outcome determinism(Env&) {
    fs::path a = fs::temp_directory_path() / "vspan_acceptance_a";
    fs::path b = fs::temp_directory_path() / "vspan_acceptance_b";
    fs::remove_all(a);
    fs::remove_all(b);
    auto run = [&](const fs::path& out) {
        std::string cmd = std::string("\"") + VSPAN_CLI_BIN + "\" --h -1/5 --wmax 8 --seed 7" +
                          " --out " + out.string() +
                          " model cofinite constants voa-span module-span zhu identities" +
                          " normalize \"w[-1] w[-1] |0>\" >/dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        return rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
    };
    if (!run(a) || !run(b)) return {false, "a report run failed"};
    const std::vector<std::string> files{
        "model.json",     "voa_dims.csv",  "module_dims.csv",     "cofinite.json",
        "constants.json", "voa_span.json", "module_span.json",    "normalize.json",
        "normalize_trace.txt", "zhu.json", "identities.json"};
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream os;
        os << f.rdbuf();
        return os.str();
    };
    for (const std::string& f : files) {
        std::string sa = slurp(a / f), sb = slurp(b / f);
        if (sa.empty() || sa != sb) return {false, f + " differs between identical runs"};
    }
    return {true, std::to_string(files.size()) +
                      " report files byte-identical across two identical runs"};
}

} // namespace

int main() {
    std::unique_ptr<Env> env;
    try {
        env = std::make_unique<Env>();
    } catch (const std::exception& e) {
        std::cout << "FAIL [setup] " << e.what() << "\n";
        return 1;
    }

    const std::vector<std::pair<const char*, std::function<Outcome(Env&)>>> criteria{
        {"component identity on the full grid", borcherds_grid},
        {"commutator/iterate/equal-index specializations", specializations},
        {"product-expansion z-coefficients", product_expansion},
        {"vacuum spanning set", voa_span},
        {"structural constants", structural_constants},
        {"module spanning set and normalization", module_span_and_normalize},
        {"maximal repeat rewrite", max_repeat_rewrite},
        {"finite graded quotients", finite_quotients},
        {"report determinism", determinism},
    };

    int failures = 0;
    int idx = 0;
    for (const auto& [name, fn] : criteria) {
        ++idx;
        Outcome o;
        try {
            o = fn(*env);
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.ok) ++failures;
        std::cout << (o.ok ? "PASS" : "FAIL") << " [" << idx << "/9] " << name;
        if (!o.detail.empty()) std::cout << " -- " << o.detail;
        std::cout << "\n" << std::flush;
    }
    if (failures == 0) {
        std::cout << "acceptance: all 9 criteria passed\n";
        return 0;
    }
    std::cout << "acceptance: " << failures << " criteria failed\n";
    return 1;
}
