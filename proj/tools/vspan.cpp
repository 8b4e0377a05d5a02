#include "vspan/errors.hpp"
#include "vspan/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

using namespace vspan;

namespace {

struct RunConfig {
    std::string model = "minimal:2:5";
    std::optional<std::string> h;
    int wmax = 12;
    std::string out = ".";
    unsigned long seed = 1;
    std::string normalize_expr;
    int zhu_n = 0;
    std::vector<std::string> commands;
};

Scalar parse_model_c(const std::string& spec) {
    if (spec.rfind("minimal:", 0) == 0) {
        std::string rest = spec.substr(8);
        auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("model: expected minimal:p:q");
        long p = std::stol(rest.substr(0, colon));
        long q = std::stol(rest.substr(colon + 1));
        if (!(2 <= p && p < q)) throw std::runtime_error("model: need 2 <= p < q");
        if (std::gcd(p, q) != 1) throw std::runtime_error("model: p and q must be coprime");
        Scalar num(6 * (p - q) * (p - q));
        return Scalar(1) - num / Scalar(p * q);
    }
    if (spec.rfind("c=", 0) == 0) return Scalar::parse(spec.substr(2));
    throw std::runtime_error("model: expected minimal:p:q or c=<rational>");
}

void load_config_file(const std::string& path, RunConfig& cfg, bool cli_has_h,
                      bool cli_has_model, bool cli_has_wmax, bool cli_has_out,
                      bool cli_has_seed, bool cli_has_commands) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config file: " + path);
    Json j = Json::parse(f);
    if (j.contains("model") && !cli_has_model) {
        const Json& m = j["model"];
        if (m.is_string()) {
            cfg.model = m.get<std::string>();
        } else if (m.contains("c")) {
            cfg.model = "c=" + m["c"].get<std::string>();
        } else {
            cfg.model = "minimal:" + std::to_string(m["p"].get<long>()) + ":" +
                        std::to_string(m["q"].get<long>());
        }
    }
    if (j.contains("h") && !cli_has_h) cfg.h = j["h"].get<std::string>();
    if (j.contains("wmax") && !cli_has_wmax) cfg.wmax = j["wmax"].get<int>();
    if (j.contains("out") && !cli_has_out) cfg.out = j["out"].get<std::string>();
    if (j.contains("seed") && !cli_has_seed) cfg.seed = j["seed"].get<unsigned long>();
    if (j.contains("commands") && !cli_has_commands) {
        for (const Json& c : j["commands"]) {
            if (c.is_string()) {
                cfg.commands.push_back(c.get<std::string>());
            } else {
                std::string name = c["name"].get<std::string>();
                if (name == "normalize") cfg.normalize_expr = c["expr"].get<std::string>();
                if (name == "zhu" && c.contains("n")) cfg.zhu_n = c["n"].get<int>();
                cfg.commands.push_back(name);
            }
        }
    }
}

struct Session {
    RunConfig cfg;
    Context ctx;
    std::optional<CofiniteData> data;
    std::optional<int> l_gen;

    Session(RunConfig c, std::shared_ptr<const VOAModel> voa,
            std::shared_ptr<const ModuleModel> mod)
        : cfg(std::move(c)), ctx(std::move(voa), std::move(mod)) {}

    const CofiniteData& constants() {
        if (!data) data = compute_constants(ctx);
        return *data;
    }
    int gen_level() {
        if (!l_gen) l_gen = compute_L(ctx, constants());
        return *l_gen;
    }
    void require_module(const std::string& cmd) {
        if (!ctx.module)
            throw CLI::ValidationError(cmd + " needs a module; pass --h");
    }
    std::string path(const std::string& name) const {
        return (std::filesystem::path(cfg.out) / name).string();
    }
};

void cmd_model(Session& s) {
    Json j = model_json(s.ctx);
    write_file(s.path("model.json"), j.dump(2) + "\n");
    std::vector<int> vdims;
    for (int d = 0; d <= s.ctx.voa->w_max(); ++d) vdims.push_back(s.ctx.voa->dim(d));
    write_file(s.path("voa_dims.csv"),
               csv_dims(vdims, cn_codims_voa(s.ctx, 2, s.ctx.voa->w_max())));
    if (s.ctx.module) {
        std::vector<int> mdims;
        for (int d = 0; d <= s.ctx.module->w_max(); ++d) mdims.push_back(s.ctx.module->dim(d));
        write_file(s.path("module_dims.csv"),
                   csv_dims(mdims, cn_codims_module(s.ctx, 2, s.ctx.module->w_max())));
    }
    std::cout << "model: written\n";
}

void cmd_cofinite(Session& s) {
    std::vector<int> codims;
    int n_stable = find_N(s.ctx, &codims); // throws NotCofiniteInWindow
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["c2_codim"] = codims;
    j["N"] = n_stable;
    write_file(s.path("cofinite.json"), j.dump(2) + "\n");
    std::cout << "cofinite: N=" << n_stable << "\n";
}

void cmd_constants(Session& s) {
    const CofiniteData& data = s.constants();
    Json j;
    j["schema_version"] = kSchemaVersion;
    Json gens = Json::array();
    for (int g : data.gens) gens.push_back(s.ctx.store->get(g).name);
    j["X"] = gens;
    j["B"] = data.B;
    j["N"] = data.N;
    j["Q"] = data.Q;
    j["window"] = data.window;
    if (s.ctx.module) j["L"] = s.gen_level();
    write_file(s.path("constants.json"), j.dump(2) + "\n");
    std::cout << "constants: B=" << data.B << " N=" << data.N << " Q=" << data.Q;
    if (s.ctx.module) std::cout << " L=" << s.gen_level();
    std::cout << "\n";
}

void cmd_voa_span(Session& s) {
    const CofiniteData& data = s.constants();
    SpanCheck sc = verify_voa_span(s.ctx, data, s.ctx.voa->w_max()); // throws SpanDeficit
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["table"] = span_json(sc.dims, sc.ranks);
    j["pass"] = true;
    write_file(s.path("voa_span.json"), j.dump(2) + "\n");
    std::cout << "voa-span: full rank to weight " << s.ctx.voa->w_max() << "\n";
}

void cmd_module_span(Session& s) {
    s.require_module("module-span");
    const CofiniteData& data = s.constants();
    int lev = s.gen_level();
    ModuleSpanCheck sc = verify_module_span(s.ctx, data, lev, s.ctx.module->w_max());
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["L"] = lev;
    j["table"] = span_json(sc.dims, sc.ranks);
    j["counts"] = sc.counts;
    Json cn;
    for (int n : {2, 3, 4})
        cn[std::to_string(n)] = cn_codims_module(s.ctx, n, s.ctx.module->w_max());
    j["cn_codim"] = cn;
    j["pass"] = true;
    write_file(s.path("module_span.json"), j.dump(2) + "\n");
    std::cout << "module-span: full rank to depth " << s.ctx.module->w_max() << "\n";
}

void cmd_normalize(Session& s) {
    Expression e;
    try {
        e = parse_expression(s.ctx, s.cfg.normalize_expr);
    } catch (const std::exception& ex) {
        throw CLI::ValidationError(std::string("normalize: bad expression: ") + ex.what());
    }
    const CofiniteData& data = s.constants();
    int lev = s.ctx.module ? s.gen_level() : 0;
    NormTrace trace;
    Expression nf = normalize(s.ctx, data, lev, e, &trace);
    if (!evaluate_equal(s.ctx, e, nf))
        throw PreconditionViolation("normalize: result is not evaluation-equal to the input");
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["input"] = s.cfg.normalize_expr;
    j["terms"] = expression_json(s.ctx, nf);
    j["trace_lines"] = trace.lines.size();
    write_file(s.path("normalize.json"), j.dump(2) + "\n");
    std::string txt;
    for (const std::string& line : trace.lines) txt += line + "\n";
    write_file(s.path("normalize_trace.txt"), txt);
    std::cout << "normalize: " << nf.size() << " spanning terms, " << trace.lines.size()
              << " trace lines\n";
    std::cout << print_expression(s.ctx, nf) << "\n";
}

void cmd_zhu(Session& s) {
    s.require_module("zhu");
    const CofiniteData& data = s.constants();
    int lev = s.gen_level();
    std::vector<int> schedule;
    int lo = s.cfg.wmax >= 6 ? 4 : 1;
    for (int w = lo; w <= s.cfg.wmax; ++w) schedule.push_back(w);
    AnEstimate est = an_dim_estimate(s.ctx, data, lev, s.cfg.zhu_n, schedule);
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["n"] = s.cfg.zhu_n;
    j["windows"] = est.window_sizes;
    j["dims"] = est.dims;
    j["rep_bound"] = est.rep_bound;
    j["stabilized"] = est.stabilized;
    j["value"] = est.value;
    write_file(s.path("zhu.json"), j.dump(2) + "\n");
    std::cout << "zhu: n=" << s.cfg.zhu_n
              << (est.stabilized ? " stabilized at " + std::to_string(est.value)
                                 : " not stabilized (upper bounds only)")
              << "\n";
}

// Seeded randomized identity sweep: Borcherds residuals plus the iterate
// and equal-index specializations, all exact.
void cmd_identities(Session& s) {
    std::mt19937_64 rng(s.cfg.seed);
    const LiePbwSpace& v = s.ctx.voa->space();
    auto pick_wt = [&](int max_wt) {
        std::vector<int> ws;
        for (int w = 1; w <= max_wt; ++w)
            if (v.dim(w) > 0) ws.push_back(w);
        return ws[rng() % ws.size()];
    };
    std::vector<Ket> kets{Ket::Vacuum};
    if (s.ctx.module) kets.push_back(Ket::Generator);

    int borcherds_checked = 0;
    for (int attempts = 0; attempts < 400 && borcherds_checked < 20; ++attempts) {
        int wu = pick_wt(4), wv = pick_wt(4);
        int u = s.ctx.store->intern_basis(wu, static_cast<int>(rng() % v.dim(wu)));
        int vv = s.ctx.store->intern_basis(wv, static_cast<int>(rng() % v.dim(wv)));
        int k = static_cast<int>(rng() % 5) - 2;
        int q = static_cast<int>(rng() % 5) - 2;
        int r = static_cast<int>(rng() % 5) - 2;
        Ket ket = kets[rng() % kets.size()];
        TargetView tv = s.ctx.view(ket);
        int delta = static_cast<int>(rng() % 4);
        if (tv.space->dim(delta) == 0) continue;
        // Every term of the identity must stay inside the truncation windows.
        int need = std::max({delta + wu + wv + k + q + r - 2, delta + wv + q - 1,
                             delta + wu + k - 1});
        if (need > tv.space->w_max()) continue;
        if (wu + wv + r - 1 > s.ctx.voa->w_max()) continue;
        VectorInModel target{ket, delta,
                             sv_unit(static_cast<int>(rng() % tv.space->dim(delta)))};
        VectorInModel res = borcherds_residual(s.ctx, u, vv, k, q, r, target);
        if (!sv_is_zero(res.coords))
            throw PreconditionViolation("identity sweep: nonzero Borcherds residual");
        ++borcherds_checked;
    }

    int iterate_checked = 0;
    for (int attempts = 0; attempts < 200 && iterate_checked < 10; ++attempts) {
        int wu = pick_wt(3), wv = pick_wt(3);
        int u = s.ctx.store->intern_basis(wu, static_cast<int>(rng() % v.dim(wu)));
        int vv = s.ctx.store->intern_basis(wv, static_cast<int>(rng() % v.dim(wv)));
        int r = 1 + static_cast<int>(rng() % 2);
        auto comp = s.ctx.store->intern_composite(u, r, vv);
        if (!comp) continue;
        int n = -1 - static_cast<int>(rng() % 4);
        Ket ket = kets[rng() % kets.size()];
        if (s.ctx.store->get(*comp).weight - n - 1 > s.ctx.view(ket).space->w_max()) continue;
        Expression direct = Expression::single(ModeWord{{ModeOp{*comp, n}}, ket});
        Expression expanded = iterate_expand(s.ctx, *comp, n, ket);
        if (!evaluate_equal(s.ctx, direct, expanded))
            throw PreconditionViolation("identity sweep: iterate expansion mismatch");
        ++iterate_checked;
    }

    int repeat_checked = 0;
    for (int attempts = 0; attempts < 200 && repeat_checked < 10; ++attempts) {
        int wu = pick_wt(3), wv = pick_wt(3);
        int u = s.ctx.store->intern_basis(wu, static_cast<int>(rng() % v.dim(wu)));
        int vv = s.ctx.store->intern_basis(wv, static_cast<int>(rng() % v.dim(wv)));
        int n = 1 + static_cast<int>(rng() % 3);
        Ket ket = kets[rng() % kets.size()];
        if (wu + wv + 2 * n - 2 > s.ctx.view(ket).space->w_max()) continue;
        ModeWord w{{ModeOp{u, -n}, ModeOp{vv, -n}}, ket};
        Expression direct = Expression::single(w);
        Expression reduced = repeat_reduce(s.ctx, w, 0);
        if (!evaluate_equal(s.ctx, direct, reduced))
            throw PreconditionViolation("identity sweep: equal-index reduction mismatch");
        ++repeat_checked;
    }

    Json j;
    j["schema_version"] = kSchemaVersion;
    j["seed"] = s.cfg.seed;
    j["borcherds_instances"] = borcherds_checked;
    j["iterate_instances"] = iterate_checked;
    j["repeat_instances"] = repeat_checked;
    j["pass"] = true;
    write_file(s.path("identities.json"), j.dump(2) + "\n");
    std::cout << "identities: " << borcherds_checked + iterate_checked + repeat_checked
              << " instances, all zero residual\n";
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    std::string config_path;

    CLI::App app{"Exact spanning-set toolkit for truncated vertex operator algebras"};
    app.set_help_flag("--help", "print this help message and exit");
    app.add_option("--config", config_path, "JSON config file");
    auto* opt_model =
        app.add_option("--model", cfg.model, "minimal:p:q or c=<rational> (default minimal:2:5)");
    std::string h_str;
    auto* opt_h = app.add_option("--h", h_str, "module lowest weight (rational)");
    auto* opt_wmax = app.add_option("--wmax", cfg.wmax, "truncation window (default 12)");
    auto* opt_out = app.add_option("--out", cfg.out, "output directory (default .)");
    auto* opt_seed = app.add_option("--seed", cfg.seed, "seed for randomized sweeps");

    app.add_subcommand("model", "emit model descriptor and dimension tables");
    app.add_subcommand("cofinite", "degree-2 codimensions and stability weight");
    app.add_subcommand("constants", "structural constants X, B, N, Q, L");
    app.add_subcommand("voa-span", "verify the vacuum spanning set");
    app.add_subcommand("module-span", "verify the module spanning set");
    auto* sc_norm = app.add_subcommand("normalize", "rewrite an expression into spanning form");
    std::string norm_expr;
    sc_norm->add_option("expr", norm_expr, "expression, e.g. \"w[-1] w[-1] |0>\"");
    auto* sc_zhu = app.add_subcommand("zhu", "level-n quotient dimension estimate");
    int zhu_n = 0;
    auto* opt_zhu_n = sc_zhu->add_option("--n", zhu_n, "level (default 0)");
    auto* sc_ident = app.add_subcommand("identities", "seeded identity sweep");
    bool sweep = false;
    sc_ident->add_flag("--sweep", sweep, "run the randomized sweep");
    app.require_subcommand(0);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Scalar c(0);
    std::optional<Scalar> h;
    try {
        std::vector<std::string> cli_commands;
        for (const CLI::App* sub : app.get_subcommands()) cli_commands.push_back(sub->get_name());
        if (*opt_h) cfg.h = h_str;
        if (!norm_expr.empty()) cfg.normalize_expr = norm_expr;
        if (*opt_zhu_n) cfg.zhu_n = zhu_n;
        cfg.commands = cli_commands;
        if (!config_path.empty())
            load_config_file(config_path, cfg, static_cast<bool>(*opt_h),
                             static_cast<bool>(*opt_model), static_cast<bool>(*opt_wmax),
                             static_cast<bool>(*opt_out), static_cast<bool>(*opt_seed),
                             !cli_commands.empty());
        if (cfg.commands.empty()) {
            std::cerr << "error: no commands given\n";
            return 2;
        }
        if (cfg.wmax < 2 || cfg.wmax > 40) {
            std::cerr << "error: wmax out of range [2, 40]\n";
            return 2;
        }
        c = parse_model_c(cfg.model);
        if (cfg.h) h = Scalar::parse(*cfg.h);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        std::filesystem::create_directories(cfg.out);
        auto voa = build_virasoro_voa(c, cfg.wmax, SpaceKind::SimpleQuotient);
        std::shared_ptr<const ModuleModel> mod;
        if (h) mod = build_module(voa, *h, cfg.wmax, SpaceKind::SimpleQuotient);
        Session s(cfg, voa, mod);

        for (const std::string& cmd : s.cfg.commands) {
            if (cmd == "model") cmd_model(s);
            else if (cmd == "cofinite") cmd_cofinite(s);
            else if (cmd == "constants") cmd_constants(s);
            else if (cmd == "voa-span") cmd_voa_span(s);
            else if (cmd == "module-span") cmd_module_span(s);
            else if (cmd == "normalize") cmd_normalize(s);
            else if (cmd == "zhu") cmd_zhu(s);
            else if (cmd == "identities") cmd_identities(s);
            else {
                std::cerr << "error: unknown command " << cmd << "\n";
                return 2;
            }
        }
        return 0;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SpanDeficit& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return 1;
    } catch (const NotCofiniteInWindow& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
