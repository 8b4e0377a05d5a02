#include "vspan/report.hpp"

#include "vspan/errors.hpp"

#include <fstream>
#include <sstream>

namespace vspan {

Json model_json(const Context& ctx) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["c"] = ctx.voa->c().str();
    j["kind"] = ctx.voa->kind() == SpaceKind::SimpleQuotient ? "simple-quotient" : "verma";
    Json voa;
    voa["w_max"] = ctx.voa->w_max();
    Json vdims = Json::array();
    for (int d = 0; d <= ctx.voa->w_max(); ++d) vdims.push_back(ctx.voa->dim(d));
    voa["dims"] = vdims;
    j["voa"] = voa;
    if (ctx.module) {
        Json mod;
        mod["h"] = ctx.module->h().str();
        mod["w_max"] = ctx.module->w_max();
        Json mdims = Json::array();
        for (int d = 0; d <= ctx.module->w_max(); ++d) mdims.push_back(ctx.module->dim(d));
        mod["dims"] = mdims;
        j["module"] = mod;
    }
    return j;
}

Json expression_json(const Context& ctx, const Expression& e) {
    Json terms = Json::array();
    for (const auto& [w, c] : e.terms()) {
        Json t = Json::array();
        t.push_back(c.str());
        t.push_back(print_word(ctx, w));
        terms.push_back(t);
    }
    return terms;
}

Json span_json(const std::vector<int>& dims, const std::vector<int>& ranks) {
    Json rows = Json::array();
    for (size_t d = 0; d < dims.size(); ++d) {
        Json r;
        r["weight"] = d;
        r["dim"] = dims[d];
        r["rank"] = d < ranks.size() ? ranks[d] : 0;
        rows.push_back(r);
    }
    return rows;
}

std::string csv_dims(const std::vector<int>& dims, const std::vector<int>& codims) {
    std::ostringstream os;
    os << "weight,dim,cn_codim\n";
    for (size_t d = 0; d < dims.size(); ++d)
        os << d << "," << dims[d] << "," << (d < codims.size() ? codims[d] : 0) << "\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw PreconditionViolation("cannot open output file: " + path);
    f << content;
    if (!f) throw PreconditionViolation("failed writing output file: " + path);
}

} // namespace vspan
