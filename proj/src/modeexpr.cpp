#include "vspan/modeexpr.hpp"

#include <cctype>
#include <sstream>

namespace vspan {

VecStore::VecStore(std::shared_ptr<const VOAModel> voa) : voa_(std::move(voa)) {
    StoredVec unit;
    unit.weight = 0;
    unit.coords = sv_unit(0);
    unit.name = "1";
    unit.is_unit = true;
    add(std::move(unit));
    StoredVec om;
    om.weight = 2;
    om.coords = voa_->omega();
    om.name = "w";
    add(std::move(om));
}

int VecStore::add(StoredVec sv) {
    auto key = std::make_pair(sv.weight, sv.coords);
    auto it = by_coords_.find(key);
    if (it != by_coords_.end()) {
        // Keep the first id and name, but remember a product expression for it
        // if the new entry brings one and the stored one has none.
        StoredVec& old = vecs_[static_cast<std::size_t>(it->second)];
        if (old.prov_u < 0 && sv.prov_u >= 0) {
            old.prov_u = sv.prov_u;
            old.prov_r = sv.prov_r;
            old.prov_v = sv.prov_v;
        }
        return it->second;
    }
    int id = static_cast<int>(vecs_.size());
    vecs_.push_back(std::move(sv));
    by_coords_.emplace(std::move(key), id);
    return id;
}

const StoredVec& VecStore::get(int id) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (id < 0 || id >= static_cast<int>(vecs_.size()))
        throw PreconditionViolation("VecStore: unknown vector id");
    return vecs_[static_cast<std::size_t>(id)];
}

int VecStore::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return static_cast<int>(vecs_.size());
}

int VecStore::intern_basis(int wt, int idx) {
    std::lock_guard<std::mutex> lock(mu_);
    if (wt < 0 || wt > voa_->w_max() || idx < 0 || idx >= voa_->dim(wt))
        throw PreconditionViolation("intern_basis: no basis vector " + std::to_string(idx) +
                                    " at weight " + std::to_string(wt));
    StoredVec sv;
    sv.weight = wt;
    sv.coords = sv_unit(idx);
    sv.name = "b" + std::to_string(wt) + "." + std::to_string(idx);
    return add(std::move(sv));
}

int VecStore::intern_named(int wt, SparseVec coords, const std::string& name) {
    std::lock_guard<std::mutex> lock(mu_);
    if (coords.empty()) throw PreconditionViolation("intern_named: zero vector");
    StoredVec sv;
    sv.weight = wt;
    sv.coords = std::move(coords);
    sv.name = name;
    return add(std::move(sv));
}

std::optional<int> VecStore::intern_composite(int u, int r, int v) {
    const StoredVec su = get(u);
    const StoredVec sv = get(v);
    int wt = su.weight + sv.weight + r - 1;
    if (wt < 0) return std::nullopt;
    if (wt > voa_->w_max())
        throw UnresolvableProduct("composite " + su.name + "_{" + std::to_string(-r) + "}" +
                                  sv.name + " at weight " + std::to_string(wt) + " > window " +
                                  std::to_string(voa_->w_max()));
    SparseVec coords = voa_->engine().apply(su.weight, su.coords, -r, sv.weight, sv.coords);
    if (coords.empty()) return std::nullopt;
    std::lock_guard<std::mutex> lock(mu_);
    StoredVec out;
    out.weight = wt;
    out.coords = std::move(coords);
    out.name = "(" + su.name + "_{" + std::to_string(-r) + "}" + sv.name + ")";
    out.prov_u = u;
    out.prov_r = r;
    out.prov_v = v;
    return add(std::move(out));
}

void Expression::add(const Scalar& coeff, ModeWord w) {
    if (coeff.is_zero()) return;
    auto [it, inserted] = terms_.emplace(std::move(w), coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void Expression::scale(const Scalar& c) {
    if (c.is_zero()) {
        terms_.clear();
        return;
    }
    for (auto& [w, coef] : terms_) coef *= c;
}

Context::Context(std::shared_ptr<const VOAModel> v, std::shared_ptr<const ModuleModel> m)
    : voa(std::move(v)), module(std::move(m)) {
    if (!voa) throw PreconditionViolation("Context: VOA required");
    if (module && module->voa_ptr().get() != voa.get())
        throw PreconditionViolation("Context: module built over a different VOA");
    store = std::make_shared<VecStore>(voa);
}

TargetView Context::view(Ket k) const {
    if (k == Ket::Vacuum) return {&voa->space(), &voa->engine()};
    if (!module) throw PreconditionViolation("Context: no module for |h> evaluation");
    return {&module->space(), &module->engine()};
}

int wt_mode(const Context& ctx, int vec_id, int n) { return ctx.wt(vec_id) - n - 1; }

int word_weight(const Context& ctx, const ModeWord& w) {
    int s = 0;
    for (const auto& op : w.ops) s += wt_mode(ctx, op.vec, op.n);
    return s;
}

SparseVec apply_ops_to(const Context& ctx, const TargetView& view,
                       const std::vector<ModeOp>& ops, int depth, const SparseVec& start,
                       int* out_depth) {
    SparseVec cur = start;
    int d = depth;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        if (cur.empty()) break;
        const StoredVec& sv = ctx.store->get(it->vec);
        if (sv.is_unit) {
            // |0>_n = delta_{n,-1} id
            if (it->n != -1) cur.clear();
            continue;
        }
        int nd = d + sv.weight - it->n - 1;
        cur = view.engine->apply(sv.weight, sv.coords, it->n, d, cur);
        d = nd;
        if (d < 0) {
            cur.clear();
            d = 0;
        }
    }
    if (out_depth) *out_depth = cur.empty() ? 0 : d;
    return cur;
}

VectorInModel evaluate(const Context& ctx, const ModeWord& w) {
    TargetView view = ctx.view(w.ket);
    VectorInModel out;
    out.ket = w.ket;
    int d = 0;
    out.coords = apply_ops_to(ctx, view, w.ops, 0, sv_unit(0), &d);
    out.depth = out.coords.empty() ? word_weight(ctx, w) : d;
    if (out.depth < 0) out.depth = 0;
    return out;
}

GradedVec evaluate(const Context& ctx, const Expression& e) {
    GradedVec out;
    for (const auto& [w, coeff] : e.terms()) {
        VectorInModel v = evaluate(ctx, w);
        if (v.coords.empty()) continue;
        sv_axpy(out[v.depth], coeff, v.coords);
        if (out[v.depth].empty()) out.erase(v.depth);
    }
    return out;
}

bool evaluate_equal(const Context& ctx, const Expression& a, const Expression& b) {
    return evaluate(ctx, a) == evaluate(ctx, b);
}

namespace {

struct Tok {
    enum Kind { Name, Int, LBracket, RBracket, KetVac, KetGen, Plus, Minus, Star, Slash, Dot, End };
    Kind kind;
    std::string text;
    long value = 0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& s) : s_(s) {}
    Tok next() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (i_ >= s_.size()) return {Tok::End, ""};
        char ch = s_[i_];
        if (ch == '[') { ++i_; return {Tok::LBracket, "["}; }
        if (ch == ']') { ++i_; return {Tok::RBracket, "]"}; }
        if (ch == '+') { ++i_; return {Tok::Plus, "+"}; }
        if (ch == '-') { ++i_; return {Tok::Minus, "-"}; }
        if (ch == '*') { ++i_; return {Tok::Star, "*"}; }
        if (ch == '/') { ++i_; return {Tok::Slash, "/"}; }
        if (ch == '.') { ++i_; return {Tok::Dot, "."}; }
        if (ch == '|') {
            if (s_.compare(i_, 3, "|0>") == 0) { i_ += 3; return {Tok::KetVac, "|0>"}; }
            if (s_.compare(i_, 3, "|h>") == 0) { i_ += 3; return {Tok::KetGen, "|h>"}; }
            throw PreconditionViolation("parse: bad ket at '" + s_.substr(i_) + "'");
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::size_t j = i_;
            while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
            Tok t{Tok::Int, s_.substr(i_, j - i_)};
            t.value = std::stol(t.text);
            i_ = j;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(ch))) {
            std::size_t j = i_;
            while (j < s_.size() && std::isalnum(static_cast<unsigned char>(s_[j]))) ++j;
            Tok t{Tok::Name, s_.substr(i_, j - i_)};
            i_ = j;
            return t;
        }
        throw PreconditionViolation("parse: unexpected character '" + std::string(1, ch) + "'");
    }

  private:
    const std::string& s_;
    std::size_t i_ = 0;
};

} // namespace

Expression parse_expression(Context& ctx, const std::string& text) {
    Lexer lex(text);
    Expression out;
    Tok t = lex.next();
    if (t.kind == Tok::End) throw PreconditionViolation("parse: empty expression");
    bool first = true;
    while (t.kind != Tok::End) {
        Scalar sign(1);
        if (t.kind == Tok::Plus || t.kind == Tok::Minus) {
            if (t.kind == Tok::Minus) sign = Scalar(-1);
            t = lex.next();
        } else if (!first) {
            throw PreconditionViolation("parse: expected + or - between terms");
        }
        first = false;
        // optional rational coefficient: INT [/ INT] [*]
        Scalar coeff(1);
        if (t.kind == Tok::Int) {
            long num = t.value;
            t = lex.next();
            long den = 1;
            if (t.kind == Tok::Slash) {
                t = lex.next();
                if (t.kind != Tok::Int) throw PreconditionViolation("parse: expected denominator");
                den = t.value;
                t = lex.next();
            }
            if (t.kind == Tok::Star) t = lex.next();
            coeff = Scalar(num, den);
        }
        // ops until a ket
        ModeWord w;
        while (t.kind == Tok::Name) {
            std::string name = t.text;
            int vec;
            bool lmode = false;
            if (name == "w") {
                vec = ctx.store->omega_id();
            } else if (name == "L") {
                vec = ctx.store->omega_id();
                lmode = true;
            } else if (name[0] == 'b') {
                // b<wt>.<idx>
                std::size_t dig = 1;
                while (dig < name.size() && std::isdigit(static_cast<unsigned char>(name[dig]))) ++dig;
                if (dig == 1) throw PreconditionViolation("parse: unknown vector '" + name + "'");
                int wt = std::stoi(name.substr(1, dig - 1));
                if (dig != name.size())
                    throw PreconditionViolation("parse: unknown vector '" + name + "'");
                t = lex.next();
                if (t.kind != Tok::Dot) throw PreconditionViolation("parse: expected . in b<wt>.<idx>");
                t = lex.next();
                if (t.kind != Tok::Int) throw PreconditionViolation("parse: expected index in b<wt>.<idx>");
                vec = ctx.store->intern_basis(wt, static_cast<int>(t.value));
            } else {
                throw PreconditionViolation("parse: unknown vector '" + name + "'");
            }
            t = lex.next();
            if (t.kind != Tok::LBracket) throw PreconditionViolation("parse: expected [ after vector");
            t = lex.next();
            long msign = 1;
            if (t.kind == Tok::Minus) {
                msign = -1;
                t = lex.next();
            }
            if (t.kind != Tok::Int) throw PreconditionViolation("parse: expected mode index");
            long n = msign * t.value;
            t = lex.next();
            if (t.kind != Tok::RBracket) throw PreconditionViolation("parse: expected ]");
            if (lmode) n += 1; // L(k) = w_{k+1}
            w.ops.push_back({vec, static_cast<int>(n)});
            t = lex.next();
        }
        if (t.kind == Tok::KetVac)
            w.ket = Ket::Vacuum;
        else if (t.kind == Tok::KetGen)
            w.ket = Ket::Generator;
        else
            throw PreconditionViolation("parse: expected ket |0> or |h>");
        out.add(sign * coeff, std::move(w));
        t = lex.next();
    }
    return out;
}

std::string print_word(const Context& ctx, const ModeWord& w) {
    std::ostringstream os;
    for (const auto& op : w.ops) os << ctx.store->get(op.vec).name << "[" << op.n << "] ";
    os << (w.ket == Ket::Vacuum ? "|0>" : "|h>");
    return os.str();
}

std::string print_expression(const Context& ctx, const Expression& e) {
    if (e.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [w, coeff] : e.terms()) {
        Scalar c = coeff;
        if (first) {
            if (c.sign() < 0) {
                os << "- ";
                c = -c;
            }
        } else {
            os << (c.sign() < 0 ? " - " : " + ");
            if (c.sign() < 0) c = -c;
        }
        first = false;
        if (!(c == Scalar(1)) || w.ops.empty()) os << c.str() << " ";
        os << print_word(ctx, w);
    }
    return os.str();
}

} // namespace vspan
