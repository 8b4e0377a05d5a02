#include "vspan/model.hpp"

namespace vspan {

VOAModel::VOAModel(Scalar c, int w_max, SpaceKind kind)
    : s_(std::move(c), Scalar(0), 2, w_max, kind) {
    if (w_max < 2) throw PreconditionViolation("VOAModel: window must include weight 2");
    if (s_.dim(2) < 1)
        throw PreconditionViolation("VOAModel: conformal vector does not survive the quotient");
    eng_ = std::make_unique<ModeActionEngine>(s_, s_);
    omega_ = s_.project(2, sv_unit(s_.word_index(2, Partition{2})));
}

VOAModel::~VOAModel() = default;

ModuleModel::ModuleModel(std::shared_ptr<const VOAModel> voa, Scalar h, int w_max, SpaceKind kind)
    : voa_(std::move(voa)), s_(voa_->c(), std::move(h), 1, w_max, kind) {
    eng_ = std::make_unique<ModeActionEngine>(voa_->space(), s_);
}

ModuleModel::~ModuleModel() = default;

ModeActionEngine::ModeActionEngine(const LiePbwSpace& uspace, const LiePbwSpace& tspace)
    : us_(uspace), ts_(tspace) {
    if (!us_.vacuum_base())
        throw PreconditionViolation("ModeActionEngine: acting vectors must come from a vacuum space");
}

SparseVec ModeActionEngine::apply(int alpha, const SparseVec& u, int n, int delta,
                                  const SparseVec& t) const {
    if (u.empty() || t.empty()) return {};
    if (alpha < 0 || alpha > us_.w_max())
        throw PreconditionViolation("ModeActionEngine::apply: weight outside VOA window");
    if (delta < 0 || delta > ts_.w_max())
        throw PreconditionViolation("ModeActionEngine::apply: depth outside target window");
    int target = delta + alpha - n - 1;
    if (target < 0) return {};
    if (target > ts_.w_max())
        throw OutOfWindow("mode action: result depth " + std::to_string(target) + " > window " +
                          std::to_string(ts_.w_max()));
    SparseVec uv = us_.lift(alpha, u);
    SparseVec tv = ts_.lift(delta, t);
    SparseVec out;
    for (const auto& [ui, uc] : uv)
        for (const auto& [ti, tc] : tv) sv_axpy(out, uc * tc, word_mode(alpha, ui, n, delta, ti));
    return ts_.project(target, std::move(out));
}

// All coordinates here are Verma coordinates. Precondition: the result depth
// delta + alpha - n - 1 lies in [0, ts_ window]; the recursion preserves it.
const SparseVec& ModeActionEngine::word_mode(int alpha, int ui, int n, int delta, int ti) const {
    std::lock_guard<std::mutex> lock(mu_);
    struct Rec {
        const ModeActionEngine* e;
        const SparseVec& go(int alpha, int ui, int n, int delta, int ti) const {
            auto key = std::make_tuple(alpha, ui, n, delta, ti);
            auto it = e->cache_.find(key);
            if (it != e->cache_.end()) return it->second;

            SparseVec out;
            const Partition& w = e->us_.word(alpha, ui);
            if (w.empty()) {
                // vacuum: |0>_n = delta_{n,-1} id
                if (n == -1) out = sv_unit(ti);
            } else {
                int n1 = w[0];
                int r = n1 - 1; // u = w_{-r} y with w the conformal vector
                Partition rest(w.begin() + 1, w.end());
                int restwt = alpha - n1;
                int ri = e->us_.word_index(restwt, rest);
                int target = delta + alpha - n - 1;
                bool rest_empty = rest.empty(); // then y = |0> and y_s = delta_{s,-1}
                // first sum: w_{-r-i} (y_{n+i} t) = L(-n1-i)(...)
                int imax1 = delta + restwt - n - 1; // inner depth >= 0
                for (int i = 0; i <= imax1; ++i) {
                    if (rest_empty && n + i != -1) continue;
                    Scalar coef = binom(-r, static_cast<long>(i));
                    if (i % 2) coef = -coef;
                    const SparseVec& inner = go(restwt, ri, n + i, delta, ti);
                    if (inner.empty()) continue;
                    int innerdepth = delta + restwt - (n + i) - 1;
                    SparseVec up = e->ts_.act_verma(-(n1 + i), innerdepth, inner); // depth = target
                    sv_axpy(out, coef, up);
                }
                // second sum: -(-1)^r y_{n-r-i} (w_i t), w_i = L(i-1)
                int imax2 = delta + 1; // depth of w_i t >= 0
                for (int i = 0; i <= imax2; ++i) {
                    if (rest_empty && n - r - i != -1) continue;
                    Scalar coef = -binom(-r, static_cast<long>(i));
                    if ((i + r) % 2) coef = -coef;
                    SparseVec av = e->ts_.act_verma(i - 1, delta, sv_unit(ti)); // depth delta-i+1
                    if (av.empty()) continue;
                    for (const auto& [tj, tc] : av) {
                        const SparseVec& rec = go(restwt, ri, n - r - i, delta - i + 1, tj);
                        sv_axpy(out, coef * tc, rec);
                    }
                }
                (void)target;
            }
            return e->cache_.emplace(key, std::move(out)).first->second;
        }
    } rec{this};
    return rec.go(alpha, ui, n, delta, ti);
}

std::shared_ptr<const VOAModel> build_virasoro_voa(Scalar c, int w_max, SpaceKind kind) {
    return std::make_shared<const VOAModel>(std::move(c), w_max, kind);
}

std::shared_ptr<const ModuleModel> build_module(std::shared_ptr<const VOAModel> voa, Scalar h,
                                                int w_max, SpaceKind kind) {
    return std::make_shared<const ModuleModel>(std::move(voa), std::move(h), w_max, kind);
}

} // namespace vspan
