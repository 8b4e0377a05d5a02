#pragma once

#include "vspan/pbw.hpp"

#include <memory>

namespace vspan {

class ModeActionEngine;

/// Truncated vacuum space of the Virasoro vertex algebra with conformal
/// vector w = L(-2)|0> of weight 2. Grading is by weight, 0..w_max.
class VOAModel {
  public:
    VOAModel(Scalar c, int w_max, SpaceKind kind);
    ~VOAModel();

    const LiePbwSpace& space() const { return s_; }
    /// Mode action of this VOA on itself (adjoint action); composites u_n v.
    const ModeActionEngine& engine() const { return *eng_; }

    Scalar c() const { return s_.c(); }
    int w_max() const { return s_.w_max(); }
    SpaceKind kind() const { return s_.kind(); }
    int dim(int wt) const { return s_.dim(wt); }

    /// Conformal vector in quotient coordinates at weight 2.
    const SparseVec& omega() const { return omega_; }

  private:
    LiePbwSpace s_;
    std::unique_ptr<ModeActionEngine> eng_;
    SparseVec omega_;
};

/// Truncated lowest-weight module over the VOA with generator |h> at depth 0.
class ModuleModel {
  public:
    ModuleModel(std::shared_ptr<const VOAModel> voa, Scalar h, int w_max, SpaceKind kind);
    ~ModuleModel();

    const VOAModel& voa() const { return *voa_; }
    std::shared_ptr<const VOAModel> voa_ptr() const { return voa_; }
    const LiePbwSpace& space() const { return s_; }
    /// Mode action of VOA vectors on this module.
    const ModeActionEngine& engine() const { return *eng_; }

    Scalar h() const { return s_.h(); }
    int w_max() const { return s_.w_max(); }
    SpaceKind kind() const { return s_.kind(); }
    int dim(int d) const { return s_.dim(d); }

  private:
    std::shared_ptr<const VOAModel> voa_;
    LiePbwSpace s_;
    std::unique_ptr<ModeActionEngine> eng_;
};

/// Exact mode-action oracle: applies u_n for a VOA vector u to vectors of a
/// target space (a module, or the VOA itself for composites u_n v).
///
/// The recursion peels the leading L(-n1) of u's PBW word: with a = w
/// (weight 2, a_m = L(m-1)) and u = a_{-r} y for r = n1 - 1 >= 1,
///   (a_{-r} y)_n = sum_{i>=0} (-1)^i C(-r,i)
///                  { a_{-r-i} (y_{n+i} t)  -  (-1)^r  y_{n-r-i} (a_i t) }.
/// Both sums terminate: the first once y_{n+i} lands below depth 0, the
/// second once a_i does. Quotient inputs act through canonical lifts; the
/// result is projected once at the end (the form radical is invariant, so
/// projection commutes with the action).
class ModeActionEngine {
  public:
    ModeActionEngine(const LiePbwSpace& uspace, const LiePbwSpace& tspace);

    const LiePbwSpace& uspace() const { return us_; }
    const LiePbwSpace& tspace() const { return ts_; }

    /// u_n t for u at weight alpha and t at depth delta, both in quotient
    /// coordinates of their spaces. Result at depth delta + alpha - n - 1.
    /// Returns empty below depth 0; throws OutOfWindow past the window.
    SparseVec apply(int alpha, const SparseVec& u, int n, int delta, const SparseVec& t) const;

  private:
    const SparseVec& word_mode(int alpha, int ui, int n, int delta, int ti) const;

    const LiePbwSpace& us_;
    const LiePbwSpace& ts_;
    mutable std::map<std::tuple<int, int, int, int, int>, SparseVec> cache_;
    mutable std::mutex mu_;
};

std::shared_ptr<const VOAModel> build_virasoro_voa(Scalar c, int w_max, SpaceKind kind);
std::shared_ptr<const ModuleModel> build_module(std::shared_ptr<const VOAModel> voa, Scalar h,
                                                int w_max, SpaceKind kind);

/// L(k) in the space's own coordinates; see LiePbwSpace::act.
inline SparseVec act_lie_mode(const LiePbwSpace& s, int k, int d, const SparseVec& v) {
    return s.act(k, d, v);
}

/// Contravariant Gram matrix on the depth-d PBW basis.
inline SparseMatrix gram_matrix(const LiePbwSpace& s, int d) { return s.gram(d); }

} // namespace vspan
