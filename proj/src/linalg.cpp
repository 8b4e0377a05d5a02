#include "vspan/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace vspan {

SparseVec sv_unit(int i) { return {{i, Scalar(1)}}; }

Scalar sv_get(const SparseVec& v, int i) {
    auto it = std::lower_bound(v.begin(), v.end(), i,
                               [](const auto& p, int idx) { return p.first < idx; });
    if (it != v.end() && it->first == i) return it->second;
    return Scalar(0);
}

bool sv_is_zero(const SparseVec& v) { return v.empty(); }

int sv_leading_index(const SparseVec& v) { return v.empty() ? -1 : v.front().first; }

void sv_axpy(SparseVec& dst, const Scalar& c, const SparseVec& src) {
    if (c.is_zero() || src.empty()) return;
    SparseVec out;
    out.reserve(dst.size() + src.size());
    std::size_t i = 0, j = 0;
    while (i < dst.size() || j < src.size()) {
        if (j == src.size() || (i < dst.size() && dst[i].first < src[j].first)) {
            out.push_back(dst[i++]);
        } else if (i == dst.size() || src[j].first < dst[i].first) {
            Scalar v = c * src[j].second;
            if (!v.is_zero()) out.emplace_back(src[j].first, std::move(v));
            ++j;
        } else {
            Scalar v = dst[i].second + c * src[j].second;
            if (!v.is_zero()) out.emplace_back(dst[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    dst = std::move(out);
}

SparseVec sv_scaled(const SparseVec& v, const Scalar& c) {
    SparseVec out;
    if (c.is_zero()) return out;
    out.reserve(v.size());
    for (const auto& [i, x] : v) out.emplace_back(i, c * x);
    return out;
}

SparseVec sv_add(const SparseVec& a, const SparseVec& b) {
    SparseVec out = a;
    sv_axpy(out, Scalar(1), b);
    return out;
}

SparseMatrix::SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("SparseMatrix: negative dimension");
}

void SparseMatrix::check(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
        throw std::out_of_range("SparseMatrix: index out of range");
}

const Scalar& SparseMatrix::get(int r, int c) const {
    check(r, c);
    static const Scalar kZero(0);
    auto it = e_.find({r, c});
    return it == e_.end() ? kZero : it->second;
}

void SparseMatrix::set(int r, int c, Scalar v) {
    check(r, c);
    if (v.is_zero())
        e_.erase({r, c});
    else
        e_[{r, c}] = std::move(v);
}

SparseMatrix SparseMatrix::from_rows(const std::vector<SparseVec>& rows, int cols) {
    SparseMatrix m(static_cast<int>(rows.size()), cols);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
        for (const auto& [c, v] : rows[r]) m.set(r, c, v);
    return m;
}

std::vector<SparseVec> SparseMatrix::to_rows() const {
    std::vector<SparseVec> rows(rows_);
    for (const auto& [rc, v] : e_) rows[rc.first].emplace_back(rc.second, v);
    return rows;
}

SparseMatrix SparseMatrix::transpose() const {
    SparseMatrix t(cols_, rows_);
    for (const auto& [rc, v] : e_) t.set(rc.second, rc.first, v);
    return t;
}

SparseVec EchelonBasis::reduce(SparseVec v) const {
    // Pivot indices ascend along rows_, and elimination only introduces
    // indices above the eliminated pivot, so one left-to-right sweep over
    // rows_ clears every pivot coordinate.
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        Scalar coef = sv_get(v, pivots_[r]);
        if (!coef.is_zero()) sv_axpy(v, -coef, rows_[r]);
    }
    return v;
}

bool EchelonBasis::insert(SparseVec v) {
    v = reduce(std::move(v));
    if (v.empty()) return false;
    int p = v.front().first;
    Scalar inv = Scalar(1) / v.front().second;
    if (!(inv == Scalar(1))) v = sv_scaled(v, inv);
    // Back-eliminate the new pivot from existing rows.
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        Scalar coef = sv_get(rows_[r], p);
        if (!coef.is_zero()) sv_axpy(rows_[r], -coef, v);
    }
    auto pos = std::lower_bound(pivots_.begin(), pivots_.end(), p);
    std::size_t at = static_cast<std::size_t>(pos - pivots_.begin());
    pivots_.insert(pos, p);
    rows_.insert(rows_.begin() + static_cast<long>(at), std::move(v));
    return true;
}

std::vector<int> EchelonBasis::complement() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(cols_ - rank()));
    std::size_t r = 0;
    for (int c = 0; c < cols_; ++c) {
        if (r < pivots_.size() && pivots_[r] == c)
            ++r;
        else
            out.push_back(c);
    }
    return out;
}

RrefResult rref(const SparseMatrix& m) {
    EchelonBasis eb(m.cols());
    for (const auto& row : m.to_rows()) eb.insert(row);
    SparseMatrix reduced = SparseMatrix::from_rows(eb.rows(), m.cols());
    return {std::move(reduced), eb.pivots(), eb.rank()};
}

std::vector<SparseVec> nullspace(const SparseMatrix& m) {
    RrefResult rr = rref(m);
    std::vector<SparseVec> rows = rr.reduced.to_rows();
    std::vector<int> pivot_of_col(static_cast<std::size_t>(m.cols()), -1);
    for (int r = 0; r < rr.rank; ++r) pivot_of_col[static_cast<std::size_t>(rr.pivot_cols[static_cast<std::size_t>(r)])] = r;
    std::vector<SparseVec> out;
    for (int f = 0; f < m.cols(); ++f) {
        if (pivot_of_col[static_cast<std::size_t>(f)] >= 0) continue;
        SparseVec x;
        for (int r = 0; r < rr.rank; ++r) {
            Scalar v = sv_get(rows[static_cast<std::size_t>(r)], f);
            if (!v.is_zero()) x.emplace_back(rr.pivot_cols[static_cast<std::size_t>(r)], -v);
        }
        x.emplace_back(f, Scalar(1));
        std::sort(x.begin(), x.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        out.push_back(std::move(x));
    }
    return out;
}

std::optional<std::vector<Scalar>> solve_in_span(const std::vector<SparseVec>& basis,
                                                 const SparseVec& target, int dim) {
    int n = static_cast<int>(basis.size());
    // Augmented system [basis | target] as columns; rows are coordinates.
    SparseMatrix a(dim, n + 1);
    for (int j = 0; j < n; ++j)
        for (const auto& [i, v] : basis[static_cast<std::size_t>(j)]) a.set(i, j, v);
    for (const auto& [i, v] : target) a.set(i, n, v);
    RrefResult rr = rref(a);
    std::vector<Scalar> coeffs(static_cast<std::size_t>(n), Scalar(0));
    std::vector<SparseVec> rows = rr.reduced.to_rows();
    for (int r = 0; r < rr.rank; ++r) {
        int p = rr.pivot_cols[static_cast<std::size_t>(r)];
        if (p == n) return std::nullopt; // target independent of the basis
        coeffs[static_cast<std::size_t>(p)] = sv_get(rows[static_cast<std::size_t>(r)], n);
    }
    return coeffs;
}

} // namespace vspan
