#pragma once

#include "vspan/scalar.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace vspan {

/// Sparse column vector over the rationals: (index, value) pairs with
/// strictly increasing indices and no explicit zeros.
using SparseVec = std::vector<std::pair<int, Scalar>>;

SparseVec sv_unit(int i);
Scalar sv_get(const SparseVec& v, int i);
bool sv_is_zero(const SparseVec& v);
int sv_leading_index(const SparseVec& v); // -1 if zero

/// dst += c * src, preserving the sparse invariants.
void sv_axpy(SparseVec& dst, const Scalar& c, const SparseVec& src);
SparseVec sv_scaled(const SparseVec& v, const Scalar& c);
SparseVec sv_add(const SparseVec& a, const SparseVec& b);

/// Exact sparse rational matrix with explicit dimensions. Entries are kept
/// in a row-major ordered map; zeros are never stored.
class SparseMatrix {
  public:
    SparseMatrix(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    const Scalar& get(int r, int c) const;
    void set(int r, int c, Scalar v);

    const std::map<std::pair<int, int>, Scalar>& entries() const { return e_; }

    static SparseMatrix from_rows(const std::vector<SparseVec>& rows, int cols);
    std::vector<SparseVec> to_rows() const;
    SparseMatrix transpose() const;

    bool operator==(const SparseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
    }

  private:
    void check(int r, int c) const;
    int rows_, cols_;
    std::map<std::pair<int, int>, Scalar> e_;
};

/// Incrementally maintained reduced row echelon basis of a row space.
/// Rows are pivot-normalized and fully back-eliminated, ordered by pivot
/// column. Insertion order does not affect the final basis (the reduced
/// echelon form of a row space is unique).
class EchelonBasis {
  public:
    explicit EchelonBasis(int cols) : cols_(cols) {}

    int cols() const { return cols_; }
    int rank() const { return static_cast<int>(rows_.size()); }
    const std::vector<SparseVec>& rows() const { return rows_; }
    const std::vector<int>& pivots() const { return pivots_; }

    /// Residual of v after eliminating all pivot columns.
    SparseVec reduce(SparseVec v) const;

    /// Inserts v's residual if nonzero. Returns true if the rank grew.
    bool insert(SparseVec v);

    bool contains(const SparseVec& v) const { return sv_is_zero(reduce(v)); }

    /// Column indices that are not pivots, ascending.
    std::vector<int> complement() const;

  private:
    int cols_;
    std::vector<SparseVec> rows_;
    std::vector<int> pivots_; // ascending, parallel to rows_
};

struct RrefResult {
    SparseMatrix reduced;
    std::vector<int> pivot_cols;
    int rank;
};

/// Reduced row echelon form with deterministic pivoting (first nonzero in
/// column order). Exact; the result is the canonical RREF of the row space.
RrefResult rref(const SparseMatrix& m);

/// Basis of the right kernel {x : m x = 0}, one vector per free column in
/// ascending free-column order, with a 1 in the free coordinate.
std::vector<SparseVec> nullspace(const SparseMatrix& m);

/// Expresses target in the span of basis (vectors of dimension dim).
/// Returns coefficients parallel to basis, or nullopt if not in the span.
/// Deterministic: free coefficients are zero, so the answer is the unique
/// representation supported on the earliest independent subset.
std::optional<std::vector<Scalar>> solve_in_span(const std::vector<SparseVec>& basis,
                                                 const SparseVec& target, int dim);

} // namespace vspan
