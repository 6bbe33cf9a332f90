#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "breuil/errors.hpp"

namespace breuil {

using FpRow = std::vector<uint8_t>;

// Dense matrix over F_p with row-major storage.  All the solvers use the
// row-vector convention: a linear map sends x to x*M, so its matrix has
// one row per input basis vector.
struct FpMat {
    int p = 0;
    int rows = 0;
    int cols = 0;
    std::vector<uint8_t> a;  // rows*cols entries

    FpMat() = default;
    FpMat(int p_, int rows_, int cols_)
        : p(p_), rows(rows_), cols(cols_),
          a(static_cast<size_t>(rows_) * static_cast<size_t>(cols_), 0) {}

    uint8_t& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    uint8_t at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    FpRow row(int i) const {
        return FpRow(a.begin() + static_cast<long>(i) * cols,
                     a.begin() + static_cast<long>(i + 1) * cols);
    }
    void set_row(int i, const FpRow& r);
    static FpMat from_rows(int p, int cols, const std::vector<FpRow>& rows);
    FpMat transpose() const;
};

int fp_inv(int value, int p);  // inverse mod p, value nonzero

FpRow fp_row_scale(const FpRow& r, int factor, int p);
void fp_row_axpy(FpRow& dst, const FpRow& src, int factor, int p);  // dst += factor*src
bool fp_row_is_zero(const FpRow& r);

// In-place reduced row echelon form.  Returns the pivot column of each
// echelon row (size = rank).  When transform is given it must start as
// the identity; it accumulates the row operations.
std::vector<int> fp_rref(FpMat& m, FpMat* transform = nullptr);

int fp_rank(FpMat m);

// Basis of {x : x*m = 0} as rows.
std::vector<FpRow> fp_left_nullspace(const FpMat& m);

// One solution of x*m = b, if any.
std::optional<FpRow> fp_solve_left(const FpMat& m, const FpRow& b);

// Row-span utilities.  A span is canonicalized as the RREF of its
// generating rows with zero rows removed.
FpMat fp_row_span(const std::vector<FpRow>& gens, int p, int cols);
bool fp_span_contains(const FpMat& span_rref, const FpRow& v);
bool fp_span_equal(const FpMat& lhs_rref, const FpMat& rhs_rref);
FpMat fp_span_intersect(const FpMat& lhs_rref, const FpMat& rhs_rref);

}  // namespace breuil
