#pragma once

#include <optional>
#include <vector>

#include "breuil/fp.hpp"
#include "breuil/ring.hpp"

namespace breuil {

using PolyRow = std::vector<TruncPoly>;

// Dense matrix over T_s = F_p[u]/u^s.  Row-major; all entries share (p, s).
// Module elements appear as coefficient rows, so a module map with matrix
// Y acts by v -> v*Y.
class Matrix {
public:
    Matrix() = default;
    Matrix(int p, int s, int rows, int cols);

    static Matrix identity(int p, int s, int n);
    static Matrix from_rows(int p, int s, const std::vector<PolyRow>& rows);
    // Rectangular diagonal with u^{exponents[i]} at (i, i); exponent >= s gives 0.
    static Matrix u_diagonal(int p, int s, int rows, int cols, const std::vector<int>& exponents);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int field_char() const { return p_; }
    int order() const { return s_; }

    const TruncPoly& at(int i, int j) const { return e_[static_cast<size_t>(i) * cols_ + j]; }
    TruncPoly& at(int i, int j) { return e_[static_cast<size_t>(i) * cols_ + j]; }

    PolyRow row(int i) const;
    void set_row(int i, const PolyRow& r);

    bool operator==(const Matrix& o) const {
        return p_ == o.p_ && s_ == o.s_ && rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
    }
    bool operator!=(const Matrix& o) const { return !(*this == o); }
    bool is_zero() const;

    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix operator*(const Matrix& o) const;
    Matrix operator-() const;
    Matrix scaled(const TruncPoly& a) const;
    Matrix times_u_power(int k) const;
    Matrix transpose() const;

    Matrix truncated(int s_new) const;
    Matrix lifted(int s_new) const;
    Matrix shift_right(int k) const;  // exact division by u^k (throws if inexact)
    bool divisible_by_u_power(int k) const;

private:
    int p_ = 0, s_ = 0, rows_ = 0, cols_ = 0;
    std::vector<TruncPoly> e_;
};

Matrix frobenius(const Matrix& m);
Matrix frobenius_iter(const Matrix& m, int n);

// Gauss-Jordan inverse; an entry can serve as pivot iff it is a unit.
Matrix mat_invert(const Matrix& m);

// A = u * diag(u^{x_i}) * v with u, v invertible (inverses accumulated
// during the elimination).  exponents has min(rows, cols) entries, sorted
// ascending; x_i = s encodes a zero diagonal slot.  Pivot rule: minimal
// u-valuation, ties by lowest (row, col).  Verified before returning.
struct SmithDecomposition {
    Matrix u, uinv, v, vinv;
    std::vector<int> exponents;
};
SmithDecomposition smith_decompose(const Matrix& a);

// Adapted basis of the submodule of T_s^d spanned by the rows of gens:
// the submodule equals the direct sum of u^{exponents[i]} * (row i of q).
// exponents has exactly d entries, ascending, with s encoding a zero
// summand.  q is invertible with inverse qinv.
struct AdaptedBasis {
    Matrix q, qinv;
    std::vector<int> exponents;
};
AdaptedBasis adapted_basis(const Matrix& gens, int ambient_dim);

// The two-sided cofactor B with A*B = B*A = u^{er}*Id.  Exists iff every
// invariant exponent of A is <= er; otherwise NotAPresentation.
Matrix two_sided_cofactor(const Matrix& a, int er);

// F_p-linear description of {X : A1*phi(X) = X*A2}.  phi_basis is an
// echelonized basis of the image {phi(X)} (the morphism space) and
// phi_preimage[i] is a nullspace element mapping onto phi_basis[i].
struct SemilinearSolution {
    std::vector<Matrix> x_basis;
    std::vector<Matrix> phi_basis;
    std::vector<Matrix> phi_preimage;
};
SemilinearSolution solve_semilinear(const Matrix& a1, const Matrix& a2, const RingParams& params);

// Flattening conventions shared by every F_p-linearization: entry (i, j)
// coefficient k sits at ((i*cols + j)*s + k).
FpRow flatten(const Matrix& m);
Matrix unflatten(const FpRow& row, int p, int s, int rows, int cols);
FpRow flatten_row(const PolyRow& v);
PolyRow unflatten_row(const FpRow& row, int p, int s, int width);

// T_s-span of the rows of gens as an F_p space (closed under u-multiplication).
FpMat module_span(const Matrix& gens);
bool module_span_contains(const FpMat& span_rref, const PolyRow& v);

// Some t with t*gens = target, or nullopt.
std::optional<PolyRow> solve_row_combination(const Matrix& gens, const PolyRow& target);

// Some X with X*a = b (entries over T_s, solved F_p-linearly), or nullopt.
std::optional<Matrix> solve_matrix_left(const Matrix& a, const Matrix& b);

Matrix vstack(const Matrix& top, const Matrix& bottom);
Matrix hstack(const Matrix& left, const Matrix& right);
Matrix submatrix_rows(const Matrix& m, int r0, int r1);  // rows [r0, r1)
Matrix submatrix_cols(const Matrix& m, int c0, int c1);  // cols [c0, c1)

PolyRow row_times_matrix(const PolyRow& v, const Matrix& m);
PolyRow row_scaled(const PolyRow& v, const TruncPoly& a);
PolyRow row_add(const PolyRow& x, const PolyRow& y);
PolyRow row_sub(const PolyRow& x, const PolyRow& y);
bool row_is_zero(const PolyRow& v);

}  // namespace breuil
