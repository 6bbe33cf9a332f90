#include "breuil/linalg.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace breuil {

Matrix::Matrix(int p, int s, int rows, int cols)
    : p_(p), s_(s), rows_(rows), cols_(cols),
      e_(static_cast<size_t>(rows) * static_cast<size_t>(cols), TruncPoly(p, s)) {
    if (rows < 0 || cols < 0) throw DimensionMismatch("negative matrix dimension");
}

Matrix Matrix::identity(int p, int s, int n) {
    Matrix m(p, s, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = TruncPoly::constant(p, s, 1);
    return m;
}

Matrix Matrix::from_rows(int p, int s, const std::vector<PolyRow>& rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
    Matrix m(p, s, r, c);
    for (int i = 0; i < r; ++i) m.set_row(i, rows[static_cast<size_t>(i)]);
    return m;
}

Matrix Matrix::u_diagonal(int p, int s, int rows, int cols, const std::vector<int>& exponents) {
    Matrix m(p, s, rows, cols);
    for (size_t i = 0; i < exponents.size(); ++i) {
        const int k = static_cast<int>(i);
        if (k >= rows || k >= cols) break;
        m.at(k, k) = TruncPoly::u_power(p, s, std::min(exponents[i], s));
    }
    return m;
}

PolyRow Matrix::row(int i) const {
    PolyRow out;
    out.reserve(static_cast<size_t>(cols_));
    for (int j = 0; j < cols_; ++j) out.push_back(at(i, j));
    return out;
}

void Matrix::set_row(int i, const PolyRow& r) {
    if (static_cast<int>(r.size()) != cols_) throw DimensionMismatch("set_row: width mismatch");
    for (int j = 0; j < cols_; ++j) at(i, j) = r[static_cast<size_t>(j)];
}

bool Matrix::is_zero() const {
    for (const TruncPoly& x : e_)
        if (!x.is_zero()) return false;
    return true;
}

namespace {
void check_same_ring(const Matrix& a, const Matrix& b) {
    if (a.field_char() != b.field_char() || a.order() != b.order())
        throw ParamMismatch("matrices live over different rings");
}
}  // namespace

Matrix Matrix::operator+(const Matrix& o) const {
    check_same_ring(*this, o);
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix addition shape mismatch");
    Matrix m(p_, s_, rows_, cols_);
    for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i] + o.e_[i];
    return m;
}

Matrix Matrix::operator-(const Matrix& o) const {
    check_same_ring(*this, o);
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix subtraction shape mismatch");
    Matrix m(p_, s_, rows_, cols_);
    for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i] - o.e_[i];
    return m;
}

Matrix Matrix::operator*(const Matrix& o) const {
    check_same_ring(*this, o);
    if (cols_ != o.rows_) throw DimensionMismatch("matrix product shape mismatch");
    Matrix m(p_, s_, rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const TruncPoly& aik = at(i, k);
            if (aik.is_zero()) continue;
            for (int j = 0; j < o.cols_; ++j) {
                if (o.at(k, j).is_zero()) continue;
                m.at(i, j) = m.at(i, j) + aik * o.at(k, j);
            }
        }
    return m;
}

Matrix Matrix::operator-() const {
    Matrix m(p_, s_, rows_, cols_);
    for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = -e_[i];
    return m;
}

Matrix Matrix::scaled(const TruncPoly& a) const {
    Matrix m(p_, s_, rows_, cols_);
    for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i] * a;
    return m;
}

Matrix Matrix::times_u_power(int k) const { return scaled(TruncPoly::u_power(p_, s_, k)); }

Matrix Matrix::transpose() const {
    Matrix m(p_, s_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m.at(j, i) = at(i, j);
    return m;
}

Matrix Matrix::truncated(int s_new) const {
    Matrix m(p_, s_new, rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m.at(i, j) = truncate_poly(at(i, j), s_new);
    return m;
}

Matrix Matrix::lifted(int s_new) const {
    Matrix m(p_, s_new, rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m.at(i, j) = lift_poly(at(i, j), s_new);
    return m;
}

Matrix Matrix::shift_right(int k) const {
    Matrix m(p_, s_, rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m.at(i, j) = breuil::shift_right(at(i, j), k);
    return m;
}

bool Matrix::divisible_by_u_power(int k) const {
    for (const TruncPoly& x : e_) {
        const int v = u_valuation(x);
        if (v != val_infinity && v < k) return false;
    }
    return true;
}

Matrix frobenius(const Matrix& m) {
    Matrix out(m.field_char(), m.order(), m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out.at(i, j) = frobenius(m.at(i, j));
    return out;
}

Matrix frobenius_iter(const Matrix& m, int n) {
    Matrix out = m;
    for (int i = 0; i < n; ++i) out = frobenius(out);
    return out;
}

Matrix mat_invert(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("mat_invert: matrix not square");
    const int n = m.rows();
    Matrix work = m;
    Matrix inv = Matrix::identity(m.field_char(), m.order(), n);
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int i = col; i < n; ++i)
            if (work.at(i, col).is_unit()) { pivot = i; break; }
        if (pivot < 0) throw NotInvertible("no unit pivot in column " + std::to_string(col));
        if (pivot != col)
            for (int j = 0; j < n; ++j) {
                std::swap(work.at(pivot, j), work.at(col, j));
                std::swap(inv.at(pivot, j), inv.at(col, j));
            }
        const TruncPoly scale = invert_unit(work.at(col, col));
        for (int j = 0; j < n; ++j) {
            work.at(col, j) = work.at(col, j) * scale;
            inv.at(col, j) = inv.at(col, j) * scale;
        }
        for (int i = 0; i < n; ++i) {
            if (i == col || work.at(i, col).is_zero()) continue;
            const TruncPoly f = work.at(i, col);
            for (int j = 0; j < n; ++j) {
                work.at(i, j) = work.at(i, j) - f * work.at(col, j);
                inv.at(i, j) = inv.at(i, j) - f * inv.at(col, j);
            }
        }
    }
    return inv;
}

namespace {

// Elimination state for the Smith-type decomposition over T_s.  Maintains
// a = u * w * v together with uinv, vinv under every elementary step.
struct SmithWorker {
    Matrix w, u, uinv, v, vinv;
    int p, s;

    explicit SmithWorker(const Matrix& a)
        : w(a),
          u(Matrix::identity(a.field_char(), a.order(), a.rows())),
          uinv(Matrix::identity(a.field_char(), a.order(), a.rows())),
          v(Matrix::identity(a.field_char(), a.order(), a.cols())),
          vinv(Matrix::identity(a.field_char(), a.order(), a.cols())),
          p(a.field_char()), s(a.order()) {}

    void swap_rows(int i, int k) {
        if (i == k) return;
        for (int j = 0; j < w.cols(); ++j) std::swap(w.at(i, j), w.at(k, j));
        for (int j = 0; j < u.rows(); ++j) std::swap(u.at(j, i), u.at(j, k));
        for (int j = 0; j < uinv.cols(); ++j) std::swap(uinv.at(i, j), uinv.at(k, j));
    }
    void swap_cols(int i, int k) {
        if (i == k) return;
        for (int j = 0; j < w.rows(); ++j) std::swap(w.at(j, i), w.at(j, k));
        for (int j = 0; j < v.cols(); ++j) std::swap(v.at(i, j), v.at(k, j));
        for (int j = 0; j < vinv.rows(); ++j) std::swap(vinv.at(j, i), vinv.at(j, k));
    }
    // row i -= q * row k
    void row_axpy(int i, int k, const TruncPoly& q) {
        if (q.is_zero()) return;
        for (int j = 0; j < w.cols(); ++j) w.at(i, j) = w.at(i, j) - q * w.at(k, j);
        for (int j = 0; j < u.rows(); ++j) u.at(j, k) = u.at(j, k) + q * u.at(j, i);
        for (int j = 0; j < uinv.cols(); ++j) uinv.at(i, j) = uinv.at(i, j) - q * uinv.at(k, j);
    }
    // col j -= q * col k
    void col_axpy(int j, int k, const TruncPoly& q) {
        if (q.is_zero()) return;
        for (int i = 0; i < w.rows(); ++i) w.at(i, j) = w.at(i, j) - w.at(i, k) * q;
        for (int i = 0; i < v.cols(); ++i) v.at(k, i) = v.at(k, i) + q * v.at(j, i);
        for (int i = 0; i < vinv.rows(); ++i) vinv.at(i, j) = vinv.at(i, j) - vinv.at(i, k) * q;
    }
    // row i *= unit
    void scale_row(int i, const TruncPoly& unit) {
        const TruncPoly inv = invert_unit(unit);
        for (int j = 0; j < w.cols(); ++j) w.at(i, j) = w.at(i, j) * unit;
        for (int j = 0; j < u.rows(); ++j) u.at(j, i) = u.at(j, i) * inv;
        for (int j = 0; j < uinv.cols(); ++j) uinv.at(i, j) = uinv.at(i, j) * unit;
    }
};

}  // namespace

SmithDecomposition smith_decompose(const Matrix& a) {
    SmithWorker sw(a);
    const int m = a.rows(), n = a.cols(), s = a.order();
    const int steps = std::min(m, n);
    std::vector<int> exponents(static_cast<size_t>(steps), s);

    for (int k = 0; k < steps; ++k) {
        // Minimal-valuation pivot over the active block, ties by (row, col).
        int best_i = -1, best_j = -1, best_v = val_infinity;
        for (int i = k; i < m; ++i)
            for (int j = k; j < n; ++j) {
                const int v = u_valuation(sw.w.at(i, j));
                if (v < best_v) { best_v = v; best_i = i; best_j = j; }
            }
        if (best_v == val_infinity) break;  // active block is zero
        sw.swap_rows(k, best_i);
        sw.swap_cols(k, best_j);
        // Normalize the pivot to exactly u^v.
        const TruncPoly unit = shift_right(sw.w.at(k, k), best_v);
        sw.scale_row(k, invert_unit(unit));
        // Clear the pivot column, then the pivot row.  Every entry in the
        // active block has valuation >= v, so the quotients are exact.
        for (int i = k + 1; i < m; ++i) {
            if (sw.w.at(i, k).is_zero()) continue;
            sw.row_axpy(i, k, shift_right(sw.w.at(i, k), best_v));
        }
        for (int j = k + 1; j < n; ++j) {
            if (sw.w.at(k, j).is_zero()) continue;
            sw.col_axpy(j, k, shift_right(sw.w.at(k, j), best_v));
        }
        exponents[static_cast<size_t>(k)] = best_v;
    }

    SmithDecomposition out{std::move(sw.u), std::move(sw.uinv), std::move(sw.v),
                           std::move(sw.vinv), std::move(exponents)};
    const Matrix d = Matrix::u_diagonal(a.field_char(), s, m, n, out.exponents);
    if (out.u * d * out.v != a || out.u * out.uinv != Matrix::identity(a.field_char(), s, m) ||
        out.v * out.vinv != Matrix::identity(a.field_char(), s, n))
        throw InternalCheckFailed("smith_decompose postcondition failed");
    return out;
}

AdaptedBasis adapted_basis(const Matrix& gens, int ambient_dim) {
    if (gens.cols() != ambient_dim && gens.rows() != 0)
        throw DimensionMismatch("adapted_basis: generators have wrong width");
    const int p = gens.field_char() ? gens.field_char() : 2;
    const int s = gens.order() ? gens.order() : 1;
    if (gens.rows() == 0) {
        // Zero submodule: any basis works; exponents all s.
        AdaptedBasis out{Matrix::identity(p, s, ambient_dim), Matrix::identity(p, s, ambient_dim),
                         std::vector<int>(static_cast<size_t>(ambient_dim), s)};
        return out;
    }
    SmithDecomposition smith = smith_decompose(gens);
    std::vector<int> exps = smith.exponents;
    exps.resize(static_cast<size_t>(ambient_dim), gens.order());
    return AdaptedBasis{std::move(smith.v), std::move(smith.vinv), std::move(exps)};
}

Matrix two_sided_cofactor(const Matrix& a, int er) {
    if (a.rows() != a.cols()) throw DimensionMismatch("two_sided_cofactor: matrix not square");
    const int d = a.rows(), s = a.order(), p = a.field_char();
    if (d == 0) return a;
    SmithDecomposition smith = smith_decompose(a);
    std::vector<int> complement;
    complement.reserve(smith.exponents.size());
    for (int x : smith.exponents) {
        if (x > er)
            throw NotAPresentation("invariant exponent " + std::to_string(x) +
                                   " exceeds e*r = " + std::to_string(er));
        complement.push_back(er - x);
    }
    const Matrix b =
        smith.vinv * Matrix::u_diagonal(p, s, d, d, complement) * smith.uinv;
    const Matrix want = Matrix::identity(p, s, d).times_u_power(er);
    if (a * b != want || b * a != want)
        throw InternalCheckFailed("two_sided_cofactor: product check failed");
    return b;
}

FpRow flatten(const Matrix& m) {
    const int s = m.order();
    FpRow out(static_cast<size_t>(m.rows()) * m.cols() * s, 0);
    size_t idx = 0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            for (int k = 0; k < s; ++k) out[idx++] = static_cast<uint8_t>(m.at(i, j).coeff(k));
    return out;
}

Matrix unflatten(const FpRow& row, int p, int s, int rows, int cols) {
    if (row.size() != static_cast<size_t>(rows) * cols * s)
        throw DimensionMismatch("unflatten: size mismatch");
    Matrix m(p, s, rows, cols);
    size_t idx = 0;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            for (int k = 0; k < s; ++k) m.at(i, j).set_coeff(k, row[idx++]);
    return m;
}

FpRow flatten_row(const PolyRow& v) {
    if (v.empty()) return {};
    const int s = v[0].order();
    FpRow out(v.size() * static_cast<size_t>(s), 0);
    size_t idx = 0;
    for (const TruncPoly& x : v)
        for (int k = 0; k < s; ++k) out[idx++] = static_cast<uint8_t>(x.coeff(k));
    return out;
}

PolyRow unflatten_row(const FpRow& row, int p, int s, int width) {
    if (row.size() != static_cast<size_t>(width) * s)
        throw DimensionMismatch("unflatten_row: size mismatch");
    PolyRow v(static_cast<size_t>(width), TruncPoly(p, s));
    size_t idx = 0;
    for (int j = 0; j < width; ++j)
        for (int k = 0; k < s; ++k) v[static_cast<size_t>(j)].set_coeff(k, row[idx++]);
    return v;
}

SemilinearSolution solve_semilinear(const Matrix& a1, const Matrix& a2, const RingParams& params) {
    if (a1.rows() != a1.cols() || a2.rows() != a2.cols())
        throw DimensionMismatch("solve_semilinear: presentations must be square");
    if (a1.field_char() != params.p || a1.order() != params.s || a2.field_char() != params.p ||
        a2.order() != params.s)
        throw ParamMismatch("solve_semilinear: presentations do not match params");
    const int d1 = a1.rows(), d2 = a2.rows(), p = params.p, s = params.s;
    const int n = d1 * d2 * s;

    // X -> A1*phi(X) - X*A2 as an F_p endomorphism of the coefficient space.
    FpMat lin(p, n, n);
    for (int b = 0; b < n; ++b) {
        FpRow e(static_cast<size_t>(n), 0);
        e[static_cast<size_t>(b)] = 1;
        const Matrix x = unflatten(e, p, s, d1, d2);
        lin.set_row(b, flatten(a1 * frobenius(x) - x * a2));
    }
    SemilinearSolution out;
    const std::vector<FpRow> null_rows = fp_left_nullspace(lin);
    for (const FpRow& r : null_rows) out.x_basis.push_back(unflatten(r, p, s, d1, d2));

    // Echelonize the phi-images, tracking which combination produced each row.
    const int k = static_cast<int>(out.x_basis.size());
    FpMat phis(p, k, n);
    for (int i = 0; i < k; ++i) phis.set_row(i, flatten(frobenius(out.x_basis[static_cast<size_t>(i)])));
    FpMat transform(p, k, k);
    for (int i = 0; i < k; ++i) transform.at(i, i) = 1;
    const std::vector<int> pivots = fp_rref(phis, &transform);
    for (size_t i = 0; i < pivots.size(); ++i) {
        out.phi_basis.push_back(unflatten(phis.row(static_cast<int>(i)), p, s, d1, d2));
        Matrix pre(p, s, d1, d2);
        for (int j = 0; j < k; ++j) {
            const int coeff = transform.at(static_cast<int>(i), j);
            if (coeff != 0)
                pre = pre + out.x_basis[static_cast<size_t>(j)].scaled(TruncPoly::constant(p, s, coeff));
        }
        out.phi_preimage.push_back(std::move(pre));
    }
    for (size_t i = 0; i < out.phi_basis.size(); ++i)
        if (frobenius(out.phi_preimage[i]) != out.phi_basis[i])
            throw InternalCheckFailed("solve_semilinear: preimage tracking failed");
    return out;
}

FpMat module_span(const Matrix& gens) {
    const int p = gens.field_char() ? gens.field_char() : 2;
    const int s = gens.order() ? gens.order() : 1;
    std::vector<FpRow> rows;
    for (int i = 0; i < gens.rows(); ++i)
        for (int k = 0; k < s; ++k) {
            PolyRow r = gens.row(i);
            for (TruncPoly& x : r) x = x * TruncPoly::u_power(p, s, k);
            rows.push_back(flatten_row(r));
        }
    return fp_row_span(rows, p, gens.cols() * s);
}

bool module_span_contains(const FpMat& span_rref, const PolyRow& v) {
    return fp_span_contains(span_rref, flatten_row(v));
}

std::optional<PolyRow> solve_row_combination(const Matrix& gens, const PolyRow& target) {
    const int p = gens.field_char(), s = gens.order();
    const int k = gens.rows();
    if (static_cast<int>(target.size()) != gens.cols())
        throw DimensionMismatch("solve_row_combination: width mismatch");
    // Unknown row t of width k with coefficients in T_s: t*gens = target.
    FpMat lin(p, k * s, gens.cols() * s);
    for (int i = 0; i < k; ++i)
        for (int c = 0; c < s; ++c) {
            PolyRow r = gens.row(i);
            for (TruncPoly& x : r) x = x * TruncPoly::u_power(p, s, c);
            lin.set_row(i * s + c, flatten_row(r));
        }
    const std::optional<FpRow> sol = fp_solve_left(lin, flatten_row(target));
    if (!sol) return std::nullopt;
    PolyRow t(static_cast<size_t>(k), TruncPoly(p, s));
    for (int i = 0; i < k; ++i)
        for (int c = 0; c < s; ++c) t[static_cast<size_t>(i)].set_coeff(c, (*sol)[static_cast<size_t>(i * s + c)]);
    return t;
}

std::optional<Matrix> solve_matrix_left(const Matrix& a, const Matrix& b) {
    // X (b.rows x a.rows) with X*a = b.
    if (a.cols() != b.cols()) throw DimensionMismatch("solve_matrix_left: width mismatch");
    const int p = a.field_char(), s = a.order();
    Matrix x(p, s, b.rows(), a.rows());
    for (int i = 0; i < b.rows(); ++i) {
        const std::optional<PolyRow> t = solve_row_combination(a, b.row(i));
        if (!t) return std::nullopt;
        x.set_row(i, *t);
    }
    return x;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
    if (top.cols() != bottom.cols()) throw DimensionMismatch("vstack: width mismatch");
    Matrix m(top.field_char(), top.order(), top.rows() + bottom.rows(), top.cols());
    for (int i = 0; i < top.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m.at(i, j) = top.at(i, j);
    for (int i = 0; i < bottom.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m.at(top.rows() + i, j) = bottom.at(i, j);
    return m;
}

Matrix hstack(const Matrix& left, const Matrix& right) {
    if (left.rows() != right.rows()) throw DimensionMismatch("hstack: height mismatch");
    Matrix m(left.field_char(), left.order(), left.rows(), left.cols() + right.cols());
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < left.cols(); ++j) m.at(i, j) = left.at(i, j);
        for (int j = 0; j < right.cols(); ++j) m.at(i, left.cols() + j) = right.at(i, j);
    }
    return m;
}

Matrix submatrix_rows(const Matrix& m, int r0, int r1) {
    Matrix out(m.field_char(), m.order(), r1 - r0, m.cols());
    for (int i = r0; i < r1; ++i)
        for (int j = 0; j < m.cols(); ++j) out.at(i - r0, j) = m.at(i, j);
    return out;
}

Matrix submatrix_cols(const Matrix& m, int c0, int c1) {
    Matrix out(m.field_char(), m.order(), m.rows(), c1 - c0);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = c0; j < c1; ++j) out.at(i, j - c0) = m.at(i, j);
    return out;
}

PolyRow row_times_matrix(const PolyRow& v, const Matrix& m) {
    if (static_cast<int>(v.size()) != m.rows()) throw DimensionMismatch("row*matrix shape mismatch");
    PolyRow out(static_cast<size_t>(m.cols()), TruncPoly(m.field_char() ? m.field_char() : 2, m.order() ? m.order() : 1));
    for (int j = 0; j < m.cols(); ++j) {
        TruncPoly acc(m.field_char(), m.order());
        for (int i = 0; i < m.rows(); ++i) acc = acc + v[static_cast<size_t>(i)] * m.at(i, j);
        out[static_cast<size_t>(j)] = acc;
    }
    return out;
}

PolyRow row_scaled(const PolyRow& v, const TruncPoly& a) {
    PolyRow out = v;
    for (TruncPoly& x : out) x = x * a;
    return out;
}

PolyRow row_add(const PolyRow& x, const PolyRow& y) {
    if (x.size() != y.size()) throw DimensionMismatch("row_add: width mismatch");
    PolyRow out = x;
    for (size_t i = 0; i < out.size(); ++i) out[i] = out[i] + y[i];
    return out;
}

PolyRow row_sub(const PolyRow& x, const PolyRow& y) {
    if (x.size() != y.size()) throw DimensionMismatch("row_sub: width mismatch");
    PolyRow out = x;
    for (size_t i = 0; i < out.size(); ++i) out[i] = out[i] - y[i];
    return out;
}

bool row_is_zero(const PolyRow& v) {
    for (const TruncPoly& x : v)
        if (!x.is_zero()) return false;
    return true;
}

}  // namespace breuil
