#include "breuil/fp.hpp"

#include <algorithm>

namespace breuil {

void FpMat::set_row(int i, const FpRow& r) {
    if (static_cast<int>(r.size()) != cols) throw DimensionMismatch("FpMat::set_row: width mismatch");
    std::copy(r.begin(), r.end(), a.begin() + static_cast<long>(i) * cols);
}

FpMat FpMat::from_rows(int p, int cols, const std::vector<FpRow>& rows) {
    FpMat m(p, static_cast<int>(rows.size()), cols);
    for (size_t i = 0; i < rows.size(); ++i) m.set_row(static_cast<int>(i), rows[i]);
    return m;
}

FpMat FpMat::transpose() const {
    FpMat t(p, cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
    return t;
}

int fp_inv(int value, int p) {
    value %= p;
    if (value < 0) value += p;
    if (value == 0) throw NotAUnit("fp_inv of zero");
    for (int x = 1; x < p; ++x)
        if ((value * x) % p == 1) return x;
    throw NotAUnit("fp_inv: no inverse found (p not prime?)");
}

FpRow fp_row_scale(const FpRow& r, int factor, int p) {
    FpRow out(r.size());
    factor %= p;
    if (factor < 0) factor += p;
    for (size_t i = 0; i < r.size(); ++i)
        out[i] = static_cast<uint8_t>((r[i] * factor) % p);
    return out;
}

void fp_row_axpy(FpRow& dst, const FpRow& src, int factor, int p) {
    factor %= p;
    if (factor < 0) factor += p;
    if (factor == 0) return;
    for (size_t i = 0; i < dst.size(); ++i)
        dst[i] = static_cast<uint8_t>((dst[i] + src[i] * factor) % p);
}

bool fp_row_is_zero(const FpRow& r) {
    for (uint8_t v : r)
        if (v != 0) return false;
    return true;
}

std::vector<int> fp_rref(FpMat& m, FpMat* transform) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < m.cols && row < m.rows; ++col) {
        int pivot = -1;
        for (int i = row; i < m.rows; ++i)
            if (m.at(i, col) != 0) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != row) {
            for (int j = 0; j < m.cols; ++j) std::swap(m.at(pivot, j), m.at(row, j));
            if (transform)
                for (int j = 0; j < transform->cols; ++j)
                    std::swap(transform->at(pivot, j), transform->at(row, j));
        }
        const int inv = fp_inv(m.at(row, col), m.p);
        for (int j = 0; j < m.cols; ++j)
            m.at(row, j) = static_cast<uint8_t>((m.at(row, j) * inv) % m.p);
        if (transform)
            for (int j = 0; j < transform->cols; ++j)
                transform->at(row, j) = static_cast<uint8_t>((transform->at(row, j) * inv) % m.p);
        for (int i = 0; i < m.rows; ++i) {
            if (i == row || m.at(i, col) == 0) continue;
            const int f = m.p - m.at(i, col);
            for (int j = 0; j < m.cols; ++j)
                m.at(i, j) = static_cast<uint8_t>((m.at(i, j) + m.at(row, j) * f) % m.p);
            if (transform)
                for (int j = 0; j < transform->cols; ++j)
                    transform->at(i, j) =
                        static_cast<uint8_t>((transform->at(i, j) + transform->at(row, j) * f) % m.p);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

int fp_rank(FpMat m) { return static_cast<int>(fp_rref(m).size()); }

std::vector<FpRow> fp_left_nullspace(const FpMat& m) {
    // x*m = 0  <=>  m^T x^T = 0; echelonize m^T with transform to read off
    // the combinations of the rows of m that vanish.
    FpMat work = m;
    FpMat transform(m.p, m.rows, m.rows);
    for (int i = 0; i < m.rows; ++i) transform.at(i, i) = 1;
    const std::vector<int> pivots = fp_rref(work, &transform);
    std::vector<FpRow> basis;
    for (int i = static_cast<int>(pivots.size()); i < m.rows; ++i)
        basis.push_back(transform.row(i));
    return basis;
}

std::optional<FpRow> fp_solve_left(const FpMat& m, const FpRow& b) {
    if (static_cast<int>(b.size()) != m.cols) throw DimensionMismatch("fp_solve_left: width mismatch");
    // Solve m^T y = b^T by eliminating on [m^T | b^T].
    FpMat aug(m.p, m.cols, m.rows + 1);
    for (int i = 0; i < m.cols; ++i) {
        for (int j = 0; j < m.rows; ++j) aug.at(i, j) = m.at(j, i);
        aug.at(i, m.rows) = b[static_cast<size_t>(i)];
    }
    const std::vector<int> pivots = fp_rref(aug);
    FpRow x(static_cast<size_t>(m.rows), 0);
    for (size_t k = 0; k < pivots.size(); ++k) {
        if (pivots[k] == m.rows) return std::nullopt;  // pivot in the augmented column
        x[static_cast<size_t>(pivots[k])] = aug.at(static_cast<int>(k), m.rows);
    }
    return x;
}

FpMat fp_row_span(const std::vector<FpRow>& gens, int p, int cols) {
    FpMat m = FpMat::from_rows(p, cols, gens);
    const std::vector<int> pivots = fp_rref(m);
    FpMat out(p, static_cast<int>(pivots.size()), cols);
    for (int i = 0; i < out.rows; ++i) out.set_row(i, m.row(i));
    return out;
}

bool fp_span_contains(const FpMat& span_rref, const FpRow& v) {
    if (fp_row_is_zero(v)) return true;
    FpRow work = v;
    for (int i = 0; i < span_rref.rows; ++i) {
        int col = -1;
        for (int j = 0; j < span_rref.cols; ++j)
            if (span_rref.at(i, j) != 0) { col = j; break; }
        if (col < 0) continue;
        const int coeff = work[static_cast<size_t>(col)];
        if (coeff != 0) fp_row_axpy(work, span_rref.row(i), span_rref.p - coeff, span_rref.p);
    }
    return fp_row_is_zero(work);
}

bool fp_span_equal(const FpMat& lhs, const FpMat& rhs) {
    if (lhs.rows != rhs.rows) return false;
    for (int i = 0; i < lhs.rows; ++i)
        if (!fp_span_contains(rhs, lhs.row(i))) return false;
    return true;
}

FpMat fp_span_intersect(const FpMat& lhs, const FpMat& rhs) {
    // Zassenhaus: echelonize [L | L; R | 0]; rows with zero left half give
    // a basis of the intersection in the right half.
    const int cols = lhs.cols;
    FpMat aug(lhs.p, lhs.rows + rhs.rows, 2 * cols);
    for (int i = 0; i < lhs.rows; ++i)
        for (int j = 0; j < cols; ++j) {
            aug.at(i, j) = lhs.at(i, j);
            aug.at(i, cols + j) = lhs.at(i, j);
        }
    for (int i = 0; i < rhs.rows; ++i)
        for (int j = 0; j < cols; ++j) aug.at(lhs.rows + i, j) = rhs.at(i, j);
    fp_rref(aug);
    std::vector<FpRow> inter;
    for (int i = 0; i < aug.rows; ++i) {
        bool left_zero = true;
        for (int j = 0; j < cols && left_zero; ++j) left_zero = aug.at(i, j) == 0;
        if (!left_zero) continue;
        FpRow right(aug.a.begin() + static_cast<long>(i) * aug.cols + cols,
                    aug.a.begin() + static_cast<long>(i + 1) * aug.cols);
        if (!fp_row_is_zero(right)) inter.push_back(right);
    }
    return fp_row_span(inter, lhs.p, cols);
}

}  // namespace breuil
