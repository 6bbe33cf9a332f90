#include "breuil/monodromy.hpp"

#include <string>

namespace breuil {

namespace {

PolyRow derivation_row(const PolyRow& v) {
    PolyRow out = v;
    for (TruncPoly& x : out) x = derivation_n(x);
    return out;
}

Matrix derivation_matrix(const Matrix& m) {
    Matrix out = m;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out.at(i, j) = derivation_n(m.at(i, j));
    return out;
}

}  // namespace

MonodromyModule make_monodromy_module(const PhiModule& base, const Matrix& n_op) {
    const RingParams& params = base.params;
    if (params.r >= params.p - 1)
        throw RankViolation("monodromy layer requires r < p-1, got r = " + std::to_string(params.r));
    if (params.s != params.e * params.p)
        throw LevelViolation("monodromy layer requires s = e*p, got s = " + std::to_string(params.s));
    if (n_op.rows() != base.rank() || n_op.cols() != base.rank())
        throw DimensionMismatch("monodromy operator must be d x d on the basis");
    if (base.rank() > 0 && (n_op.field_char() != params.p || n_op.order() != params.s))
        throw ParamMismatch("monodromy operator entries live in the wrong ring");
    return MonodromyModule{base, n_op};
}

PolyRow apply_n(const MonodromyModule& m, const PolyRow& v) {
    if (static_cast<int>(v.size()) != m.base.rank())
        throw DimensionMismatch("apply_n: coordinate row has wrong width");
    return row_add(derivation_row(v), row_times_matrix(v, m.n_op));
}

MonodromyReport check_monodromy(const MonodromyModule& m) {
    const PhiModule& base = m.base;
    const RingParams& params = base.params;
    const int d = base.rank(), e = params.e, p = params.p, s = params.s;
    MonodromyReport report;
    report.fil_stable = true;
    report.diagram = true;
    if (d == 0) return report;

    const TruncPoly ue = TruncPoly::u_power(p, s, e);
    const TruncPoly cr = params.c_pow_r();

    for (int i = 0; i < d; ++i) {
        // w = u^e N(alpha_i) for the filtration generator alpha_i = row i of a.
        const PolyRow w = row_scaled(apply_n(m, base.a.row(i)), ue);
        const std::optional<PolyRow> t = solve_row_combination(base.a, w);
        if (!t) {
            report.fil_stable = false;
            report.detail += "generator " + std::to_string(i) + ": u^e N(alpha) not in Fil; ";
            continue;
        }
        // phi_r(w) = c^r phi(t) against c N(phi_r(alpha_i)) = c N(c^r m_i).
        PolyRow lhs = *t;
        for (TruncPoly& x : lhs) x = frobenius(x) * cr;

        PolyRow rhs(static_cast<size_t>(d), TruncPoly(p, s));
        rhs[static_cast<size_t>(i)] = derivation_n(cr);              // N(c^r) m_i
        PolyRow basis_part(static_cast<size_t>(d), TruncPoly(p, s));
        basis_part[static_cast<size_t>(i)] = cr;
        rhs = row_add(rhs, row_times_matrix(basis_part, m.n_op));    // + c^r N(m_i)
        rhs = row_scaled(rhs, params.c);

        if (!row_is_zero(row_sub(lhs, rhs))) {
            report.diagram = false;
            report.detail += "generator " + std::to_string(i) + ": phi_r(u^e N(alpha)) != c N(phi_r(alpha)); ";
        }
    }
    if (report.pass()) report.detail = "all axioms hold";
    return report;
}

MonodromyModule transport_monodromy(const MonodromyModule& m, const Matrix& v) {
    const TransportedObject moved = transport_object(m.base, v);
    const Matrix phi_v = frobenius(v);
    const Matrix n_new = (derivation_matrix(phi_v) + phi_v * m.n_op) * mat_invert(phi_v);
    return make_monodromy_module(moved.module, n_new);
}

}  // namespace breuil
