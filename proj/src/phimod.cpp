#include "breuil/phimod.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <utility>

#include "breuil/rng.hpp"

namespace breuil {

namespace {

// Constant-term reduction of a matrix over T_s (the mod-u picture).
FpMat mod_u(const Matrix& m) {
    FpMat out(m.field_char() ? m.field_char() : 2, m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out.at(i, j) = static_cast<uint8_t>(m.at(i, j).coeff(0));
    return out;
}

// A square matrix over the local ring T_s is invertible iff it is mod u.
bool invertible(const Matrix& m) {
    if (m.rows() != m.cols()) return false;
    if (m.rows() == 0) return true;
    return fp_rank(mod_u(m)) == m.rows();
}

void check_same_params(const PhiModule& a, const PhiModule& b, const char* where) {
    if (a.params != b.params) throw ParamMismatch(std::string(where) + ": parameter mismatch");
}

}  // namespace

PolyRow phi_r_apply(const PhiModule& m, const PolyRow& gamma) {
    const std::optional<PolyRow> t = solve_row_combination(m.a, gamma);
    if (!t) throw InternalCheckFailed("phi_r_apply: element not in the filtration");
    const TruncPoly cr = m.params.c_pow_r();
    PolyRow out = *t;
    for (TruncPoly& x : out) x = frobenius(x) * cr;
    return out;
}

// Turns (ambient free module of rank n, Fil generators, phi_r) into a
// presentation: adapt the generators, take the new basis n_i =
// phi_r(gamma_i)/c^r, and express the adapted generators in it.  The
// phi_r images must generate (they do for every construction the theory
// provides; violations indicate a bug).
NormalizedPresentation normalize_presentation(
    const RingParams& params, int n, const Matrix& fil_gens,
    const std::function<PolyRow(const PolyRow&)>& phi_r_eval) {
    const int p = params.p, s = params.s;
    const AdaptedBasis ab = adapted_basis(fil_gens, n);
    Matrix basis(p, s, n, n);
    for (int i = 0; i < n; ++i) {
        const int x = ab.exponents[static_cast<size_t>(i)];
        if (x > params.er())
            throw InternalCheckFailed("normalize_presentation: filtration misses u^{er}*ambient");
        PolyRow gamma = row_scaled(ab.q.row(i), TruncPoly::u_power(p, s, x));
        PolyRow w = phi_r_eval(gamma);
        basis.set_row(i, row_scaled(w, invert_unit(params.c_pow_r())));
    }
    Matrix basis_inv;
    try {
        basis_inv = mat_invert(basis);
    } catch (const NotInvertible&) {
        throw InternalCheckFailed("normalize_presentation: phi_r image does not generate");
    }
    Matrix a = Matrix::u_diagonal(p, s, n, n, ab.exponents) * ab.q * basis_inv;
    return NormalizedPresentation{std::move(a), std::move(basis), ab.exponents};
}

QuotientWithProjection quotient_by_free_summand(const PhiModule& m, const Matrix& sub_gens) {
    const int p = m.params.p, s = m.params.s, d = m.rank();
    const AdaptedBasis ab = adapted_basis(sub_gens, d);
    int a_count = 0;
    for (int x : ab.exponents) {
        if (x == 0)
            ++a_count;
        else if (x != s)
            throw InternalCheckFailed("quotient: submodule is not a free direct summand");
    }
    const int n = d - a_count;
    const Matrix q_top = submatrix_rows(ab.q, 0, a_count);
    const Matrix qinv_bottom_cols = submatrix_cols(ab.qinv, a_count, d);

    if (n == 0) {
        PhiModule zero = zero_object(m.params);
        Matrix y(p, s, d, 0);
        return QuotientWithProjection{zero, morphism_from_phi_x(m, zero, y)};
    }

    // Images of the filtration generators under the projection.
    const Matrix fil_gens = m.a * qinv_bottom_cols;

    auto phi_r_eval = [&](const PolyRow& gamma) -> PolyRow {
        // Pick a lift (kappa | gamma) * Q of gamma inside Fil(m):
        // kappa*Q_top - t*A = -gamma*Q_bottom for unknowns (kappa, t).
        PolyRow rhs(static_cast<size_t>(d), TruncPoly(p, s));
        const Matrix q_bottom = submatrix_rows(ab.q, a_count, d);
        rhs = row_sub(rhs, row_times_matrix(gamma, q_bottom));
        const Matrix system = vstack(q_top, -m.a);
        const std::optional<PolyRow> sol = solve_row_combination(system, rhs);
        if (!sol) throw InternalCheckFailed("quotient: filtration element has no lift");
        PolyRow t(sol->begin() + a_count, sol->end());
        const TruncPoly cr = m.params.c_pow_r();
        for (TruncPoly& xpoly : t) xpoly = frobenius(xpoly) * cr;
        // phi_r(lift) in ambient coordinates, then project.
        return row_times_matrix(t, qinv_bottom_cols);
    };

    const NormalizedPresentation np = normalize_presentation(m.params, n, fil_gens, phi_r_eval);
    PhiModule quo = validate_object(m.params, np.a);
    const Matrix y = qinv_bottom_cols * mat_invert(np.basis);
    PhiMorphism proj = morphism_from_phi_x(m, quo, y);
    return QuotientWithProjection{std::move(quo), std::move(proj)};
}

PhiModule validate_object(const RingParams& params, const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("validate_object: presentation not square");
    if (a.rows() > 0 && (a.field_char() != params.p || a.order() != params.s))
        throw ParamMismatch("validate_object: presentation entries do not match params");
    Matrix fixed = a;
    if (a.rows() == 0) fixed = Matrix(params.p, params.s, 0, 0);
    Matrix b = two_sided_cofactor(fixed, params.er());
    return PhiModule{params, std::move(fixed), std::move(b)};
}

PhiModule zero_object(const RingParams& params) {
    return validate_object(params, Matrix(params.p, params.s, 0, 0));
}

PhiModule direct_sum(const PhiModule& m1, const PhiModule& m2) {
    check_same_params(m1, m2, "direct_sum");
    const int p = m1.params.p, s = m1.params.s;
    const int d1 = m1.rank(), d2 = m2.rank();
    Matrix a(p, s, d1 + d2, d1 + d2);
    for (int i = 0; i < d1; ++i)
        for (int j = 0; j < d1; ++j) a.at(i, j) = m1.a.at(i, j);
    for (int i = 0; i < d2; ++i)
        for (int j = 0; j < d2; ++j) a.at(d1 + i, d1 + j) = m2.a.at(i, j);
    return validate_object(m1.params, a);
}

std::vector<int> invariant_exponents(const PhiModule& m) {
    if (m.rank() == 0) return {};
    return smith_decompose(m.a).exponents;
}

bool is_multiplicative(const PhiModule& m) {
    for (int x : invariant_exponents(m))
        if (x != m.params.er()) return false;
    return true;
}

bool is_etale(const PhiModule& m) {
    for (int x : invariant_exponents(m))
        if (x != 0) return false;
    return true;
}

PhiMorphism identity_morphism(const PhiModule& m) {
    const Matrix id = Matrix::identity(m.params.p, m.params.s, m.rank());
    return PhiMorphism{m, m, id, id};
}

PhiMorphism zero_morphism(const PhiModule& src, const PhiModule& tgt) {
    check_same_params(src, tgt, "zero_morphism");
    const Matrix z(src.params.p, src.params.s, src.rank(), tgt.rank());
    return PhiMorphism{src, tgt, z, z};
}

PhiMorphism morphism_from_phi_x(const PhiModule& src, const PhiModule& tgt, const Matrix& y) {
    check_same_params(src, tgt, "morphism_from_phi_x");
    if (y.rows() != src.rank() || y.cols() != tgt.rank())
        throw DimensionMismatch("morphism_from_phi_x: basis matrix has wrong shape");
    const std::optional<Matrix> x = solve_matrix_left(tgt.a, src.a * y);
    if (!x) throw VerificationFailed("morphism_from_phi_x: filtration is not respected");
    if (frobenius(*x) != y)
        throw VerificationFailed("morphism_from_phi_x: matrix is not a morphism (phi(x) != y)");
    return PhiMorphism{src, tgt, *x, y};
}

PhiMorphism morphism_from_x(const PhiModule& src, const PhiModule& tgt, const Matrix& x) {
    check_same_params(src, tgt, "morphism_from_x");
    if (x.rows() != src.rank() || x.cols() != tgt.rank())
        throw DimensionMismatch("morphism_from_x: matrix has wrong shape");
    const Matrix y = frobenius(x);
    if (src.a * y != x * tgt.a)
        throw VerificationFailed("morphism_from_x: semilinear equation fails");
    return PhiMorphism{src, tgt, x, y};
}

PhiMorphism compose(const PhiMorphism& f, const PhiMorphism& g) {
    if (f.target != g.source) throw ParamMismatch("compose: endpoints do not match");
    return PhiMorphism{f.source, g.target, f.x * g.x, f.phi_x * g.phi_x};
}

bool same_morphism(const PhiMorphism& f, const PhiMorphism& g) {
    return f.source == g.source && f.target == g.target && f.phi_x == g.phi_x;
}

bool is_zero_morphism(const PhiMorphism& f) { return f.phi_x.is_zero(); }

bool is_iso_morphism(const PhiMorphism& f) { return invertible(f.phi_x); }

PhiMorphism inverse_iso(const PhiMorphism& f) {
    return morphism_from_phi_x(f.target, f.source, mat_invert(f.phi_x));
}

std::vector<PhiMorphism> hom_space(const PhiModule& m1, const PhiModule& m2) {
    check_same_params(m1, m2, "hom_space");
    const SemilinearSolution sol = solve_semilinear(m1.a, m2.a, m1.params);
    std::vector<PhiMorphism> out;
    out.reserve(sol.phi_basis.size());
    for (size_t i = 0; i < sol.phi_basis.size(); ++i)
        out.push_back(PhiMorphism{m1, m2, sol.phi_preimage[i], sol.phi_basis[i]});
    return out;
}

DualData cartier_dual_with_pairing(const PhiModule& m) {
    const int p = m.params.p, s = m.params.s, d = m.rank(), er = m.params.er();
    if (d == 0) return DualData{m, Matrix(p, s, 0, 0)};

    const SmithDecomposition smith = smith_decompose(m.a);
    std::vector<int> complement;
    for (int x : smith.exponents) complement.push_back(er - x);

    const TruncPoly cr = m.params.c_pow_r();
    // Dual filtration generators in coordinate-dual terms are the rows of
    // D_{er-x} V^{-T}; the dual presentation basis is c^{-r} phi(U)^T f.
    const Matrix pairing = frobenius(smith.u).transpose().scaled(invert_unit(cr));
    const Matrix a_dual = Matrix::u_diagonal(p, s, d, d, complement) *
                          smith.vinv.transpose() * frobenius(smith.uinv).transpose();
    PhiModule dual = validate_object(m.params, a_dual.scaled(cr));

    // Certify against the defining pairing.  beta_i in coordinate-dual
    // terms is row i of G := A_dual * pairing; the pairing matrix on the
    // generators must be u^{er} times an h with c^r * pairing = phi(h)^T.
    const Matrix g = dual.a * pairing;
    const Matrix prod = m.a * g.transpose();
    if (!prod.divisible_by_u_power(er))
        throw InternalCheckFailed("cartier_dual: generator pairing not in Fil^r T_s");
    const Matrix h = prod.shift_right(er);
    if (pairing.scaled(cr) != frobenius(h).transpose())
        throw InternalCheckFailed("cartier_dual: phi_r fails the defining pairing");

    // Certify that the dual filtration is the full annihilator
    // {f : f(Fil) in u^{er} T_s}.
    const int n = d * s;
    FpMat lin(p, n, d * er);
    for (int bidx = 0; bidx < n; ++bidx) {
        FpRow e(static_cast<size_t>(n), 0);
        e[static_cast<size_t>(bidx)] = 1;
        const Matrix bt = unflatten(e, p, s, d, 1);
        const Matrix img = m.a * bt;  // column of pairings against the generators
        FpRow low(static_cast<size_t>(d) * er, 0);
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < er; ++k)
                low[static_cast<size_t>(i * er + k)] = static_cast<uint8_t>(img.at(i, 0).coeff(k));
        lin.set_row(bidx, low);
    }
    const FpMat annihilator = fp_row_span(fp_left_nullspace(lin), p, n);
    if (!fp_span_equal(module_span(g), annihilator))
        throw InternalCheckFailed("cartier_dual: dual filtration is not the full annihilator");

    return DualData{std::move(dual), pairing};
}

PhiModule cartier_dual(const PhiModule& m) { return cartier_dual_with_pairing(m).module; }

PhiMorphism dual_morphism(const PhiMorphism& f) {
    const DualData d_src = cartier_dual_with_pairing(f.source);
    const DualData d_tgt = cartier_dual_with_pairing(f.target);
    const Matrix y = d_tgt.pairing * f.phi_x.transpose() * mat_invert(d_src.pairing);
    return morphism_from_phi_x(d_tgt.module, d_src.module, y);
}

PhiMorphism bidual_iso(const PhiModule& m) {
    const DualData d1 = cartier_dual_with_pairing(m);
    const DualData d2 = cartier_dual_with_pairing(d1.module);
    if (m.rank() == 0) return zero_morphism(m, d2.module);
    const Matrix y = d1.pairing.transpose() * mat_invert(d2.pairing);
    PhiMorphism ev = morphism_from_phi_x(m, d2.module, y);
    if (!is_iso_morphism(ev)) throw InternalCheckFailed("bidual_iso: evaluation map not invertible");
    return ev;
}

SubmoduleWithInclusion max_multiplicative(const PhiModule& m) {
    const int p = m.params.p, s = m.params.s, d = m.rank(), er = m.params.er();
    if (d == 0) return SubmoduleWithInclusion{m, identity_morphism(m)};

    const TruncPoly cr = m.params.c_pow_r();
    const Matrix phi_b = frobenius(m.b);
    Matrix gens = Matrix::identity(p, s, d);
    FpMat span = module_span(gens);
    const int max_steps = d * s + 2;
    bool stable = false;
    for (int step = 0; step < max_steps; ++step) {
        // phi_r(u^{er} w) for w = v*m-basis equals c^r phi(v) phi(B).
        const Matrix image = frobenius(gens).scaled(cr) * phi_b;
        const AdaptedBasis ab = adapted_basis(image, d);
        std::vector<PolyRow> rows;
        for (int i = 0; i < d; ++i) {
            const int x = ab.exponents[static_cast<size_t>(i)];
            if (x >= s) continue;
            rows.push_back(row_scaled(ab.q.row(i), TruncPoly::u_power(p, s, x)));
        }
        Matrix next = rows.empty() ? Matrix(p, s, 0, d) : Matrix::from_rows(p, s, rows);
        FpMat next_span = module_span(next);
        if (fp_span_equal(next_span, span)) { stable = true; break; }
        gens = std::move(next);
        span = std::move(next_span);
    }
    if (!stable) throw InternalCheckFailed("max_multiplicative: chain did not stabilize");

    // The stable submodule is free: its adapted exponents are 0 or s.
    const AdaptedBasis ab = adapted_basis(gens, d);
    std::vector<PolyRow> basis_rows;
    for (int i = 0; i < d; ++i) {
        const int x = ab.exponents[static_cast<size_t>(i)];
        if (x == 0)
            basis_rows.push_back(ab.q.row(i));
        else if (x != s)
            throw InternalCheckFailed("max_multiplicative: stable submodule is not free");
    }
    const int a_rank = static_cast<int>(basis_rows.size());
    if (a_rank == 0) {
        PhiModule zero = zero_object(m.params);
        return SubmoduleWithInclusion{zero, zero_morphism(zero, m)};
    }
    const Matrix basis = Matrix::from_rows(p, s, basis_rows);

    // New basis n_i = phi_r(u^{er} e_i)/c^r = phi(e_i B) expressed inside
    // the submodule.
    const Matrix images = frobenius(basis * m.b);
    const std::optional<Matrix> t = solve_matrix_left(basis, images);
    if (!t || !invertible(*t))
        throw InternalCheckFailed("max_multiplicative: phi_r does not restrict to the submodule");
    const Matrix a_sub = mat_invert(*t).times_u_power(er);
    PhiModule sub = validate_object(m.params, a_sub);
    PhiMorphism inc = morphism_from_phi_x(sub, m, *t * basis);
    return SubmoduleWithInclusion{std::move(sub), std::move(inc)};
}

PartsDecomposition parts(const PhiModule& m) {
    SubmoduleWithInclusion mm = max_multiplicative(m);
    const Matrix sub_gens =
        mm.module.rank() == 0 ? Matrix(m.params.p, m.params.s, 0, m.rank()) : mm.inclusion.phi_x;
    QuotientWithProjection nil = quotient_by_free_summand(m, sub_gens);

    const DualData dual = cartier_dual_with_pairing(m);
    SubmoduleWithInclusion dual_mm = max_multiplicative(dual.module);
    const Matrix dual_sub_gens = dual_mm.module.rank() == 0
                                     ? Matrix(m.params.p, m.params.s, 0, dual.module.rank())
                                     : dual_mm.inclusion.phi_x;
    QuotientWithProjection dual_nil = quotient_by_free_summand(dual.module, dual_sub_gens);

    PhiMorphism ev = bidual_iso(m);
    PhiMorphism ev_inv = m.rank() == 0 ? zero_morphism(ev.target, m) : inverse_iso(ev);

    // uni = (dual nil-quotient)^vee included via the inverse evaluation map;
    // et = (dual multiplicative part)^vee reached through the evaluation map.
    PhiMorphism uni_inc = compose(dual_morphism(dual_nil.projection), ev_inv);
    PhiMorphism et_proj = compose(ev, dual_morphism(dual_mm.inclusion));

    PartsDecomposition out{mm.module,           mm.inclusion, nil.module, nil.projection,
                           uni_inc.source,      uni_inc,      et_proj.target, et_proj};

    for (int x : invariant_exponents(out.m_part))
        if (x != m.params.er())
            throw InternalCheckFailed("parts: multiplicative part has a non-er exponent");
    for (int x : invariant_exponents(out.et_quotient))
        if (x != 0) throw InternalCheckFailed("parts: etale quotient has a nonzero exponent");

    const ShortExactSeq first{out.m_part, m, out.nil_quotient, out.m_inclusion, out.nil_projection};
    const ShortExactSeq second{out.uni_part, m, out.et_quotient, out.uni_inclusion, out.et_projection};
    if (const auto fail = exactness_failure(first))
        throw InternalCheckFailed("parts: multiplicative/nilpotent row not exact: " + *fail);
    if (const auto fail = exactness_failure(second))
        throw InternalCheckFailed("parts: unipotent/etale row not exact: " + *fail);
    return out;
}

bool is_unipotent(const PhiModule& m) {
    const int d = m.rank(), s = m.params.s, p = m.params.p;
    const bool primary = max_multiplicative(cartier_dual(m)).module.rank() == 0;

    // Partial products A phi(A) ... phi^N(A); beyond ceil(log_p s) the
    // factors are constant, and the rank of the running product settles
    // within d further steps.
    int log_bound = 0;
    for (long power = 1; power < s; power *= p) ++log_bound;
    const int cutoff = log_bound + d + 1;
    bool secondary = m.a.is_zero();
    Matrix product = m.a;
    Matrix twist = m.a;
    for (int n = 1; n <= cutoff && !secondary; ++n) {
        twist = frobenius(twist);
        product = product * twist;
        secondary = product.is_zero();
    }
    if (d == 0) secondary = true;

    if (primary != secondary)
        throw CriteriaDisagree("is_unipotent: dual-based test says " + std::to_string(primary) +
                               " but the product test says " + std::to_string(secondary));
    return primary;
}

std::optional<PhiMorphism> is_isomorphic(const PhiModule& m1, const PhiModule& m2, uint64_t seed) {
    check_same_params(m1, m2, "is_isomorphic");
    if (m1.rank() != m2.rank()) return std::nullopt;
    const int d = m1.rank(), p = m1.params.p, s = m1.params.s;
    if (d == 0) return zero_morphism(m1, m2);
    if (m1.a == m2.a) return identity_morphism(m1);

    const std::vector<PhiMorphism> homs = hom_space(m1, m2);
    const int dim = static_cast<int>(homs.size());
    if (dim == 0) return std::nullopt;

    auto build = [&](const std::vector<int>& lambda) {
        Matrix y(p, s, d, d);
        Matrix x(p, s, d, d);
        for (int i = 0; i < dim; ++i) {
            if (lambda[static_cast<size_t>(i)] == 0) continue;
            const TruncPoly scale = TruncPoly::constant(p, s, lambda[static_cast<size_t>(i)]);
            y = y + homs[static_cast<size_t>(i)].phi_x.scaled(scale);
            x = x + homs[static_cast<size_t>(i)].x.scaled(scale);
        }
        return PhiMorphism{m1, m2, x, y};
    };

    for (int i = 0; i < dim; ++i)
        if (invertible(homs[static_cast<size_t>(i)].phi_x)) {
            std::vector<int> lambda(static_cast<size_t>(dim), 0);
            lambda[static_cast<size_t>(i)] = 1;
            return build(lambda);
        }

    Rng rng(seed ^ 0x1505f0a2c0ffee11ULL);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> lambda(static_cast<size_t>(dim));
        for (int i = 0; i < dim; ++i) lambda[static_cast<size_t>(i)] = static_cast<int>(rng.below(static_cast<uint64_t>(p)));
        PhiMorphism cand = build(lambda);
        if (invertible(cand.phi_x)) return cand;
    }

    if (dim > 12)
        throw SearchInconclusive("is_isomorphic: hom dimension " + std::to_string(dim) +
                                 " exceeds the exhaustive bound and random search failed");

    // A hom is invertible iff its mod-u reduction is, so enumerate the span
    // of the reductions (tracking which combination realizes each basis row).
    FpMat reductions(p, dim, d * d);
    for (int i = 0; i < dim; ++i) {
        FpRow r(static_cast<size_t>(d) * d, 0);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                r[static_cast<size_t>(a * d + b)] =
                    static_cast<uint8_t>(homs[static_cast<size_t>(i)].phi_x.at(a, b).coeff(0));
        reductions.set_row(i, r);
    }
    FpMat transform(p, dim, dim);
    for (int i = 0; i < dim; ++i) transform.at(i, i) = 1;
    const std::vector<int> pivots = fp_rref(reductions, &transform);
    const int q = static_cast<int>(pivots.size());

    std::vector<int> mu(static_cast<size_t>(q), 0);
    while (true) {
        // Skip the zero combination.
        bool all_zero = true;
        for (int v : mu) all_zero = all_zero && v == 0;
        if (!all_zero) {
            FpMat cand(p, d, d);
            for (int k = 0; k < q; ++k) {
                if (mu[static_cast<size_t>(k)] == 0) continue;
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        cand.at(a, b) = static_cast<uint8_t>(
                            (cand.at(a, b) + mu[static_cast<size_t>(k)] * reductions.at(k, a * d + b)) % p);
            }
            if (fp_rank(cand) == d) {
                std::vector<int> lambda(static_cast<size_t>(dim), 0);
                for (int k = 0; k < q; ++k)
                    for (int j = 0; j < dim; ++j)
                        lambda[static_cast<size_t>(j)] =
                            (lambda[static_cast<size_t>(j)] + mu[static_cast<size_t>(k)] * transform.at(k, j)) % p;
                PhiMorphism witness = build(lambda);
                if (!invertible(witness.phi_x))
                    throw InternalCheckFailed("is_isomorphic: reduction lift not invertible");
                return witness;
            }
        }
        int pos = 0;
        while (pos < q) {
            mu[static_cast<size_t>(pos)] += 1;
            if (mu[static_cast<size_t>(pos)] < p) break;
            mu[static_cast<size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == q) break;
    }
    return std::nullopt;
}

TransportedObject transport_object(const PhiModule& m, const Matrix& v) {
    if (v.rows() != m.rank() || v.cols() != m.rank())
        throw DimensionMismatch("transport_object: basis change has wrong shape");
    const Matrix a_new = v * m.a * mat_invert(frobenius(v));
    PhiModule out = validate_object(m.params, a_new);
    PhiMorphism iso = morphism_from_x(m, out, mat_invert(v));
    return TransportedObject{std::move(out), std::move(iso)};
}

std::optional<std::string> exactness_failure(const ShortExactSeq& seq) {
    if (seq.left.params != seq.middle.params || seq.middle.params != seq.right.params)
        return "parameter mismatch across the sequence";
    if (seq.inj.source != seq.left || seq.inj.target != seq.middle ||
        seq.surj.source != seq.middle || seq.surj.target != seq.right)
        return "morphism endpoints do not match the sequence";

    const int p = seq.middle.params.p, s = seq.middle.params.s;
    const int dl = seq.left.rank(), dm = seq.middle.rank(), dr = seq.right.rank();

    auto linear_map = [&](const Matrix& y, int din, int dout) {
        FpMat lin(p, din * s, dout * s);
        for (int b = 0; b < din * s; ++b) {
            FpRow e(static_cast<size_t>(din) * s, 0);
            e[static_cast<size_t>(b)] = 1;
            lin.set_row(b, flatten_row(row_times_matrix(unflatten_row(e, p, s, din), y)));
        }
        return lin;
    };

    const FpMat inj_map = linear_map(seq.inj.phi_x, dl, dm);
    if (fp_rank(inj_map) != dl * s) return "module-level injectivity fails";

    const FpMat surj_map = linear_map(seq.surj.phi_x, dm, dr);
    if (fp_rank(surj_map) != dr * s) return "module-level surjectivity fails";

    if (!(seq.inj.phi_x * seq.surj.phi_x).is_zero()) return "composite is not zero";
    if (fp_rank(surj_map) + dl * s != dm * s) return "module-level middle exactness fails";

    // Filtration level.
    const FpMat fil_right = module_span(seq.right.a);
    const FpMat fil_image = module_span(seq.middle.a * seq.surj.phi_x);
    if (!fp_span_equal(fil_image, fil_right)) return "filtration-level surjectivity fails";

    const FpMat fil_middle = module_span(seq.middle.a);
    const FpMat kernel_space =
        fp_row_span(fp_left_nullspace(surj_map), p, dm * s);
    const FpMat fil_cap_kernel = fp_span_intersect(fil_middle, kernel_space);
    const FpMat fil_from_left = module_span(seq.left.a * seq.inj.phi_x);
    if (!fp_span_equal(fil_cap_kernel, fil_from_left)) return "filtration-level middle exactness fails";

    return std::nullopt;
}

}  // namespace breuil
