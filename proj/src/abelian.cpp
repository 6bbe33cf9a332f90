#include "breuil/abelian.hpp"

#include <string>
#include <utility>

#include "breuil/functors.hpp"

namespace breuil {

namespace {

void require_abelian_regime(const PhiMorphism& f, const char* op) {
    const RingParams& params = f.source.params;
    if (params.s == params.p) return;
    if (params.strict()) return;
    if (!is_unipotent(f.source) || !is_unipotent(f.target))
        throw RegimeViolation(std::string(op) +
                              ": er = p-1 with s > p is only abelian on unipotent objects");
}

// F_p row basis of the span of the constant matrix rows, as T_s rows.
Matrix constant_row_basis(const Matrix& y) {
    const int p = y.field_char(), s = y.order();
    FpMat rows(p, y.rows(), y.cols());
    for (int i = 0; i < y.rows(); ++i)
        for (int j = 0; j < y.cols(); ++j) rows.at(i, j) = static_cast<uint8_t>(y.at(i, j).coeff(0));
    const std::vector<int> pivots = fp_rref(rows);
    Matrix out(p, s, static_cast<int>(pivots.size()), y.cols());
    for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < y.cols(); ++j)
            out.at(i, j) = TruncPoly::constant(p, s, rows.at(i, j));
    return out;
}

// At s = p the morphism matrix phi_x has constant entries; sanity-check.
void expect_constant(const Matrix& y, const char* op) {
    for (int i = 0; i < y.rows(); ++i)
        for (int j = 0; j < y.cols(); ++j) {
            const int v = u_valuation(y.at(i, j));
            if (v != 0 && v != val_infinity)
                throw InternalCheckFailed(std::string(op) + ": phi(X) not constant at s = p");
        }
}

// Shared machinery for presenting a free submodule spanned by constant
// basis rows with the filtration it inherits from an enclosing object.
struct SubObject {
    PhiModule module;
    Matrix basis;       // rows = basis of the submodule in enclosing coordinates
    Matrix pres_basis;  // rows = presentation basis in enclosing coordinates
};

SubObject present_submodule(const PhiModule& host, const Matrix& basis, const Matrix& fil_gens_host) {
    // fil_gens_host: generators of the submodule filtration in host coords.
    const RingParams& params = host.params;
    const int k = basis.rows();

    Matrix fil_gens_sub(params.p, params.s, fil_gens_host.rows(), k);
    for (int i = 0; i < fil_gens_host.rows(); ++i) {
        const std::optional<PolyRow> x = solve_row_combination(basis, fil_gens_host.row(i));
        if (!x) throw InternalCheckFailed("present_submodule: filtration outside the submodule");
        fil_gens_sub.set_row(i, *x);
    }
    auto phi_r_eval = [&](const PolyRow& gamma) -> PolyRow {
        const PolyRow host_gamma = row_times_matrix(gamma, basis);
        const PolyRow value = phi_r_apply(host, host_gamma);
        const std::optional<PolyRow> back = solve_row_combination(basis, value);
        if (!back) throw InternalCheckFailed("present_submodule: phi_r leaves the submodule");
        return *back;
    };
    const NormalizedPresentation np = normalize_presentation(params, k, fil_gens_sub, phi_r_eval);
    PhiModule sub = validate_object(params, np.a);
    return SubObject{std::move(sub), basis, np.basis * basis};
}

KernelResult kernel_at_p(const PhiMorphism& f) {
    const RingParams& params = f.source.params;
    const int p = params.p, s = params.s, d1 = f.source.rank(), d2 = f.target.rank();
    expect_constant(f.phi_x, "kernel");
    if (f.phi_x.is_zero()) return KernelResult{f.source, identity_morphism(f.source)};

    FpMat ybar(p, d1, d2);
    for (int i = 0; i < d1; ++i)
        for (int j = 0; j < d2; ++j) ybar.at(i, j) = static_cast<uint8_t>(f.phi_x.at(i, j).coeff(0));
    const std::vector<FpRow> null_rows = fp_left_nullspace(ybar);
    if (null_rows.empty()) {
        PhiModule zero = zero_object(params);
        return KernelResult{zero, zero_morphism(zero, f.source)};
    }
    Matrix basis(p, s, static_cast<int>(null_rows.size()), d1);
    for (size_t i = 0; i < null_rows.size(); ++i)
        for (int j = 0; j < d1; ++j)
            basis.at(static_cast<int>(i), j) = TruncPoly::constant(p, s, null_rows[i][static_cast<size_t>(j)]);

    // Fil K = K intersect Fil M1, computed on F_p spans.
    const FpMat cap = fp_span_intersect(module_span(basis), module_span(f.source.a));
    Matrix fil_gens_host(p, s, cap.rows, d1);
    for (int i = 0; i < cap.rows; ++i) fil_gens_host.set_row(i, unflatten_row(cap.row(i), p, s, d1));

    SubObject sub = present_submodule(f.source, basis, fil_gens_host);
    PhiMorphism inc = morphism_from_phi_x(sub.module, f.source, sub.pres_basis);
    return KernelResult{std::move(sub.module), std::move(inc)};
}

ImageResult image_at_p(const PhiMorphism& f) {
    const RingParams& params = f.source.params;
    expect_constant(f.phi_x, "image");
    const Matrix basis = constant_row_basis(f.phi_x);
    if (basis.rows() == 0) {
        PhiModule zero = zero_object(params);
        return ImageResult{zero, zero_morphism(f.source, zero), zero_morphism(zero, f.target)};
    }
    // f(Fil M1) generates the image filtration (and equals im cap Fil M2).
    const Matrix fil_gens_host = f.source.a * f.phi_x;
    SubObject sub = present_submodule(f.target, basis, fil_gens_host);

    PhiMorphism mono = morphism_from_phi_x(sub.module, f.target, sub.pres_basis);
    Matrix y_epi(params.p, params.s, f.source.rank(), sub.module.rank());
    for (int i = 0; i < f.source.rank(); ++i) {
        const std::optional<PolyRow> x = solve_row_combination(sub.pres_basis, f.phi_x.row(i));
        if (!x) throw InternalCheckFailed("image: f(basis) escapes the image presentation");
        y_epi.set_row(i, *x);
    }
    PhiMorphism epi = morphism_from_phi_x(f.source, sub.module, y_epi);
    if (!same_morphism(compose(epi, mono), f))
        throw InternalCheckFailed("image: epi-mono factorization does not recover f");
    return ImageResult{std::move(sub.module), std::move(epi), std::move(mono)};
}

// Entrywise minimal lift of a level-p construction back to the caller's
// parameters (the presentation does not involve c, so only the params
// record changes relative to lift_object).
PhiModule lift_through_p(const PhiModule& at_p, const RingParams& target) {
    if (target.boundary() && !is_unipotent(at_p))
        throw InternalCheckFailed("transport: level-p construction is unexpectedly non-unipotent");
    PhiModule lifted = validate_object(target, at_p.a.lifted(target.s));
    if (truncate_object(lifted, target.p) != at_p)
        throw InternalCheckFailed("transport: lift does not truncate back");
    return lifted;
}

CokernelResult cokernel_at_p(const PhiMorphism& f) {
    expect_constant(f.phi_x, "cokernel");
    const Matrix basis = constant_row_basis(f.phi_x);
    if (basis.rows() == 0) return CokernelResult{f.target, identity_morphism(f.target)};
    QuotientWithProjection q = quotient_by_free_summand(f.target, basis);
    return CokernelResult{std::move(q.module), std::move(q.projection)};
}

}  // namespace

KernelResult kernel(const PhiMorphism& f) {
    require_abelian_regime(f, "kernel");
    const int s = f.source.params.s, p = f.source.params.p;
    if (s == p) return kernel_at_p(f);
    const PhiMorphism f_p = truncate_morphism(f, p);
    KernelResult at_p = kernel_at_p(f_p);
    PhiModule lifted = lift_through_p(at_p.module, f.source.params);
    PhiMorphism inc = lift_morphism(at_p.inclusion, lifted, f.source);
    if (!is_zero_morphism(compose(inc, f)))
        throw InternalCheckFailed("kernel: transported inclusion does not annihilate f");
    return KernelResult{std::move(lifted), std::move(inc)};
}

ImageResult image(const PhiMorphism& f) {
    require_abelian_regime(f, "image");
    const int s = f.source.params.s, p = f.source.params.p;
    if (s == p) return image_at_p(f);
    const PhiMorphism f_p = truncate_morphism(f, p);
    ImageResult at_p = image_at_p(f_p);
    PhiModule lifted = lift_through_p(at_p.module, f.source.params);
    PhiMorphism epi = lift_morphism(at_p.epi, f.source, lifted);
    PhiMorphism mono = lift_morphism(at_p.mono, lifted, f.target);
    if (!same_morphism(compose(epi, mono), f))
        throw InternalCheckFailed("image: transported factorization does not recover f");
    return ImageResult{std::move(lifted), std::move(epi), std::move(mono)};
}

CokernelResult cokernel(const PhiMorphism& f) {
    require_abelian_regime(f, "cokernel");
    const int s = f.source.params.s, p = f.source.params.p;
    if (s == p) return cokernel_at_p(f);
    const PhiMorphism f_p = truncate_morphism(f, p);
    CokernelResult at_p = cokernel_at_p(f_p);
    PhiModule lifted = lift_through_p(at_p.module, f.source.params);
    PhiMorphism proj = lift_morphism(at_p.projection, f.target, lifted);
    if (!is_zero_morphism(compose(f, proj)))
        throw InternalCheckFailed("cokernel: f does not vanish into the transported quotient");
    return CokernelResult{std::move(lifted), std::move(proj)};
}

ExactnessReport check_exact(const ShortExactSeq& seq) {
    if (seq.left.params != seq.middle.params || seq.middle.params != seq.right.params)
        throw ParamMismatch("check_exact: sequence parameters disagree");
    const std::optional<std::string> failure = exactness_failure(seq);
    if (failure) return ExactnessReport{false, *failure};
    return ExactnessReport{true, "exact"};
}

namespace {

ShortExactSeq assemble_extension(const PhiModule& m1, const PhiModule& m2, const Matrix& lower_left) {
    const RingParams& params = m1.params;
    const int p = params.p, s = params.s, d1 = m1.rank(), d2 = m2.rank();
    Matrix a(p, s, d1 + d2, d1 + d2);
    for (int i = 0; i < d1; ++i)
        for (int j = 0; j < d1; ++j) a.at(i, j) = m1.a.at(i, j);
    for (int i = 0; i < d2; ++i) {
        for (int j = 0; j < d1; ++j) a.at(d1 + i, j) = lower_left.at(i, j);
        for (int j = 0; j < d2; ++j) a.at(d1 + i, d1 + j) = m2.a.at(i, j);
    }
    PhiModule middle = validate_object(params, a);

    const Matrix y_inj = hstack(Matrix::identity(p, s, d1), Matrix(p, s, d1, d2));
    const Matrix y_surj = vstack(Matrix(p, s, d1, d2), Matrix::identity(p, s, d2));
    ShortExactSeq seq{m1, middle, m2, morphism_from_phi_x(m1, middle, y_inj),
                      morphism_from_phi_x(middle, m2, y_surj)};
    if (const auto fail = exactness_failure(seq))
        throw InternalCheckFailed("build_extension: sequence not exact: " + *fail);
    return seq;
}

}  // namespace

ShortExactSeq build_extension(const PhiModule& m1, const PhiModule& m2, const Matrix& c0) {
    if (m1.params != m2.params) throw ParamMismatch("build_extension: parameter mismatch");
    const RingParams& params = m1.params;
    if (c0.rows() != m2.rank() || c0.cols() != m1.rank())
        throw DimensionMismatch("build_extension: block must be d2 x d1");
    const Matrix lower_left = c0.times_u_power(params.er());

    // Block cofactor sanity: [[B1, 0], [-B2 C0 B1, B2]] pairs with the
    // assembled presentation on both sides.
    if (m1.rank() > 0 && m2.rank() > 0) {
        const int d = m1.rank() + m2.rank();
        Matrix b(params.p, params.s, d, d);
        const Matrix lower = -(m2.b * c0 * m1.b);
        for (int i = 0; i < m1.rank(); ++i)
            for (int j = 0; j < m1.rank(); ++j) b.at(i, j) = m1.b.at(i, j);
        for (int i = 0; i < m2.rank(); ++i) {
            for (int j = 0; j < m1.rank(); ++j) b.at(m1.rank() + i, j) = lower.at(i, j);
            for (int j = 0; j < m2.rank(); ++j) b.at(m1.rank() + i, m1.rank() + j) = m2.b.at(i, j);
        }
        Matrix a(params.p, params.s, d, d);
        for (int i = 0; i < m1.rank(); ++i)
            for (int j = 0; j < m1.rank(); ++j) a.at(i, j) = m1.a.at(i, j);
        for (int i = 0; i < m2.rank(); ++i) {
            for (int j = 0; j < m1.rank(); ++j) a.at(m1.rank() + i, j) = lower_left.at(i, j);
            for (int j = 0; j < m2.rank(); ++j) a.at(m1.rank() + i, m1.rank() + j) = m2.a.at(i, j);
        }
        const Matrix want = Matrix::identity(params.p, params.s, d).times_u_power(params.er());
        if (a * b != want || b * a != want)
            throw InternalCheckFailed("build_extension: block cofactor identity fails");
    }
    return assemble_extension(m1, m2, lower_left);
}

ShortExactSeq build_extension_general(const PhiModule& m1, const PhiModule& m2,
                                      const Matrix& lower_left) {
    if (m1.params != m2.params) throw ParamMismatch("build_extension_general: parameter mismatch");
    if (lower_left.rows() != m2.rank() || lower_left.cols() != m1.rank())
        throw DimensionMismatch("build_extension_general: block must be d2 x d1");
    return assemble_extension(m1, m2, lower_left);
}

std::optional<PhiMorphism> factor_through_mono(const PhiMorphism& g, const PhiMorphism& inc) {
    if (g.target != inc.target) throw ParamMismatch("factor_through_mono: targets differ");
    const RingParams& params = g.source.params;
    const std::vector<PhiMorphism> homs = hom_space(g.source, inc.source);
    const int dim = static_cast<int>(homs.size());
    FpMat lin(params.p, dim, g.source.rank() * inc.target.rank() * params.s);
    for (int i = 0; i < dim; ++i)
        lin.set_row(i, flatten(homs[static_cast<size_t>(i)].phi_x * inc.phi_x));
    const std::optional<FpRow> combo = fp_solve_left(lin, flatten(g.phi_x));
    if (!combo) return std::nullopt;
    Matrix x(params.p, params.s, g.source.rank(), inc.source.rank());
    Matrix y = x;
    for (int i = 0; i < dim; ++i) {
        const int coeff = (*combo)[static_cast<size_t>(i)];
        if (coeff == 0) continue;
        const TruncPoly scale = TruncPoly::constant(params.p, params.s, coeff);
        x = x + homs[static_cast<size_t>(i)].x.scaled(scale);
        y = y + homs[static_cast<size_t>(i)].phi_x.scaled(scale);
    }
    PhiMorphism h{g.source, inc.source, x, y};
    if (!same_morphism(compose(h, inc), g)) throw InternalCheckFailed("factor_through_mono: bad factor");
    return h;
}

std::optional<PhiMorphism> factor_through_epi(const PhiMorphism& g, const PhiMorphism& proj) {
    if (g.source != proj.source) throw ParamMismatch("factor_through_epi: sources differ");
    const RingParams& params = g.source.params;
    const std::vector<PhiMorphism> homs = hom_space(proj.target, g.target);
    const int dim = static_cast<int>(homs.size());
    FpMat lin(params.p, dim, proj.source.rank() * g.target.rank() * params.s);
    for (int i = 0; i < dim; ++i)
        lin.set_row(i, flatten(proj.phi_x * homs[static_cast<size_t>(i)].phi_x));
    const std::optional<FpRow> combo = fp_solve_left(lin, flatten(g.phi_x));
    if (!combo) return std::nullopt;
    Matrix x(params.p, params.s, proj.target.rank(), g.target.rank());
    Matrix y = x;
    for (int i = 0; i < dim; ++i) {
        const int coeff = (*combo)[static_cast<size_t>(i)];
        if (coeff == 0) continue;
        const TruncPoly scale = TruncPoly::constant(params.p, params.s, coeff);
        x = x + homs[static_cast<size_t>(i)].x.scaled(scale);
        y = y + homs[static_cast<size_t>(i)].phi_x.scaled(scale);
    }
    PhiMorphism h{proj.target, g.target, x, y};
    if (!same_morphism(compose(proj, h), g)) throw InternalCheckFailed("factor_through_epi: bad factor");
    return h;
}

}  // namespace breuil
