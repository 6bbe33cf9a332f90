#include "breuil/selftest.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "breuil/abelian.hpp"
#include "breuil/functors.hpp"
#include "breuil/io.hpp"
#include "breuil/monodromy.hpp"
#include "breuil/phimod.hpp"
#include "breuil/rng.hpp"

namespace breuil::selftest {

namespace {

struct CheckFailure {
    std::string msg;
};

struct Ctx {
    long checks = 0;
    void require(bool cond, const std::string& msg) {
        ++checks;
        if (!cond) throw CheckFailure{msg};
    }
};

Outcome run(const std::string& name, const std::function<void(Ctx&)>& body) {
    Outcome out;
    out.name = name;
    Ctx ctx;
    try {
        body(ctx);
        out.pass = true;
        out.detail = "ok";
    } catch (const CheckFailure& f) {
        out.pass = false;
        out.detail = f.msg;
    } catch (const Error& e) {
        out.pass = false;
        out.detail = std::string("library error: ") + e.what();
    }
    out.checks = ctx.checks;
    return out;
}

struct Grid {
    int p, e, r;
    std::vector<int> orders;
};

const std::vector<Grid>& grids() {
    static const std::vector<Grid> g = {{3, 2, 1, {3, 4, 5, 6}},
                                        {5, 2, 1, {5, 6, 7, 8, 9, 10}}};
    return g;
}

RingParams sample_params(Rng& rng, int fixed_order = 0) {
    const Grid& g = grids()[static_cast<size_t>(rng.below(grids().size()))];
    const int s = fixed_order ? fixed_order
                              : g.orders[static_cast<size_t>(rng.below(g.orders.size()))];
    if (rng.below(2) == 0) return RingParams(g.p, g.e, g.r, s);
    Rng crng = rng.split(17);
    return RingParams(g.p, g.e, g.r, s, random_unit(crng, g.p, s));
}

// All elements of T_s as coefficient vectors (odometer).
std::vector<TruncPoly> all_elements(int p, int s) {
    std::vector<TruncPoly> out;
    std::vector<long> digits(static_cast<size_t>(s), 0);
    while (true) {
        out.emplace_back(p, s, digits);
        int pos = 0;
        while (pos < s) {
            if (++digits[static_cast<size_t>(pos)] < p) break;
            digits[static_cast<size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == s) break;
    }
    return out;
}

std::vector<TruncPoly> all_units(int p, int s) {
    std::vector<TruncPoly> out;
    for (const TruncPoly& a : all_elements(p, s))
        if (a.is_unit()) out.push_back(a);
    return out;
}

int encode_row(const PolyRow& v, int p, int s) {
    int code = 0, base = 1;
    for (const TruncPoly& x : v)
        for (int k = 0; k < s; ++k) {
            code += x.coeff(k) * base;
            base *= p;
        }
    return code;
}

// Exhaustive T_s-span of the generator rows as a set of encoded elements.
std::set<int> enumerate_submodule(const std::vector<PolyRow>& gens, int p, int s, int width) {
    std::set<int> span;
    span.insert(encode_row(PolyRow(static_cast<size_t>(width), TruncPoly(p, s)), p, s));
    const std::vector<TruncPoly> scalars = all_elements(p, s);
    for (const PolyRow& g : gens) {
        std::set<int> next;
        for (int code : span) {
            // decode
            PolyRow x(static_cast<size_t>(width), TruncPoly(p, s));
            int rem = code;
            for (int j = 0; j < width; ++j)
                for (int k = 0; k < s; ++k) {
                    x[static_cast<size_t>(j)].set_coeff(k, rem % p);
                    rem /= p;
                }
            for (const TruncPoly& t : scalars) next.insert(encode_row(row_add(x, row_scaled(g, t)), p, s));
        }
        span = std::move(next);
    }
    return span;
}

PhiModule random_mixed_object(Rng& rng, const RingParams& params, int rank) {
    // Mixes plain random objects with forced etale / multiplicative /
    // unipotent shapes so predicates see both answers.
    switch (rng.below(4)) {
        case 0: {
            if (rank == 0) return zero_object(params);
            Matrix a = random_invertible(rng, params.p, params.s, rank);  // etale
            return validate_object(params, a);
        }
        case 1: {
            if (rank == 0) return zero_object(params);
            Matrix a = random_invertible(rng, params.p, params.s, rank).times_u_power(params.er());
            return validate_object(params, a);  // multiplicative
        }
        case 2:
            return random_unipotent_object_rng(rng, params, rank);
        default:
            return random_object_rng(rng, params, rank);
    }
}

}  // namespace

Outcome suite_ring(int iterations, uint64_t seed) {
    return run("ring", [&](Ctx& c) {
        // Frozen examples.
        {
            const int p = 3, s = 6;
            c.require(frobenius(TruncPoly::u_power(p, s, 1)) == TruncPoly::u_power(p, s, 3),
                      "frobenius(u) != u^3");
            c.require(frobenius(TruncPoly(p, s, {1, 2})) == TruncPoly(p, s, {1, 0, 0, 2}),
                      "frobenius(1+2u) != 1+2u^3");
            c.require(frobenius(TruncPoly::u_power(p, s, 2)).is_zero(), "frobenius(u^2) != 0 in T_6");
            c.require(derivation_n(TruncPoly::u_power(p, s, 1)) == TruncPoly(p, s, {0, 2}),
                      "N(u) != -u");
            c.require(derivation_n(TruncPoly::constant(p, s, 1)).is_zero(), "N(1) != 0");
            c.require(derivation_n(TruncPoly::u_power(p, s, 2)) == TruncPoly::u_power(p, s, 2),
                      "N(u^2) != u^2 mod 3");
            c.require(u_valuation(TruncPoly(p, s, {0, 0, 1, 0, 1})) == 2, "val(u^2+u^4) != 2");
            c.require(u_valuation(TruncPoly::constant(p, s, 2)) == 0, "val(2) != 0");
            c.require(u_valuation(TruncPoly(p, s)) == val_infinity, "val(0) != infinity");
        }
        {
            const int p = 3, s = 3;
            c.require(invert_unit(TruncPoly(p, s, {1, 1})) == TruncPoly(p, s, {1, 2, 1}),
                      "(1+u)^{-1} != 1+2u+u^2");
            c.require(invert_unit(TruncPoly::constant(3, 6, 2)) == TruncPoly::constant(3, 6, 2),
                      "2^{-1} != 2 mod 3");
            bool threw = false;
            try {
                invert_unit(TruncPoly::u_power(p, s, 1));
            } catch (const NotAUnit&) {
                threw = true;
            }
            c.require(threw, "invert_unit(u) did not throw NotAUnit");
        }
        c.require(fil_quotient_dim(1, 2, 2, 3) == 1, "fil dim (e2,a1,b2,s3) != 1");
        c.require(fil_quotient_dim(1, 2, 2, 6) == 2, "fil dim (e2,a1,b2,s6) != 2");
        c.require(fil_quotient_dim(0, 1, 2, 3) == 2 && fil_quotient_dim(0, 1, 2, 6) == 2,
                  "fil dims (e2,a0,b1) disagree with the monomial count");
        {
            bool threw = false;
            try {
                fil_quotient_dim(2, 1, 1, 3);
            } catch (const InvalidLevels&) {
                threw = true;
            }
            c.require(threw, "fil_quotient_dim(2,1) did not throw InvalidLevels");
        }
        // Exhaustive unit inverses at p=3, s=3.
        for (const TruncPoly& w : all_units(3, 3))
            c.require((w * invert_unit(w)) == TruncPoly::constant(3, 3, 1), "unit inverse round trip");

        Rng rng(seed);
        for (int it = 0; it < iterations; ++it) {
            const Grid& g = grids()[static_cast<size_t>(rng.below(grids().size()))];
            const int s = g.orders[static_cast<size_t>(rng.below(g.orders.size()))];
            const TruncPoly a = random_poly(rng, g.p, s), b = random_poly(rng, g.p, s);
            c.require(frobenius(a + b) == frobenius(a) + frobenius(b), "frobenius not additive");
            c.require(frobenius(a * b) == frobenius(a) * frobenius(b), "frobenius not multiplicative");
            c.require(derivation_n(a * b) == derivation_n(a) * b + a * derivation_n(b),
                      "Leibniz rule fails");
            const int va = u_valuation(a), vb = u_valuation(b);
            const int vab = u_valuation(a * b);
            if (va != val_infinity && vb != val_infinity && va + vb < s)
                c.require(vab == va + vb, "valuation not additive below s");
            else
                c.require(vab == val_infinity, "valuation should overflow to infinity");
            const TruncPoly w = random_unit(rng, g.p, s);
            c.require(w * invert_unit(w) == TruncPoly::constant(g.p, s, 1), "random unit inverse");
        }
    });
}

Outcome suite_adapted_basis(int sets, uint64_t seed) {
    return run("adapted-basis", [&](Ctx& c) {
        const int p = 3, s = 3, d = 2;
        // Frozen example: rows (u, u), (0, u^2) -> exponents (1, 2).
        {
            const Matrix gens = Matrix::from_rows(
                p, s,
                {{TruncPoly::u_power(p, s, 1), TruncPoly::u_power(p, s, 1)},
                 {TruncPoly(p, s), TruncPoly::u_power(p, s, 2)}});
            const AdaptedBasis ab = adapted_basis(gens, d);
            c.require(ab.exponents == std::vector<int>({1, 2}), "frozen adapted exponents wrong");
        }
        Rng rng(seed);
        for (int it = 0; it < sets; ++it) {
            const int k = static_cast<int>(rng.below(4));
            Matrix gens = random_matrix(rng, p, s, k, d);
            const AdaptedBasis ab = adapted_basis(gens, d);

            std::vector<PolyRow> gen_rows;
            for (int i = 0; i < k; ++i) gen_rows.push_back(gens.row(i));
            std::vector<PolyRow> adapted_rows;
            for (int i = 0; i < d; ++i) {
                const int x = ab.exponents[static_cast<size_t>(i)];
                if (x >= s) continue;
                adapted_rows.push_back(row_scaled(ab.q.row(i), TruncPoly::u_power(p, s, x)));
            }
            c.require(enumerate_submodule(gen_rows, p, s, d) ==
                          enumerate_submodule(adapted_rows, p, s, d),
                      "adapted span differs from the generator span (exhaustive)");

            // Presentation independence: transform by a random invertible
            // matrix and append a redundant combination.
            if (k > 0) {
                Matrix moved = random_invertible(rng, p, s, k) * gens;
                PolyRow extra(static_cast<size_t>(d), TruncPoly(p, s));
                for (int i = 0; i < k; ++i)
                    extra = row_add(extra, row_scaled(gens.row(i), random_poly(rng, p, s)));
                std::vector<PolyRow> moved_rows;
                for (int i = 0; i < k; ++i) moved_rows.push_back(moved.row(i));
                moved_rows.push_back(extra);
                const AdaptedBasis ab2 = adapted_basis(Matrix::from_rows(p, s, moved_rows), d);
                c.require(ab2.exponents == ab.exponents,
                          "exponent multiset depends on the presentation");
            }
        }
    });
}

Outcome suite_duality(int instances, uint64_t seed) {
    return run("duality", [&](Ctx& c) {
        {
            // Frozen rank-1 duals at p=3, e=2, r=1 (c = 1).
            const RingParams params(3, 2, 1, 6);
            PhiModule etale = validate_object(params, Matrix::identity(3, 6, 1));
            c.require(cartier_dual(etale).a == Matrix::identity(3, 6, 1).times_u_power(2),
                      "dual of [[1]] is not [[u^2]]");
            Matrix au(3, 6, 1, 1);
            au.at(0, 0) = TruncPoly::u_power(3, 6, 1);
            PhiModule mid = validate_object(params, au);
            c.require(cartier_dual(mid).a == au, "dual of [[u]] is not [[u]]");
        }
        Rng rng(seed);
        for (int it = 0; it < instances; ++it) {
            Rng local = rng.split(static_cast<uint64_t>(it));
            const RingParams params = sample_params(local);
            const int rank = static_cast<int>(local.below(4));
            const PhiModule m = random_mixed_object(local, params, rank);

            const PhiModule dd = cartier_dual(cartier_dual(m));
            const auto witness = is_isomorphic(m, dd, local.next());
            c.require(witness.has_value(), "no isomorphism witness for dual(dual(M)) ~ M");
            c.require(is_iso_morphism(*witness), "duality witness is not invertible");
            inverse_iso(*witness);  // throws if not a two-sided iso

            const PartsDecomposition pm = parts(m);
            const PartsDecomposition pd = parts(cartier_dual(m));
            c.require(is_isomorphic(cartier_dual(pm.m_part), pd.et_quotient, local.next()).has_value(),
                      "dual of the multiplicative part is not the dual's etale quotient");
            c.require(is_isomorphic(cartier_dual(pm.nil_quotient), pd.uni_part, local.next()).has_value(),
                      "dual of the nilpotent quotient is not the dual's unipotent part");

            // Dualizing either parts row gives an exact row again.
            const ShortExactSeq dual_row{cartier_dual(pm.nil_quotient), cartier_dual(m),
                                         cartier_dual(pm.m_part), dual_morphism(pm.nil_projection),
                                         dual_morphism(pm.m_inclusion)};
            c.require(!exactness_failure(dual_row).has_value(), "dualized m/nil row is not exact");
            const ShortExactSeq dual_row2{cartier_dual(pm.et_quotient), cartier_dual(m),
                                          cartier_dual(pm.uni_part), dual_morphism(pm.et_projection),
                                          dual_morphism(pm.uni_inclusion)};
            c.require(!exactness_failure(dual_row2).has_value(), "dualized uni/et row is not exact");
        }
    });
}

Outcome suite_unipotency(int seeded_instances, uint64_t seed) {
    return run("unipotency", [&](Ctx& c) {
        // Exhaustive rank-1 sweep at p=3, e=2, r=1: every unit and every
        // exponent, at s = 3 and s = 6.  is_unipotent cross-checks the two
        // criteria internally and throws on disagreement.
        for (int s : {3, 6}) {
            const RingParams params(3, 2, 1, s);
            for (int x = 0; x <= params.er(); ++x)
                for (const TruncPoly& w : all_units(3, s)) {
                    Matrix a(3, s, 1, 1);
                    a.at(0, 0) = w * TruncPoly::u_power(3, s, x);
                    const bool unip = is_unipotent(validate_object(params, a));
                    c.require(unip == (x >= 1), "rank-1 unipotency mismatch at exponent " +
                                                    std::to_string(x) + ", s = " + std::to_string(s));
                }
        }
        // Conventions and documented cases.
        {
            const RingParams params(3, 2, 1, 3);
            const PhiModule zero = zero_object(params);
            c.require(is_unipotent(zero) && is_multiplicative(zero) && is_etale(zero),
                      "zero object conventions");
            c.require(!is_unipotent(validate_object(params, Matrix::identity(3, 3, 1))),
                      "[[1]] must not be unipotent");
        }
        Rng rng(seed);
        for (int it = 0; it < seeded_instances; ++it) {
            Rng local = rng.split(static_cast<uint64_t>(it));
            const RingParams params = sample_params(local);
            const PhiModule m = random_mixed_object(local, params, 1 + static_cast<int>(local.below(3)));
            is_unipotent(m);  // the value is free; agreement is the assertion
            ++c.checks;
        }
    });
}

Outcome suite_equivalence(int pairs_per_regime, uint64_t seed) {
    return run("equivalence", [&](Ctx& c) {
        Rng rng(seed);
        // Regimes: strict (er < p-1, all s), boundary deep (er = p-1, s > p),
        // boundary unipotent (er = p-1, s = p).
        for (int regime = 0; regime < 3; ++regime) {
            const Grid& g = regime == 0 ? grids()[1] : grids()[0];
            for (int it = 0; it < pairs_per_regime; ++it) {
                Rng local = rng.split(static_cast<uint64_t>(regime * 10000 + it));
                int s, t;
                if (regime == 0) {
                    s = 5 + static_cast<int>(local.below(5));        // 5..9
                    t = s + 1 + static_cast<int>(local.below(static_cast<uint64_t>(10 - s)));
                } else if (regime == 1) {
                    s = 4 + static_cast<int>(local.below(2));        // 4..5
                    t = s + 1 + static_cast<int>(local.below(static_cast<uint64_t>(6 - s)));
                } else {
                    s = 3;
                    t = 4 + static_cast<int>(local.below(3));        // 4..6
                }
                const RingParams params(g.p, g.e, g.r, s);
                const int r1 = 1 + static_cast<int>(local.below(2));
                const int r2 = 1 + static_cast<int>(local.below(2));
                const PhiModule m1 = regime == 2 ? random_unipotent_object_rng(local, params, r1)
                                                 : random_object_rng(local, params, r1);
                const PhiModule m2 = regime == 2 ? random_unipotent_object_rng(local, params, r2)
                                                 : random_object_rng(local, params, r2);

                const PhiModule m1_lift = lift_object(m1, t);
                const PhiModule m2_lift = lift_object(m2, t);
                c.require(truncate_object(m1_lift, s) == m1, "object round trip not bit-exact");
                c.require(is_unipotent(m1_lift) == is_unipotent(m1),
                          "lift changed unipotency");

                c.require(hom_space(m1, m2).size() == hom_space(m1_lift, m2_lift).size(),
                          "Hom dimension changed across levels");

                const PhiMorphism f = random_morphism_rng(local, m1, m2);
                const PhiMorphism f_lift = lift_morphism(f, m1_lift, m2_lift);
                c.require(f_lift.phi_x.truncated(s) == f.phi_x, "lifted morphism does not reduce to f");

                if (it % 4 == 0) {
                    // Lifts compose: lift(f;g) = lift(f);lift(g) as classes.
                    const PhiModule m3 = regime == 2 ? random_unipotent_object_rng(local, params, 1)
                                                     : random_object_rng(local, params, 1);
                    const PhiModule m3_lift = lift_object(m3, t);
                    const PhiMorphism gmor = random_morphism_rng(local, m2, m3);
                    const PhiMorphism lhs = lift_morphism(compose(f, gmor), m1_lift, m3_lift);
                    const PhiMorphism rhs =
                        compose(f_lift, lift_morphism(gmor, m2_lift, m3_lift));
                    c.require(same_morphism(lhs, rhs), "lifting does not respect composition");
                }
            }
        }
        // Boundary rejection: a non-unipotent object at s = p must not lift.
        {
            const RingParams params(3, 2, 1, 3);
            const PhiModule etale = validate_object(params, Matrix::identity(3, 3, 1));
            bool threw = false;
            try {
                lift_object(etale, 6);
            } catch (const RegimeViolation&) {
                threw = true;
            }
            c.require(threw, "lift of a non-unipotent object at s = p was not rejected");
        }
    });
}

namespace {

// Morphism sampler biased toward interesting kernels/cokernels: either a
// random hom element, or a transported projection P (+) Q -> Q (+) R.
PhiMorphism sample_morphism(Rng& rng, const RingParams& params, bool unipotent_only) {
    auto make = [&](int rank) {
        return unipotent_only ? random_unipotent_object_rng(rng, params, rank)
                              : random_mixed_object(rng, params, rank);
    };
    if (rng.below(2) == 0) {
        const PhiModule m1 = make(1 + static_cast<int>(rng.below(2)));
        const PhiModule m2 = make(1 + static_cast<int>(rng.below(2)));
        return random_morphism_rng(rng, m1, m2);
    }
    const int dp = static_cast<int>(rng.below(2)), dq = 1, dr = static_cast<int>(rng.below(2));
    const PhiModule pm = make(dp), qm = make(dq), rm = make(dr);
    const PhiModule m1 = direct_sum(pm, qm), m2 = direct_sum(qm, rm);
    const int p = params.p, s = params.s;
    Matrix y(p, s, dp + dq, dq + dr);
    for (int i = 0; i < dq; ++i) y.at(dp + i, i) = TruncPoly::constant(p, s, 1);
    PhiMorphism f0 = morphism_from_phi_x(m1, m2, y);
    const TransportedObject t1 = transport_object(m1, random_invertible(rng, p, s, m1.rank()));
    const TransportedObject t2 = transport_object(m2, random_invertible(rng, p, s, m2.rank()));
    return compose(compose(inverse_iso(t1.iso), f0), t2.iso);
}

// Random g: N -> M1 with g;f = 0, over a fresh auxiliary object N.
PhiMorphism sample_annihilating(Rng& rng, const PhiMorphism& f, const PhiModule& aux) {
    const std::vector<PhiMorphism> homs = hom_space(aux, f.source);
    const int p = f.source.params.p, s = f.source.params.s;
    const int dim = static_cast<int>(homs.size());
    FpMat lin(p, dim, aux.rank() * f.target.rank() * s);
    for (int i = 0; i < dim; ++i) lin.set_row(i, flatten(homs[static_cast<size_t>(i)].phi_x * f.phi_x));
    const std::vector<FpRow> null_rows = fp_left_nullspace(lin);
    Matrix x(p, s, aux.rank(), f.source.rank());
    Matrix yk = x;
    if (!null_rows.empty()) {
        const FpRow& lambda = null_rows[static_cast<size_t>(rng.below(null_rows.size()))];
        for (int i = 0; i < dim; ++i) {
            if (lambda[static_cast<size_t>(i)] == 0) continue;
            const TruncPoly scale = TruncPoly::constant(p, s, lambda[static_cast<size_t>(i)]);
            x = x + homs[static_cast<size_t>(i)].x.scaled(scale);
            yk = yk + homs[static_cast<size_t>(i)].phi_x.scaled(scale);
        }
    }
    return PhiMorphism{aux, f.source, x, yk};
}

void abelian_battery(Ctx& c, Rng& rng, const PhiMorphism& f, bool unipotent_aux) {
    const RingParams& params = f.source.params;
    const KernelResult kr = kernel(f);
    const ImageResult ir = image(f);
    const CokernelResult ck = cokernel(f);

    c.require(is_zero_morphism(compose(kr.inclusion, f)), "kernel inclusion does not kill f");
    c.require(is_zero_morphism(compose(f, ck.projection)), "cokernel projection does not kill f");
    c.require(same_morphism(compose(ir.epi, ir.mono), f), "image factorization broken");
    c.require(f.source.rank() == kr.module.rank() + ir.module.rank(), "rank additivity (source)");
    c.require(f.target.rank() == ir.module.rank() + ck.module.rank(), "rank additivity (target)");

    const ShortExactSeq left_seq{kr.module, f.source, ir.module, kr.inclusion, ir.epi};
    c.require(!exactness_failure(left_seq).has_value(), "0 -> ker -> M -> im -> 0 not exact");

    // First isomorphism: image ~ coimage.
    const CokernelResult coim = cokernel(kr.inclusion);
    c.require(is_isomorphic(ir.module, coim.module, rng.next()).has_value(),
              "image and coimage are not isomorphic");

    // Kernel universal property on a sampled test object.
    Rng aux_rng = rng.split(101);
    const PhiModule aux = unipotent_aux
                              ? random_unipotent_object_rng(aux_rng, params, 1 + static_cast<int>(aux_rng.below(2)))
                              : random_mixed_object(aux_rng, params, 1 + static_cast<int>(aux_rng.below(2)));
    const PhiMorphism g = sample_annihilating(aux_rng, f, aux);
    const auto factor = factor_through_mono(g, kr.inclusion);
    c.require(factor.has_value(), "kernel universal property: no factorization");
    {
        const std::vector<PhiMorphism> homs = hom_space(aux, kr.module);
        FpMat lin(params.p, static_cast<int>(homs.size()),
                  aux.rank() * f.source.rank() * params.s);
        for (size_t i = 0; i < homs.size(); ++i)
            lin.set_row(static_cast<int>(i), flatten(homs[i].phi_x * kr.inclusion.phi_x));
        c.require(fp_left_nullspace(lin).empty(), "kernel universal property: factor not unique");
    }

    // Cokernel universal property, dually.
    const PhiMorphism gd = [&]() {
        const std::vector<PhiMorphism> homs = hom_space(f.target, aux);
        const int dim = static_cast<int>(homs.size());
        FpMat lin(params.p, dim, f.source.rank() * aux.rank() * params.s);
        for (int i = 0; i < dim; ++i) lin.set_row(i, flatten(f.phi_x * homs[static_cast<size_t>(i)].phi_x));
        const std::vector<FpRow> null_rows = fp_left_nullspace(lin);
        Matrix x(params.p, params.s, f.target.rank(), aux.rank());
        Matrix yk = x;
        if (!null_rows.empty()) {
            const FpRow& lambda = null_rows[static_cast<size_t>(aux_rng.below(null_rows.size()))];
            for (int i = 0; i < dim; ++i) {
                if (lambda[static_cast<size_t>(i)] == 0) continue;
                const TruncPoly scale = TruncPoly::constant(params.p, params.s, lambda[static_cast<size_t>(i)]);
                x = x + homs[static_cast<size_t>(i)].x.scaled(scale);
                yk = yk + homs[static_cast<size_t>(i)].phi_x.scaled(scale);
            }
        }
        return PhiMorphism{f.target, aux, x, yk};
    }();
    const auto cofactor = factor_through_epi(gd, ck.projection);
    c.require(cofactor.has_value(), "cokernel universal property: no factorization");
    {
        const std::vector<PhiMorphism> homs = hom_space(ck.module, aux);
        FpMat lin(params.p, static_cast<int>(homs.size()),
                  f.target.rank() * aux.rank() * params.s);
        for (size_t i = 0; i < homs.size(); ++i)
            lin.set_row(static_cast<int>(i), flatten(ck.projection.phi_x * homs[i].phi_x));
        c.require(fp_left_nullspace(lin).empty(), "cokernel universal property: factor not unique");
    }
}

}  // namespace

Outcome suite_abelian_p(int morphisms, uint64_t seed) {
    return run("abelian-p", [&](Ctx& c) {
        // Frozen example: f: diag(u,u) -> [[u]] by X = (1,0)^T at p=3 has
        // kernel [[u]], surjective image, ranks 2 = 1 + 1.
        {
            const RingParams params(3, 2, 1, 3);
            Matrix a1 = Matrix::identity(3, 3, 2).times_u_power(1);
            Matrix a2 = Matrix::identity(3, 3, 1).times_u_power(1);
            const PhiModule m1 = validate_object(params, a1);
            const PhiModule m2 = validate_object(params, a2);
            Matrix x(3, 3, 2, 1);
            x.at(0, 0) = TruncPoly::constant(3, 3, 1);
            const PhiMorphism f = morphism_from_x(m1, m2, x);
            const KernelResult kr = kernel(f);
            c.require(kr.module.rank() == 1 && kr.module.a == a2, "frozen kernel is not [[u]]");
            const ImageResult ir = image(f);
            c.require(ir.module.rank() == 1, "frozen image rank wrong");
            c.require(is_isomorphic(ir.module, m2, 5).has_value(), "frozen image is not the target");
            c.require(cokernel(f).module.rank() == 0, "frozen cokernel should vanish");
        }
        // Trivial cases.
        {
            const RingParams params(5, 2, 1, 5);
            Rng r0(seed ^ 0xabc);
            const PhiModule m = random_object_rng(r0, params, 2);
            const PhiMorphism zf = zero_morphism(m, m);
            c.require(kernel(zf).module == m, "kernel of 0 is not the source");
            c.require(cokernel(zf).module == m, "cokernel of 0 is not the target");
            c.require(image(zf).module.rank() == 0, "image of 0 is not 0");
            const PhiMorphism idm = identity_morphism(m);
            c.require(image(idm).module.rank() == m.rank(), "image of id has wrong rank");
            c.require(kernel(idm).module.rank() == 0, "kernel of id is not 0");
            c.require(cokernel(idm).module.rank() == 0, "cokernel of id is not 0");
        }
        Rng rng(seed);
        for (int it = 0; it < morphisms; ++it) {
            Rng local = rng.split(static_cast<uint64_t>(it));
            const Grid& g = grids()[static_cast<size_t>(local.below(grids().size()))];
            const RingParams params(g.p, g.e, g.r, g.p);  // s = p
            const PhiMorphism f = sample_morphism(local, params, false);
            abelian_battery(c, local, f, false);
        }
    });
}

Outcome suite_abelian_transport(int morphisms, uint64_t seed) {
    return run("abelian-transport", [&](Ctx& c) {
        Rng rng(seed);
        for (int it = 0; it < morphisms; ++it) {
            Rng local = rng.split(static_cast<uint64_t>(it));
            // Boundary regime: p=3, er = 2 = p-1, s in {4,5,6}, unipotent only.
            const RingParams params(3, 2, 1, 4 + static_cast<int>(local.below(3)));
            const PhiMorphism f = sample_morphism(local, params, true);
            abelian_battery(c, local, f, true);

            // Strict regime transports work on arbitrary objects.
            if (it % 2 == 0) {
                const RingParams sp(5, 2, 1, 6 + static_cast<int>(local.below(5)));
                const PhiMorphism fs = sample_morphism(local, sp, false);
                abelian_battery(c, local, fs, false);
            }
        }
        // Non-unipotent inputs must be rejected in the boundary regime.
        {
            const RingParams params(3, 2, 1, 4);
            const PhiModule etale = validate_object(params, Matrix::identity(3, 4, 1));
            bool threw = false;
            try {
                kernel(identity_morphism(etale));
            } catch (const RegimeViolation&) {
                threw = true;
            }
            c.require(threw, "kernel on non-unipotent objects at er=p-1, s>p not rejected");
        }
    });
}

Outcome suite_extensions(int count, uint64_t seed) {
    return run("extensions", [&](Ctx& c) {
        Rng rng(seed);
        for (int it = 0; it < count; ++it) {
            Rng local = rng.split(static_cast<uint64_t>(it));
            const RingParams params = sample_params(local);
            const int r1 = 1 + static_cast<int>(local.below(2));
            const int r2 = 1 + static_cast<int>(local.below(2));
            const PhiModule m1 = random_mixed_object(local, params, r1);
            const PhiModule m2 = random_mixed_object(local, params, r2);
            const Matrix c0 = random_matrix(local, params.p, params.s, m2.rank(), m1.rank());
            const ShortExactSeq seq = build_extension(m1, m2, c0);  // checked exact inside
            ++c.checks;
            c.require(is_unipotent(seq.middle) == (is_unipotent(m1) && is_unipotent(m2)),
                      "extension unipotency differs from its ends");
            if (params.s > params.p) {
                const int s_low = params.p + static_cast<int>(local.below(
                                                 static_cast<uint64_t>(params.s - params.p)));
                const ShortExactSeq cut = truncate_sequence(seq, s_low);
                c.require(!exactness_failure(cut).has_value(),
                          "truncation broke a short exact sequence");
            }
            if (it % 8 == 0) {
                const ShortExactSeq direct = build_extension(
                    m1, m2, Matrix(params.p, params.s, m2.rank(), m1.rank()));
                c.require(direct.middle == direct_sum(m1, m2), "zero block is not the direct sum");
            }
        }
    });
}

Outcome suite_parts(int count, uint64_t seed) {
    return run("parts", [&](Ctx& c) {
        // Frozen: diag(u^2, u) at p=3, e=2, r=1, s=6 has multiplicative part
        // of rank 1.
        {
            const RingParams params(3, 2, 1, 6);
            Matrix a(3, 6, 2, 2);
            a.at(0, 0) = TruncPoly::u_power(3, 6, 2);
            a.at(1, 1) = TruncPoly::u_power(3, 6, 1);
            c.require(max_multiplicative(validate_object(params, a)).module.rank() == 1,
                      "frozen maximal multiplicative rank wrong");
        }
        Rng rng(seed);
        for (int it = 0; it < count; ++it) {
            Rng local = rng.split(static_cast<uint64_t>(it));
            const RingParams params = sample_params(local);
            const int rank = static_cast<int>(local.below(4));
            const PhiModule m = random_mixed_object(local, params, rank);
            const PartsDecomposition pd = parts(m);  // exactness verified inside
            ++c.checks;
            c.require(is_multiplicative(pd.m_part), "m-part is not multiplicative");
            c.require(is_etale(pd.et_quotient), "etale quotient is not etale");
            c.require(max_multiplicative(pd.nil_quotient).module.rank() == 0,
                      "nil quotient has a multiplicative submodule");
            c.require(is_unipotent(pd.uni_part), "uni part is not unipotent");
            c.require(pd.m_part.rank() + pd.nil_quotient.rank() == m.rank(), "rank split (m/nil)");
            c.require(pd.uni_part.rank() + pd.et_quotient.rank() == m.rank(), "rank split (uni/et)");

            if (rank > 0 && it % 4 == 0) {
                // Multiplicative (+) etale: the parts are the blocks.
                const PhiModule mult = validate_object(
                    params, random_invertible(local, params.p, params.s, 1).times_u_power(params.er()));
                const PhiModule etale =
                    validate_object(params, random_invertible(local, params.p, params.s, 1));
                const PartsDecomposition sum_parts = parts(direct_sum(etale, mult));
                c.require(sum_parts.m_part.rank() == 1 && sum_parts.et_quotient.rank() == 1,
                          "parts of etale (+) multiplicative have wrong ranks");
                c.require(is_isomorphic(sum_parts.m_part, mult, local.next()).has_value(),
                          "m-part of the sum is not the multiplicative block");
                c.require(is_isomorphic(sum_parts.et_quotient, etale, local.next()).has_value(),
                          "etale quotient of the sum is not the etale block");
                const PartsDecomposition pe = parts(etale);
                c.require(pe.m_part.rank() == 0 && pe.uni_part.rank() == 0,
                          "etale object has nonzero m/uni parts");
                const PartsDecomposition pmlt = parts(mult);
                c.require(pmlt.et_quotient.rank() == 0 && pmlt.m_part.rank() == 1,
                          "multiplicative object has an etale quotient");
                // coker(m-part inclusion) is the nilpotent quotient, checked
                // where the cokernel is available (s = p or er < p-1).
                if (params.s == params.p || params.strict()) {
                    const CokernelResult ckr = cokernel(sum_parts.m_inclusion);
                    c.require(
                        is_isomorphic(ckr.module, sum_parts.nil_quotient, local.next()).has_value(),
                        "cokernel of the m-part inclusion is not the nil quotient");
                }
            }
        }
    });
}

Outcome suite_filtration() {
    return run("filtration", [&](Ctx& c) {
        // The section-3 dimension observation, taken literally over the
        // stated grid: equality between s = p and s = 2p holds iff e*b <= p.
        std::ostringstream exceptions;
        long bad = 0;
        for (int p : {3, 5})
            for (int e = 1; e <= 3; ++e)
                for (int a = 0; a <= p; ++a)
                    for (int b = a + 1; b <= p; ++b) {
                        ++c.checks;
                        const bool equal =
                            fil_quotient_dim(a, b, e, p) == fil_quotient_dim(a, b, e, 2 * p);
                        const bool small = e * b <= p;
                        if (equal != small) {
                            ++bad;
                            exceptions << " (p=" << p << ",e=" << e << ",a=" << a << ",b=" << b
                                       << ": dims " << fil_quotient_dim(a, b, e, p) << "/"
                                       << fil_quotient_dim(a, b, e, 2 * p) << ", eb=" << e * b << ")";
                        }
                    }
        if (bad > 0)
            throw CheckFailure{"equality-iff-eb<=p fails at " + std::to_string(bad) +
                               " grid points:" + exceptions.str()};
    });
}

Outcome suite_monodromy(int iterations, uint64_t seed) {
    return run("monodromy", [&](Ctx& c) {
        // Documented examples at p=3, e=2, r=1, s=6.
        const RingParams params(3, 2, 1, 6);
        {
            Matrix a(3, 6, 1, 1);
            a.at(0, 0) = TruncPoly::u_power(3, 6, 2);
            const PhiModule mult = validate_object(params, a);
            const MonodromyModule m0 = make_monodromy_module(mult, Matrix(3, 6, 1, 1));
            c.require(check_monodromy(m0).pass(), "multiplicative rank-1 with N=0 fails");
            const MonodromyModule m1 =
                make_monodromy_module(mult, Matrix::identity(3, 6, 1));
            const MonodromyReport rep = check_monodromy(m1);
            c.require(rep.fil_stable && !rep.diagram, "perturbed example must fail the diagram only");

            const PhiModule etale = validate_object(params, Matrix::identity(3, 6, 1));
            c.require(check_monodromy(make_monodromy_module(etale, Matrix(3, 6, 1, 1))).pass(),
                      "etale rank-1 with N=0 fails");
        }
        {
            // apply_n basics: N(m_1) = 0 when the operator vanishes,
            // N(u m_1) = -u m_1, and the Leibniz cancellation with N = Id.
            Matrix a(3, 6, 1, 1);
            a.at(0, 0) = TruncPoly::u_power(3, 6, 2);
            const PhiModule mult = validate_object(params, a);
            const MonodromyModule m0 = make_monodromy_module(mult, Matrix(3, 6, 1, 1));
            PolyRow basis{TruncPoly::constant(3, 6, 1)};
            c.require(row_is_zero(apply_n(m0, basis)), "N(m_1) != 0 for zero operator");
            PolyRow ubasis{TruncPoly::u_power(3, 6, 1)};
            c.require(apply_n(m0, ubasis) ==
                          PolyRow{TruncPoly(3, 6, {0, 2})}, "N(u m_1) != -u m_1");
            const MonodromyModule mid = make_monodromy_module(mult, Matrix::identity(3, 6, 1));
            c.require(row_is_zero(apply_n(mid, ubasis)), "Leibniz cancellation fails for N = Id");
        }
        // Rejections.
        {
            bool threw = false;
            try {
                const RingParams bad(3, 1, 2, 3);  // er = 2 <= p-1 but r = p-1
                make_monodromy_module(validate_object(bad, Matrix(3, 3, 0, 0)), Matrix(3, 3, 0, 0));
            } catch (const RankViolation&) {
                threw = true;
            }
            c.require(threw, "r >= p-1 was not rejected");
            threw = false;
            try {
                const RingParams off(3, 2, 1, 5);  // s != e*p
                make_monodromy_module(validate_object(off, Matrix(3, 5, 0, 0)), Matrix(3, 5, 0, 0));
            } catch (const LevelViolation&) {
                threw = true;
            }
            c.require(threw, "s != e*p was not rejected");
        }
        Rng rng(seed);
        for (int it = 0; it < iterations; ++it) {
            Rng local = rng.split(static_cast<uint64_t>(it));
            const Grid& g = grids()[static_cast<size_t>(local.below(grids().size()))];
            const RingParams mp(g.p, g.e, g.r, g.e * g.p);
            const int rank = 1 + static_cast<int>(local.below(3));
            const PhiModule base = random_object_rng(local, mp, rank);
            const Matrix lambda = random_matrix(local, mp.p, mp.s, rank, rank);
            const MonodromyModule mm = make_monodromy_module(base, lambda);

            // Leibniz for the extended operator.
            const TruncPoly a = random_poly(local, mp.p, mp.s);
            PolyRow v;
            for (int i = 0; i < rank; ++i) v.push_back(random_poly(local, mp.p, mp.s));
            const PolyRow lhs = apply_n(mm, row_scaled(v, a));
            const PolyRow rhs =
                row_add(row_scaled(v, derivation_n(a)), row_scaled(apply_n(mm, v), a));
            c.require(lhs == rhs, "Leibniz rule for apply_n fails");

            // Monomial-diagonal objects with N = 0 and constant c satisfy
            // the axioms; transported copies must keep the verdict.
            std::vector<int> exps;
            for (int i = 0; i < rank; ++i) exps.push_back(local.range(0, mp.er()));
            Matrix diag = Matrix::u_diagonal(mp.p, mp.s, rank, rank, exps);
            for (int i = 0; i < rank; ++i)
                diag.at(i, i) = diag.at(i, i) * random_unit(local, mp.p, mp.s);
            const PhiModule diag_obj = validate_object(mp, diag);
            const MonodromyModule nzero =
                make_monodromy_module(diag_obj, Matrix(mp.p, mp.s, rank, rank));
            c.require(check_monodromy(nzero).pass(), "diagonal object with N = 0 fails the axioms");

            const Matrix v_chg = random_invertible(local, mp.p, mp.s, rank);
            const MonodromyModule moved = transport_monodromy(nzero, v_chg);
            c.require(check_monodromy(moved).pass(), "axioms not stable under base change");
        }
    });
}

Outcome suite_io(int count, uint64_t seed) {
    return run("io", [&](Ctx& c) {
        // The documented minimal document.
        {
            const std::string doc = R"({"format":"breuil-phimod/1","p":3,"e":2,"r":1,"s":6,"d":1,
                                        "c":[1],"A":[[[0,0,1]]]})";
            const ParsedModule pm = parse_module(doc);
            c.require(is_multiplicative(pm.module), "minimal document is not multiplicative");
        }
        {
            bool threw = false;
            try {
                parse_module(R"({"format":"breuil-phimod/1","p":3,"e":1,"r":3,"s":3,"d":0,"c":[1],"A":[]})");
            } catch (const ValidationError&) {
                threw = true;
            }
            c.require(threw, "er > p-1 document accepted");
            threw = false;
            try {
                parse_module("{\"format\": \"breuil-phimod/1\", \"p\": 3");
            } catch (const ParseError&) {
                threw = true;
            }
            c.require(threw, "garbled document accepted");
        }
        {
            // Untrimmed coefficient arrays are accepted and canonicalized.
            nlohmann::json doc;
            doc["format"] = "breuil-phimod/1";
            doc["p"] = 3; doc["e"] = 2; doc["r"] = 1; doc["s"] = 6; doc["d"] = 1;
            doc["c"] = {1, 0, 0, 0, 0, 0};
            doc["A"] = {{{0, 0, 1, 0, 0, 0}}};
            const ParsedModule pm = parse_module(doc.dump());
            const std::string canon = serialize_module(pm.module);
            c.require(parse_module(canon).module == pm.module, "untrimmed round trip failed");
        }
        Rng rng(seed);
        for (int it = 0; it < count; ++it) {
            Rng local = rng.split(static_cast<uint64_t>(it));
            const RingParams params = sample_params(local);
            const PhiModule m = random_mixed_object(local, params, static_cast<int>(local.below(4)));
            const std::string text = serialize_module(m);
            const ParsedModule back = parse_module(text);
            c.require(back.module == m, "module round trip not bit-exact");
            c.require(serialize_module(back.module) == text, "module serialization not canonical");

            const PhiModule m2 = random_mixed_object(local, params, static_cast<int>(local.below(3)));
            const PhiMorphism f = random_morphism_rng(local, m, m2);
            const PhiMorphism fb = parse_morphism(serialize_morphism(f));
            c.require(same_morphism(f, fb) && fb.x == f.x, "morphism round trip failed");

            if (m.rank() > 0 && m2.rank() > 0) {
                const ShortExactSeq seq = build_extension(
                    m, m2, random_matrix(local, params.p, params.s, m2.rank(), m.rank()));
                const ShortExactSeq sq = parse_sequence(serialize_sequence(seq));
                c.require(sq.middle == seq.middle && same_morphism(sq.inj, seq.inj) &&
                              same_morphism(sq.surj, seq.surj),
                          "sequence round trip failed");
            }

            // Monodromy documents at s = e*p.
            if (it % 3 == 0) {
                const Grid& g = grids()[static_cast<size_t>(local.below(grids().size()))];
                const RingParams mp(g.p, g.e, g.r, g.e * g.p);
                const PhiModule base = random_object_rng(local, mp, 1 + static_cast<int>(local.below(2)));
                const MonodromyModule mono = make_monodromy_module(
                    base, random_matrix(local, mp.p, mp.s, base.rank(), base.rank()));
                const std::string mt = serialize_monodromy(mono);
                const ParsedModule mb = parse_module(mt);
                c.require(mb.n_op.has_value() && *mb.n_op == mono.n_op && mb.module == base,
                          "monodromy round trip failed");
                c.require(serialize_monodromy(mb.monodromy()) == mt,
                          "monodromy serialization not canonical");
            }
        }
    });
}

std::vector<std::string> suite_names() {
    return {"ring",       "adapted-basis", "duality",    "unipotency",
            "equivalence", "abelian-p",    "abelian-transport", "extensions",
            "parts",      "filtration",    "monodromy",  "io"};
}

std::vector<Outcome> run_selftest(const Options& options) {
    const int n = options.iterations;
    const uint64_t seed = options.seed;
    struct Entry {
        std::string name;
        std::function<Outcome()> fn;
    };
    const std::vector<Entry> entries = {
        {"ring", [&] { return suite_ring(n, seed); }},
        {"adapted-basis", [&] { return suite_adapted_basis(std::min(n, 50), seed); }},
        {"duality", [&] { return suite_duality(n, seed); }},
        {"unipotency", [&] { return suite_unipotency(n, seed); }},
        {"equivalence", [&] { return suite_equivalence(std::max(4, n / 4), seed); }},
        {"abelian-p", [&] { return suite_abelian_p(std::max(4, n / 2), seed); }},
        {"abelian-transport", [&] { return suite_abelian_transport(std::max(4, n / 4), seed); }},
        {"extensions", [&] { return suite_extensions(n, seed); }},
        {"parts", [&] { return suite_parts(n, seed); }},
        {"filtration", [&] { return suite_filtration(); }},
        {"monodromy", [&] { return suite_monodromy(n, seed); }},
        {"io", [&] { return suite_io(n, seed); }},
    };
    std::vector<Outcome> results;
    for (const Entry& entry : entries) {
        if (!options.suites.empty() &&
            std::find(options.suites.begin(), options.suites.end(), entry.name) ==
                options.suites.end())
            continue;
        results.push_back(entry.fn());
    }
    std::sort(results.begin(), results.end(),
              [](const Outcome& a, const Outcome& b) { return a.name < b.name; });
    return results;
}

}  // namespace breuil::selftest
