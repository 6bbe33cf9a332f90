#include <doctest.h>

#include <map>
#include <set>

#include "breuil/io.hpp"
#include "breuil/phimod.hpp"

using namespace breuil;

namespace {

Matrix scalar_matrix(int p, int s, const TruncPoly& a) {
    Matrix m(p, s, 1, 1);
    m.at(0, 0) = a;
    return m;
}

}  // namespace

TEST_SUITE_BEGIN("phimod");

TEST_CASE("validate_object") {
    const RingParams params(3, 2, 1, 6);
    const PhiModule m = validate_object(params, scalar_matrix(3, 6, TruncPoly::u_power(3, 6, 2)));
    CHECK(m.rank() == 1);
    CHECK(is_multiplicative(m));
    CHECK_THROWS_AS(validate_object(params, scalar_matrix(3, 6, TruncPoly::u_power(3, 6, 3))),
                    NotAPresentation);
    CHECK_THROWS_AS(RingParams(3, 1, 3, 3), ParamViolation);

    const PhiModule zero = zero_object(params);
    CHECK(zero.rank() == 0);
    CHECK(is_multiplicative(zero));
    CHECK(is_etale(zero));
}

TEST_CASE("cartier dual rank-1 frozen values") {
    const RingParams params(3, 2, 1, 6);  // c = 1, er = 2
    const PhiModule etale = validate_object(params, Matrix::identity(3, 6, 1));
    CHECK(cartier_dual(etale).a == scalar_matrix(3, 6, TruncPoly::u_power(3, 6, 2)));
    const PhiModule mid = validate_object(params, scalar_matrix(3, 6, TruncPoly::u_power(3, 6, 1)));
    CHECK(cartier_dual(mid).a == mid.a);
}

TEST_CASE("cartier dual against brute-force enumeration of functionals") {
    // Independent oracle at p=3, s=3, d=2: enumerate all 3^6 coordinate rows
    // b of the dual module, keep those with A*b^T in u^{er}*T_s (the dual
    // filtration by definition), and compare with the span of the dual's
    // filtration generators expressed in coordinate-dual terms.  Then check
    // the defining phi_r property on each generator pair exhaustively.
    const int p = 3, s = 3, er = 2;
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        Rng local = rng.split(static_cast<uint64_t>(trial));
        const RingParams params =
            trial % 2 ? RingParams(3, 2, 1, 3) : RingParams(3, 2, 1, 3, random_unit(local, p, s));
        const PhiModule m = random_object_rng(local, params, 2);
        const DualData dd = cartier_dual_with_pairing(m);

        std::vector<FpRow> annihilator;
        std::vector<long> digits(6, 0);
        while (true) {
            const PolyRow b = {TruncPoly(p, s, {digits[0], digits[1], digits[2]}),
                               TruncPoly(p, s, {digits[3], digits[4], digits[5]})};
            bool inside = true;
            for (int i = 0; i < 2 && inside; ++i) {
                TruncPoly pairing_value(p, s);
                for (int j = 0; j < 2; ++j) pairing_value = pairing_value + m.a.at(i, j) * b[static_cast<size_t>(j)];
                const int v = u_valuation(pairing_value);
                inside = v == val_infinity || v >= er;
            }
            if (inside) annihilator.push_back(flatten_row(b));
            int pos = 0;
            while (pos < 6) {
                if (++digits[static_cast<size_t>(pos)] < p) break;
                digits[static_cast<size_t>(pos)] = 0;
                ++pos;
            }
            if (pos == 6) break;
        }
        const FpMat oracle_span = fp_row_span(annihilator, p, 2 * s);
        const Matrix fil_dual_gens = dd.module.a * dd.pairing;
        CHECK(fp_span_equal(module_span(fil_dual_gens), oracle_span));

        // Defining property on generators: phi_r^vee(beta_i) evaluated at
        // phi_r(alpha_j) equals phi_r(beta_i(alpha_j)), where
        // phi_r^vee(beta_i) = c^r * (row i of pairing) in dual coordinates
        // and phi_r on u^{er}*h in T_s is c^r*phi(h).
        const TruncPoly cr = params.c_pow_r();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                TruncPoly pairing_value(p, s);
                for (int k = 0; k < 2; ++k)
                    pairing_value = pairing_value + m.a.at(j, k) * fil_dual_gens.at(i, k);
                const TruncPoly lhs = cr * cr * dd.pairing.at(i, j);
                const TruncPoly rhs = cr * frobenius(shift_right(pairing_value, er));
                CHECK(lhs == rhs);
            }
    }
}

TEST_CASE("duality is involutive up to canonical isomorphism") {
    Rng rng(5);
    for (int it = 0; it < 25; ++it) {
        const RingParams params(it % 2 ? 3 : 5, 2, 1, it % 2 ? 6 : 10);
        const PhiModule m = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(3)));
        const PhiMorphism ev = bidual_iso(m);
        CHECK(is_iso_morphism(ev));
        const auto witness = is_isomorphic(m, cartier_dual(cartier_dual(m)), 99 + it);
        REQUIRE(witness.has_value());
        CHECK(is_iso_morphism(*witness));
    }
}

TEST_CASE("dual with a nontrivial c twist") {
    Rng rng(55);
    const TruncPoly c = random_unit(rng, 3, 6);
    const RingParams params(3, 2, 1, 6, c);
    for (int it = 0; it < 10; ++it) {
        const PhiModule m = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        cartier_dual(m);  // internal pairing certification is the assertion
        CHECK(is_isomorphic(m, cartier_dual(cartier_dual(m)), it).has_value());
    }
}

TEST_CASE("hom space contains the identity and composes") {
    const RingParams params(3, 2, 1, 3);
    const PhiModule m = validate_object(params, scalar_matrix(3, 3, TruncPoly::u_power(3, 3, 1)));
    const auto endos = hom_space(m, m);
    CHECK(endos.size() == 1);  // dimension 1 over F_3 (frozen oracle value)
    bool has_id = false;
    for (const auto& f : endos)
        if (f.phi_x == Matrix::identity(3, 3, 1)) has_id = true;
    CHECK(has_id);

    // Hom(etale, multiplicative) vanishes at s = p.
    const PhiModule etale = validate_object(params, Matrix::identity(3, 3, 1));
    const PhiModule mult = validate_object(params, scalar_matrix(3, 3, TruncPoly::u_power(3, 3, 2)));
    CHECK(hom_space(etale, mult).empty());

    Rng rng(6);
    const RingParams big(3, 2, 1, 6);
    const PhiModule a = random_object_rng(rng, big, 2);
    const PhiModule b = random_object_rng(rng, big, 2);
    const PhiModule c = random_object_rng(rng, big, 1);
    const PhiMorphism f = random_morphism_rng(rng, a, b);
    const PhiMorphism g = random_morphism_rng(rng, b, c);
    const PhiMorphism h = compose(f, g);
    CHECK(h.source.a == a.a);
    CHECK(h.target.a == c.a);
    CHECK(a.a * frobenius(h.x) == h.x * c.a);
    // identity is neutral
    CHECK(same_morphism(compose(identity_morphism(a), f), f));
    CHECK(same_morphism(compose(f, identity_morphism(b)), f));
}

TEST_CASE("max_multiplicative") {
    const RingParams params(3, 2, 1, 6);
    Rng rng(8);
    // multiplicative object is its own m-part
    const PhiModule mult =
        validate_object(params, random_invertible(rng, 3, 6, 2).times_u_power(2));
    CHECK(max_multiplicative(mult).module.rank() == 2);
    // etale object has trivial m-part
    const PhiModule etale = validate_object(params, random_invertible(rng, 3, 6, 2));
    CHECK(max_multiplicative(etale).module.rank() == 0);
    // frozen mixed example diag(u^2, u) -> rank 1
    Matrix mixed(3, 6, 2, 2);
    mixed.at(0, 0) = TruncPoly::u_power(3, 6, 2);
    mixed.at(1, 1) = TruncPoly::u_power(3, 6, 1);
    const SubmoduleWithInclusion sub = max_multiplicative(validate_object(params, mixed));
    CHECK(sub.module.rank() == 1);
    CHECK(is_multiplicative(sub.module));
    // the inclusion really is a morphism into the host
    CHECK(sub.inclusion.source.a == sub.module.a);
    CHECK(sub.inclusion.target.a == mixed);
}

TEST_CASE("max_multiplicative against an element-level oracle") {
    // Independent route at p=3, s=3, d=2: iterate W -> span{phi_r(u^{er} w)}
    // literally over the element sets, evaluating phi_r by exhaustive search
    // for a combination t with t*A = u^{er}v.  No cofactors, no solvers.
    const int p = 3, s = 3, d = 2;
    const RingParams params(3, 2, 1, 3);
    // Generation order matches encode(): coefficient 0 is the least
    // significant digit, so it must vary fastest.
    std::vector<TruncPoly> scalars;
    for (int c2 = 0; c2 < p; ++c2)
        for (int c1 = 0; c1 < p; ++c1)
            for (int c0 = 0; c0 < p; ++c0) scalars.emplace_back(p, s, std::vector<long>{c0, c1, c2});
    std::vector<PolyRow> all_rows;
    for (const TruncPoly& b : scalars)
        for (const TruncPoly& a : scalars) all_rows.push_back(PolyRow{a, b});

    auto encode = [&](const PolyRow& v) {
        int code = 0, base = 1;
        for (const TruncPoly& x : v)
            for (int k = 0; k < s; ++k) {
                code += x.coeff(k) * base;
                base *= p;
            }
        return code;
    };
    auto span_closure = [&](std::set<int> seed_codes) {
        // Close a set of rows under addition and scalar multiplication.
        std::set<int> span{encode(PolyRow{TruncPoly(p, s), TruncPoly(p, s)})};
        for (int code : seed_codes) {
            const PolyRow& g = all_rows[static_cast<size_t>(code)];
            std::set<int> next;
            for (int xc : span)
                for (const TruncPoly& t : scalars)
                    next.insert(encode(row_add(all_rows[static_cast<size_t>(xc)], row_scaled(g, t))));
            span = std::move(next);
        }
        return span;
    };

    Rng rng(123);
    for (int trial = 0; trial < 6; ++trial) {
        const PhiModule m = random_object_rng(rng, params, d);
        const TruncPoly cr = m.params.c_pow_r();
        // Tabulate one combination t for every attainable t*A.
        std::map<int, PolyRow> fil_table;
        for (const PolyRow& t : all_rows) fil_table.emplace(encode(row_times_matrix(t, m.a)), t);
        std::set<int> w;
        for (const PolyRow& v : all_rows) w.insert(encode(v));  // W_0 = M
        for (int step = 0; step < 10; ++step) {
            std::set<int> images;
            for (int code : w) {
                const PolyRow& v = all_rows[static_cast<size_t>(code)];
                const PolyRow target = row_scaled(v, TruncPoly::u_power(p, s, params.er()));
                const auto hit = fil_table.find(encode(target));
                REQUIRE(hit != fil_table.end());  // u^{er} M lies in Fil
                const PolyRow& t = hit->second;
                images.insert(encode(PolyRow{frobenius(t[0]) * cr, frobenius(t[1]) * cr}));
            }
            const std::set<int> next = span_closure(images);
            if (next == w) break;
            w = next;
        }
        const SubmoduleWithInclusion mm = max_multiplicative(m);
        std::set<int> lib;
        for (const PolyRow& v : all_rows)
            if (module_span_contains(module_span(mm.inclusion.phi_x), v)) lib.insert(encode(v));
        CHECK(lib == w);
    }
}

TEST_CASE("parts on structured objects") {
    const RingParams params(3, 2, 1, 6);
    Rng rng(9);
    const PhiModule etale = validate_object(params, random_invertible(rng, 3, 6, 2));
    const PartsDecomposition pe = parts(etale);
    CHECK(pe.m_part.rank() == 0);
    CHECK(pe.uni_part.rank() == 0);
    CHECK(pe.et_quotient.rank() == 2);
    CHECK(pe.nil_quotient.rank() == 2);

    const PhiModule mult =
        validate_object(params, random_invertible(rng, 3, 6, 2).times_u_power(2));
    const PartsDecomposition pm = parts(mult);
    CHECK(pm.m_part.rank() == 2);
    CHECK(pm.et_quotient.rank() == 0);
    CHECK(pm.uni_part.rank() == 2);  // multiplicative objects have no etale quotient
}

TEST_CASE("unipotency criteria on documented cases") {
    const RingParams p3s3(3, 2, 1, 3);
    CHECK(!is_unipotent(validate_object(p3s3, Matrix::identity(3, 3, 1))));
    CHECK(is_unipotent(validate_object(p3s3, scalar_matrix(3, 3, TruncPoly::u_power(3, 3, 1)))));
    const RingParams p3s6(3, 2, 1, 6);
    CHECK(is_unipotent(validate_object(p3s6, scalar_matrix(3, 6, TruncPoly::u_power(3, 6, 2)))));
    CHECK(is_unipotent(zero_object(p3s6)));
}

TEST_CASE("is_isomorphic finds base-change witnesses") {
    const RingParams params(3, 2, 1, 6);
    Rng rng(10);
    const PhiModule m = validate_object(params, scalar_matrix(3, 6, TruncPoly::u_power(3, 6, 1)));
    CHECK(same_morphism(*is_isomorphic(m, m), identity_morphism(m)));

    const PhiModule r1 = random_object_rng(rng, params, 1);
    const PhiModule r2 = random_object_rng(rng, params, 2);
    CHECK(!is_isomorphic(r1, r2).has_value());  // rank mismatch

    for (int it = 0; it < 20; ++it) {
        const PhiModule base = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(3)));
        const TransportedObject moved =
            transport_object(base, random_invertible(rng, 3, 6, base.rank()));
        const auto witness = is_isomorphic(base, moved.module, 1000 + it);
        REQUIRE(witness.has_value());
        CHECK(is_iso_morphism(*witness));
        inverse_iso(*witness);
    }

    // Verified negative: etale vs multiplicative of equal rank.
    const PhiModule etale = validate_object(params, Matrix::identity(3, 6, 1));
    const PhiModule mult = validate_object(params, scalar_matrix(3, 6, TruncPoly::u_power(3, 6, 2)));
    CHECK(!is_isomorphic(etale, mult).has_value());
}

TEST_CASE("morphism composition is associative on sampled triples") {
    Rng rng(12);
    const RingParams params(5, 2, 1, 10);
    for (int it = 0; it < 10; ++it) {
        const PhiModule a = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        const PhiModule b = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        const PhiModule c = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        const PhiMorphism f = random_morphism_rng(rng, a, b);
        const PhiMorphism g = random_morphism_rng(rng, b, c);
        const PhiMorphism h = random_morphism_rng(rng, c, a);
        CHECK(same_morphism(compose(compose(f, g), h), compose(f, compose(g, h))));
    }
}

TEST_CASE("unramified and tiny-characteristic corners") {
    // e = 1 forces s = p; er = p-1 is still reachable.
    const RingParams unram(5, 1, 4, 5);
    CHECK(unram.boundary());
    Rng rng(77);
    const PhiModule m = random_object_rng(rng, unram, 2);
    CHECK(is_isomorphic(m, cartier_dual(cartier_dual(m)), 3).has_value());
    const PartsDecomposition pd = parts(m);
    CHECK(pd.m_part.rank() + pd.nil_quotient.rank() == 2);

    // p = 2: the smallest legal context is (p, e, r, s) = (2, 1, 1, 2).
    const RingParams tiny(2, 1, 1, 2);
    const PhiModule t1 = random_object_rng(rng, tiny, 2);
    CHECK(is_isomorphic(t1, cartier_dual(cartier_dual(t1)), 4).has_value());
    is_unipotent(t1);  // criteria agreement is the assertion
    const PhiModule t2 = random_object_rng(rng, tiny, 1);
    const PhiMorphism f = random_morphism_rng(rng, t1, t2);
    CHECK(t1.a * frobenius(f.x) == f.x * t2.a);
}

TEST_CASE("exactness checker on trivial sequences") {
    const RingParams params(3, 2, 1, 6);
    Rng rng(13);
    const PhiModule m = random_object_rng(rng, params, 2);
    const PhiModule zero = zero_object(params);
    const ShortExactSeq good{zero, m, m, zero_morphism(zero, m), identity_morphism(m)};
    CHECK(!exactness_failure(good).has_value());
    const ShortExactSeq bad{m, m, m, zero_morphism(m, m), identity_morphism(m)};
    CHECK(exactness_failure(bad).has_value());
}

TEST_SUITE_END();
