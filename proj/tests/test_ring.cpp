#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "breuil/ring.hpp"
#include "breuil/rng.hpp"

using namespace breuil;

TEST_SUITE_BEGIN("ring");

TEST_CASE("frobenius on documented examples") {
    // p = 3, s = 6
    CHECK(frobenius(TruncPoly::u_power(3, 6, 1)) == TruncPoly::u_power(3, 6, 3));
    CHECK(frobenius(TruncPoly(3, 6, {1, 2})) == TruncPoly(3, 6, {1, 0, 0, 2}));
    CHECK(frobenius(TruncPoly::u_power(3, 6, 2)).is_zero());
}

TEST_CASE("frobenius is a ring homomorphism") {
    Rng rng(42);
    for (int it = 0; it < 200; ++it) {
        const int p = it % 2 ? 3 : 5;
        const int s = p + static_cast<int>(rng.below(static_cast<uint64_t>(p)));
        TruncPoly a(p, s), b(p, s);
        for (int i = 0; i < s; ++i) {
            a.set_coeff(i, static_cast<long>(rng.below(static_cast<uint64_t>(p))));
            b.set_coeff(i, static_cast<long>(rng.below(static_cast<uint64_t>(p))));
        }
        CHECK(frobenius(a + b) == frobenius(a) + frobenius(b));
        CHECK(frobenius(a * b) == frobenius(a) * frobenius(b));
    }
}

TEST_CASE("u_valuation") {
    CHECK(u_valuation(TruncPoly(3, 6, {0, 0, 1, 0, 1})) == 2);
    CHECK(u_valuation(TruncPoly::constant(3, 6, 2)) == 0);
    CHECK(u_valuation(TruncPoly(3, 6)) == val_infinity);

    Rng rng(7);
    for (int it = 0; it < 200; ++it) {
        TruncPoly a(3, 6), b(3, 6);
        for (int i = 0; i < 6; ++i) {
            a.set_coeff(i, static_cast<long>(rng.below(3)));
            b.set_coeff(i, static_cast<long>(rng.below(3)));
        }
        const int va = u_valuation(a), vb = u_valuation(b), vab = u_valuation(a * b);
        if (va != val_infinity && vb != val_infinity && va + vb < 6)
            CHECK(vab == va + vb);
        else
            CHECK(vab == val_infinity);
    }
}

TEST_CASE("invert_unit") {
    CHECK(invert_unit(TruncPoly(3, 3, {1, 1})) == TruncPoly(3, 3, {1, 2, 1}));
    CHECK(invert_unit(TruncPoly::constant(3, 6, 2)) == TruncPoly::constant(3, 6, 2));
    CHECK_THROWS_AS(invert_unit(TruncPoly::u_power(3, 3, 1)), NotAUnit);

    // Exhaustive round trip at p = 3, s = 3 (all 18 units).
    int units = 0;
    for (int c0 = 1; c0 < 3; ++c0)
        for (int c1 = 0; c1 < 3; ++c1)
            for (int c2 = 0; c2 < 3; ++c2) {
                const TruncPoly w(3, 3, {c0, c1, c2});
                CHECK(w * invert_unit(w) == TruncPoly::constant(3, 3, 1));
                ++units;
            }
    CHECK(units == 18);
}

TEST_CASE("derivation_n") {
    CHECK(derivation_n(TruncPoly::u_power(3, 6, 1)) == TruncPoly(3, 6, {0, 2}));
    CHECK(derivation_n(TruncPoly::constant(3, 6, 1)).is_zero());
    CHECK(derivation_n(TruncPoly::u_power(3, 6, 2)) == TruncPoly::u_power(3, 6, 2));

    Rng rng(11);
    for (int it = 0; it < 200; ++it) {
        TruncPoly a(5, 10), b(5, 10);
        for (int i = 0; i < 10; ++i) {
            a.set_coeff(i, static_cast<long>(rng.below(5)));
            b.set_coeff(i, static_cast<long>(rng.below(5)));
        }
        CHECK(derivation_n(a * b) == derivation_n(a) * b + a * derivation_n(b));
    }
}

TEST_CASE("fil_quotient_dim against the monomial-count oracle") {
    // Independent oracle: count monomials u^k with min(ea,s) <= k < min(eb,s).
    auto oracle = [](int a, int b, int e, int s) {
        int count = 0;
        for (int k = 0; k < s; ++k)
            if (k >= e * a && k < e * b) ++count;
        // monomials below s but at least e*a and below e*b
        return count;
    };
    CHECK(fil_quotient_dim(1, 2, 2, 3) == 1);
    CHECK(fil_quotient_dim(1, 2, 2, 6) == 2);
    CHECK(fil_quotient_dim(0, 1, 2, 3) == 2);
    CHECK(fil_quotient_dim(0, 1, 2, 6) == 2);
    for (int e = 1; e <= 3; ++e)
        for (int s = 3; s <= 10; ++s)
            for (int a = 0; a <= 5; ++a)
                for (int b = a; b <= 5; ++b)
                    CHECK(fil_quotient_dim(a, b, e, s) == oracle(a, b, e, s));
    CHECK_THROWS_AS(fil_quotient_dim(2, 1, 1, 3), InvalidLevels);
}

TEST_CASE("ring params validation") {
    CHECK_NOTHROW(RingParams(3, 2, 1, 6));
    CHECK_NOTHROW(RingParams(5, 2, 2, 10));  // er = 4 = p-1
    CHECK_THROWS_AS(RingParams(3, 1, 3, 3), ParamViolation);   // er > p-1
    CHECK_THROWS_AS(RingParams(4, 1, 1, 4), ParamViolation);   // p not prime
    CHECK_THROWS_AS(RingParams(3, 2, 1, 2), ParamViolation);   // s < p
    CHECK_THROWS_AS(RingParams(3, 2, 1, 7), ParamViolation);   // s > ep
    CHECK_THROWS_AS(RingParams(3, 2, 1, 6, TruncPoly::u_power(3, 6, 1)), ParamViolation);
    const RingParams params(3, 2, 1, 6);
    CHECK(params.boundary());
    CHECK(!params.strict());
    CHECK(RingParams(5, 2, 1, 10).strict());
}

TEST_SUITE_END();
