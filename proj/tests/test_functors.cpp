#include <doctest.h>

#include "breuil/abelian.hpp"
#include "breuil/functors.hpp"
#include "breuil/io.hpp"

using namespace breuil;

TEST_SUITE_BEGIN("functors");

TEST_CASE("level pair classification") {
    const RingParams boundary(3, 2, 1, 6);
    CHECK(make_level_pair(boundary, 6, 4).regime == LiftRegime::boundary_deep);
    CHECK(make_level_pair(boundary, 5, 3).regime == LiftRegime::boundary_unipotent);
    const RingParams strict(5, 2, 1, 10);
    CHECK(make_level_pair(strict, 10, 5).regime == LiftRegime::strict_ramification);
    CHECK_THROWS_AS(make_level_pair(boundary, 4, 4), LevelViolation);
    CHECK_THROWS_AS(make_level_pair(boundary, 7, 4), LevelViolation);
    CHECK_THROWS_AS(make_level_pair(boundary, 4, 2), LevelViolation);
}

TEST_CASE("truncation of the documented diagonal") {
    const RingParams params(3, 2, 1, 6);
    Matrix a(3, 6, 2, 2);
    a.at(0, 0) = TruncPoly::u_power(3, 6, 2);
    a.at(1, 1) = TruncPoly::constant(3, 6, 1) + TruncPoly::u_power(3, 6, 4);
    const PhiModule m = validate_object(params, a);
    const PhiModule cut = truncate_object(m, 4);
    Matrix want(3, 4, 2, 2);
    want.at(0, 0) = TruncPoly::u_power(3, 4, 2);
    want.at(1, 1) = TruncPoly::constant(3, 4, 1);
    CHECK(cut.a == want);
}

TEST_CASE("lift is a bit-exact section of truncation") {
    Rng rng(21);
    // strict regime: all orders
    for (int it = 0; it < 30; ++it) {
        const int s = 5 + static_cast<int>(rng.below(5));
        const int t = s + 1 + static_cast<int>(rng.below(static_cast<uint64_t>(10 - s)));
        const RingParams params(5, 2, 1, s);
        const PhiModule m = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(3)));
        const PhiModule lifted = lift_object(m, t);
        CHECK(truncate_object(lifted, s) == m);
    }
    // boundary regime, deep orders
    for (int it = 0; it < 30; ++it) {
        const int s = 4 + static_cast<int>(rng.below(2));
        const int t = s + 1 + static_cast<int>(rng.below(static_cast<uint64_t>(6 - s)));
        const RingParams params(3, 2, 1, s);
        const PhiModule m = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(3)));
        CHECK(truncate_object(lift_object(m, t), s) == m);
    }
}

TEST_CASE("documented lift example has zero defect") {
    const RingParams params(3, 2, 1, 4);
    Matrix a(3, 4, 2, 2);
    a.at(0, 0) = TruncPoly::u_power(3, 4, 2);
    a.at(1, 1) = TruncPoly::constant(3, 4, 1);
    const PhiModule m = validate_object(params, a);
    const PhiModule lifted = lift_object(m, 6);
    CHECK(lifted.a == a.lifted(6));
}

TEST_CASE("boundary regime rejects non-unipotent lifts from s = p") {
    const RingParams params(3, 2, 1, 3);
    const PhiModule etale = validate_object(params, Matrix::identity(3, 3, 1));
    CHECK_THROWS_AS(lift_object(etale, 6), RegimeViolation);

    const PhiModule unip =
        validate_object(params, [] {
            Matrix a(3, 3, 1, 1);
            a.at(0, 0) = TruncPoly::u_power(3, 3, 1);
            return a;
        }());
    CHECK_NOTHROW(lift_object(unip, 6));
}

TEST_CASE("morphism lifting: zero, identity, and random unipotent") {
    Rng rng(22);
    const RingParams params(3, 2, 1, 3);
    for (int it = 0; it < 25; ++it) {
        const int t = 4 + static_cast<int>(rng.below(3));
        const PhiModule m1 = random_unipotent_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        const PhiModule m2 = random_unipotent_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        const PhiModule m1t = lift_object(m1, t);
        const PhiModule m2t = lift_object(m2, t);

        const PhiMorphism zero_lift = lift_morphism(zero_morphism(m1, m2), m1t, m2t);
        CHECK(is_zero_morphism(zero_lift));
        const PhiMorphism id_lift = lift_morphism(identity_morphism(m1), m1t, m1t);
        CHECK(same_morphism(id_lift, identity_morphism(m1t)));

        const PhiMorphism f = random_morphism_rng(rng, m1, m2);
        const PhiMorphism lifted = lift_morphism(f, m1t, m2t);
        CHECK(lifted.phi_x.truncated(3) == f.phi_x);
        CHECK(m1t.a * frobenius(lifted.x) == lifted.x * m2t.a);
    }
}

TEST_CASE("morphism lifting in the strict regime needs no unipotency") {
    Rng rng(24);
    for (int it = 0; it < 25; ++it) {
        const int s = 5 + static_cast<int>(rng.below(3));
        const int t = s + 1 + static_cast<int>(rng.below(static_cast<uint64_t>(10 - s)));
        const RingParams params(5, 2, 1, s);
        const PhiModule m1 = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        const PhiModule m2 = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        const PhiModule m1t = lift_object(m1, t);
        const PhiModule m2t = lift_object(m2, t);
        const PhiMorphism f = random_morphism_rng(rng, m1, m2);
        const PhiMorphism lifted = lift_morphism(f, m1t, m2t);
        CHECK(lifted.phi_x.truncated(s) == f.phi_x);
    }
}

TEST_CASE("morphism lifting rejects mismatched endpoint lifts") {
    Rng rng(27);
    const RingParams params(5, 2, 1, 5);
    const PhiModule m1 = random_object_rng(rng, params, 1);
    const PhiModule m2 = random_object_rng(rng, params, 1);
    const PhiMorphism f = random_morphism_rng(rng, m1, m2);
    const PhiModule wrong = lift_object(random_object_rng(rng, params, 1), 8);
    const PhiModule m2t = lift_object(m2, 8);
    if (truncate_object(wrong, 5) != m1)
        CHECK_THROWS_AS(lift_morphism(f, wrong, m2t), LevelViolation);
    // Lifts at different orders are rejected outright.
    CHECK_THROWS_AS(lift_morphism(f, lift_object(m1, 7), m2t), ParamMismatch);
}

TEST_CASE("hom dimensions match across levels") {
    Rng rng(25);
    for (int it = 0; it < 10; ++it) {
        const RingParams params(5, 2, 1, 5);
        const PhiModule m1 = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        const PhiModule m2 = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        const int t = 6 + static_cast<int>(rng.below(5));
        CHECK(hom_space(m1, m2).size() ==
              hom_space(lift_object(m1, t), lift_object(m2, t)).size());
    }
}

TEST_CASE("truncation preserves exactness") {
    Rng rng(26);
    for (int it = 0; it < 15; ++it) {
        const RingParams params(3, 2, 1, 6);
        const PhiModule m1 = random_object_rng(rng, params, 1);
        const PhiModule m2 = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        const ShortExactSeq seq =
            build_extension(m1, m2, random_matrix(rng, 3, 6, m2.rank(), m1.rank()));
        for (int s_new = 3; s_new < 6; ++s_new)
            CHECK(!exactness_failure(truncate_sequence(seq, s_new)).has_value());
    }
}

TEST_SUITE_END();
