#include <doctest.h>

#include "breuil/abelian.hpp"
#include "breuil/io.hpp"

using namespace breuil;

TEST_SUITE_BEGIN("io");

TEST_CASE("documented minimal module document") {
    const std::string doc =
        R"({"format":"breuil-phimod/1","p":3,"e":2,"r":1,"s":6,"d":1,"c":[1],"A":[[[0,0,1]]]})";
    const ParsedModule pm = parse_module(doc);
    CHECK(pm.module.rank() == 1);
    CHECK(is_multiplicative(pm.module));
    CHECK(!pm.n_op.has_value());
}

TEST_CASE("validation and parse failures are distinguished") {
    CHECK_THROWS_AS(
        parse_module(
            R"({"format":"breuil-phimod/1","p":3,"e":1,"r":3,"s":3,"d":0,"c":[1],"A":[]})"),
        ValidationError);
    CHECK_THROWS_AS(parse_module("{\"format\": \"breuil-ph"), ParseError);
    CHECK_THROWS_AS(parse_module(R"({"format":"breuil-phimod/2","p":3})"), ParseError);
    CHECK_THROWS_AS(
        parse_module(
            R"({"format":"breuil-phimod/1","p":3,"e":2,"r":1,"s":6,"d":1,"c":[1],"A":[[[0,0,5]]]})"),
        ParseError);  // coefficient out of range
    CHECK_THROWS_AS(
        parse_module(
            R"({"format":"breuil-phimod/1","p":3,"e":2,"r":1,"s":6,"d":1,"c":[1],"A":[[[0,0,0,1]]]})"),
        ValidationError);  // u^3 is not a presentation at er = 2
}

TEST_CASE("module round trip is bit-exact and canonical") {
    Rng rng(71);
    for (int it = 0; it < 60; ++it) {
        const int p = it % 2 ? 3 : 5;
        const int s = p + static_cast<int>(rng.below(static_cast<uint64_t>(p + 1)));
        Rng crng = rng.split(static_cast<uint64_t>(it));
        const RingParams params =
            it % 3 ? RingParams(p, 2, 1, s) : RingParams(p, 2, 1, s, random_unit(crng, p, s));
        const PhiModule m = random_object_rng(rng, params, static_cast<int>(rng.below(4)));
        const std::string text = serialize_module(m);
        CHECK(parse_module(text).module == m);
        CHECK(serialize_module(parse_module(text).module) == text);
    }
}

TEST_CASE("morphism and sequence round trips") {
    Rng rng(72);
    const RingParams params(3, 2, 1, 6);
    for (int it = 0; it < 20; ++it) {
        const PhiModule m1 = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        const PhiModule m2 = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        const PhiMorphism f = random_morphism_rng(rng, m1, m2);
        const PhiMorphism back = parse_morphism(serialize_morphism(f));
        CHECK(same_morphism(f, back));
        CHECK(back.x == f.x);

        const ShortExactSeq seq =
            build_extension(m1, m2, random_matrix(rng, 3, 6, m2.rank(), m1.rank()));
        const ShortExactSeq sq = parse_sequence(serialize_sequence(seq));
        CHECK(sq.middle == seq.middle);
        CHECK(same_morphism(sq.inj, seq.inj));
        CHECK(same_morphism(sq.surj, seq.surj));
        CHECK(check_exact(sq).pass);
    }
}

TEST_CASE("monodromy documents round trip") {
    Rng rng(73);
    const RingParams params(3, 2, 1, 6);
    for (int it = 0; it < 10; ++it) {
        const PhiModule base = random_object_rng(rng, params, 1 + static_cast<int>(rng.below(2)));
        const MonodromyModule mm =
            make_monodromy_module(base, random_matrix(rng, 3, 6, base.rank(), base.rank()));
        const std::string text = serialize_monodromy(mm);
        const ParsedModule back = parse_module(text);
        REQUIRE(back.n_op.has_value());
        CHECK(back.module == base);
        CHECK(*back.n_op == mm.n_op);
        CHECK(serialize_monodromy(back.monodromy()) == text);
    }
}

TEST_CASE("malformed documents never crash the parser") {
    const std::vector<std::string> bad = {
        "",
        "42",
        "[]",
        R"({"format":"breuil-phimod/1"})",
        R"({"format":"breuil-phimod/1","p":"three","e":2,"r":1,"s":6,"d":1,"c":[1],"A":[[[1]]]})",
        R"({"format":"breuil-phimod/1","p":3,"e":2,"r":1,"s":6,"d":2,"c":[1],"A":[[[1]]]})",
        R"({"format":"breuil-phimod/1","p":3,"e":2,"r":1,"s":6,"d":-1,"c":[1],"A":[]})",
        R"({"format":"breuil-phimod/1","p":3,"e":2,"r":1,"s":6,"d":1,"c":[0],"A":[[[1]]]})",
        R"({"format":"breuil-phimod/1","p":3,"e":2,"r":1,"s":6,"d":1,"c":[1],"A":[[[1,1,1,1,1,1,1]]]})",
        R"({"format":"breuil-phimod/1","p":3,"e":2,"r":1,"s":6,"d":1,"c":[1],"A":[[[1]]],"N":[[[1],[1]]]})",
        R"({"format":"breuil-phimod/1","p":3,"e":2,"r":1,"s":5,"d":1,"c":[1],"A":[[[1]]],"N":[[[1]]]})",
        R"({"format":"breuil-morphism/1","source":{},"target":{},"X":[]})",
    };
    for (const std::string& doc : bad) {
        bool threw = false;
        try {
            parse_module(doc);
        } catch (const ParseError&) {
            threw = true;
        } catch (const ValidationError&) {
            threw = true;
        }
        CHECK(threw);
    }
    CHECK_THROWS_AS(parse_morphism(R"({"format":"breuil-morphism/1","source":{},"target":{},"X":[]})"),
                    ParseError);
}

TEST_CASE("random generation is deterministic in the seed") {
    const RingParams params(3, 2, 1, 6);
    const PhiModule a = random_object(12345, params, 3);
    const PhiModule b = random_object(12345, params, 3);
    CHECK(a == b);
    const PhiModule c = random_object(12346, params, 3);
    CHECK(a != c);
    CHECK(random_object(9, params, 0).rank() == 0);
}

TEST_CASE("random objects validate across the grids") {
    Rng rng(74);
    for (int it = 0; it < 100; ++it) {
        const RingParams params(3, 2, 1, 6);
        const PhiModule m = random_object_rng(rng, params, 3);
        CHECK(m.rank() == 3);  // construction already validated
        const std::vector<int> exps = invariant_exponents(m);
        for (int x : exps) CHECK(x <= params.er());
    }
}

TEST_SUITE_END();
