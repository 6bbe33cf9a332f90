#pragma once

#include <optional>
#include <string>

#include "breuil/monodromy.hpp"
#include "breuil/phimod.hpp"
#include "breuil/rng.hpp"

namespace breuil {

// Document formats (JSON, sorted keys, coefficients low-to-high with
// trailing zeros trimmed in canonical output; the parser accepts untrimmed
// arrays up to length s):
//   breuil-phimod/1    {format, p, e, r, s, d, c, A[, N]}
//   breuil-morphism/1  {format, source, target, X}
//   breuil-seq/1       {format, left, middle, right, injX, surjX}
//   breuil-matrix/1    {format, p, s, entries}

std::string serialize_module(const PhiModule& m);
std::string serialize_monodromy(const MonodromyModule& m);
std::string serialize_morphism(const PhiMorphism& f);
std::string serialize_sequence(const ShortExactSeq& seq);
std::string serialize_matrix(const Matrix& m);

struct ParsedModule {
    PhiModule module;
    std::optional<Matrix> n_op;  // present iff the document carries N

    MonodromyModule monodromy() const {
        if (!n_op) throw ValidationError("document carries no monodromy operator");
        return make_monodromy_module(module, *n_op);
    }
};

ParsedModule parse_module(const std::string& text);     // ParseError / ValidationError
PhiMorphism parse_morphism(const std::string& text);
ShortExactSeq parse_sequence(const std::string& text);
Matrix parse_matrix(const std::string& text);

// Seeded generation (SplitMix64 streams; identical seeds give identical
// presentations on every platform).
TruncPoly random_poly(Rng& rng, int p, int s);
TruncPoly random_unit(Rng& rng, int p, int s);
Matrix random_matrix(Rng& rng, int p, int s, int rows, int cols);
Matrix random_invertible(Rng& rng, int p, int s, int n);

// A = diag(u^{x_i}) * P with x_i uniform in [0, er] and P a product of
// random elementary and diagonal-unit matrices.
PhiModule random_object(uint64_t seed, const RingParams& params, int rank);
PhiModule random_object_rng(Rng& rng, const RingParams& params, int rank);
// Unipotent sampler: rejection first, then an iterated-extension fallback.
PhiModule random_unipotent_object_rng(Rng& rng, const RingParams& params, int rank);
// Random element of Hom(m1, m2) (zero when the space is trivial).
PhiMorphism random_morphism_rng(Rng& rng, const PhiModule& m1, const PhiModule& m2);

}  // namespace breuil
