#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "breuil/linalg.hpp"
#include "breuil/ring.hpp"

namespace breuil {

// Object of the category of filtered phi-modules over T_s: a free module
// of rank d whose filtration is the row span of the presentation matrix a,
// with phi_r sending row i of a to c^r times basis vector i.  The cofactor
// b certifies a*b = b*a = u^{er}*Id.
struct PhiModule {
    RingParams params;
    Matrix a;
    Matrix b;

    int rank() const { return a.rows(); }
    bool operator==(const PhiModule& o) const { return params == o.params && a == o.a; }
    bool operator!=(const PhiModule& o) const { return !(*this == o); }
};

// Checks the parameter regime, the shape of a, and computes the two-sided
// cofactor.  Throws ParamViolation / NotAPresentation.
PhiModule validate_object(const RingParams& params, const Matrix& a);
PhiModule zero_object(const RingParams& params);
PhiModule direct_sum(const PhiModule& m1, const PhiModule& m2);

// Sorted invariant exponents of the presentation (the adapted shape of Fil).
std::vector<int> invariant_exponents(const PhiModule& m);
bool is_multiplicative(const PhiModule& m);  // all exponents er
bool is_etale(const PhiModule& m);           // all exponents 0

// Coordinates of phi_r(gamma) for gamma in Fil(m): write gamma = t*a and
// return c^r*phi(t).  Well defined across choices of t.
PolyRow phi_r_apply(const PhiModule& m, const PolyRow& gamma);

// Presentation of a rank-n object from filtration generators and a phi_r
// evaluator, both expressed in a fixed ambient basis.  basis holds the new
// basis rows (phi_r(adapted generator)/c^r) in ambient coordinates.
struct NormalizedPresentation {
    Matrix a;
    Matrix basis;
    std::vector<int> exponents;
};
NormalizedPresentation normalize_presentation(
    const RingParams& params, int n, const Matrix& fil_gens,
    const std::function<PolyRow(const PolyRow&)>& phi_r_eval);

// Morphism class f: source -> target.  phi_x is the matrix of f on the
// presentation bases (the canonical representative); x satisfies
// a_source * phi(x) = x * a_target and phi(x) = phi_x.  Equality of
// morphisms is equality of phi_x.
struct PhiMorphism {
    PhiModule source;
    PhiModule target;
    Matrix x;
    Matrix phi_x;
};

PhiMorphism identity_morphism(const PhiModule& m);
PhiMorphism zero_morphism(const PhiModule& src, const PhiModule& tgt);

// Builds the morphism with basis matrix y by solving x*a_tgt = a_src*y and
// verifying phi(x) = y; throws VerificationFailed when y is not a morphism.
PhiMorphism morphism_from_phi_x(const PhiModule& src, const PhiModule& tgt, const Matrix& y);
// Builds from a solution x of the semilinear equation (phi_x := phi(x)).
PhiMorphism morphism_from_x(const PhiModule& src, const PhiModule& tgt, const Matrix& x);

PhiMorphism compose(const PhiMorphism& f, const PhiMorphism& g);  // f then g
bool same_morphism(const PhiMorphism& f, const PhiMorphism& g);
bool is_zero_morphism(const PhiMorphism& f);

// True iff phi_x is invertible over T_s, i.e. f is an isomorphism.
bool is_iso_morphism(const PhiMorphism& f);
// Inverse of an isomorphism; throws NotInvertible otherwise.
PhiMorphism inverse_iso(const PhiMorphism& f);

// F_p-basis of Hom(m1, m2), canonical phi_x representatives.
std::vector<PhiMorphism> hom_space(const PhiModule& m1, const PhiModule& m2);

// Cartier duality.  pairing expresses the dual's presentation basis in the
// coordinate dual of the original basis (rows = basis vectors), which is
// what certifies the construction against the defining pairing and lets
// morphisms dualize.
struct DualData {
    PhiModule module;
    Matrix pairing;
};
DualData cartier_dual_with_pairing(const PhiModule& m);
PhiModule cartier_dual(const PhiModule& m);
PhiMorphism dual_morphism(const PhiMorphism& f);
// The canonical evaluation isomorphism M -> M^{vv}.
PhiMorphism bidual_iso(const PhiModule& m);

struct SubmoduleWithInclusion {
    PhiModule module;
    PhiMorphism inclusion;
};
struct QuotientWithProjection {
    PhiModule module;
    PhiMorphism projection;
};

// Maximal multiplicative submodule: stabilizes W -> span(phi_r(u^{er} W))
// starting from the whole module.
SubmoduleWithInclusion max_multiplicative(const PhiModule& m);

// Quotient of m by the free direct summand spanned by the rows of sub_gens
// (adapted exponents 0 or s), carrying the induced filtration and phi_r.
// The summand must be phi_r-stable on its filtration for the quotient to
// make sense; violations surface as InternalCheckFailed.
QuotientWithProjection quotient_by_free_summand(const PhiModule& m, const Matrix& sub_gens);

struct PartsDecomposition {
    PhiModule m_part;
    PhiMorphism m_inclusion;
    PhiModule nil_quotient;
    PhiMorphism nil_projection;
    PhiModule uni_part;
    PhiMorphism uni_inclusion;
    PhiModule et_quotient;
    PhiMorphism et_projection;
};
// Multiplicative/nilpotent and unipotent/etale decompositions; both rows
// are verified exact before returning.
PartsDecomposition parts(const PhiModule& m);

// Dual-based test (the definition) cross-checked against the partial
// products A phi(A) ... phi^N(A); disagreement throws CriteriaDisagree.
bool is_unipotent(const PhiModule& m);

// Searches Hom(m1, m2) for an invertible element: basis vectors, seeded
// random combinations, then exhaustive enumeration of the reduced span
// when dim <= 12.  Throws SearchInconclusive above that when the random
// search fails.
std::optional<PhiMorphism> is_isomorphic(const PhiModule& m1, const PhiModule& m2,
                                         uint64_t seed = 0x5eed);

// Conjugation by an invertible basis change v: a -> v*a*phi(v)^{-1}.
// Returns the new object and the isomorphism from m onto it.
struct TransportedObject {
    PhiModule module;
    PhiMorphism iso;
};
TransportedObject transport_object(const PhiModule& m, const Matrix& v);

struct ShortExactSeq {
    PhiModule left, middle, right;
    PhiMorphism inj;   // left -> middle
    PhiMorphism surj;  // middle -> right
};
// First failing exactness condition (module level and filtration level),
// or nullopt when the sequence is short exact.
std::optional<std::string> exactness_failure(const ShortExactSeq& seq);

}  // namespace breuil
