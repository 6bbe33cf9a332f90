#pragma once

#include "breuil/phimod.hpp"

namespace breuil {

// The three regimes in which lowering the truncation order is invertible:
// er < p-1 everywhere; er = p-1 between orders above p; er = p-1 down to
// order p on unipotent objects only.
enum class LiftRegime { strict_ramification, boundary_deep, boundary_unipotent };

struct LevelPair {
    int t = 0;
    int s = 0;
    LiftRegime regime = LiftRegime::strict_ramification;
};
// Validates e*p >= t > s >= p and classifies the regime.
LevelPair make_level_pair(const RingParams& params, int t, int s);

// Reduce every entry mod u^{s_new}.  Functorial and always defined.
PhiModule truncate_object(const PhiModule& m, int s_new);
PhiMorphism truncate_morphism(const PhiMorphism& f, int s_new);
ShortExactSeq truncate_sequence(const ShortExactSeq& seq, int s_new);

// Minimal-degree entrywise lift to order t; the result truncates back to m
// bit-exactly.  Boundary regime at s = p demands a unipotent object.
PhiModule lift_object(const PhiModule& m, int t);

// Lift f between given lifts of its endpoints, correcting the defect with
// the convergent series and verifying the exact semilinear equation.
PhiMorphism lift_morphism(const PhiMorphism& f, const PhiModule& m1_lift, const PhiModule& m2_lift);

}  // namespace breuil
