#pragma once

#include "breuil/phimod.hpp"

namespace breuil {

struct KernelResult {
    PhiModule module;
    PhiMorphism inclusion;
};
struct ImageResult {
    PhiModule module;
    PhiMorphism epi;   // source ->> image
    PhiMorphism mono;  // image -> target
};
struct CokernelResult {
    PhiModule module;
    PhiMorphism projection;
};

// Constructive kernel/image/cokernel.  At s = p the construction is direct
// (phi(X) has constant entries).  At s > p everything is transported
// through level p: truncate, construct, lift — and in the boundary regime
// er = p-1 this is only available when both endpoints are unipotent
// (RegimeViolation otherwise).
KernelResult kernel(const PhiMorphism& f);
ImageResult image(const PhiMorphism& f);
CokernelResult cokernel(const PhiMorphism& f);

struct ExactnessReport {
    bool pass = false;
    std::string detail;  // first failing condition when !pass
};
ExactnessReport check_exact(const ShortExactSeq& seq);

// Extension of m2 by m1 presented by [[A1, 0], [u^{er} C0, A2]] with the
// block cofactor; the returned sequence is checked exact.
ShortExactSeq build_extension(const PhiModule& m1, const PhiModule& m2, const Matrix& c0);
// Same with an arbitrary lower-left block; throws NotAPresentation when the
// block matrix admits no two-sided cofactor.
ShortExactSeq build_extension_general(const PhiModule& m1, const PhiModule& m2,
                                      const Matrix& lower_left);

// h with compose(h, inc) = g, when it exists (for kernel universal
// properties); unique automatically since inc is monic.
std::optional<PhiMorphism> factor_through_mono(const PhiMorphism& g, const PhiMorphism& inc);
// h with compose(proj, h) = g, when it exists (for cokernel universal
// properties).
std::optional<PhiMorphism> factor_through_epi(const PhiMorphism& g, const PhiMorphism& proj);

}  // namespace breuil
