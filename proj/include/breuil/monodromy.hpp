#pragma once

#include "breuil/phimod.hpp"

namespace breuil {

// p-torsion Breuil module presented over T_{ep}: the underlying
// phi-module must sit at s = e*p with r < p-1, and n_op stores the
// monodromy operator on the basis, N(m_i) = row i of n_op.  N extends to
// the whole module by the Leibniz rule over the derivation N(u) = -u.
struct MonodromyModule {
    PhiModule base;
    Matrix n_op;
};

// Throws RankViolation when r >= p-1 and LevelViolation when s != e*p.
MonodromyModule make_monodromy_module(const PhiModule& base, const Matrix& n_op);

// N(v) = derivation applied coefficientwise + v * n_op.
PolyRow apply_n(const MonodromyModule& m, const PolyRow& v);

struct MonodromyReport {
    bool fil_stable = false;   // u^e N(Fil) inside Fil, generator by generator
    bool diagram = false;      // phi_r(u^e N(x)) = c N(phi_r(x)) on generators
    std::string detail;
    bool pass() const { return fil_stable && diagram; }
};
MonodromyReport check_monodromy(const MonodromyModule& m);

// Base change a -> v a phi(v)^{-1} with the operator transported along:
// the new basis is phi(v)*(old basis), so the operator matrix becomes
// (N(phi(v)) + phi(v) * n_op) * phi(v)^{-1}.
MonodromyModule transport_monodromy(const MonodromyModule& m, const Matrix& v);

}  // namespace breuil
