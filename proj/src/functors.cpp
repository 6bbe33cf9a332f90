#include "breuil/functors.hpp"

#include <string>

namespace breuil {

LevelPair make_level_pair(const RingParams& params, int t, int s) {
    if (!(params.e * params.p >= t && t > s && s >= params.p))
        throw LevelViolation("levels must satisfy e*p >= t > s >= p, got t = " + std::to_string(t) +
                             ", s = " + std::to_string(s));
    LevelPair out{t, s, LiftRegime::strict_ramification};
    if (params.boundary()) out.regime = s > params.p ? LiftRegime::boundary_deep : LiftRegime::boundary_unipotent;
    return out;
}

PhiModule truncate_object(const PhiModule& m, int s_new) {
    make_level_pair(m.params, m.params.s, s_new);
    return validate_object(m.params.with_order(s_new), m.a.truncated(s_new));
}

PhiMorphism truncate_morphism(const PhiMorphism& f, int s_new) {
    const PhiModule src = truncate_object(f.source, s_new);
    const PhiModule tgt = truncate_object(f.target, s_new);
    return morphism_from_x(src, tgt, f.x.truncated(s_new));
}

ShortExactSeq truncate_sequence(const ShortExactSeq& seq, int s_new) {
    return ShortExactSeq{truncate_object(seq.left, s_new), truncate_object(seq.middle, s_new),
                         truncate_object(seq.right, s_new), truncate_morphism(seq.inj, s_new),
                         truncate_morphism(seq.surj, s_new)};
}

PhiModule lift_object(const PhiModule& m, int t) {
    const LevelPair levels = make_level_pair(m.params, t, m.params.s);
    if (levels.regime == LiftRegime::boundary_unipotent && !is_unipotent(m))
        throw RegimeViolation("lift_object: at er = p-1 only unipotent objects lift from s = p");
    const RingParams params_t = m.params.with_order(t);
    PhiModule lifted = validate_object(params_t, m.a.lifted(t));
    if (lifted.a.truncated(m.params.s) != m.a)
        throw InternalCheckFailed("lift_object: round trip is not bit-exact");
    if (levels.regime == LiftRegime::boundary_unipotent && !is_unipotent(lifted))
        throw InternalCheckFailed("lift_object: lift of a unipotent object is not unipotent");
    return lifted;
}

PhiMorphism lift_morphism(const PhiMorphism& f, const PhiModule& m1_lift, const PhiModule& m2_lift) {
    const RingParams& params_s = f.source.params;
    const RingParams& params_t = m1_lift.params;
    if (m1_lift.params != m2_lift.params) throw ParamMismatch("lift_morphism: lifted endpoints disagree");
    const int s = params_s.s, t = params_t.s, p = params_s.p, er = params_s.er();
    make_level_pair(params_s, t, s);
    if (truncate_object(m1_lift, s) != f.source || truncate_object(m2_lift, s) != f.target)
        throw LevelViolation("lift_morphism: given objects do not lift the endpoints of f");
    if (params_s.boundary() && s == p && !is_unipotent(m1_lift))
        throw RegimeViolation("lift_morphism: at er = p-1, s = p requires a unipotent source");

    const Matrix& a1 = m1_lift.a;
    const Matrix& a2 = m2_lift.a;
    const Matrix& b2 = m2_lift.b;
    const int d1 = f.source.rank(), d2 = f.target.rank();

    Matrix x = f.x.lifted(t);
    Matrix defect = a1 * frobenius(x) - x * a2;
    if (defect.is_zero()) return morphism_from_x(m1_lift, m2_lift, x);
    if (!defect.divisible_by_u_power(s))
        throw InternalCheckFailed("lift_morphism: defect not divisible by u^s");
    const Matrix q = defect.shift_right(s);

    // x_hat = x + u^{s-er} Q B2
    //           + sum_n u^{E_n} [A1 phi(A1)...phi^{n-1}(A1)] phi^n(Q)
    //                   [phi^n(B2)...phi(B2) B2],  E_n = p E_{n-1} - er.
    // Every summand is a pure product, so the running equation error can be
    // checked exactly; it is the phi-twist of the last correction and dies
    // either by valuation or with the unipotent partial product.
    x = x + q.times_u_power(s - er) * b2;
    long exponent = s - er;
    Matrix prefix = a1;                 // A1 phi(A1) ... phi^n(A1)
    Matrix a1_twist = a1;
    Matrix q_twist = q;
    Matrix b_chain = b2;                // phi^n(B2) ... phi(B2) B2
    const int max_terms = 4 * (t + d1 + d2 + 4);
    bool converged = false;
    for (int n = 0; n < max_terms; ++n) {
        if ((a1 * frobenius(x) - x * a2).is_zero()) { converged = true; break; }
        exponent = exponent * p - er;
        if (exponent > t) exponent = t;  // u^{>=t} = 0, and the recurrence is monotone
        q_twist = frobenius(q_twist);
        b_chain = frobenius(b_chain) * b2;
        if (exponent < t && !prefix.is_zero())
            x = x + (prefix * q_twist * b_chain).times_u_power(static_cast<int>(exponent));
        a1_twist = frobenius(a1_twist);
        prefix = prefix * a1_twist;
    }
    if (!converged && !(a1 * frobenius(x) - x * a2).is_zero())
        throw VerificationFailed("lift_morphism: correction series did not terminate");

    PhiMorphism lifted = morphism_from_x(m1_lift, m2_lift, x);
    if (lifted.phi_x.truncated(s) != f.phi_x)
        throw VerificationFailed("lift_morphism: lift does not reduce to f");
    return lifted;
}

}  // namespace breuil
