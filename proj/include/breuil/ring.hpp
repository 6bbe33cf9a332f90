#pragma once

#include <limits>
#include <string>
#include <vector>

#include "breuil/errors.hpp"

namespace breuil {

// Valuation of the zero element.  Distinguished from every attainable
// valuation (which is always < s).
inline constexpr int val_infinity = std::numeric_limits<int>::max();

bool is_prime(int n);

// Element of F_p[u]/u^s, stored as exactly s coefficients in [0, p),
// index i = coefficient of u^i.  Immutable in spirit: all operations
// return fresh values.
class TruncPoly {
public:
    TruncPoly() = default;  // invalid placeholder, field_char() == 0
    TruncPoly(int p, int s);
    TruncPoly(int p, int s, const std::vector<long>& coeffs);

    static TruncPoly constant(int p, int s, long value);
    static TruncPoly u_power(int p, int s, int k);  // u^k, zero when k >= s

    bool valid() const { return p_ >= 2; }
    int field_char() const { return p_; }
    int order() const { return static_cast<int>(coeff_.size()); }

    int coeff(int i) const {
        return (i >= 0 && i < order()) ? coeff_[static_cast<size_t>(i)] : 0;
    }
    void set_coeff(int i, long value);

    bool is_zero() const;
    bool is_unit() const { return coeff(0) != 0; }

    bool operator==(const TruncPoly& o) const {
        return p_ == o.p_ && coeff_ == o.coeff_;
    }
    bool operator!=(const TruncPoly& o) const { return !(*this == o); }

    TruncPoly operator+(const TruncPoly& o) const;
    TruncPoly operator-(const TruncPoly& o) const;
    TruncPoly operator*(const TruncPoly& o) const;
    TruncPoly operator-() const;
    TruncPoly times_scalar(long v) const;

    std::string to_string() const;  // e.g. "1 + 2*u + u^3"

private:
    void check_compatible(const TruncPoly& o) const;

    int p_ = 0;
    std::vector<int> coeff_;
};

// phi(sum a_i u^i) = sum a_i u^{p i}; the coefficient action is trivial
// because the field is F_p.  Ring homomorphism.
TruncPoly frobenius(const TruncPoly& a);
TruncPoly frobenius_iter(const TruncPoly& a, int n);

// Index of the least nonzero coefficient; val_infinity for zero.
int u_valuation(const TruncPoly& a);

// Inverse of a unit, exact in F_p[u]/u^s.  Throws NotAUnit.
TruncPoly invert_unit(const TruncPoly& a);

// The monodromy derivation N = -u d/du, so N(u) = -u.  Satisfies the
// Leibniz rule N(ab) = N(a)b + aN(b) and kills constants.
TruncPoly derivation_n(const TruncPoly& a);

TruncPoly truncate_poly(const TruncPoly& a, int s_new);   // s_new <= s
TruncPoly lift_poly(const TruncPoly& a, int s_new);       // s_new >= s, zero padding
TruncPoly shift_right(const TruncPoly& a, int k);         // exact division by u^k
TruncPoly pow(const TruncPoly& a, int n);

// dim_{F_p} of Fil^a T_s / Fil^b T_s where Fil^a T_s = u^{ea} T_s.
// Equals min(e*b, s) - min(e*a, s).  Throws InvalidLevels when a > b.
int fil_quotient_dim(int a, int b, int e, int s);

// The arithmetic context (p, e, r, s, c).  Validated on construction:
// p prime, e*r <= p-1, p <= s <= e*p, c a unit.
struct RingParams {
    int p = 0;
    int e = 0;
    int r = 0;
    int s = 0;
    TruncPoly c;

    RingParams() = default;
    RingParams(int p, int e, int r, int s);                      // c = 1
    RingParams(int p, int e, int r, int s, const TruncPoly& c);

    int er() const { return e * r; }
    bool boundary() const { return er() == p - 1; }
    bool strict() const { return er() < p - 1; }

    TruncPoly c_pow_r() const { return pow(c, r); }
    TruncPoly zero() const { return TruncPoly(p, s); }
    TruncPoly one() const { return TruncPoly::constant(p, s, 1); }

    // Same parameters at a different truncation order; c is truncated or
    // zero-padded (the minimal-degree lift).
    RingParams with_order(int s_new) const;

    bool operator==(const RingParams& o) const {
        return p == o.p && e == o.e && r == o.r && s == o.s && c == o.c;
    }
    bool operator!=(const RingParams& o) const { return !(*this == o); }
};

}  // namespace breuil
