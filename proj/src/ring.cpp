#include "breuil/ring.hpp"

#include <sstream>

namespace breuil {

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

namespace {
int mod_p(long v, int p) {
    long m = v % p;
    if (m < 0) m += p;
    return static_cast<int>(m);
}
}  // namespace

TruncPoly::TruncPoly(int p, int s) : p_(p), coeff_(static_cast<size_t>(s), 0) {
    if (p < 2 || s < 1) throw ParamViolation("TruncPoly requires p >= 2 and s >= 1");
}

TruncPoly::TruncPoly(int p, int s, const std::vector<long>& coeffs) : TruncPoly(p, s) {
    if (static_cast<int>(coeffs.size()) > s)
        throw ParamViolation("coefficient list longer than truncation order");
    for (size_t i = 0; i < coeffs.size(); ++i)
        coeff_[i] = mod_p(coeffs[i], p);
}

TruncPoly TruncPoly::constant(int p, int s, long value) {
    TruncPoly out(p, s);
    out.coeff_[0] = mod_p(value, p);
    return out;
}

TruncPoly TruncPoly::u_power(int p, int s, int k) {
    if (k < 0) throw ParamViolation("u_power: negative exponent");
    TruncPoly out(p, s);
    if (k < s) out.coeff_[static_cast<size_t>(k)] = 1;
    return out;
}

void TruncPoly::set_coeff(int i, long value) {
    if (i < 0 || i >= order()) throw ParamViolation("set_coeff: index out of range");
    coeff_[static_cast<size_t>(i)] = mod_p(value, p_);
}

bool TruncPoly::is_zero() const {
    for (int c : coeff_)
        if (c != 0) return false;
    return true;
}

void TruncPoly::check_compatible(const TruncPoly& o) const {
    if (p_ != o.p_ || order() != o.order())
        throw ParamMismatch("TruncPoly operands live in different rings");
}

TruncPoly TruncPoly::operator+(const TruncPoly& o) const {
    check_compatible(o);
    TruncPoly out(p_, order());
    for (int i = 0; i < order(); ++i)
        out.coeff_[static_cast<size_t>(i)] = mod_p(coeff_[static_cast<size_t>(i)] + o.coeff_[static_cast<size_t>(i)], p_);
    return out;
}

TruncPoly TruncPoly::operator-(const TruncPoly& o) const {
    check_compatible(o);
    TruncPoly out(p_, order());
    for (int i = 0; i < order(); ++i)
        out.coeff_[static_cast<size_t>(i)] = mod_p(coeff_[static_cast<size_t>(i)] - o.coeff_[static_cast<size_t>(i)], p_);
    return out;
}

TruncPoly TruncPoly::operator*(const TruncPoly& o) const {
    check_compatible(o);
    const int s = order();
    TruncPoly out(p_, s);
    for (int i = 0; i < s; ++i) {
        if (coeff_[static_cast<size_t>(i)] == 0) continue;
        for (int j = 0; i + j < s; ++j) {
            if (o.coeff_[static_cast<size_t>(j)] == 0) continue;
            long acc = out.coeff_[static_cast<size_t>(i + j)];
            acc += static_cast<long>(coeff_[static_cast<size_t>(i)]) * o.coeff_[static_cast<size_t>(j)];
            out.coeff_[static_cast<size_t>(i + j)] = mod_p(acc, p_);
        }
    }
    return out;
}

TruncPoly TruncPoly::operator-() const {
    TruncPoly out(p_, order());
    for (int i = 0; i < order(); ++i)
        out.coeff_[static_cast<size_t>(i)] = mod_p(-coeff_[static_cast<size_t>(i)], p_);
    return out;
}

TruncPoly TruncPoly::times_scalar(long v) const {
    TruncPoly out(p_, order());
    const int m = mod_p(v, p_);
    for (int i = 0; i < order(); ++i)
        out.coeff_[static_cast<size_t>(i)] = mod_p(static_cast<long>(coeff_[static_cast<size_t>(i)]) * m, p_);
    return out;
}

std::string TruncPoly::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < order(); ++i) {
        const int c = coeff(i);
        if (c == 0) continue;
        if (!first) os << " + ";
        if (i == 0)
            os << c;
        else if (c == 1)
            os << "u" << (i > 1 ? "^" + std::to_string(i) : "");
        else
            os << c << "*u" << (i > 1 ? "^" + std::to_string(i) : "");
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

TruncPoly frobenius(const TruncPoly& a) {
    const int s = a.order();
    TruncPoly out(a.field_char(), s);
    for (int i = 0; i * a.field_char() < s && i < s; ++i)
        out.set_coeff(i * a.field_char(), a.coeff(i));
    return out;
}

TruncPoly frobenius_iter(const TruncPoly& a, int n) {
    TruncPoly out = a;
    for (int i = 0; i < n; ++i) out = frobenius(out);
    return out;
}

int u_valuation(const TruncPoly& a) {
    for (int i = 0; i < a.order(); ++i)
        if (a.coeff(i) != 0) return i;
    return val_infinity;
}

TruncPoly invert_unit(const TruncPoly& a) {
    if (!a.is_unit()) throw NotAUnit("invert_unit: constant term vanishes");
    const int p = a.field_char(), s = a.order();
    // Solve b coefficient by coefficient against a*b = 1 (lower triangular).
    int a0_inv = 0;
    for (int x = 1; x < p; ++x)
        if ((a.coeff(0) * x) % p == 1) { a0_inv = x; break; }
    TruncPoly b(p, s);
    b.set_coeff(0, a0_inv);
    for (int n = 1; n < s; ++n) {
        long acc = 0;
        for (int i = 1; i <= n; ++i) acc += static_cast<long>(a.coeff(i)) * b.coeff(n - i);
        b.set_coeff(n, -(static_cast<long>(a0_inv) * (acc % p)));
    }
    return b;
}

TruncPoly derivation_n(const TruncPoly& a) {
    TruncPoly out(a.field_char(), a.order());
    for (int i = 1; i < a.order(); ++i)
        out.set_coeff(i, static_cast<long>(-i) * a.coeff(i));
    return out;
}

TruncPoly truncate_poly(const TruncPoly& a, int s_new) {
    if (s_new < 1 || s_new > a.order()) throw LevelViolation("truncate_poly: bad target order");
    TruncPoly out(a.field_char(), s_new);
    for (int i = 0; i < s_new; ++i) out.set_coeff(i, a.coeff(i));
    return out;
}

TruncPoly lift_poly(const TruncPoly& a, int s_new) {
    if (s_new < a.order()) throw LevelViolation("lift_poly: bad target order");
    TruncPoly out(a.field_char(), s_new);
    for (int i = 0; i < a.order(); ++i) out.set_coeff(i, a.coeff(i));
    return out;
}

TruncPoly shift_right(const TruncPoly& a, int k) {
    if (k == 0) return a;
    if (k < 0) throw ParamViolation("shift_right: negative shift");
    TruncPoly out(a.field_char(), a.order());
    for (int i = 0; i < k && i < a.order(); ++i)
        if (a.coeff(i) != 0)
            throw ParamViolation("shift_right: element not divisible by u^" + std::to_string(k));
    for (int i = k; i < a.order(); ++i) out.set_coeff(i - k, a.coeff(i));
    return out;
}

TruncPoly pow(const TruncPoly& a, int n) {
    if (n < 0) return pow(invert_unit(a), -n);
    TruncPoly out = TruncPoly::constant(a.field_char(), a.order(), 1);
    for (int i = 0; i < n; ++i) out = out * a;
    return out;
}

int fil_quotient_dim(int a, int b, int e, int s) {
    if (a < 0 || a > b) throw InvalidLevels("fil_quotient_dim requires 0 <= a <= b");
    if (e < 1 || s < 1) throw ParamViolation("fil_quotient_dim requires e >= 1, s >= 1");
    auto clip = [&](long x) { return static_cast<int>(x < s ? x : s); };
    return clip(static_cast<long>(e) * b) - clip(static_cast<long>(e) * a);
}

RingParams::RingParams(int p_, int e_, int r_, int s_)
    : RingParams(p_, e_, r_, s_, TruncPoly::constant(p_, s_, 1)) {}

RingParams::RingParams(int p_, int e_, int r_, int s_, const TruncPoly& c_)
    : p(p_), e(e_), r(r_), s(s_), c(c_) {
    if (!is_prime(p)) throw ParamViolation("p = " + std::to_string(p) + " is not prime");
    if (e < 1 || r < 1) throw ParamViolation("e and r must be >= 1");
    if (e * r > p - 1)
        throw ParamViolation("regime violated: e*r = " + std::to_string(e * r) +
                             " > p-1 = " + std::to_string(p - 1));
    if (s < p || s > e * p)
        throw ParamViolation("truncation order must satisfy p <= s <= e*p, got s = " +
                             std::to_string(s));
    if (c.field_char() != p || c.order() != s)
        throw ParamViolation("unit c does not live in T_s");
    if (!c.is_unit()) throw ParamViolation("c must be a unit of T_s");
}

RingParams RingParams::with_order(int s_new) const {
    TruncPoly c_new = s_new <= s ? truncate_poly(c, s_new) : lift_poly(c, s_new);
    return RingParams(p, e, r, s_new, c_new);
}

}  // namespace breuil
