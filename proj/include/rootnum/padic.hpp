#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <rootnum/errors.hpp>
#include <rootnum/numeric.hpp>

namespace rootnum {

/// An l-adic valuation: a finite integer or infinity (valuation of zero).
class Valuation {
  public:
    constexpr Valuation() : finite_(true), v_(0) {}

    static constexpr Valuation finite(i64 v) {
        Valuation r;
        r.finite_ = true;
        r.v_ = v;
        return r;
    }
    static constexpr Valuation infinity() {
        Valuation r;
        r.finite_ = false;
        r.v_ = 0;
        return r;
    }

    constexpr bool is_finite() const { return finite_; }
    constexpr bool is_infinite() const { return !finite_; }

    constexpr i64 value() const {
        if (!finite_) throw OutOfRange("value() of infinite valuation");
        return v_;
    }

    friend constexpr bool operator==(Valuation a, Valuation b) {
        return a.finite_ == b.finite_ && (!a.finite_ || a.v_ == b.v_);
    }
    friend constexpr bool operator<(Valuation a, Valuation b) {
        if (!a.finite_) return false;
        if (!b.finite_) return true;
        return a.v_ < b.v_;
    }
    friend constexpr bool operator>(Valuation a, Valuation b) { return b < a; }
    friend constexpr bool operator<=(Valuation a, Valuation b) { return !(b < a); }
    friend constexpr bool operator>=(Valuation a, Valuation b) { return !(a < b); }

    friend constexpr Valuation min(Valuation a, Valuation b) { return a < b ? a : b; }

    friend constexpr Valuation operator+(Valuation a, Valuation b) {
        if (!a.finite_ || !b.finite_) return infinity();
        return finite(a.v_ + b.v_);
    }

    std::string str() const { return finite_ ? std::to_string(v_) : "inf"; }

  private:
    bool finite_;
    i64 v_;
};

/// A valuation that may additionally be unresolved at the working
/// precision.  Reading an unresolved value throws PrecisionExhausted;
/// no lower bounds are ever handed out.
class MaybeValuation {
  public:
    enum class State { Resolved, Exhausted };

    MaybeValuation() : state_(State::Resolved), v_(Valuation::finite(0)) {}

    static MaybeValuation resolved(Valuation v) {
        MaybeValuation r;
        r.state_ = State::Resolved;
        r.v_ = v;
        return r;
    }
    static MaybeValuation exhausted() {
        MaybeValuation r;
        r.state_ = State::Exhausted;
        return r;
    }

    bool is_resolved() const { return state_ == State::Resolved; }
    bool is_exhausted() const { return state_ == State::Exhausted; }

    Valuation require(const std::string& field, std::uint32_t precision) const {
        if (state_ == State::Exhausted) throw PrecisionExhausted(field, precision);
        return v_;
    }

    /// Unchecked peek; only for display code.
    Valuation peek_or(Valuation fallback) const {
        return state_ == State::Resolved ? v_ : fallback;
    }

    std::string str() const { return state_ == State::Resolved ? v_.str() : "unresolved"; }

    friend bool operator==(const MaybeValuation& a, const MaybeValuation& b) {
        if (a.state_ != b.state_) return false;
        return a.state_ == State::Exhausted || a.v_ == b.v_;
    }

  private:
    State state_;
    Valuation v_;
};

/// Exact rational with 64-bit numerator/denominator, always normalized
/// with positive denominator.
struct Rational {
    i64 num = 0;
    i64 den = 1;

    Rational() = default;
    Rational(i64 n) : num(n), den(1) {}
    Rational(i64 n, i64 d) : num(n), den(d) {
        if (den == 0) throw ZeroInputError("rational with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        i64 g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    bool is_zero() const { return num == 0; }
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Exponent of ell in x; INFINITY for x = 0.
inline Valuation ord(i64 x, u64 ell) {
    if (x == 0) return Valuation::infinity();
    u64 a = x < 0 ? static_cast<u64>(-(x + 1)) + 1 : static_cast<u64>(x);
    i64 v = 0;
    while (a % ell == 0) { a /= ell; ++v; }
    return Valuation::finite(v);
}

inline Valuation ord(i128 x, u64 ell) {
    if (x == 0) return Valuation::infinity();
    if (x < 0) x = -x;
    i64 v = 0;
    while (x % static_cast<i128>(ell) == 0) { x /= static_cast<i128>(ell); ++v; }
    return Valuation::finite(v);
}

/// For rationals: numerator valuation minus denominator valuation.
inline Valuation ord(const Rational& x, u64 ell) {
    if (x.num == 0) return Valuation::infinity();
    return Valuation::finite(ord(x.num, ell).value() - ord(x.den, ell).value());
}

/// The unique (ell-1)-st root of unity congruent to u modulo ell,
/// computed to M digits by iterating x -> x^ell to a fixed point.
inline u64 teichmuller(u64 u, u64 ell, std::uint32_t precision) {
    const u64 modulus = checked_pow_u64(ell, precision);
    u %= modulus;
    if (u % ell == 0) throw NonUnitError("teichmuller of a non-unit residue");
    u64 x = u;
    const std::uint32_t cap = 4 * precision;
    for (std::uint32_t iter = 0; iter < cap; ++iter) {
        u64 next = pow_mod(x, ell, modulus);
        if (next == x) return x;
        x = next;
    }
    throw InternalInconsistency("teichmuller iteration failed to stabilize");
}

/// Legendre symbol (n | ell) in {-1, 0, +1}.
inline int legendre(i64 n, u64 ell) {
    u64 a = normalize_mod(n, ell);
    if (a == 0) return 0;
    u64 e = pow_mod(a, (ell - 1) / 2, ell);
    return e == 1 ? 1 : -1;
}

/// C(n, k) mod ell by Lucas' theorem on base-ell digits.
inline u64 binom_mod_ell(u64 n, u64 k, u64 ell) {
    u64 r = 1;
    while (k > 0 || n > 0) {
        u64 nd = n % ell, kd = k % ell;
        if (kd > nd) return 0;
        // single-digit binomial, all operands < ell
        u64 num = 1, den = 1;
        for (u64 i = 1; i <= kd; ++i) {
            num = mul_mod(num, (nd + 1 - i) % ell, ell);
            den = mul_mod(den, i % ell, ell);
        }
        r = mul_mod(r, mul_mod(num, inv_mod(den, ell), ell), ell);
        n /= ell;
        k /= ell;
    }
    return r;
}

/// Variant allowing a negative upper index via
/// C(-j, k) = (-1)^k C(j+k-1, k).
inline u64 binom_mod_ell_signed(i64 upper, u64 k, u64 ell) {
    if (upper >= 0) return binom_mod_ell(static_cast<u64>(upper), k, ell);
    u64 j = static_cast<u64>(-upper);
    u64 b = binom_mod_ell(j + k - 1, k, ell);
    if (k % 2 == 1) b = (ell - b) % ell;
    return b;
}

/// An exact l-adic scalar: valuation plus unit residue at M digits.
struct PadicScalar {
    u64 ell = 3;
    std::uint32_t precision = 1;
    Valuation val = Valuation::infinity();
    u64 unit = 0; // residue mod ell^precision, invertible unless val = inf

    static PadicScalar zero(u64 ell, std::uint32_t precision) {
        return PadicScalar{ell, precision, Valuation::infinity(), 0};
    }

    static PadicScalar make(u64 ell, std::uint32_t precision, Valuation v, u64 unit) {
        const u64 modulus = checked_pow_u64(ell, precision);
        PadicScalar s{ell, precision, v, unit % modulus};
        if (v.is_infinite()) {
            s.unit = 0;
        } else if (s.unit % ell == 0) {
            throw NonUnitError("unit part of padic scalar divisible by ell");
        }
        return s;
    }

    static PadicScalar from_integer(i64 x, u64 ell, std::uint32_t precision) {
        if (x == 0) return zero(ell, precision);
        Valuation v = ord(x, ell);
        const u64 modulus = checked_pow_u64(ell, precision);
        i128 u = x;
        for (i64 i = 0; i < v.value(); ++i) u /= static_cast<i128>(ell);
        return make(ell, precision, v, normalize_mod_i128(u, modulus));
    }

    static PadicScalar from_rational(const Rational& x, u64 ell, std::uint32_t precision) {
        if (x.is_zero()) return zero(ell, precision);
        Valuation v = ord(x, ell);
        const u64 modulus = checked_pow_u64(ell, precision);
        i64 vn = ord(x.num, ell).value();
        i64 vd = ord(x.den, ell).value();
        i64 n = x.num, d = x.den;
        for (i64 i = 0; i < vn; ++i) n /= static_cast<i64>(ell);
        for (i64 i = 0; i < vd; ++i) d /= static_cast<i64>(ell);
        u64 u = mul_mod(normalize_mod(n, modulus), inv_mod(normalize_mod(d, modulus), modulus),
                        modulus);
        return make(ell, precision, v, u);
    }

    bool is_zero() const { return val.is_infinite(); }

    u64 modulus() const { return checked_pow_u64(ell, precision); }

    PadicScalar operator*(const PadicScalar& o) const {
        if (ell != o.ell) throw ShapeMismatch("padic scalars over different primes");
        std::uint32_t p = precision < o.precision ? precision : o.precision;
        if (is_zero() || o.is_zero()) return zero(ell, p);
        u64 m = checked_pow_u64(ell, p);
        return make(ell, p, val + o.val, mul_mod(unit % m, o.unit % m, m));
    }

    /// Value residue modulo ell^k (requires val >= 0 when nonzero).
    u64 value_mod(std::uint32_t k) const {
        const u64 m = checked_pow_u64(ell, k);
        if (is_zero()) return 0;
        if (val.value() < 0) throw InexactDivision("negative valuation has no integer residue");
        if (val.value() >= static_cast<i64>(k)) return 0;
        return mul_mod(unit % m, checked_pow_u64(ell, static_cast<u64>(val.value())) % m, m);
    }
};

/// The decomposition x = epsilon * ell^b * (1 + c) with epsilon a
/// Teichmueller unit, b = ord(x), and c = 0 mod ell.
struct UnitDecomposition {
    u64 ell = 3;
    std::uint32_t precision = 1;
    u64 epsilon = 1;       // Teichmueller unit mod ell^precision
    i64 b = 0;             // the exact exponent of ell
    u64 c = 0;             // residue mod ell^precision, c = 0 mod ell
    u64 b_plus_c = 0;      // residue of b + c mod ell^precision
    MaybeValuation ord_b;
    MaybeValuation ord_c;
    MaybeValuation ord_b_plus_c;
    MaybeValuation w;      // min(ord_b, ord_c)

    u64 modulus() const { return checked_pow_u64(ell, precision); }

    Valuation ord_b_required() const { return ord_b.require("ord(b)", precision); }
    Valuation ord_c_required() const { return ord_c.require("ord(c)", precision); }
    Valuation ord_b_plus_c_required() const { return ord_b_plus_c.require("ord(b+c)", precision); }
    Valuation w_required() const { return w.require("w", precision); }

    /// epsilon * (1 + c) mod ell^precision: the unit part of the value.
    u64 reconstruct_unit() const {
        const u64 m = modulus();
        return mul_mod(epsilon, (1 + c) % m, m);
    }

    /// Unit residue of c / ell^ord(c) modulo ell^k, from the stored residue.
    u64 c_unit_mod(std::uint32_t k) const {
        Valuation oc = ord_c_required();
        if (oc.is_infinite()) throw ZeroInputError("unit part of c = 0");
        if (oc.value() + static_cast<i64>(k) > static_cast<i64>(precision))
            throw PrecisionExhausted("unit of c", precision);
        u64 reduced = c;
        for (i64 i = 0; i < oc.value(); ++i) reduced /= ell;
        return reduced % checked_pow_u64(ell, k);
    }
};

namespace detail {

/// Valuation of a residue r mod ell^precision: exact when nonzero,
/// unresolved (>= precision) when zero unless the caller proves exactness.
inline MaybeValuation residue_valuation(u64 r, u64 ell, std::uint32_t precision) {
    if (r == 0) return MaybeValuation::exhausted();
    i64 v = 0;
    while (r % ell == 0) { r /= ell; ++v; }
    if (v >= static_cast<i64>(precision))
        throw InternalInconsistency("residue valuation exceeds precision");
    return MaybeValuation::resolved(Valuation::finite(v));
}

inline MaybeValuation maybe_min(const MaybeValuation& a, const MaybeValuation& b,
                                const std::string& field, std::uint32_t precision) {
    if (a.is_exhausted() || b.is_exhausted()) return MaybeValuation::exhausted();
    (void)field;
    (void)precision;
    return MaybeValuation::resolved(min(a.peek_or(Valuation::infinity()),
                                        b.peek_or(Valuation::infinity())));
}

/// Shared tail of decompose/value_of_a once (b, unit residue) are known.
/// `exact_unit` carries the unit part of x as an exact rational when the
/// Teichmueller part is rational (epsilon = +-1); that makes ord(c) and
/// ord(b+c) exactly resolvable even past the working precision.
inline UnitDecomposition assemble_decomposition(u64 ell, std::uint32_t precision, i64 b,
                                                u64 unit_residue, bool have_exact_unit,
                                                Rational exact_unit) {
    const u64 modulus = checked_pow_u64(ell, precision);
    UnitDecomposition d;
    d.ell = ell;
    d.precision = precision;
    d.b = b;
    d.epsilon = teichmuller(unit_residue, ell, precision);
    u64 one_plus_c = mul_mod(unit_residue, inv_mod(d.epsilon, modulus), modulus);
    d.c = sub_mod(one_plus_c, 1 % modulus, modulus);
    d.b_plus_c = add_mod(normalize_mod(b, modulus), d.c, modulus);
    d.ord_b = MaybeValuation::resolved(ord(b, ell));

    const bool eps_is_one = d.epsilon == 1 % modulus;
    const bool eps_is_minus_one = d.epsilon == modulus - 1;
    const bool exact = have_exact_unit && (eps_is_one || eps_is_minus_one);

    if (d.c != 0) {
        d.ord_c = residue_valuation(d.c, ell, precision);
    } else if (exact) {
        // c = unit/eps - 1 exactly, with eps = +-1.
        i64 sign = eps_is_one ? 1 : -1;
        i128 num = static_cast<i128>(sign) * exact_unit.num - exact_unit.den;
        if (num == 0) {
            d.ord_c = MaybeValuation::resolved(Valuation::infinity());
        } else {
            d.ord_c = MaybeValuation::resolved(ord(num, ell));
        }
    } else {
        d.ord_c = MaybeValuation::exhausted();
    }

    if (d.b_plus_c != 0) {
        d.ord_b_plus_c = residue_valuation(d.b_plus_c, ell, precision);
    } else if (exact) {
        i64 sign = eps_is_one ? 1 : -1;
        i128 num = static_cast<i128>(b) * exact_unit.den +
                   static_cast<i128>(sign) * exact_unit.num - exact_unit.den;
        if (num == 0) {
            d.ord_b_plus_c = MaybeValuation::resolved(Valuation::infinity());
        } else {
            d.ord_b_plus_c = MaybeValuation::resolved(ord(num, ell));
        }
    } else {
        d.ord_b_plus_c = MaybeValuation::exhausted();
    }

    d.w = maybe_min(d.ord_b, d.ord_c, "w", precision);
    return d;
}

} // namespace detail

/// Decompose an exact nonzero rational as epsilon * ell^b * (1 + c).
inline UnitDecomposition decompose(const Rational& x, u64 ell, std::uint32_t precision) {
    if (x.is_zero()) throw ZeroInputError("decompose(0)");
    const u64 modulus = checked_pow_u64(ell, precision);
    i64 vn = ord(x.num, ell).value();
    i64 vd = ord(x.den, ell).value();
    i64 n = x.num, dn = x.den;
    for (i64 i = 0; i < vn; ++i) n /= static_cast<i64>(ell);
    for (i64 i = 0; i < vd; ++i) dn /= static_cast<i64>(ell);
    u64 unit = mul_mod(normalize_mod(n, modulus), inv_mod(normalize_mod(dn, modulus), modulus),
                       modulus);
    return detail::assemble_decomposition(ell, precision, vn - vd, unit, true, Rational(n, dn));
}

inline UnitDecomposition decompose(i64 x, u64 ell, std::uint32_t precision) {
    return decompose(Rational(x), ell, precision);
}

/// Admissible parameters (ell, N, r, s, t, delta) of the curve family.
struct CurveParams {
    u64 ell = 3;
    u64 n = 1; // the exponent N of ell
    u64 r = 1;
    u64 s = 1;
    u64 t = 1;
    u64 delta = 1;

    u64 ell_pow_n() const { return checked_pow_u64(ell, n); }

    u64 r_prime() const { return r / checked_pow_u64(ell, n - 1); }

    struct Violation {
        std::string code;
        std::string message;
    };

    std::vector<Violation> validate() const {
        std::vector<Violation> out;
        auto fail = [&out](const std::string& code, const std::string& msg) {
            out.push_back({code, msg});
        };
        if (ell < 3 || ell % 2 == 0 || !is_prime_u64(ell)) {
            fail("ell-odd-prime", "ell = " + std::to_string(ell) + " must be an odd prime");
            return out; // everything else depends on ell
        }
        if (n < 1) {
            fail("n-positive", "N must be a positive integer");
            return out;
        }
        if (!pow_fits_u64(ell, n)) {
            fail("n-too-large", "ell^N does not fit in 64 bits");
            return out;
        }
        const u64 q = ell_pow_n();
        if (r < 1 || s < 1 || t < 1) fail("rst-positive", "r, s, t must be positive");
        if (r + s + t != q)
            fail("sum", "r + s + t = " + std::to_string(r + s + t) + " but ell^N = " +
                            std::to_string(q));
        const u64 ln1 = checked_pow_u64(ell, n - 1);
        if (r % ln1 != 0 || (r / ln1) % ell == 0)
            fail("r-divisibility", "ell^(N-1) must exactly divide r");
        if (s % ell == 0) fail("s-coprime", "ell must not divide s");
        if (t % ell == 0) fail("t-coprime", "ell must not divide t");
        if (delta < 1) fail("delta-positive", "delta must be positive");
        if (delta % ell == 0) fail("delta-coprime", "ell must not divide delta");
        if (delta > 1) {
            try {
                for (auto [p, e] : factorize(delta)) {
                    if (e >= q)
                        fail("delta-power-free", "delta is divisible by " + std::to_string(p) +
                                                     "^(ell^N)");
                }
            } catch (const UnfactoredCofactor& ex) {
                fail("delta-unfactored", ex.what());
            }
        }
        return out;
    }

    /// Throws InvalidParams on the first violated invariant.
    static CurveParams checked(u64 ell, u64 n, u64 r, u64 s, u64 t, u64 delta) {
        CurveParams p{ell, n, r, s, t, delta};
        auto v = p.validate();
        if (!v.empty()) throw InvalidParams(v.front().code, v.front().message);
        return p;
    }
};

/// Decomposition of a = r^r s^s (ell^N - t)^t delta^(r+s), assembled
/// factor by factor; a itself is never materialized.
inline UnitDecomposition value_of_a(const CurveParams& p, std::uint32_t precision) {
    const u64 modulus = checked_pow_u64(p.ell, precision);
    const u64 q = p.ell_pow_n();
    const u64 rp = p.r_prime();

    // valuation: only the r^r factor carries ell's
    i128 b_wide = static_cast<i128>(p.r) * static_cast<i128>(p.n - 1);
    if (b_wide > INT64_MAX) throw NumericOverflow("valuation of a exceeds 64 bits");
    i64 b = static_cast<i64>(b_wide);

    i128 b_expected = static_cast<i128>(checked_pow_u64(p.ell, p.n - 1)) *
                      static_cast<i128>(p.n - 1) * static_cast<i128>(rp);
    if (b_wide != b_expected)
        throw InternalInconsistency("ord(a) disagrees with ell^(N-1)(N-1)r'");

    u64 unit = pow_mod(rp % modulus, p.r, modulus);
    unit = mul_mod(unit, pow_mod(p.s % modulus, p.s, modulus), modulus);
    unit = mul_mod(unit, pow_mod((q - p.t) % modulus, p.t, modulus), modulus);
    unit = mul_mod(unit, pow_mod(p.delta % modulus, p.r + p.s, modulus), modulus);

    // The unit part of a is a positive integer > 1, so c and b + c are
    // never exactly zero; residue zeros stay unresolved and trigger retry.
    return detail::assemble_decomposition(p.ell, precision, b, unit, false, Rational(0, 1));
}

/// Default working precision for a given level N.
inline std::uint32_t default_precision(u64 n) {
    return static_cast<std::uint32_t>(2 * n + 8);
}

} // namespace rootnum
