#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <rootnum/errors.hpp>

namespace rootnum {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline u64 mul_mod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(u128(a) * b % m);
}

inline u64 add_mod(u64 a, u64 b, u64 m) {
    u64 r = a + b;
    if (r < a || r >= m) r -= m;
    return r;
}

inline u64 sub_mod(u64 a, u64 b, u64 m) {
    return a >= b ? a - b : a + (m - b);
}

inline u64 pow_mod(u64 base, u64 exp, u64 m) {
    if (m == 1) return 0;
    u64 r = 1;
    base %= m;
    while (exp) {
        if (exp & 1) r = mul_mod(r, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return r;
}

/// Inverse modulo m by extended gcd.  Throws NonUnitError if gcd != 1.
inline u64 inv_mod(u64 a, u64 m) {
    a %= m;
    if (a == 0) throw NonUnitError("inverse of zero residue");
    i64 r0 = static_cast<i64>(m), r1 = static_cast<i64>(a);
    i64 t0 = 0, t1 = 1;
    while (r1 != 0) {
        i64 q = r0 / r1;
        r0 -= q * r1;
        std::swap(r0, r1);
        t0 -= q * t1;
        std::swap(t0, t1);
    }
    if (r0 != 1) throw NonUnitError("residue not invertible: gcd != 1");
    if (t0 < 0) t0 += static_cast<i64>(m);
    return static_cast<u64>(t0);
}

/// Reduce a signed integer into [0, m).
inline u64 normalize_mod(i64 x, u64 m) {
    i64 r = x % static_cast<i64>(m);
    if (r < 0) r += static_cast<i64>(m);
    return static_cast<u64>(r);
}

inline u64 normalize_mod_i128(i128 x, u64 m) {
    i128 r = x % static_cast<i128>(m);
    if (r < 0) r += static_cast<i128>(m);
    return static_cast<u64>(r);
}

/// l^k as u64; throws NumericOverflow when it does not fit.
inline u64 checked_pow_u64(u64 base, u64 exp) {
    u64 r = 1;
    for (u64 i = 0; i < exp; ++i) {
        if (r > UINT64_MAX / base) throw NumericOverflow("power exceeds 64 bits");
        r *= base;
    }
    return r;
}

inline bool pow_fits_u64(u64 base, u64 exp) {
    u64 r = 1;
    for (u64 i = 0; i < exp; ++i) {
        if (r > UINT64_MAX / base) return false;
        r *= base;
    }
    return true;
}

/// Deterministic Miller-Rabin, valid for all 64-bit inputs.
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

inline u64 isqrt_u64(u64 n) {
    if (n == 0) return 0;
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r > n / r) --r;
    while ((r + 1) <= n / (r + 1)) ++r;
    return r;
}

inline u64 icbrt_u64(u64 n) {
    if (n == 0) return 0;
    u64 r = static_cast<u64>(std::cbrt(static_cast<double>(n)));
    while (r > 0 && u128(r) * r * r > n) --r;
    while (u128(r + 1) * (r + 1) * (r + 1) <= n) ++r;
    return r;
}

/// Prime factorization by trial division up to 10^6 followed by a
/// deterministic primality / perfect-power check on the cofactor.
/// Inputs whose cofactor is a product of two or more distinct primes
/// above the trial bound are rejected.
inline std::vector<std::pair<u64, u64>> factorize(u64 n) {
    if (n == 0) throw ZeroInputError("factorize(0)");
    std::vector<std::pair<u64, u64>> out;
    auto push = [&out](u64 p, u64 e) { out.emplace_back(p, e); };
    for (u64 p = 2; p <= 1000000 && p * p <= n; p = (p == 2 ? 3 : p + 2)) {
        if (n % p == 0) {
            u64 e = 0;
            while (n % p == 0) { n /= p; ++e; }
            push(p, e);
        }
    }
    if (n > 1) {
        if (is_prime_u64(n)) {
            push(n, 1);
        } else {
            u64 r = isqrt_u64(n);
            u64 c = icbrt_u64(n);
            if (r * r == n && is_prime_u64(r)) {
                push(r, 2);
            } else if (u128(c) * c * c == n && is_prime_u64(c)) {
                push(c, 3);
            } else {
                throw UnfactoredCofactor("cofactor " + std::to_string(n) +
                                         " is neither prime nor a prime power");
            }
        }
    }
    return out;
}

} // namespace rootnum
