#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <rootnum/errors.hpp>
#include <rootnum/numeric.hpp>

namespace rootnum {

/// A polynomial truncation of a power series over Z/ell^M, kept modulo
/// X^(T+1).  Arithmetic requires equal modulus and truncation.
class TruncatedSeries {
  public:
    TruncatedSeries(u64 ell, std::uint32_t precision, std::uint32_t trunc)
        : ell_(ell), precision_(precision), modulus_(checked_pow_u64(ell, precision)),
          trunc_(trunc), coeffs_(trunc + 1, 0) {}

    static TruncatedSeries zero(u64 ell, std::uint32_t precision, std::uint32_t trunc) {
        return TruncatedSeries(ell, precision, trunc);
    }

    static TruncatedSeries one(u64 ell, std::uint32_t precision, std::uint32_t trunc) {
        TruncatedSeries s(ell, precision, trunc);
        s.coeffs_[0] = 1 % s.modulus_;
        return s;
    }

    static TruncatedSeries from_coeffs(u64 ell, std::uint32_t precision,
                                       std::vector<i64> coeffs) {
        if (coeffs.empty()) throw OutOfRange("series needs at least the constant coefficient");
        TruncatedSeries s(ell, precision, static_cast<std::uint32_t>(coeffs.size() - 1));
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            s.coeffs_[i] = normalize_mod(coeffs[i], s.modulus_);
        return s;
    }

    static TruncatedSeries from_residues(u64 ell, std::uint32_t precision,
                                         std::vector<u64> residues) {
        if (residues.empty()) throw OutOfRange("series needs at least the constant coefficient");
        TruncatedSeries s(ell, precision, static_cast<std::uint32_t>(residues.size() - 1));
        for (std::size_t i = 0; i < residues.size(); ++i)
            s.coeffs_[i] = residues[i] % s.modulus_;
        return s;
    }

    u64 ell() const { return ell_; }
    std::uint32_t precision() const { return precision_; }
    u64 modulus() const { return modulus_; }
    std::uint32_t trunc() const { return trunc_; }
    const std::vector<u64>& coeffs() const { return coeffs_; }

    u64 coeff(std::uint32_t n) const {
        if (n > trunc_) throw OutOfRange("coefficient index " + std::to_string(n) +
                                         " beyond truncation " + std::to_string(trunc_));
        return coeffs_[n];
    }

    void set_coeff(std::uint32_t n, i64 value) {
        if (n > trunc_) throw OutOfRange("coefficient index beyond truncation");
        coeffs_[n] = normalize_mod(value, modulus_);
    }

    friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
        a.check_shape(b);
        TruncatedSeries r(a.ell_, a.precision_, a.trunc_);
        for (std::uint32_t i = 0; i <= a.trunc_; ++i)
            r.coeffs_[i] = add_mod(a.coeffs_[i], b.coeffs_[i], a.modulus_);
        return r;
    }

    friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
        a.check_shape(b);
        TruncatedSeries r(a.ell_, a.precision_, a.trunc_);
        for (std::uint32_t i = 0; i <= a.trunc_; ++i)
            r.coeffs_[i] = sub_mod(a.coeffs_[i], b.coeffs_[i], a.modulus_);
        return r;
    }

    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
        a.check_shape(b);
        TruncatedSeries r(a.ell_, a.precision_, a.trunc_);
        for (std::uint32_t i = 0; i <= a.trunc_; ++i) {
            if (a.coeffs_[i] == 0) continue;
            for (std::uint32_t j = 0; i + j <= a.trunc_; ++j) {
                if (b.coeffs_[j] == 0) continue;
                r.coeffs_[i + j] = add_mod(r.coeffs_[i + j],
                                           mul_mod(a.coeffs_[i], b.coeffs_[j], a.modulus_),
                                           a.modulus_);
            }
        }
        return r;
    }

    friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
        return a.ell_ == b.ell_ && a.precision_ == b.precision_ && a.trunc_ == b.trunc_ &&
               a.coeffs_ == b.coeffs_;
    }

    /// f^e by binary exponentiation with truncation after each multiply.
    TruncatedSeries pow(u64 e) const {
        TruncatedSeries r = one(ell_, precision_, trunc_);
        TruncatedSeries base = *this;
        while (e) {
            if (e & 1) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }

    /// f(X^ell) truncated at T.
    TruncatedSeries frobenius_substitute() const {
        TruncatedSeries r(ell_, precision_, trunc_);
        for (std::uint32_t k = 0; k <= trunc_; ++k) {
            u128 idx = u128(k) * ell_;
            if (idx > trunc_) break;
            r.coeffs_[static_cast<std::uint32_t>(idx)] = coeffs_[k];
        }
        return r;
    }

    /// f(lambda * X): coefficient k scaled by lambda^k.
    TruncatedSeries compose_scale(i64 lambda) const {
        TruncatedSeries r(ell_, precision_, trunc_);
        u64 lam = normalize_mod(lambda, modulus_);
        u64 pw = 1 % modulus_;
        for (std::uint32_t k = 0; k <= trunc_; ++k) {
            r.coeffs_[k] = mul_mod(coeffs_[k], pw, modulus_);
            pw = mul_mod(pw, lam, modulus_);
        }
        return r;
    }

    TruncatedSeries scaled(i64 factor) const {
        TruncatedSeries r(ell_, precision_, trunc_);
        u64 f = normalize_mod(factor, modulus_);
        for (std::uint32_t k = 0; k <= trunc_; ++k)
            r.coeffs_[k] = mul_mod(coeffs_[k], f, modulus_);
        return r;
    }

    /// Exact division by an integer.  For d = ell^k * d' with ell coprime
    /// to d', every coefficient must carry valuation >= k; the result
    /// lives over Z/ell^(M-k).
    TruncatedSeries divided_exact(i64 divisor) const {
        if (divisor == 0) throw ZeroInputError("series division by zero");
        u64 d = divisor < 0 ? static_cast<u64>(-divisor) : static_cast<u64>(divisor);
        std::uint32_t k = 0;
        while (d % ell_ == 0) { d /= ell_; ++k; }
        if (k >= precision_)
            throw InexactDivision("divisor carries the full precision in powers of ell");
        const u64 lk = checked_pow_u64(ell_, k);
        TruncatedSeries r(ell_, precision_ - k, trunc_);
        const u64 dinv = inv_mod(d % r.modulus_, r.modulus_);
        for (std::uint32_t i = 0; i <= trunc_; ++i) {
            if (coeffs_[i] % lk != 0)
                throw InexactDivision("coefficient " + std::to_string(i) +
                                      " lacks ell-valuation " + std::to_string(k));
            u64 q = (coeffs_[i] / lk) % r.modulus_;
            r.coeffs_[i] = mul_mod(q, dinv, r.modulus_);
        }
        if (divisor < 0) return r.scaled(-1);
        return r;
    }

  private:
    void check_shape(const TruncatedSeries& o) const {
        if (ell_ != o.ell_ || precision_ != o.precision_ || trunc_ != o.trunc_)
            throw ShapeMismatch("series shapes differ: (" + std::to_string(modulus_) + ", T=" +
                                std::to_string(trunc_) + ") vs (" + std::to_string(o.modulus_) +
                                ", T=" + std::to_string(o.trunc_) + ")");
    }

    u64 ell_;
    std::uint32_t precision_;
    u64 modulus_;
    std::uint32_t trunc_;
    std::vector<u64> coeffs_;
};

/// (1+X)^upper truncated at T, coefficients by the exact multiplicative
/// recurrence C(upper,k) = C(upper,k-1) * (upper-k+1) / k, then reduced.
inline TruncatedSeries binomial_series(i64 upper, u64 ell, std::uint32_t precision,
                                       std::uint32_t trunc) {
    const u64 modulus = checked_pow_u64(ell, precision);
    std::vector<u64> residues(trunc + 1, 0);
    residues[0] = 1 % modulus;
    i128 binom = 1;
    const i128 limit = (i128(1) << 120);
    for (std::uint32_t k = 1; k <= trunc; ++k) {
        i128 factor = static_cast<i128>(upper) - (k - 1);
        i128 mag = factor < 0 ? -factor : factor;
        if (mag > 0 && (binom < 0 ? -binom : binom) > limit / mag)
            throw NumericOverflow("binomial recurrence exceeds 128 bits");
        binom = binom * factor / static_cast<i128>(k); // division is exact at each step
        residues[k] = normalize_mod_i128(binom, modulus);
    }
    return TruncatedSeries::from_residues(ell, precision, std::move(residues));
}

} // namespace rootnum
