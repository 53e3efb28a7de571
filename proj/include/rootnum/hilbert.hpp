#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <rootnum/conductor.hpp>
#include <rootnum/errors.hpp>
#include <rootnum/padic.hpp>
#include <rootnum/series.hpp>

namespace rootnum {

/// Sum_{r=0..n} (-1)^r C(n,r) f(r), exactly.  Vanishes when n > deg f.
inline i64 difference_sum(std::span<const i64> poly_coeffs, u64 n) {
    if (n > 60) throw NumericOverflow("difference_sum limited to n <= 60");
    i128 total = 0;
    u128 binomial = 1; // C(n, r), exact for n <= 60
    for (u64 r = 0; r <= n; ++r) {
        // Horner evaluation of f at r
        i128 value = 0;
        for (auto it = poly_coeffs.rbegin(); it != poly_coeffs.rend(); ++it)
            value = value * static_cast<i128>(r) + static_cast<i128>(*it);
        i128 term = static_cast<i128>(binomial) * value;
        total += (r % 2 == 0) ? term : -term;
        if (r < n) binomial = binomial * (n - r) / (r + 1);
    }
    if (total > INT64_MAX || total < INT64_MIN)
        throw NumericOverflow("difference_sum exceeds 64 bits");
    return static_cast<i64>(total);
}

/// The double sum
///   c_ell(j) = sum_{r,s=0..t} (-1)^r C(t,r) C(t,s) C(j(r + s(ell^N - 1)), ell)  mod ell
/// with t = ell - 2, evaluated at a given representative j (coprime to ell).
inline u64 c_ell_from_rep(u64 j, u64 ell, u64 n_level) {
    if (n_level < 2) throw PreconditionViolated("c_ell requires N >= 2");
    if (j % ell == 0) throw BadIndex("representative divisible by ell");
    const u64 t = ell - 2;
    const u64 q = checked_pow_u64(ell, n_level);
    u64 total = 0;
    for (u64 r = 0; r <= t; ++r) {
        for (u64 s = 0; s <= t; ++s) {
            u128 arg = u128(j) * (r + s * (q - 1));
            if (arg > UINT64_MAX) throw NumericOverflow("binomial argument exceeds 64 bits");
            u64 term = mul_mod(binom_mod_ell(t, r, ell), binom_mod_ell(t, s, ell), ell);
            term = mul_mod(term, binom_mod_ell(static_cast<u64>(arg), ell, ell), ell);
            if (r % 2 == 1) term = (ell - term) % ell;
            total = add_mod(total, term, ell);
        }
    }
    return total;
}

/// c_ell at the unit class i, using the representative of i^(-1) in [1, ell^N).
inline u64 c_ell_coeff(u64 i, u64 ell, u64 n_level) {
    if (i % ell == 0) throw BadIndex("index divisible by ell");
    const u64 q = checked_pow_u64(ell, n_level);
    u64 j = inv_mod(i % q, q);
    return c_ell_from_rep(j, ell, n_level);
}

/// Independent series route for c_ell:
///   [X^ell] (1 + (1+X)^{j(ell^N-1)})^t (1 - (1+X)^j)^t  over F_ell.
inline u64 c_ell_series_route(u64 i, u64 ell, u64 n_level) {
    if (n_level < 2) throw PreconditionViolated("c_ell requires N >= 2");
    if (i % ell == 0) throw BadIndex("index divisible by ell");
    const u64 t = ell - 2;
    const u64 q = checked_pow_u64(ell, n_level);
    const u64 j = inv_mod(i % q, q);
    const auto T = static_cast<std::uint32_t>(ell);
    i128 big_exp = static_cast<i128>(j) * (q - 1);
    if (big_exp > INT64_MAX) throw NumericOverflow("series exponent exceeds 64 bits");
    TruncatedSeries one = TruncatedSeries::one(ell, 1, T);
    TruncatedSeries lhs = one + binomial_series(static_cast<i64>(big_exp), ell, 1, T);
    TruncatedSeries rhs = one - binomial_series(static_cast<i64>(j), ell, 1, T);
    return (lhs.pow(t) * rhs.pow(t)).coeff(T);
}

/// Sum of c_ell over all unit classes mod ell^N, reduced mod ell.
inline u64 c_ell_total(u64 ell, u64 n_level) {
    const u64 q = checked_pow_u64(ell, n_level);
    u64 total = 0;
    for (u64 i = 1; i < q; ++i) {
        if (i % ell == 0) continue;
        total = add_mod(total, c_ell_coeff(i, ell, n_level), ell);
    }
    return total;
}

/// Per-residue-class sums: entry a-1 holds sum of c_ell(i) over i = a mod ell.
inline std::vector<u64> c_ell_class_sums(u64 ell, u64 n_level) {
    const u64 q = checked_pow_u64(ell, n_level);
    std::vector<u64> sums(ell - 1, 0);
    for (u64 i = 1; i < q; ++i) {
        if (i % ell == 0) continue;
        u64 a = i % ell;
        sums[a - 1] = add_mod(sums[a - 1], c_ell_coeff(i, ell, n_level), ell);
    }
    return sums;
}

/// Everything the residue harness observes for one unit representative j.
struct VostokovReport {
    u64 ell = 3;
    u64 n_level = 2;
    u64 j = 1;
    u64 eps_pow_ell_coeff = 0;   // [X^ell] eps(X)^ell            mod ell^2
    u64 eps_delta_coeff = 0;     // [X^ell] eps(X^ell)            mod ell^2
    u64 a_ell = 0;               // difference of the above       mod ell^2
    u64 ell_c_ell = 0;           // ell * c_ell(j-rep)            mod ell^2
    bool matches_lucas = false;  // eps_pow_ell_coeff == ell_c_ell
    bool delta_coeff_vanishes = false;
    bool low_coeffs_vanish = false; // [X^n](eps - 1) = 0 for n < ell-2
    std::vector<u64> corrections;   // C(ell,k) [X^ell] (eps-1)^k mod ell^2, k = 1..ell
    u64 symbol_via_series = 0;      // -2 a_ell / ell   mod ell
    u64 symbol_via_lucas = 0;       // -2 c_ell         mod ell
};

/// Build eps(X) = 1 + ((1-X)^j - 1)^t (1 + (1-X)^{j(ell^N-1)})^t over
/// Z/ell^2 truncated at X^ell, and compare [X^ell] eps^ell against
/// ell * c_ell.  A mismatch is data, not an error.
inline VostokovReport vostokov_check(u64 j, u64 ell, u64 n_level) {
    if (n_level < 2) throw PreconditionViolated("vostokov harness requires N >= 2");
    if (j % ell == 0) throw BadIndex("representative divisible by ell");
    const u64 t = ell - 2;
    const u64 q = checked_pow_u64(ell, n_level);
    const auto T = static_cast<std::uint32_t>(ell);
    const u64 mod2 = ell * ell;

    i128 big_exp = static_cast<i128>(j) * (q - 1);
    if (big_exp > INT64_MAX) throw NumericOverflow("series exponent exceeds 64 bits");

    TruncatedSeries one = TruncatedSeries::one(ell, 2, T);
    TruncatedSeries a_part =
        binomial_series(static_cast<i64>(j), ell, 2, T).compose_scale(-1) - one;
    TruncatedSeries b_part =
        one + binomial_series(static_cast<i64>(big_exp), ell, 2, T).compose_scale(-1);
    TruncatedSeries eps = one + a_part.pow(t) * b_part.pow(t);

    VostokovReport rep;
    rep.ell = ell;
    rep.n_level = n_level;
    rep.j = j;
    rep.eps_pow_ell_coeff = eps.pow(ell).coeff(T);
    rep.eps_delta_coeff = eps.frobenius_substitute().coeff(T);
    rep.a_ell = sub_mod(rep.eps_pow_ell_coeff, rep.eps_delta_coeff, mod2);
    rep.delta_coeff_vanishes = rep.eps_delta_coeff == 0;

    const u64 c_val = c_ell_from_rep(j % q, ell, n_level);
    rep.ell_c_ell = (ell * c_val) % mod2;
    rep.matches_lucas = rep.eps_pow_ell_coeff == rep.ell_c_ell;

    TruncatedSeries c_series = eps - one;
    rep.low_coeffs_vanish = true;
    for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(t); ++k)
        if (c_series.coeff(k) != 0) rep.low_coeffs_vanish = false;

    rep.corrections.reserve(ell);
    TruncatedSeries power = one;
    i128 binom = 1;
    for (u64 k = 1; k <= ell; ++k) {
        power = power * c_series;
        binom = binom * (ell - k + 1) / k;
        u64 ck = normalize_mod_i128(binom, mod2);
        rep.corrections.push_back(mul_mod(ck, power.coeff(T), mod2));
    }

    // residue of the symbol: -2 a_ell / ell mod ell (a_ell is always
    // divisible by ell), against -2 c_ell from the double sum
    if (rep.a_ell % ell != 0)
        throw InternalInconsistency("a_ell not divisible by ell");
    rep.symbol_via_series = mul_mod(normalize_mod(-2, ell), (rep.a_ell / ell) % ell, ell);
    rep.symbol_via_lucas = mul_mod(normalize_mod(-2, ell), c_val, ell);
    return rep;
}

/// Exponent of zeta_{ell^N}: a residue mod ell^N.
struct SymbolExponent {
    u64 value = 0; // in [0, ell^N)
    u64 ell = 3;
    u64 n_level = 1;

    /// Reduction to a zeta_ell power: value / ell^(N-1), legal only when
    /// ell^(N-1) divides value.
    u64 zeta_ell_exponent() const {
        const u64 d = checked_pow_u64(ell, n_level - 1);
        if (value % d != 0)
            throw InexactDivision("exponent not divisible by ell^(N-1)");
        return (value / d) % ell;
    }
};

/// [1 + pi^(f-1), 1+c] = (1-f) * (2c/ell) * J * sum_{k=1..N} (-1)^(k+1) c^(k-1)/k
/// reduced mod ell^N.  All divisions are exact in Z_ell; a negative total
/// valuation raises InexactDivision.
inline SymbolExponent unit_symbol_exponent(const PadicScalar& c, u64 f, const PadicScalar& J,
                                           u64 n_level) {
    const u64 ell = c.ell;
    if (!c.is_zero() && c.val < Valuation::finite(1))
        throw PreconditionViolated("c must satisfy ord(c) >= 1");
    SymbolExponent out{0, ell, n_level};
    if (c.is_zero() || J.is_zero() || f == 1) return out;

    const auto work = static_cast<std::uint32_t>(n_level + 4);
    if (c.precision < work + 2 || J.precision < n_level)
        throw PrecisionExhausted("unit_symbol_exponent operands", c.precision);
    const u64 work_mod = checked_pow_u64(ell, work);

    // S = sum_{k=1..N} (-1)^(k+1) c^(k-1)/k, a 1-unit; computed as a value
    // residue at extended precision so the 1/k divisions stay exact.
    u64 sum = 0;
    for (u64 k = 1; k <= n_level; ++k) {
        u64 e = static_cast<u64>(ord(static_cast<i64>(k), ell).value());
        u64 kprime = k / checked_pow_u64(ell, e);
        const auto ext = static_cast<std::uint32_t>(work + e);
        if (ext > c.precision) throw PrecisionExhausted("c in unit_symbol_exponent", c.precision);
        const u64 ext_mod = checked_pow_u64(ell, ext);
        u64 cpow = 1 % ext_mod;
        u64 cval = c.value_mod(ext);
        for (u64 m = 1; m < k; ++m) cpow = mul_mod(cpow, cval, ext_mod);
        if (cpow % checked_pow_u64(ell, e) != 0)
            throw InexactDivision("c^(k-1) lacks the valuation of k");
        u64 term = mul_mod(cpow / checked_pow_u64(ell, e), inv_mod(kprime, work_mod), work_mod);
        sum = (k % 2 == 1) ? add_mod(sum, term, work_mod) : sub_mod(sum, term, work_mod);
    }
    if (sum % ell == 0) throw InternalInconsistency("alternating sum is not a unit");

    PadicScalar s_factor = PadicScalar::make(ell, work, Valuation::finite(0), sum);
    PadicScalar one_minus_f = PadicScalar::from_integer(1 - static_cast<i64>(f), ell, work);
    if (one_minus_f.is_zero()) return out;
    PadicScalar two_c_over_ell =
        PadicScalar::make(ell, c.precision, c.val + Valuation::finite(-1),
                          mul_mod(c.unit, 2 % c.modulus(), c.modulus()));

    PadicScalar product = one_minus_f * two_c_over_ell * J * s_factor;
    if (product.is_zero()) return out;
    if (product.val < Valuation::finite(0))
        throw InexactDivision("total valuation negative: " + product.val.str());
    out.value = product.value_mod(static_cast<std::uint32_t>(n_level));
    return out;
}

/// Provenance of a J(N, f) entry.
enum class JProvenance { Calibrated, UserSupplied };

struct JEntry {
    i64 valuation = 0;
    u64 unit = 1; // nonzero residue mod ell
    JProvenance provenance = JProvenance::UserSupplied;
};

/// A table of opaque exact l-adic values J(N, f), keyed by (N, f).
struct JTable {
    u64 ell = 3;
    std::map<std::pair<u64, u64>, JEntry> entries;

    void insert(u64 n_level, u64 f, JEntry e) {
        if (e.unit % ell == 0 || e.unit >= ell)
            throw OutOfRange("J unit must be a nonzero residue mod ell");
        i64 bound = static_cast<i64>(n_level);
        if (e.valuation < -bound || e.valuation > bound)
            throw OutOfRange("J valuation outside [-N, N]");
        entries[{n_level, f}] = e;
    }

    std::optional<JEntry> lookup(u64 n_level, u64 f) const {
        auto it = entries.find({n_level, f});
        if (it == entries.end()) return std::nullopt;
        return it->second;
    }

    /// One entry per line: `N f valuation unit  # provenance`.
    std::string serialize() const {
        std::ostringstream os;
        for (const auto& [key, e] : entries) {
            os << key.first << ' ' << key.second << ' ' << e.valuation << ' ' << e.unit << "  # "
               << (e.provenance == JProvenance::Calibrated ? "CALIBRATED" : "USER_SUPPLIED")
               << '\n';
        }
        return os.str();
    }

    static JTable parse(const std::string& text, u64 ell) {
        JTable jt;
        jt.ell = ell;
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line)) {
            auto hash = line.find('#');
            std::string body = hash == std::string::npos ? line : line.substr(0, hash);
            std::string comment = hash == std::string::npos ? "" : line.substr(hash + 1);
            std::istringstream ls(body);
            u64 n_level, f;
            i64 val;
            u64 unit;
            if (!(ls >> n_level >> f >> val >> unit)) {
                std::string rest;
                ls.clear();
                ls >> rest;
                if (body.find_first_not_of(" \t\r") == std::string::npos) continue;
                throw OutOfRange("malformed J table line: " + line);
            }
            JEntry e;
            e.valuation = val;
            e.unit = unit;
            e.provenance = comment.find("CALIBRATED") != std::string::npos
                               ? JProvenance::Calibrated
                               : JProvenance::UserSupplied;
            jt.insert(n_level, f, e);
        }
        return jt;
    }

    void save(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw OutOfRange("cannot open J table file for writing: " + path);
        os << serialize();
    }

    static JTable load(const std::string& path, u64 ell) {
        std::ifstream is(path);
        if (!is) throw OutOfRange("cannot open J table file: " + path);
        std::ostringstream buf;
        buf << is.rdbuf();
        return parse(buf.str(), ell);
    }
};

/// Result of evaluating the wild-symbol closed form for one decomposition.
struct WildSymbol {
    u64 exponent_mod_ell = 0; // power of zeta_ell
    bool lenient_used = false;
};

/// Closed-form value of (1 + pi^(f-1), a)_{ell^N} as a power of zeta_ell:
///   RamifiedEqual:   +-(2c/ell^N) J(N, 2 ell^(N-w)),  sign - iff w = N
///   RamifiedGreater: (2ce/ell^N) J(N, ell^(N-w-1)(ell-1)), e = 2 iff w = N-1
/// The l-adic argument must be a unit; otherwise DegenerateArgument is
/// thrown (or, in lenient mode, the unit part is used and flagged).
inline WildSymbol symbol_with_a(const UnitDecomposition& d, const ConductorClassification& cls,
                                const JEntry& J, u64 n_level, bool lenient = false) {
    if (!cls.is_ramified_wild())
        throw PreconditionViolated("symbol_with_a needs a ramified branch");
    const u64 ell = d.ell;
    const i64 n = static_cast<i64>(n_level);
    const i64 w = cls.w.value();

    Valuation oc = d.ord_c_required();
    if (oc.is_infinite())
        throw DegenerateArgument(INT64_MAX, INT64_MAX); // c = 0: argument vanishes

    i64 arg_val = oc.value() - n + J.valuation;
    bool unit_ok = arg_val == 0;
    WildSymbol out;
    if (!unit_ok) {
        if (!lenient) throw DegenerateArgument(arg_val, oc.value() - n);
        out.lenient_used = true;
    }

    u64 e = 1;
    i64 sign = 1;
    if (cls.branch == Branch::RamifiedEqual) {
        if (w == n) sign = -1;
    } else {
        if (w == n - 1) e = 2;
    }

    u64 u_c = d.c_unit_mod(1);
    u64 value = mul_mod(2 % ell, u_c, ell);
    value = mul_mod(value, e % ell, ell);
    value = mul_mod(value, J.unit % ell, ell);
    if (sign < 0) value = (ell - value) % ell;
    out.exponent_mod_ell = value;
    return out;
}

// ---------------------------------------------------------------------------
// Calibration of J(N, f) against expected global root numbers.
// ---------------------------------------------------------------------------

/// One observation, reduced to what the match predicate needs.  Rows on
/// the "otherwise" branch do not consult J and are decided directly.
struct CalObservation {
    std::string label;
    bool uses_j = false;
    u64 n_level = 0;
    u64 f_key = 0;        // conductor exponent f' keying into the table
    i64 required_val = 0; // J valuation making the argument a unit
    u64 base_unit = 0;    // signed unit of r'st * (ce/ell^N) without J
    int delta_factor = 1; // product of Legendre(p, ell) over p | delta
    int expected = 1;     // expected global root number
    bool direct_match = false; // for non-J rows: whether the row matches
};

struct JCandidate {
    i64 valuation;
    u64 unit;
    friend bool operator<(const JCandidate& a, const JCandidate& b) {
        return a.valuation != b.valuation ? a.valuation < b.valuation : a.unit < b.unit;
    }
    friend bool operator==(const JCandidate& a, const JCandidate& b) {
        return a.valuation == b.valuation && a.unit == b.unit;
    }
};

struct KeyCalibration {
    u64 n_level = 0;
    u64 f = 0;
    std::size_t best_count = 0;
    JCandidate chosen{0, 1};
    std::vector<JCandidate> ties; // all maximizers, lexicographic order
};

struct CalibrationResult {
    JTable table;
    std::size_t matched = 0;
    std::size_t total = 0;
    std::vector<bool> per_observation;
    std::vector<KeyCalibration> keys;
    std::vector<std::string> conflicts;
};

/// Does global = -Legendre(base * u) * delta_factor equal the expectation,
/// given a candidate (valuation, unit) for the key?
inline bool calibration_matches(const CalObservation& o, const JCandidate& c, u64 ell) {
    if (!o.uses_j) return o.direct_match;
    if (c.valuation != o.required_val) return false;
    int value = -legendre(static_cast<i64>(mul_mod(o.base_unit, c.unit, ell)), ell);
    return value * o.delta_factor == o.expected;
}

/// Exhaustive per-key search over J assignments (valuations in
/// [max(-2,-N), N], units 1..ell-1), maximizing exact matches with a
/// deterministic lexicographic tie-break.
inline CalibrationResult calibrate_j(const std::vector<CalObservation>& observations, u64 ell) {
    CalibrationResult res;
    res.table.ell = ell;
    res.total = observations.size();
    res.per_observation.assign(observations.size(), false);

    std::map<std::pair<u64, u64>, std::vector<std::size_t>> by_key;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const auto& o = observations[i];
        if (o.uses_j) {
            by_key[{o.n_level, o.f_key}].push_back(i);
        } else {
            res.per_observation[i] = o.direct_match;
            if (o.direct_match) ++res.matched;
        }
    }

    for (const auto& [key, idxs] : by_key) {
        const u64 n_level = key.first;
        const i64 lo = std::max<i64>(-2, -static_cast<i64>(n_level));
        const i64 hi = static_cast<i64>(n_level);

        KeyCalibration kc;
        kc.n_level = n_level;
        kc.f = key.second;
        std::map<JCandidate, std::vector<std::size_t>> satisfied;
        for (i64 v = lo; v <= hi; ++v) {
            for (u64 u = 1; u < ell; ++u) {
                JCandidate cand{v, u};
                std::vector<std::size_t> hits;
                for (std::size_t i : idxs)
                    if (calibration_matches(observations[i], cand, ell)) hits.push_back(i);
                if (hits.size() > kc.best_count) {
                    kc.best_count = hits.size();
                    kc.ties.clear();
                }
                if (hits.size() == kc.best_count && kc.best_count > 0) kc.ties.push_back(cand);
                satisfied[cand] = std::move(hits);
            }
        }
        if (kc.ties.empty()) kc.ties.push_back(JCandidate{lo, 1}); // zero matches everywhere
        std::sort(kc.ties.begin(), kc.ties.end());
        kc.chosen = kc.ties.front();

        for (std::size_t i : satisfied[kc.chosen]) {
            res.per_observation[i] = true;
            ++res.matched;
        }

        // Surface pairwise conflicts: observations that are individually
        // satisfiable but share no candidate.
        std::map<std::size_t, std::vector<JCandidate>> per_obs_sat;
        for (const auto& [cand, hits] : satisfied)
            for (std::size_t i : hits) per_obs_sat[i].push_back(cand);
        for (auto it1 = per_obs_sat.begin(); it1 != per_obs_sat.end(); ++it1) {
            for (auto it2 = std::next(it1); it2 != per_obs_sat.end(); ++it2) {
                bool overlap = false;
                for (const auto& c1 : it1->second)
                    for (const auto& c2 : it2->second)
                        if (c1 == c2) overlap = true;
                if (!overlap) {
                    res.conflicts.push_back(
                        "J(" + std::to_string(n_level) + "," + std::to_string(key.second) +
                        "): " + observations[it1->first].label + " and " +
                        observations[it2->first].label + " admit no common assignment");
                }
            }
        }

        res.table.insert(n_level, key.second,
                         JEntry{kc.chosen.valuation, kc.chosen.unit, JProvenance::Calibrated});
        res.keys.push_back(std::move(kc));
    }
    return res;
}

} // namespace rootnum
