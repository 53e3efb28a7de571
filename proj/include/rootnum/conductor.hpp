#pragma once

#include <cstdint>
#include <string>

#include <rootnum/errors.hpp>
#include <rootnum/padic.hpp>

namespace rootnum {

/// The five conductor branches for (., a)_{ell^N} in terms of
/// w = min(ord b, ord c):
///   WZero          w = 0
///   RamifiedEqual  1 <= w <= N,  ord(b+c) = w  (the w = N = ord(c) case
///                  folds in here when ord(b+c) = N)
///   RamifiedGreater 1 <= w < N,  ord(b+c) > w
///   TameTwo        w = N = ord(c) but ord(b+c) > N (cancellation corner)
///   TrivialTail    w > N, or w = N with ord(c) != N
enum class Branch { WZero, RamifiedEqual, RamifiedGreater, TameTwo, TrivialTail };

inline std::string branch_name(Branch b) {
    switch (b) {
        case Branch::WZero: return "W_ZERO";
        case Branch::RamifiedEqual: return "RAMIFIED_EQUAL";
        case Branch::RamifiedGreater: return "RAMIFIED_GREATER";
        case Branch::TameTwo: return "TAME_TWO";
        case Branch::TrivialTail: return "TRIVIAL_TAIL";
    }
    return "?";
}

struct ConductorClassification {
    Branch branch = Branch::TrivialTail;
    Valuation w = Valuation::infinity();
    u64 f = 0; // conductor exponent of (., a)_{ell^N}

    bool is_ramified_wild() const {
        return branch == Branch::RamifiedEqual || branch == Branch::RamifiedGreater;
    }

    std::string describe() const {
        std::string s = branch_name(branch);
        if (branch == Branch::RamifiedEqual || branch == Branch::RamifiedGreater)
            s += "(" + w.str() + ")";
        return s;
    }
};

namespace detail {

inline void check_ultrametric(Valuation vb, Valuation vc, Valuation vbc) {
    Valuation m = min(vb, vc);
    if (vbc < m)
        throw UltrametricViolation("ord(b+c) = " + vbc.str() + " below min(ord b, ord c) = " +
                                   m.str());
    if (!(vb == vc) && !(vbc == m))
        throw UltrametricViolation("ord(b+c) must equal min(ord b, ord c) = " + m.str() +
                                   " when ord b != ord c, got " + vbc.str());
}

} // namespace detail

/// Classify the conductor exponent of (., a)_{ell^N} from a decomposition.
/// The triple (ord b, ord c, ord(b+c)) must be ultrametrically consistent.
inline ConductorClassification sharifi_conductor(const UnitDecomposition& d, u64 n_level) {
    const u64 ell = d.ell;
    const i64 n = static_cast<i64>(n_level);

    Valuation vb = d.ord_b_required();
    Valuation vc = d.ord_c_required();

    // ord(b+c) is consulted lazily: branches decidable without it must not
    // fail when only it is unresolved.
    auto vbc = [&d]() { return d.ord_b_plus_c_required(); };
    if (d.ord_b_plus_c.is_resolved())
        detail::check_ultrametric(vb, vc, d.ord_b_plus_c.peek_or(Valuation::infinity()));

    Valuation w = min(vb, vc);
    ConductorClassification out;
    out.w = w;

    if (w == Valuation::finite(0)) {
        out.branch = Branch::WZero;
        out.f = checked_pow_u64(ell, n_level - 1) * (ell + 1);
        return out;
    }
    if (w.is_infinite() || w.value() > n) {
        out.branch = Branch::TrivialTail;
        out.f = 0;
        return out;
    }
    if (w.value() < n) {
        Valuation bc = vbc();
        if (bc == w) {
            out.branch = Branch::RamifiedEqual;
            out.f = 2 * checked_pow_u64(ell, n_level - static_cast<u64>(w.value()));
        } else {
            out.branch = Branch::RamifiedGreater;
            out.f = checked_pow_u64(ell, n_level - static_cast<u64>(w.value()) - 1) * (ell - 1);
        }
        return out;
    }
    // w = N
    if (vc == Valuation::finite(n)) {
        Valuation bc = vbc();
        out.branch = bc == w ? Branch::RamifiedEqual : Branch::TameTwo;
        out.f = 2;
    } else {
        out.branch = Branch::TrivialTail;
        out.f = 0;
    }
    return out;
}

/// Conductor exponent f' of the twisted local character: equals the
/// Sharifi value on the two wild ramified branches and 1 otherwise.
inline u64 conductor_phi(const ConductorClassification& cls, u64 ell, u64 n_level) {
    switch (cls.branch) {
        case Branch::RamifiedEqual:
            return 2 * checked_pow_u64(ell, n_level - static_cast<u64>(cls.w.value()));
        case Branch::RamifiedGreater:
            return checked_pow_u64(ell, n_level - static_cast<u64>(cls.w.value()) - 1) *
                   (ell - 1);
        default:
            return 1;
    }
}

} // namespace rootnum
