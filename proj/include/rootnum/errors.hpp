#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rootnum {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A residue expected to be a unit is divisible by the prime.
class NonUnitError : public Error {
  public:
    using Error::Error;
};

/// Decomposition or factor input was zero where nonzero is required.
class ZeroInputError : public Error {
  public:
    using Error::Error;
};

/// A valuation could not be resolved at the current working precision.
/// Callers retry with a larger precision instead of accepting a bound.
class PrecisionExhausted : public Error {
  public:
    PrecisionExhausted(const std::string& field, std::uint32_t precision)
        : Error("precision exhausted resolving " + field + " at " +
                std::to_string(precision) + " digits"),
          field_(field), precision_(precision) {}

    const std::string& field() const noexcept { return field_; }
    std::uint32_t precision() const noexcept { return precision_; }

  private:
    std::string field_;
    std::uint32_t precision_;
};

/// Series operands disagree in modulus or truncation order.
class ShapeMismatch : public Error {
  public:
    using Error::Error;
};

class OutOfRange : public Error {
  public:
    using Error::Error;
};

/// Classification input valuations violate the ultrametric inequality,
/// so they cannot come from a genuine decomposition.
class UltrametricViolation : public Error {
  public:
    using Error::Error;
};

/// A wild-symbol argument is not a unit: its valuation is off by a known
/// amount.  `argument_valuation` is the full valuation including the J
/// factor; `c_valuation_offset` is ord(c) - N alone.
class DegenerateArgument : public Error {
  public:
    DegenerateArgument(std::int64_t argument_valuation, std::int64_t c_valuation_offset)
        : Error("wild symbol argument has valuation " +
                std::to_string(argument_valuation) + " (expected 0)"),
          argument_valuation_(argument_valuation),
          c_valuation_offset_(c_valuation_offset) {}

    std::int64_t argument_valuation() const noexcept { return argument_valuation_; }
    std::int64_t c_valuation_offset() const noexcept { return c_valuation_offset_; }

  private:
    std::int64_t argument_valuation_;
    std::int64_t c_valuation_offset_;
};

/// An exact division in Z/l^M failed (total valuation went negative).
class InexactDivision : public Error {
  public:
    using Error::Error;
};

/// Two redundant computation routes disagreed, or an internally derived
/// quantity failed its closed-form cross-check.
class InternalInconsistency : public Error {
  public:
    using Error::Error;
};

class BadIndex : public Error {
  public:
    using Error::Error;
};

class PreconditionViolated : public Error {
  public:
    using Error::Error;
};

/// Curve parameter validation failure; `code` names the violated invariant.
class InvalidParams : public Error {
  public:
    InvalidParams(const std::string& code, const std::string& message)
        : Error(message), code_(code) {}

    const std::string& code() const noexcept { return code_; }

  private:
    std::string code_;
};

/// delta has a cofactor that trial division plus the perfect-power checks
/// cannot resolve into primes.
class UnfactoredCofactor : public Error {
  public:
    using Error::Error;
};

/// Exact integer arithmetic would overflow the widest supported type.
class NumericOverflow : public Error {
  public:
    using Error::Error;
};

} // namespace rootnum
