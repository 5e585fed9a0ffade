#pragma once

// Exact natural-number arithmetic for rate functionals. Every operation is
// checked; leaving the 64-bit range raises OverflowError instead of wrapping.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "sqrtsg/errors.hpp"

namespace sqrtsg {

using Nat = std::uint64_t;

inline Nat nat_add(Nat a, Nat b) {
    Nat r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw OverflowError("natural addition overflow: " + std::to_string(a) + " + " + std::to_string(b));
    }
    return r;
}

inline Nat nat_mul(Nat a, Nat b) {
    Nat r;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw OverflowError("natural multiplication overflow: " + std::to_string(a) + " * " +
                            std::to_string(b));
    }
    return r;
}

/// Truncated subtraction a ∸ b = max(a - b, 0).
constexpr Nat trunc_sub(Nat a, Nat b) noexcept { return a > b ? a - b : 0; }

inline Nat nat_sq(Nat a) { return nat_mul(a, a); }

/// Smallest natural >= v. Values beyond 2^53 are rejected since they are no
/// longer exact in double precision.
inline Nat ceil_nat(double v) {
    if (!std::isfinite(v)) throw OverflowError("non-finite value cannot be rounded to a natural");
    if (v <= 0.0) return 0;
    const double c = std::ceil(v);
    if (c > 9007199254740992.0) throw OverflowError("value exceeds exact natural range: " + std::to_string(v));
    return static_cast<Nat>(c);
}

}  // namespace sqrtsg
