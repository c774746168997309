#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace rbsing {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Parses "3/10", "-1/2", "0.3", "1e-2" or "2" into an exact rational.
/// Decimal forms are read digit-for-digit, so "0.3" is exactly 3/10.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);
std::string to_string(const BigInt& z);

double to_double(const Rational& q);

/// floor(q * 2^64) clamped to [0, 2^64 - 1]; used as the Bernoulli comparison threshold.
std::uint64_t scaled_threshold_u64(const Rational& q);

/// num/den in lowest terms (den != 0).
inline Rational make_rational(long num, long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

}  // namespace rbsing
