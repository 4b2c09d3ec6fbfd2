#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace apm {

// Exact rational scalar. mpq_class keeps values in canonical form
// (reduced, positive denominator) after every arithmetic operation.
using Rational = mpq_class;
using Integer = mpz_class;

// Parses "p/q" or "p" (optional sign). Decimal points and exponents are
// rejected: every value must be given exactly. Throws ConfigError.
Rational parse_rational(std::string_view text);

// Canonical "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& q);

// Decimal approximation truncated toward zero to `digits` fractional digits,
// prefixed with '~' so it is never mistaken for an exact value.
std::string to_decimal(const Rational& q, int digits);

Rational abs(const Rational& q);

// 2^e for any integer e (negative exponents give 1/2^|e|).
Rational pow2(long e);

// 3^e for e >= 0, as an exact integer-valued rational.
Rational pow3(unsigned long e);

// q^n for n >= 0.
Rational power(const Rational& q, unsigned long n);

}  // namespace apm
