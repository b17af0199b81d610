#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace amalgam {

/// Exact arbitrary-precision rational, always kept in canonical form.
using Rational = mpq_class;

/// Canonical text form "p/q" with q > 0 and gcd(p, q) = 1. Zero is "0/1".
std::string to_string(const Rational& value);

/// Parses the canonical "p/q" form. Non-reduced fractions, zero or negative
/// denominators, signs on the denominator and bare integers are rejected.
Rational parse_rational(std::string_view text);

}  // namespace amalgam
