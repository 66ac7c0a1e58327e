#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace hyperprob {

/// Exact rational number. mpq_class keeps values canonical (lowest terms,
/// positive denominator) as long as every constructed value goes through
/// make_rational or parse_rational.
using Rational = mpq_class;

Rational make_rational(long numerator, long denominator = 1);

/// Accepts `p/q`, integers and finite decimals (`0.25`). Throws
/// Error(ErrorKind::Parse) on anything else or on a zero denominator.
Rational parse_rational(std::string_view text);

/// `p/q`, or just `p` when the denominator is 1.
std::string format_rational(const Rational& value);

double to_double(const Rational& value);

}  // namespace hyperprob
