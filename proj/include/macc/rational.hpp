#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace macc {

/// Exact arbitrary-precision rational used for every cost that must compare
/// with equality.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "7", "-3/4" or a finite decimal such as "0.25" exactly.
Rational parse_rational(std::string_view text);

/// "28/3", "2", "-1/2".
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// floor(a / b) for positive b.
Rational floor_div(const Rational& a, const Rational& b);

bool is_integer(const Rational& value);

}  // namespace macc
