#include "macc/rational.hpp"

#include <cctype>

#include "macc/errors.hpp"

namespace macc {

namespace {

boost::multiprecision::cpp_int parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw InvalidArgument("malformed number '" + std::string(whole) + "'");
  boost::multiprecision::cpp_int value = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw InvalidArgument("malformed number '" + std::string(whole) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Rational value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto den = parse_integer(text.substr(slash + 1), whole);
    if (den == 0) throw InvalidArgument("zero denominator in '" + std::string(whole) + "'");
    value = Rational(parse_integer(text.substr(0, slash), whole), den);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto int_part = text.substr(0, dot);
    auto frac_part = text.substr(dot + 1);
    boost::multiprecision::cpp_int scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    auto head = int_part.empty() ? boost::multiprecision::cpp_int(0) : parse_integer(int_part, whole);
    auto tail = frac_part.empty() ? boost::multiprecision::cpp_int(0) : parse_integer(frac_part, whole);
    if (int_part.empty() && frac_part.empty())
      throw InvalidArgument("malformed number '" + std::string(whole) + "'");
    value = Rational(head * scale + tail, scale);
  } else {
    value = Rational(parse_integer(text, whole));
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) { return value.str(); }

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational floor_div(const Rational& a, const Rational& b) {
  Rational q = a / b;
  boost::multiprecision::cpp_int n = numerator(q);
  boost::multiprecision::cpp_int d = denominator(q);
  boost::multiprecision::cpp_int f = n / d;
  if (n < 0 && f * d != n) f -= 1;
  return Rational(f);
}

bool is_integer(const Rational& value) { return denominator(value) == 1; }

}  // namespace macc
