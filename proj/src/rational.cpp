#include "apm/rational.hpp"

#include <cctype>

#include "apm/errors.hpp"

namespace apm {

namespace {

bool is_integer_literal(std::string_view s) {
  std::size_t i = 0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

Integer parse_integer(std::string_view s) {
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  return Integer(std::string(s), 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  const auto slash = text.find('/');
  const auto num_text = text.substr(0, slash);
  if (!is_integer_literal(num_text))
    throw ConfigError("not an exact fraction: '" + std::string(text) + "'");
  Rational q;
  if (slash == std::string_view::npos) {
    q = Rational(parse_integer(num_text));
  } else {
    const auto den_text = text.substr(slash + 1);
    if (!is_integer_literal(den_text) || den_text[0] == '-' || den_text[0] == '+')
      throw ConfigError("not an exact fraction: '" + std::string(text) + "'");
    Integer den = parse_integer(den_text);
    if (den == 0) throw ConfigError("zero denominator: '" + std::string(text) + "'");
    q = Rational(parse_integer(num_text), den);
    q.canonicalize();
  }
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

std::string to_decimal(const Rational& q, int digits) {
  if (digits < 0) digits = 0;
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  Integer num = q.get_num();
  const bool negative = num < 0;
  if (negative) num = -num;
  Integer scaled = (num * scale) / q.get_den();
  std::string s = scaled.get_str(10);
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits))
      s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  return std::string("~") + (negative ? "-" : "") + s;
}

Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Rational pow2(long e) {
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
  if (e >= 0) return Rational(p);
  return Rational(Integer(1), p);
}

Rational pow3(unsigned long e) {
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), 3, e);
  return Rational(p);
}

Rational power(const Rational& q, unsigned long n) {
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), n);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), n);
  Rational out(num, den);
  out.canonicalize();
  return out;
}

}  // namespace apm
