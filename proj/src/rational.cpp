#include "galelab/rational.hpp"

#include <cmath>
#include <limits>

#include "galelab/errors.hpp"

namespace galelab {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

BigInt parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) {
    throw InputError("invalid rational literal '" + std::string(whole) + "'");
  }
  BigInt value(std::string(s), 10);
  return negative ? BigInt(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw InputError("empty rational literal");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(text.substr(0, slash), text);
    BigInt den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    bool negative = !int_part.empty() && int_part.front() == '-';
    if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) {
      int_part.remove_prefix(1);
    }
    if (int_part.empty()) int_part = "0";
    if (!all_digits(int_part) || !all_digits(frac_part)) {
      throw InputError("invalid rational literal '" + std::string(text) + "'");
    }
    BigInt num(std::string(int_part) + std::string(frac_part), 10);
    BigInt den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_part.size());
    Rational q(negative ? BigInt(-num) : num, den);
    q.canonicalize();
    return q;
  }
  return Rational(parse_integer(text, text));
}

std::string format_rational(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

long double log2_of(const BigInt& value) {
  if (value <= 0) {
    if (value == 0) return -std::numeric_limits<long double>::infinity();
    throw InputError("log2 of a negative integer");
  }
  long exponent = 0;
  double mantissa = mpz_get_d_2exp(&exponent, value.get_mpz_t());
  return static_cast<long double>(exponent) + std::log2(static_cast<long double>(mantissa));
}

long double log2_of(const Rational& value) {
  if (sgn(value) == 0) return -std::numeric_limits<long double>::infinity();
  return log2_of(BigInt(value.get_num())) - log2_of(BigInt(value.get_den()));
}

namespace {

// Top 64 bits of |z| as a long double, scaled back by the dropped bits.
long double integer_to_long_double(const BigInt& z) {
  BigInt magnitude = abs(z);
  std::size_t bits = mpz_sizeinbase(magnitude.get_mpz_t(), 2);
  long shift = bits > 64 ? static_cast<long>(bits - 64) : 0;
  BigInt top = magnitude >> shift;
  unsigned long long word = 0;
  mpz_export(&word, nullptr, -1, sizeof(word), 0, 0, top.get_mpz_t());
  long double out = std::ldexp(static_cast<long double>(word), static_cast<int>(shift));
  return sgn(z) < 0 ? -out : out;
}

}  // namespace

long double to_long_double(const Rational& value) {
  return integer_to_long_double(BigInt(value.get_num())) /
         integer_to_long_double(BigInt(value.get_den()));
}

Rational pow2(long exponent) {
  BigInt p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  if (exponent < 0) return Rational(BigInt(1), p);
  return Rational(p);
}

}  // namespace galelab
