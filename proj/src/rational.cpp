#include "rsyn/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace rsyn {

Rat rat_parse(const std::string& text) {
  if (text.empty())
    throw std::invalid_argument("empty rational literal");
  auto dot = text.find('.');
  if (dot != std::string::npos) {
    // decimal form: mantissa / 10^frac_digits
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    size_t frac = text.size() - dot - 1;
    if (frac == 0 || digits.empty() || digits == "-" || digits == "+")
      throw std::invalid_argument("malformed decimal literal: " + text);
    for (size_t i = 0; i < digits.size(); ++i) {
      char ch = digits[i];
      if (!(std::isdigit(static_cast<unsigned char>(ch)) ||
            (i == 0 && (ch == '-' || ch == '+'))))
        throw std::invalid_argument("malformed decimal literal: " + text);
    }
    mpz_class num(digits, 10);
    mpz_class den(1);
    for (size_t i = 0; i < frac; ++i) den *= 10;
    Rat q(num, den);
    q.canonicalize();
    return q;
  }
  try {
    Rat q(text, 10);
    if (q.get_den() == 0)
      throw std::invalid_argument("zero denominator: " + text);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("malformed rational literal: " + text);
  }
}

std::string rat_str(const Rat& q) {
  return q.get_str();
}

double rat_to_double(const Rat& q) {
  return q.get_d();
}

Rat rat_round_to_denom(double value, unsigned long denom_pow2) {
  mpz_class den(1);
  den <<= denom_pow2;
  double scaled = value * std::ldexp(1.0, static_cast<int>(denom_pow2));
  mpz_class num(static_cast<long>(std::llround(scaled)));
  Rat q(num, den);
  q.canonicalize();
  return q;
}

Rat rat_frac(long num, long den) {
  if (den == 0) throw std::invalid_argument("rat_frac: zero denominator");
  Rat q(num, den);
  q.canonicalize();
  return q;
}

Rat rat_abs(const Rat& q) {
  return q < 0 ? Rat(-q) : q;
}

Vec vec_of(std::initializer_list<long> xs) {
  Vec v;
  v.reserve(xs.size());
  for (long x : xs) v.emplace_back(x);
  return v;
}

bool vec_eq(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

} // namespace rsyn
