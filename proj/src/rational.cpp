#include "hkq/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "hkq/errors.hpp"

namespace hkq {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// The mpz string constructor reads a leading 0 as an octal prefix.
BigInt decimal_integer(std::string_view digits) {
  const auto first = digits.find_first_not_of('0');
  return first == std::string_view::npos ? BigInt(0) : BigInt(std::string(digits.substr(first)));
}

BigInt pow10(long long e) {
  BigInt r = 1;
  for (long long i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational parse_decimal(std::string_view text, std::string_view original) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  long long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = text.substr(e + 1);
    text = text.substr(0, e);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) {
      throw ParseError("invalid exponent in number '" + std::string(original) + "'");
    }
    exponent = std::stoll(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
  }
  std::string digits;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    if ((!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part)) || (int_part.empty() && frac_part.empty())) {
      throw ParseError("invalid number '" + std::string(original) + "'");
    }
    digits = std::string(int_part) + std::string(frac_part);
    exponent -= static_cast<long long>(frac_part.size());
  } else {
    if (!all_digits(text)) throw ParseError("invalid number '" + std::string(original) + "'");
    digits = std::string(text);
  }
  Rational value{decimal_integer(digits)};
  if (exponent > 0) value *= Rational(pow10(exponent));
  if (exponent < 0) value /= Rational(pow10(-exponent));
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view original = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw ParseError("empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    std::string_view num_digits = num;
    if (!num_digits.empty() && (num_digits.front() == '-' || num_digits.front() == '+')) {
      num_digits.remove_prefix(1);
    }
    if (!all_digits(num_digits) || !all_digits(den)) {
      throw ParseError("invalid rational '" + std::string(original) + "'");
    }
    BigInt d = decimal_integer(den);
    if (d == 0) throw ParseError("zero denominator in '" + std::string(original) + "'");
    BigInt p = decimal_integer(num_digits);
    if (num.front() == '-') p = -p;
    return Rational(p, d);
  }
  return parse_decimal(text, original);
}

std::string to_string(const Rational& value) {
  if (denominator(value) == 1) return numerator(value).str();
  return numerator(value).str() + "/" + denominator(value).str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational from_double(double value) {
  if (!std::isfinite(value)) throw Error("cannot convert a non-finite double to a rational");
  int exp = 0;
  double mant = std::frexp(value, &exp);
  // mant * 2^53 is an exact integer
  auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational r{BigInt(scaled)};
  exp -= 53;
  BigInt two_pow = 1;
  two_pow <<= static_cast<unsigned>(std::abs(exp));
  if (exp >= 0) return r * Rational(two_pow);
  return r / Rational(two_pow);
}

ExactComplex ExactComplex::inverse() const {
  Rational n = norm();
  if (n == 0) throw Error("inverse of zero complex number");
  return {re / n, -im / n};
}

ExactComplex power(const ExactComplex& a, long long e) {
  ExactComplex base = e < 0 ? a.inverse() : a;
  unsigned long long k = e < 0 ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
  ExactComplex result{1, 0};
  while (k > 0) {
    if (k & 1ULL) result = result * base;
    base = base * base;
    k >>= 1ULL;
  }
  return result;
}

std::vector<Rational> primitive_integer(const std::vector<Rational>& v) {
  BigInt lcm_den = 1;
  for (const auto& x : v) lcm_den = boost::multiprecision::lcm(lcm_den, BigInt(denominator(x)));
  std::vector<BigInt> ints;
  ints.reserve(v.size());
  BigInt g = 0;
  for (const auto& x : v) {
    BigInt scaled = numerator(x) * (lcm_den / denominator(x));
    g = boost::multiprecision::gcd(g, scaled);
    ints.push_back(std::move(scaled));
  }
  std::vector<Rational> out;
  out.reserve(v.size());
  for (auto& x : ints) out.emplace_back(g == 0 ? x : BigInt(x / g));
  return out;
}

}  // namespace hkq
