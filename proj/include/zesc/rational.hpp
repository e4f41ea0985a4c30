#ifndef ZESC_RATIONAL_HPP
#define ZESC_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <optional>
#include <string>
#include <string_view>

namespace zesc {

// Exact probabilities. Tables are tiny, so arbitrary precision costs nothing.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Parses "3/10", "0.3", "1", "2.5e-3". Returns nullopt on malformed input.
inline std::optional<Rational> parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  auto parse_int = [](std::string_view s) -> std::optional<boost::multiprecision::cpp_int> {
    if (s.empty()) return std::nullopt;
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
      neg = s[0] == '-';
      i = 1;
    }
    if (i == s.size()) return std::nullopt;
    boost::multiprecision::cpp_int v = 0;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return std::nullopt;
      v = v * 10 + (s[i] - '0');
    }
    return neg ? -v : v;
  };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_int(text.substr(0, slash));
    auto den = parse_int(text.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    return Rational(*num, *den);
  }

  int exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    auto exp_text = text.substr(e + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc() || ptr != exp_text.data() + exp_text.size()) return std::nullopt;
    text = text.substr(0, e);
  }

  std::string digits;
  int frac_digits = 0;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    digits = std::string(text.substr(0, dot));
    auto frac = text.substr(dot + 1);
    if (frac.find_first_not_of("0123456789") != std::string_view::npos) return std::nullopt;
    digits += frac;
    frac_digits = static_cast<int>(frac.size());
    if (digits.empty() || digits == "-" || digits == "+") return std::nullopt;
  } else {
    digits = std::string(text);
  }
  auto mantissa = parse_int(digits);
  if (!mantissa) return std::nullopt;

  int scale = exponent - frac_digits;
  boost::multiprecision::cpp_int pow10 = 1;
  for (int k = 0; k < (scale < 0 ? -scale : scale); ++k) pow10 *= 10;
  return scale >= 0 ? Rational(*mantissa * pow10) : Rational(*mantissa, pow10);
}

// Finite doubles become the decimal they print as under shortest round-trip,
// so 0.3 in a JSON file is stored as exactly 3/10.
inline Rational rational_from_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::invalid_argument("cannot format probability");
  auto parsed = parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
  if (!parsed) throw std::invalid_argument("probability is not a finite number");
  return *parsed;
}

inline std::string to_string(const Rational& r) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace zesc

#endif  // ZESC_RATIONAL_HPP
