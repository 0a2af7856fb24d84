#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace busfreq {

// Instance/file contents that violate the data contract (bad rows, dangling
// ids, non-monotone travel times, ...). CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A well-formed instance that cannot be solved as requested (quota exceeds
// candidates, enumeration over limit, ...). CLI maps this to exit code 2.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// API misuse (querying a committed bus, double commit). Programming error,
// not recoverable input trouble.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Exact non-negative rational. Small by construction (numerators bounded by
// passenger counts, denominators by objective values), so int64 components
// with 128-bit cross multiplication never overflow.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  static Rational zero() { return Rational(); }

  void normalize() {
    if (den == 0) throw ValidationError("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_zero() const { return num == 0; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }
};

// Parses "0.2", "1e-4", "3/100", "1" into an exact rational. Decimal and
// scientific forms are parsed digit-wise, never through a double, so the
// result is the exact number written in the text.
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& r);

}  // namespace busfreq
