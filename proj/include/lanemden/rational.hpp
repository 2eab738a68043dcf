#pragma once

// Exact rationals over int64 with overflow detection, for deciding which side
// of a serrin/sobolev curve an (alpha, p) pair lies on.

#include <compare>
#include <cstdint>
#include <string>

namespace lanemden {

class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  /// Best approximation with denominator <= max_den (continued fractions).
  /// Exact for decimals such as 0.05 k when max_den is large enough.
  static Rational from_double(double x, std::int64_t max_den = 1'000'000);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-num_, den_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace lanemden
