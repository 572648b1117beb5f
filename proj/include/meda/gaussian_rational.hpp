#pragma once

#include <gmpxx.h>

#include <compare>
#include <complex>
#include <optional>
#include <string>
#include <string_view>

namespace meda {

/// Exact complex number p + q*i with p, q rational (GMP-backed, always
/// gcd-reduced with positive denominators).
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long value) : re_(value) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(mpq_class re, mpq_class im = 0);

  static GaussianRational i() { return {0, 1}; }
  static GaussianRational ratio(long num, long den);
  /// Exact value of a double (every finite double is a dyadic rational).
  static GaussianRational from_double(double re, double im = 0.0);
  static GaussianRational from_complex(std::complex<double> z) { return from_double(z.real(), z.imag()); }
  /// Parses an unsigned decimal literal such as "12" or "0.25".
  static GaussianRational parse_decimal(std::string_view text);

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_imaginary() const { return sgn(re_) == 0 && sgn(im_) != 0; }
  bool is_integer() const { return is_real() && re_.get_den() == 1; }
  /// Real part negative and imaginary part zero.
  bool is_negative_real() const { return is_real() && sgn(re_) < 0; }
  std::optional<long> to_integer() const;

  GaussianRational conj() const { return {re_, -im_}; }
  GaussianRational inverse() const;
  GaussianRational pow(long exponent) const;
  /// Exact square root when the value is a real rational square (or the
  /// negative of one); nullopt otherwise.
  std::optional<GaussianRational> exact_sqrt() const;

  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }
  /// Grammar-compatible rendering: "3/2", "-i", "2*i", "(1/2+3*i)".
  std::string str() const;

  GaussianRational operator-() const { return {-re_, -im_}; }
  GaussianRational& operator+=(const GaussianRational& o);
  GaussianRational& operator-=(const GaussianRational& o);
  GaussianRational& operator*=(const GaussianRational& o);
  GaussianRational& operator/=(const GaussianRational& o);

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  /// Lexicographic on (re, im); only meaningful as a canonical sort key.
  friend std::strong_ordering operator<=>(const GaussianRational& a, const GaussianRational& b);

 private:
  mpq_class re_;
  mpq_class im_;
};

}  // namespace meda
