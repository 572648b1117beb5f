#include "meda/gaussian_rational.hpp"

#include <climits>
#include <cmath>

#include "meda/error.hpp"

namespace meda {

namespace {

std::string rational_str(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::optional<mpq_class> rational_sqrt(const mpq_class& q) {
  if (sgn(q) < 0) return std::nullopt;
  const mpz_class& num = q.get_num();
  const mpz_class& den = q.get_den();
  if (mpz_perfect_square_p(num.get_mpz_t()) == 0 || mpz_perfect_square_p(den.get_mpz_t()) == 0) {
    return std::nullopt;
  }
  mpz_class rn;
  mpz_class rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  mpq_class r(rn, rd);
  r.canonicalize();
  return r;
}

}  // namespace

GaussianRational::GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

GaussianRational GaussianRational::ratio(long num, long den) {
  if (den == 0) throw DivisionByZero();
  mpq_class q(num, den);
  q.canonicalize();
  return {q, 0};
}

GaussianRational GaussianRational::from_double(double re, double im) {
  if (!std::isfinite(re) || !std::isfinite(im)) throw Error("non-finite value cannot be made exact");
  return {mpq_class(re), mpq_class(im)};
}

GaussianRational GaussianRational::parse_decimal(std::string_view text) {
  const auto dot = text.find('.');
  std::string digits(text.substr(0, dot));
  std::string frac;
  if (dot != std::string_view::npos) frac = std::string(text.substr(dot + 1));
  if (digits.empty()) digits = "0";
  mpz_class num(digits + frac, 10);
  mpz_class den = 1;
  for (std::size_t k = 0; k < frac.size(); ++k) den *= 10;
  mpq_class q(num, den);
  q.canonicalize();
  return {q, 0};
}

std::optional<long> GaussianRational::to_integer() const {
  if (!is_integer()) return std::nullopt;
  const mpz_class& n = re_.get_num();
  if (!n.fits_slong_p()) return std::nullopt;
  return n.get_si();
}

GaussianRational GaussianRational::inverse() const {
  if (is_zero()) throw DivisionByZero();
  mpq_class norm = re_ * re_ + im_ * im_;
  return {re_ / norm, -im_ / norm};
}

GaussianRational GaussianRational::pow(long exponent) const {
  if (exponent < 0) return inverse().pow(-exponent);
  GaussianRational result(1);
  GaussianRational base = *this;
  unsigned long e = static_cast<unsigned long>(exponent);
  while (e != 0) {
    if ((e & 1UL) != 0) result *= base;
    e >>= 1U;
    if (e != 0) base *= base;
  }
  return result;
}

std::optional<GaussianRational> GaussianRational::exact_sqrt() const {
  if (is_zero()) return GaussianRational(0);
  if (!is_real()) return std::nullopt;
  if (sgn(re_) > 0) {
    if (auto r = rational_sqrt(re_)) return GaussianRational(*r, 0);
    return std::nullopt;
  }
  if (auto r = rational_sqrt(-re_)) return GaussianRational(0, *r);
  return std::nullopt;
}

std::string GaussianRational::str() const {
  if (is_real()) return rational_str(re_);
  auto imag_part = [](const mpq_class& q) -> std::string {
    if (q == 1) return "i";
    if (q == -1) return "-i";
    return rational_str(q) + "*i";
  };
  if (sgn(re_) == 0) return imag_part(im_);
  std::string out = "(" + rational_str(re_);
  if (sgn(im_) > 0) out += "+";
  out += imag_part(im_);
  out += ")";
  return out;
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  if (is_real() && o.is_real()) {
    re_ *= o.re_;
    return *this;
  }
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  if (o.is_zero()) throw DivisionByZero();
  if (is_real() && o.is_real()) {
    re_ /= o.re_;
    return *this;
  }
  return *this *= o.inverse();
}

std::strong_ordering operator<=>(const GaussianRational& a, const GaussianRational& b) {
  const int c = cmp(a.re_, b.re_);
  if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  const int d = cmp(a.im_, b.im_);
  if (d != 0) return d < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace meda
