#include "combasym/numeric.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <sstream>

namespace combasym {

PrecisionContext PrecisionContext::from_env() {
  PrecisionContext ctx;
  if (const char* p = std::getenv("COMBASYM_PREC")) {
    long b = std::strtol(p, nullptr, 10);
    if (b >= 64) ctx.bits = static_cast<unsigned>(b);
  }
  return ctx;
}

PrecisionContext PrecisionContext::with_bits(unsigned b) const {
  PrecisionContext c = *this;
  c.bits = b < 64 ? 64 : b;
  return c;
}

unsigned PrecisionContext::digits() const {
  return static_cast<unsigned>(bits * 0.30102999566398120);
}

Real PrecisionContext::tolerance() const { return ldexp2(-static_cast<int>(bits) + 16); }

Real PrecisionContext::zero_threshold() const { return ldexp2(-static_cast<int>(bits / 2)); }

Real with_bits(const Real& x, unsigned bits) {
  Real r = x;
  r.precision(static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1);
  return r;
}

std::vector<Real> with_bits(const std::vector<Real>& v, unsigned bits) {
  std::vector<Real> out;
  for (const auto& x : v) out.push_back(with_bits(x, bits));
  return out;
}

PrecisionScope::PrecisionScope(unsigned bits) : saved_(Real::default_precision()) {
  unsigned d10 = static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
  Real::default_precision(d10);
}

PrecisionScope::~PrecisionScope() { Real::default_precision(saved_); }

Real parse_real(const std::string& s) { return Real(s); }

Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos)
    return Rational(Integer(s.substr(0, slash)), Integer(s.substr(slash + 1)));
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(Integer(s));
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  Integer den = 1;
  for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
  return Rational(Integer(digits), den);
}

Real to_real(const Rational& q) {
  return Real(Real(boost::multiprecision::numerator(q)) / Real(boost::multiprecision::denominator(q)));
}

Real pi() { return boost::math::constants::pi<Real>(); }

Real ldexp2(int e) { return boost::multiprecision::ldexp(Real(1), e); }

std::string to_string(const Real& x, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

Real abs(const Complex& z) { return boost::multiprecision::hypot(z.re, z.im); }

Real arg(const Complex& z) { return boost::multiprecision::atan2(z.im, z.re); }

Complex conj(const Complex& z) { return Complex(z.re, -z.im); }

Complex exp(const Complex& z) {
  Real m = boost::multiprecision::exp(z.re);
  return Complex(m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im));
}

Complex log(const Complex& z) { return Complex(boost::multiprecision::log(abs(z)), arg(z)); }

Complex sqrt(const Complex& z) {
  if (z.re == 0 && z.im == 0) return Complex();
  Real r = abs(z);
  Real a = boost::multiprecision::sqrt((r + boost::multiprecision::abs(z.re)) / 2);
  if (z.re >= 0) return Complex(a, z.im / (2 * a));
  Real b = z.im >= 0 ? a : Real(-a);
  return Complex(z.im / (2 * b), b);
}

Complex pow(const Complex& a, const Complex& b) {
  if (a.re == 0 && a.im == 0) return Complex();
  return exp(b * log(a));
}

Complex pow(const Complex& a, long n) {
  if (n < 0) return Complex(1) / pow(a, -n);
  Complex r(1), x = a;
  while (n) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

Complex polar(const Real& r, const Real& theta) {
  return Complex(r * boost::multiprecision::cos(theta), r * boost::multiprecision::sin(theta));
}

Complex turn(const Rational& t) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  Integer p = numerator(t), q = denominator(t);
  Integer k = p % q;
  if (k < 0) k += q;
  if (k == 0) return Complex(1);
  if (q == 2) return Complex(-1);
  if (q == 4) return k == 1 ? Complex(Real(0), Real(1)) : Complex(Real(0), Real(-1));
  return polar(Real(1), 2 * pi() * to_real(Rational(k, q)));
}

std::string to_string(const Complex& z, int digits) {
  if (z.im == 0) return to_string(z.re, digits);
  std::string s = to_string(z.re, digits);
  if (z.im >= 0) s += "+";
  s += to_string(z.im, digits) + "i";
  return s;
}

}  // namespace combasym
