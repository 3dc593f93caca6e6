#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace combasym {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;
using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

enum class Rounding { Nearest, Downward };

struct PrecisionContext {
  unsigned bits = 256;
  Rounding rounding = Rounding::Nearest;
  unsigned oracle_digits = 100;

  static PrecisionContext from_env();
  PrecisionContext with_bits(unsigned b) const;
  unsigned digits() const;
  // 2^-(bits-16): stopping threshold for Newton steps
  Real tolerance() const;
  // 2^-(bits/2): threshold below which computed quantities are treated as zero
  Real zero_threshold() const;
};

class PrecisionExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sets the MPFR default precision for the lifetime of the scope.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  explicit PrecisionScope(const PrecisionContext& ctx) : PrecisionScope(ctx.bits) {}
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

Real parse_real(const std::string& s);
// Copy of x carried at `bits` of precision (arithmetic keeps the larger operand precision).
Real with_bits(const Real& x, unsigned bits);
std::vector<Real> with_bits(const std::vector<Real>& v, unsigned bits);
Rational parse_rational(const std::string& s);
Real to_real(const Rational& q);
Real pi();
Real ldexp2(int e);  // 2^e
std::string to_string(const Real& x, int digits);
std::string to_string(const Rational& q);

struct Complex {
  Real re, im;
  Complex() : re(0), im(0) {}
  Complex(int x) : re(x), im(0) {}
  Complex(const Real& r) : re(r), im(0) {}
  Complex(const Real& r, const Real& i) : re(r), im(i) {}

  Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
  Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
  Complex& operator*=(const Complex& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    Real d = o.re * o.re + o.im * o.im;
    Real r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = r;
    return *this;
  }
  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }
};

Real abs(const Complex& z);
Real arg(const Complex& z);
Complex conj(const Complex& z);
Complex exp(const Complex& z);
Complex log(const Complex& z);
Complex sqrt(const Complex& z);
Complex pow(const Complex& a, const Complex& b);
Complex pow(const Complex& a, long n);
Complex polar(const Real& r, const Real& theta);
// e^{2 pi i t}
Complex turn(const Rational& t);
std::string to_string(const Complex& z, int digits);

inline Real magnitude(const Real& x) { return boost::multiprecision::abs(x); }
inline Real magnitude(const Complex& z) { return abs(z); }

// Forward-mode dual number; nests (Dual<Dual<T>>) for second derivatives.
template <class T>
struct Dual {
  T v, d;
  Dual() : v(0), d(0) {}
  Dual(int x) : v(x), d(0) {}
  Dual(const T& x) : v(x), d(0) {}
  Dual(const T& x, const T& dx) : v(x), d(dx) {}
  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
  }
  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }
  friend Dual exp(const Dual& a) {
    using std::exp;
    T e = exp(a.v);
    return {e, e * a.d};
  }
  friend Dual log(const Dual& a) {
    using std::log;
    return {log(a.v), a.d / a.v};
  }
};

template <class T>
Real magnitude(const Dual<T>& x) {
  return magnitude(x.v);
}

template <class T>
const Real& real_part(const T& x);
inline const Real& real_part(const Real& x) { return x; }
inline const Real& real_part(const Complex& z) { return z.re; }
template <class T>
const Real& real_part(const Dual<T>& x) {
  return real_part(x.v);
}

}  // namespace combasym
