#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "combasym/singularities.hpp"

namespace combasym {

// Truncated log-Puiseux expansion at a point sigma, in Z = 1 - z/sigma and L = ln(1/Z):
// a finite sum of c Z^e L^k plus O(Z^order L^order_log). Exponents are grouped in classes
// alpha + i/r with Re(alpha) in [0, 1/r), so terms of one class combine exactly.
class Expansion {
 public:
  struct Key {
    int cls = 0;
    long i = 0;
    int k = 0;
    auto operator<=>(const Key&) const = default;
  };

  int r = 1;
  std::vector<Complex> classes;
  std::map<Key, Complex> terms;
  Real order = exact_order();
  int order_log = 0;
  bool superpolynomial = false;  // EXP: no expansion of this kind exists

  static Real exact_order() { return Real(1000000); }
  static Expansion exp_sentinel();
  static Expansion constant(const Complex& c, const Real& order = exact_order());
  // c Z^e L^k
  static Expansion monomial(const Complex& c, const Complex& e, int k, const Real& order = exact_order());
  // z = sigma - sigma Z
  static Expansion variable(const Complex& sigma);

  Complex exponent(const Key& key) const;
  Real real_exponent(const Key& key) const;
  // smallest real exponent of a nonzero term; order when there is none
  Real valuation() const;
  Complex coefficient(const Complex& e, int k) const;
  int max_log() const;
  Real magnitude() const;
  bool exact() const { return order > exact_order() / 2; }

  void add_term(const Complex& e, int k, const Complex& c);
  void lift(int r2);
  void truncate(const Real& o);
  void clean(const Real& eps);  // drops |c| <= eps
  Expansion shifted(const Complex& e) const;  // times Z^e
  // terms in increasing real exponent, then class, then log power
  std::vector<Key> sorted_keys() const;
  std::string to_string(int digits) const;

 private:
  int class_of(const Complex& e, long& shift);
};

Expansion operator+(const Expansion& a, const Expansion& b);
Expansion operator-(const Expansion& a, const Expansion& b);
Expansion operator-(const Expansion& a);
Expansion operator*(const Expansion& a, const Expansion& b);
Expansion operator*(const Complex& c, const Expansion& a);

// Operations below truncate at `cap` when their input is exact.
// sum a_j w^j for w tending to 0
Expansion compose(const Expansion& w, const std::function<Complex(int)>& a, const Real& cap);
Expansion inverse(const Expansion& d, const Real& cap);
Expansion exp(const Expansion& u, const Real& cap);                // Set
Expansion inv_one_minus(const Expansion& u, const Real& cap);      // Seq
Expansion log_inv_one_minus(const Expansion& u, const Real& cap);  // Cyc

// Halving bookkeeping for a singular nonlinear block: the first unknown is
// Y_1(rho) + delta v, v = Z^{1/(2r)}.
struct HalvingTrace {
  int first = -1;                // normal coordinate carrying delta
  std::vector<int> rest;         // the other unknowns
  int ramification = 2;          // 2r
  // rest[i] as series in v with polynomial-in-delta coefficients: S[i][j][d]
  std::vector<std::vector<std::vector<Complex>>> S;
  std::vector<std::vector<Complex>> E;  // E(v, delta) the same way
  Real eps1 = 0, eps2 = 0;              // magnitudes of the discarded orders v^0, v^1
  Complex c, d;                         // v^2 coefficient of E is c - d delta^2
  std::vector<Complex> Delta;           // root series, Delta[0] = -sqrt(c/d)
};

struct ComponentBehavior {
  std::string branch;  // nonrecursive, linear, regular, singular, rotated, superpolynomial
  std::optional<HalvingTrace> halving;
};

struct LocalBehavior {
  Turn arg = 0;
  Complex sigma;
  int p = 8;
  std::vector<Expansion> coords;             // per normal coordinate
  std::vector<ComponentBehavior> components;  // parallel to the component DAG
};

// Expansions of all coordinates at sigma = R e^{2 pi i arg}, known to O(Z^{p/2}).
// Exact expansions are kept whole.
LocalBehavior localbehavior(const NormalSystem& sys, const DominantSet& d, const Turn& arg, int p,
                            const PrecisionContext& ctx);

// One LocalBehavior per dominant singularity, arg 0 first.
std::vector<LocalBehavior> singular_expansions(const NormalSystem& sys, const DominantSet& d, int p,
                                               const PrecisionContext& ctx);

struct Residual {
  Real max = 0;    // largest coefficient of Y - H(z, Y)
  Real order = 0;  // smallest order to which the residual is known
  int coord = -1;  // where the maximum occurs
};

// Y - H(z, Y) in truncated arithmetic, over coordinates that are not EXP.
Residual residual(const NormalSystem& sys, const LocalBehavior& lb);

}  // namespace combasym
