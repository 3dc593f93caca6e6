#pragma once

#include <stdexcept>
#include <vector>

#include "combasym/normal.hpp"
#include "combasym/numeric.hpp"

namespace combasym {

// Exact truncated EGF: c[n] is the coefficient of z^n, i.e. count_n / n!.
struct SeriesTruncation {
  std::vector<Rational> c;

  int order() const { return static_cast<int>(c.size()) - 1; }
  Integer count(int n) const;  // n! c_n
};

enum class SeriesMethod { Recurrence, FixedPoint };

class NotWellFoundedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Coefficients 0..N of every coordinate. Throws NotWellFoundedError when the
// system fails the leading-term check.
std::vector<SeriesTruncation> expand_coefficients(const NormalSystem& sys, int N,
                                                  SeriesMethod method = SeriesMethod::Recurrence);

// Exact partial sum sum_{n<=N} c_n a^n.
Rational eval_truncation(const SeriesTruncation& s, const Rational& a);

// Ordinary truncated-series helpers over Q (all truncated to the length of the first argument).
namespace qseries {
std::vector<Rational> mul(const std::vector<Rational>& a, const std::vector<Rational>& b);
std::vector<Rational> exp(const std::vector<Rational>& y);      // y_0 = 0
std::vector<Rational> inv_one_minus(const std::vector<Rational>& y);  // 1/(1-y), y_0 = 0
std::vector<Rational> log_inv_one_minus(const std::vector<Rational>& y);  // ln(1/(1-y)), y_0 = 0
}  // namespace qseries

}  // namespace combasym
