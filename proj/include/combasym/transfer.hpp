#pragma once

#include <stdexcept>
#include <vector>

#include "combasym/localexp.hpp"

namespace combasym {

// The coordinate grows superpolynomially at a dominant singularity; singularity
// analysis does not apply.
class SuperpolynomialRegime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// [z^n] of Z^alpha L^k, Z = 1 - z:
// (-1)^k d^k/dalpha^k Gamma(n - alpha) / (Gamma(-alpha) Gamma(n + 1)), and 0 for alpha in N, k = 0.
// For integer n the Gamma ratio is the polynomial prod_{j<n} (j - alpha)/(j + 1) in alpha,
// which is differentiated exactly.
Complex cn(long n, const Complex& alpha, int k);

// 1/Gamma(w), entire in w.
Complex rgamma(const Complex& w);

// Stirling form of C_n(alpha, k): n^{-alpha-1} sum_{j<J, l<=k} D[j][l] ln^l(n) / n^j.
std::vector<std::vector<Complex>> cn_stirling(const Complex& alpha, int k, int J);

struct TransferTerm {
  Turn arg = 0;
  Complex sigma;
  Complex alpha;  // exponent of Z
  int k = 0;      // power of L
  Complex c;
  int rank = 0;   // position among the contributions of its singularity
};

// Stirling form of the terms of one singularity whose exponents differ by integers:
// sigma^{-n} n^{-alpha0-1} sum_{j,l} coef[j][l] ln^l(n) / n^j.
// A paired group stands for itself plus its complex conjugate at the conjugate singularity.
struct DisplayGroup {
  Turn arg = 0;
  Complex alpha0;
  bool paired = false;
  std::vector<std::vector<Complex>> coef;
};

struct AsymptoticExpansion {
  int coord = -1;
  bool entire = false;  // no finite singularity: coefficients decay faster than any R^{-n}
  Real radius;
  int terms = 0;
  std::vector<TransferTerm> contributions;  // by singularity, arg 0 first
  // remainder O(R^{-n} n^{-f-1} ln^b n); exponentially_small when every expansion is exact
  Real error_exponent;
  int error_log = 0;
  bool exponentially_small = false;
  std::vector<DisplayGroup> display;
};

// Transfer of the expansions of coordinate `coord`, keeping the first `terms`
// contributions of every singularity. Analytic terms (alpha in N, k = 0) only
// enter the error term.
AsymptoticExpansion coeff_asymptotics(const std::vector<LocalBehavior>& lbs, int coord, int terms);

// Sum of the contributions of rank < terms with exact C_n. For a real coordinate the
// imaginary part is rounding residue.
Complex evaluate_asympt(const AsymptoticExpansion& a, long n, int terms);

// The display form truncated after n^{-J} relative to each group's leading power.
// Paired groups are folded with their conjugates.
Complex evaluate_stirling(const AsymptoticExpansion& a, long n, int J);

// Expansions deep enough that each coordinate in `coords` has `terms` contributions
// at every dominant singularity, or an exact expansion there.
std::vector<LocalBehavior> expansions_for_terms(const NormalSystem& sys, const DominantSet& d,
                                                const std::vector<int>& coords, int terms,
                                                const PrecisionContext& ctx);

}  // namespace combasym
