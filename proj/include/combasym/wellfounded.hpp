#pragma once

#include <optional>
#include <string>
#include <vector>

#include "combasym/normal.hpp"
#include "combasym/numeric.hpp"

namespace combasym {

struct LeadingTerm {
  Rational count = 0;          // EGF coefficient of z^valuation
  std::optional<int> valuation;  // nullopt = +inf (zero species)

  static LeadingTerm zero() { return {}; }
  bool is_zero() const { return !valuation.has_value(); }
  friend bool operator==(const LeadingTerm& a, const LeadingTerm& b) {
    return a.valuation == b.valuation && a.count == b.count;
  }
};

using LeadingTermVector = std::vector<LeadingTerm>;

// "1", "Z", "2Z", "Z^3", "1/2Z^2", "0"
std::string to_string(const LeadingTerm& t);
std::string to_string(const LeadingTermVector& v);

struct WellFoundedness {
  enum class Status { WellFounded, GuardFailure, NoFixedPoint };
  Status status = Status::WellFounded;
  LeadingTermVector terms;
  std::vector<LeadingTermVector> trace;  // vector after each sweep
  int sweeps = 0;
  int failing_equation = -1;             // GuardFailure
  LeadingTermVector previous;            // NoFixedPoint: the two final unequal vectors

  bool ok() const { return status == Status::WellFounded; }
  std::string describe(const NormalSystem& sys) const;
};

WellFoundedness leading_terms(const NormalSystem& sys);

// One application of the update rules; nullopt when a guard fails (index in *failing).
std::optional<LeadingTermVector> leading_term_update(const NormalSystem& sys, const LeadingTermVector& v,
                                                     int* failing = nullptr);

NormalSystem strip_zero_coords(const NormalSystem& sys, const LeadingTermVector& lt);

}  // namespace combasym
