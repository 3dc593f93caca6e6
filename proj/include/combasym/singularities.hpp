#pragma once

#include <optional>
#include <string>
#include <vector>

#include "combasym/radius.hpp"

namespace combasym {

// Arguments of singularities are exact fractions of a turn in [0, 1): 1/4 means pi/2.
using Turn = Rational;

// Period of every normal coordinate: gcd of the support shifted by the valuation,
// 0 for a monomial. Fixed point of the gcd rules starting from 0.
std::vector<int> periods(const NormalSystem& sys);

// Sum-of-products systems X_i = sum_t c_t * prod X_j, where the constant part of each
// term is a known series described by (valuation, period). Used for the matrix
// M = Id + B M of linear components.
struct PolyTerm {
  int val = 0;
  int period = 0;
  std::vector<int> unknowns;
};
using PolySystem = std::vector<std::vector<PolyTerm>>;

// nullopt entries are zero series.
std::vector<std::optional<int>> poly_valuations(const PolySystem& s);
std::vector<int> poly_periods(const PolySystem& s, const std::vector<std::optional<int>>& val);

// Period q used for a linear irreducible component: gcd of the periods of the entries
// of B in H = A + B Y, or, when they are all monomials, gcd of the diagonal periods
// of (Id - B)^{-1}.
int linear_period(const NormalSystem& sys, const Component& comp, const std::vector<int>& val,
                  const std::vector<int>& per);

bool is_linear(const NormalSystem& sys, const Component& comp);

// {0, 1/p, ..., (p-1)/p}
std::vector<Turn> roots_of_unity(int p);

struct ComponentSingularities {
  std::vector<Turn> args;  // at the component's own radius; empty when entire
  int period = 0;          // the p or q the set came from, 0 when only inherited
  std::string rule;
};

struct DominantSet {
  RadiusResult radius;
  CertifiedConstant R;                           // infinite when the system is entire
  std::vector<Turn> args;                        // union over components of radius R
  std::vector<ComponentSingularities> components;  // parallel to radius.dag.components
  std::vector<bool> at_R;                        // component radius equals R
  std::vector<int> periods;                      // per coordinate
  std::vector<int> valuations;                   // per coordinate
  std::vector<OracleDecision> decisions;         // radius equality tests

  const ComponentSingularities& of(int coord) const { return components[radius.dag.component_of[coord]]; }
  bool heuristic() const;
};

DominantSet dominant_singularities(const NormalSystem& sys, const PrecisionContext& ctx);
DominantSet dominant_singularities(const NormalSystem& sys, RadiusResult r, const PrecisionContext& ctx);

}  // namespace combasym
