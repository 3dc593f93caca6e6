#pragma once

#include <memory>
#include <string>
#include <vector>

#include "combasym/newton.hpp"

namespace combasym {

struct Interval {
  Real lo = 0, hi = 0;
  Real width() const { return hi - lo; }
  Real mid() const { return (lo + hi) / 2; }
  bool contains(const Real& x) const { return lo <= x && x <= hi; }
};

// The system whose positive solution defines a finite constant.
struct ConstantDefinition {
  enum class Kind { Exact, Characteristic, UnitValue };
  Kind kind = Kind::Exact;
  std::shared_ptr<const AnalyticSystem> system;  // unknowns solved together with z
  std::vector<int> component;                    // Characteristic: positions of the irreducible block
  bool linear = false;                           // Characteristic: block affine in its own unknowns
  int unit = -1;                                 // UnitValue: normal coordinate equal to 1 at the constant
  Real exact = 0;                                // Exact: the value itself

  // Printable equations, e.g. "G = Z + _N1", "det(Id - dH/dY)[G] = 0", "T_r = 1".
  std::vector<std::string> equations() const;
  std::string unknown_name(int k) const;  // "z" for k = 0, then the unknowns
};

struct CertifiedConstant {
  bool finite = false;
  std::shared_ptr<const ConstantDefinition> def;
  Real point = 0;              // Newton solution for z
  std::vector<Real> values;    // unknowns of def->system at `point`
  Interval interval;           // enclosure of the constant
  bool certified = false;      // both ends of `interval` backed by value-iteration certificates
  std::vector<Interval> box;   // isolating box: z, then each unknown
  bool box_verified = false;   // Newton matrix nonsingular at the center
  unsigned bits = 0;

  static CertifiedConstant infinite();
  static CertifiedConstant exact(const Real& v);
  bool is_exact() const { return finite && def && def->kind == ConstantDefinition::Kind::Exact; }
};

struct OracleDecision {
  enum class Outcome { Equal, Less, Greater, SolutionExists, NoSolution };
  Outcome outcome = Outcome::Equal;
  bool heuristic = false;
  unsigned digits = 0;  // agreement threshold used for Equal / NoSolution
  std::string what;
};

std::string to_string(OracleDecision::Outcome o);

// Solve the definition starting at (z0, y0) and certify an enclosure; nullopt-like failure as !finite.
CertifiedConstant establish(std::shared_ptr<const ConstantDefinition> def, const Real& z0,
                            const std::vector<Real>& y0, const PrecisionContext& ctx);

// Recompute the Newton point at `bits` and re-certify.
void recompute(CertifiedConstant& c, unsigned bits, const PrecisionContext& ctx);

// Narrow the enclosure to relative width 10^-digits (raising precision when needed).
void refine(CertifiedConstant& c, int digits, const PrecisionContext& ctx);

OracleDecision oracle_compare(CertifiedConstant& a, CertifiedConstant& b, const PrecisionContext& ctx);

struct ComponentRadius {
  enum class Rule { Entire, Inherited, Characteristic, UnitValue, Exact };
  Rule rule = Rule::Entire;
  CertifiedConstant value;
  std::vector<OracleDecision> decisions;
  std::string note;
  Real lambda = -1;  // Perron root of the block at the inherited radius (irreducible, Inherited)
};

std::string to_string(ComponentRadius::Rule r);

struct RadiusResult {
  ComponentDAG dag;
  std::vector<ComponentRadius> components;  // parallel to dag.components
  int overall = -1;                         // component carrying the minimum, -1 when entire

  const ComponentRadius& of(int coord) const { return components[dag.component_of[coord]]; }
};

// Radius of convergence per component, dependencies first.
RadiusResult radius(const NormalSystem& sys, const PrecisionContext& ctx);

// Radius of a single normal coordinate's component with its predecessors' radii given.
ComponentRadius nr_radius(const NormalSystem& sys, int coord, CertifiedConstant r_u, const PrecisionContext& ctx);
ComponentRadius irr_radius(const NormalSystem& sys, const Component& comp, CertifiedConstant r_u,
                           const PrecisionContext& ctx);

}  // namespace combasym
