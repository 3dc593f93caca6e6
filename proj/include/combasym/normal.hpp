#pragma once

#include <map>
#include <string>
#include <vector>

#include "combasym/spec.hpp"

namespace combasym {

enum class Op { One, Atom, Sum, Prod, Seq, Set, Cyc };

struct Ref {
  enum class Kind { One, Z, Coord };
  Kind kind = Kind::One;
  int index = -1;
  static Ref one() { return {Kind::One, -1}; }
  static Ref z() { return {Kind::Z, -1}; }
  static Ref coord(int i) { return {Kind::Coord, i}; }
  bool is_coord() const { return kind == Kind::Coord; }
  friend bool operator==(const Ref& a, const Ref& b) { return a.kind == b.kind && a.index == b.index; }
};

struct NormalEquation {
  std::string name;
  Op op = Op::One;
  std::vector<Ref> args;  // Sum/Prod: >= 1, Seq/Set/Cyc: exactly 1
  bool auxiliary = false;
};

// Analytic semantics: Sum -> +, Prod -> *, Seq -> 1/(1-x), Set -> exp, Cyc -> ln(1/(1-x)).
struct NormalSystem {
  std::vector<NormalEquation> eqs;
  std::vector<std::string> original;   // original identifiers in specification order
  std::vector<std::string> removed;    // original identifiers stripped as zero species

  int size() const { return static_cast<int>(eqs.size()); }
  int index(const std::string& name) const;  // -1 when absent
  std::vector<int> dependencies(int i) const;
  std::string equation_string(int i) const;  // "name = rhs" without the semicolon
  std::string to_string() const;
};

NormalSystem normalize(const Specification& spec);

struct Component {
  std::vector<int> coords;        // ascending
  bool irreducible = false;
  std::vector<int> predecessors;  // coordinates outside the component referenced by it
};

struct ComponentDAG {
  std::vector<Component> components;  // dependencies first
  std::vector<int> component_of;      // per coordinate
};

ComponentDAG condense(const NormalSystem& sys);

std::string op_name(Op op);

}  // namespace combasym
