#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace combasym {

struct SpeciesExpr {
  enum class Kind { One, Atom, Named, Sum, Prod, Seq, Set, Cyc, Power };
  Kind kind = Kind::One;
  std::string name;                   // Named
  std::vector<SpeciesExpr> children;  // Sum, Prod (>= 2), Seq/Set/Cyc/Power (1)
  int exponent = 0;                   // Power
  int line = 0, col = 0;

  static SpeciesExpr one() { return {}; }
  static SpeciesExpr atom() { SpeciesExpr e; e.kind = Kind::Atom; return e; }
  static SpeciesExpr named(std::string n) { SpeciesExpr e; e.kind = Kind::Named; e.name = std::move(n); return e; }
  static SpeciesExpr node(Kind k, std::vector<SpeciesExpr> ch) { SpeciesExpr e; e.kind = k; e.children = std::move(ch); return e; }
};

// Structural equality, ignoring source positions.
bool operator==(const SpeciesExpr& a, const SpeciesExpr& b);

struct SpecEquation {
  std::string name;
  SpeciesExpr rhs;
  int line = 0, col = 0;
};

struct Specification {
  std::vector<SpecEquation> equations;
  int index_of(const std::string& name) const;
};

bool operator==(const Specification& a, const Specification& b);

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Duplicate, Undefined };
  ParseError(Kind k, int line, int col, const std::string& msg);
  Kind kind;
  int line, col;
};

// Z^k and other powers are expanded into products.
Specification parse_spec(const std::string& text);
Specification parse_spec_file(const std::string& path);

std::string print_expr(const SpeciesExpr& e);
std::string print_spec(const Specification& s);

}  // namespace combasym
