#include "combasym/spec.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace combasym {

bool operator==(const SpeciesExpr& a, const SpeciesExpr& b) {
  if (a.kind != b.kind || a.name != b.name || a.exponent != b.exponent) return false;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!(a.children[i] == b.children[i])) return false;
  return true;
}

int Specification::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < equations.size(); ++i)
    if (equations[i].name == name) return static_cast<int>(i);
  return -1;
}

bool operator==(const Specification& a, const Specification& b) {
  if (a.equations.size() != b.equations.size()) return false;
  for (std::size_t i = 0; i < a.equations.size(); ++i)
    if (a.equations[i].name != b.equations[i].name || !(a.equations[i].rhs == b.equations[i].rhs))
      return false;
  return true;
}

static std::string position_prefix(int line, int col) {
  return std::to_string(line) + ":" + std::to_string(col) + ": ";
}

ParseError::ParseError(Kind k, int l, int c, const std::string& msg)
    : std::runtime_error(position_prefix(l, c) + msg), kind(k), line(l), col(c) {}

namespace {

struct Token {
  enum class Type { Ident, Int, Sym, End } type;
  std::string text;
  int line, col;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') { ++line; col = 1; } else { ++col; }
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) { advance(1); continue; }
    int l = line, cc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Token::Type::Ident, s.substr(i, j - i), l, cc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Token::Type::Int, s.substr(i, j - i), l, cc});
      advance(j - i);
      continue;
    }
    if (std::string("=+*^();").find(c) != std::string::npos) {
      out.push_back({Token::Type::Sym, std::string(1, c), l, cc});
      advance(1);
      continue;
    }
    throw ParseError(ParseError::Kind::Syntax, l, cc, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Token::Type::End, "", line, col});
  return out;
}

bool is_keyword(const std::string& s) { return s == "Z" || s == "Seq" || s == "Set" || s == "Cyc"; }

class Parser {
 public:
  explicit Parser(std::vector<Token> t) : toks_(std::move(t)) {}

  Specification parse() {
    Specification spec;
    do {
      spec.equations.push_back(equation());
      expect(";");
    } while (peek().type != Token::Type::End);
    return spec;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  bool at(const std::string& sym) const {
    return peek().type == Token::Type::Sym && peek().text == sym;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string got = t.type == Token::Type::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(ParseError::Kind::Syntax, t.line, t.col, msg + ", got " + got);
  }
  void expect(const std::string& sym) {
    if (!at(sym)) fail("expected '" + sym + "'");
    ++pos_;
  }

  SpecEquation equation() {
    const Token& t = peek();
    if (t.type != Token::Type::Ident || is_keyword(t.text)) fail("expected class name");
    SpecEquation eq;
    eq.name = t.text;
    eq.line = t.line;
    eq.col = t.col;
    ++pos_;
    expect("=");
    eq.rhs = expr();
    return eq;
  }

  SpeciesExpr expr() {
    const Token& t0 = peek();
    std::vector<SpeciesExpr> terms{term()};
    while (at("+")) {
      ++pos_;
      terms.push_back(term());
    }
    if (terms.size() == 1) return std::move(terms[0]);
    auto e = SpeciesExpr::node(SpeciesExpr::Kind::Sum, std::move(terms));
    e.line = t0.line;
    e.col = t0.col;
    return e;
  }

  SpeciesExpr term() {
    const Token& t0 = peek();
    std::vector<SpeciesExpr> factors{factor()};
    while (at("*")) {
      ++pos_;
      factors.push_back(factor());
    }
    if (factors.size() == 1) return std::move(factors[0]);
    auto e = SpeciesExpr::node(SpeciesExpr::Kind::Prod, std::move(factors));
    e.line = t0.line;
    e.col = t0.col;
    return e;
  }

  SpeciesExpr factor() {
    SpeciesExpr e = primary();
    while (at("^")) {
      ++pos_;
      const Token& t = peek();
      if (t.type != Token::Type::Int) fail("expected exponent");
      long k = std::stol(t.text);
      if (k < 1) throw ParseError(ParseError::Kind::Syntax, t.line, t.col, "exponent must be positive");
      ++pos_;
      if (k == 1) continue;
      std::vector<SpeciesExpr> copies(static_cast<std::size_t>(k), e);
      int l = e.line, c = e.col;
      e = SpeciesExpr::node(SpeciesExpr::Kind::Prod, std::move(copies));
      e.line = l;
      e.col = c;
    }
    return e;
  }

  SpeciesExpr primary() {
    const Token t = peek();
    SpeciesExpr e;
    if (t.type == Token::Type::Int) {
      if (t.text != "1") fail("only the literal 1 is allowed");
      ++pos_;
      e = SpeciesExpr::one();
    } else if (t.type == Token::Type::Ident) {
      ++pos_;
      if (t.text == "Z") {
        e = SpeciesExpr::atom();
      } else if (t.text == "Seq" || t.text == "Set" || t.text == "Cyc") {
        auto k = t.text == "Seq" ? SpeciesExpr::Kind::Seq
                 : t.text == "Set" ? SpeciesExpr::Kind::Set
                                   : SpeciesExpr::Kind::Cyc;
        expect("(");
        SpeciesExpr inner = expr();
        expect(")");
        e = SpeciesExpr::node(k, {std::move(inner)});
      } else {
        e = SpeciesExpr::named(t.text);
      }
    } else if (at("(")) {
      ++pos_;
      e = expr();
      expect(")");
      return e;
    } else {
      fail("expected expression");
    }
    e.line = t.line;
    e.col = t.col;
    return e;
  }
};

// E and Epsilon denote 1 unless defined as classes
void resolve_names(SpeciesExpr& e, const std::set<std::string>& defined) {
  if (e.kind == SpeciesExpr::Kind::Named && !defined.count(e.name)) {
    if (e.name != "E" && e.name != "Epsilon")
      throw ParseError(ParseError::Kind::Undefined, e.line, e.col, "undefined class '" + e.name + "'");
    e.kind = SpeciesExpr::Kind::One;
    e.name.clear();
  }
  for (auto& c : e.children) resolve_names(c, defined);
}

}  // namespace

Specification parse_spec(const std::string& text) {
  Specification spec = Parser(tokenize(text)).parse();
  std::set<std::string> defined;
  for (const auto& eq : spec.equations) {
    if (!defined.insert(eq.name).second)
      throw ParseError(ParseError::Kind::Duplicate, eq.line, eq.col, "duplicate definition of '" + eq.name + "'");
  }
  for (auto& eq : spec.equations) resolve_names(eq.rhs, defined);
  return spec;
}

Specification parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseError::Kind::Syntax, 0, 0, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

static void print_into(const SpeciesExpr& e, std::string& out, SpeciesExpr::Kind parent, bool has_parent) {
  using K = SpeciesExpr::Kind;
  switch (e.kind) {
    case K::One: out += "1"; return;
    case K::Atom: out += "Z"; return;
    case K::Named: out += e.name; return;
    case K::Seq:
    case K::Set:
    case K::Cyc:
      out += e.kind == K::Seq ? "Seq(" : e.kind == K::Set ? "Set(" : "Cyc(";
      print_into(e.children[0], out, e.kind, false);
      out += ")";
      return;
    case K::Power: {
      bool paren = e.children[0].kind == K::Sum || e.children[0].kind == K::Prod ||
                   e.children[0].kind == K::Power;
      if (paren) out += "(";
      print_into(e.children[0], out, e.kind, false);
      if (paren) out += ")";
      out += "^" + std::to_string(e.exponent);
      return;
    }
    case K::Sum:
    case K::Prod: {
      // nested sums/products keep their own parentheses so re-parsing gives the same tree
      bool paren = has_parent && (parent == K::Prod || parent == K::Sum) &&
                   (e.kind == K::Sum || parent == K::Prod);
      if (paren) out += "(";
      const char* sep = e.kind == K::Sum ? " + " : "*";
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += sep;
        print_into(e.children[i], out, e.kind, true);
      }
      if (paren) out += ")";
      return;
    }
  }
}

std::string print_expr(const SpeciesExpr& e) {
  std::string out;
  print_into(e, out, SpeciesExpr::Kind::One, false);
  return out;
}

std::string print_spec(const Specification& s) {
  std::string out;
  for (const auto& eq : s.equations) out += eq.name + " = " + print_expr(eq.rhs) + ";\n";
  return out;
}

}  // namespace combasym
