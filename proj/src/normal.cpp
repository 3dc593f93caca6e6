#include "combasym/normal.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace combasym {

int NormalSystem::index(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (eqs[i].name == name) return i;
  return -1;
}

std::vector<int> NormalSystem::dependencies(int i) const {
  std::vector<int> out;
  for (const auto& r : eqs[i].args)
    if (r.is_coord() && std::find(out.begin(), out.end(), r.index) == out.end()) out.push_back(r.index);
  return out;
}

std::string op_name(Op op) {
  switch (op) {
    case Op::One: return "1";
    case Op::Atom: return "Z";
    case Op::Sum: return "Sum";
    case Op::Prod: return "Prod";
    case Op::Seq: return "Seq";
    case Op::Set: return "Set";
    case Op::Cyc: return "Cyc";
  }
  return "?";
}

std::string NormalSystem::equation_string(int i) const {
  auto ref = [&](const Ref& r) {
    if (r.kind == Ref::Kind::One) return std::string("1");
    if (r.kind == Ref::Kind::Z) return std::string("Z");
    return eqs[r.index].name;
  };
  const auto& e = eqs[i];
  std::string out = e.name + " = ";
  switch (e.op) {
    case Op::One: out += "1"; break;
    case Op::Atom: out += "Z"; break;
    case Op::Sum:
    case Op::Prod:
      for (std::size_t k = 0; k < e.args.size(); ++k) {
        if (k) out += e.op == Op::Sum ? " + " : "*";
        out += ref(e.args[k]);
      }
      break;
    default: out += op_name(e.op) + "(" + ref(e.args[0]) + ")";
  }
  return out;
}

std::string NormalSystem::to_string() const {
  std::string out;
  for (int i = 0; i < size(); ++i) out += equation_string(i) + ";\n";
  return out;
}

NormalSystem normalize(const Specification& spec) {
  // each original equation is followed by its auxiliaries, numbered in pre-order
  std::vector<NormalEquation> eqs;
  std::map<std::string, int> pos;
  std::set<std::string> taken;
  for (const auto& eq : spec.equations) taken.insert(eq.name);
  int aux = 0;
  auto fresh = [&]() {
    std::string n;
    do n = "_N" + std::to_string(++aux);
    while (taken.count(n));
    taken.insert(n);
    return n;
  };
  struct NamedRef { int eq; int arg; std::string name; };
  std::vector<NamedRef> named;

  using K = SpeciesExpr::Kind;
  std::function<void(int, const SpeciesExpr&)> fill;
  std::function<Ref(const SpeciesExpr&, int, int)> ref_for;

  ref_for = [&](const SpeciesExpr& e, int owner, int argpos) -> Ref {
    switch (e.kind) {
      case K::One: return Ref::one();
      case K::Atom: return Ref::z();
      case K::Named:
        named.push_back({owner, argpos, e.name});
        return Ref::coord(-1);
      default: break;
    }
    int slot = static_cast<int>(eqs.size());
    eqs.push_back({fresh(), Op::One, {}, true});
    fill(slot, e);
    return Ref::coord(slot);
  };

  fill = [&](int slot, const SpeciesExpr& e) {
    Op op = Op::One;
    std::vector<const SpeciesExpr*> parts;
    switch (e.kind) {
      case K::One: op = Op::One; break;
      case K::Atom: op = Op::Atom; break;
      case K::Named: op = Op::Sum; parts = {&e}; break;
      case K::Sum:
      case K::Prod: {
        op = e.kind == K::Sum ? Op::Sum : Op::Prod;
        std::function<void(const SpeciesExpr&)> flat = [&](const SpeciesExpr& x) {
          if (x.kind == e.kind) {
            for (const auto& c : x.children) flat(c);
          } else if (e.kind == K::Prod && x.kind == K::Power) {
            for (int k = 0; k < x.exponent; ++k) flat(x.children[0]);
          } else {
            parts.push_back(&x);
          }
        };
        flat(e);
        break;
      }
      case K::Power:
        op = Op::Prod;
        for (int k = 0; k < e.exponent; ++k) parts.push_back(&e.children[0]);
        break;
      case K::Seq: op = Op::Seq; parts = {&e.children[0]}; break;
      case K::Set: op = Op::Set; parts = {&e.children[0]}; break;
      case K::Cyc: op = Op::Cyc; parts = {&e.children[0]}; break;
    }
    eqs[slot].op = op;
    eqs[slot].args.assign(parts.size(), Ref::one());
    for (std::size_t k = 0; k < parts.size(); ++k) {
      Ref r = ref_for(*parts[k], slot, static_cast<int>(k));
      eqs[slot].args[k] = r;
    }
  };

  for (const auto& eq : spec.equations) {
    int slot = static_cast<int>(eqs.size());
    pos[eq.name] = slot;
    eqs.push_back({eq.name, Op::One, {}, false});
    fill(slot, eq.rhs);
  }
  for (const auto& n : named) eqs[n.eq].args[n.arg] = Ref::coord(pos.at(n.name));

  NormalSystem sys;
  sys.eqs = std::move(eqs);
  for (const auto& eq : spec.equations) sys.original.push_back(eq.name);
  return sys;
}

ComponentDAG condense(const NormalSystem& sys) {
  int n = sys.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int counter = 0;
  ComponentDAG dag;
  dag.component_of.assign(n, -1);

  std::function<void(int)> visit = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : sys.dependencies(v)) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      Component c;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        c.coords.push_back(w);
      } while (w != v);
      std::sort(c.coords.begin(), c.coords.end());
      int id = static_cast<int>(dag.components.size());
      for (int x : c.coords) dag.component_of[x] = id;
      if (c.coords.size() > 1) {
        c.irreducible = true;
      } else {
        auto deps = sys.dependencies(c.coords[0]);
        c.irreducible = std::find(deps.begin(), deps.end(), c.coords[0]) != deps.end();
      }
      dag.components.push_back(std::move(c));
    }
  };
  for (int v = 0; v < n; ++v)
    if (index[v] < 0) visit(v);

  for (auto& c : dag.components) {
    std::set<int> preds;
    for (int x : c.coords)
      for (int d : sys.dependencies(x))
        if (std::find(c.coords.begin(), c.coords.end(), d) == c.coords.end()) preds.insert(d);
    c.predecessors.assign(preds.begin(), preds.end());
  }
  return dag;
}

}  // namespace combasym
