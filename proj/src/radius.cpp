#include "combasym/radius.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace combasym {

namespace {

constexpr double LOG10_2 = 0.30102999566398120;
constexpr unsigned MAX_BITS = 8192;

Real noise_of(unsigned bits) { return ldexp2(-static_cast<int>(bits / 2)); }

std::vector<int> reachable(const NormalSystem& sys, std::vector<int> stack) {
  std::vector<bool> seen(sys.size(), false);
  std::vector<int> out;
  while (!stack.empty()) {
    int c = stack.back();
    stack.pop_back();
    if (seen[c]) continue;
    seen[c] = true;
    out.push_back(c);
    for (int d : sys.dependencies(c)) stack.push_back(d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

enum class Side { Below, Above, Unknown };

struct Probe {
  Side side = Side::Unknown;
  bool certified = false;
  std::vector<Real> y;
};

// Is a below or above the constant? Value iteration decides, as in the dichotomy of the radius search.
Probe probe(const ConstantDefinition& d, const Real& a, const PrecisionContext& ctx) {
  Probe p;
  const auto& A = *d.system;
  if (a <= 0) {
    p.side = Side::Below;
    p.certified = true;
    p.y.assign(A.dim(), Real(0));
    return p;
  }
  auto v = newton_value(A, a, ctx);
  if (v.above()) {
    p.side = Side::Above;
    p.certified = true;
    return p;
  }
  if (!v.converged()) return p;
  if (d.kind == ConstantDefinition::Kind::UnitValue) {
    Real u = A.coordinate(d.unit, a, v.y);
    Real margin = noise_of(ctx.bits) * (1 + abs(u));
    if (u < 1 - margin) p.side = Side::Below;
    else if (u > 1 + margin) p.side = Side::Above;
    else return p;
  } else {
    p.side = Side::Below;
  }
  p.certified = v.certified;
  p.y = std::move(v.y);
  return p;
}

CharResult solve(const ConstantDefinition& d, const Real& z0, const std::vector<Real>& y0,
                 const PrecisionContext& ctx) {
  if (d.kind == ConstantDefinition::Kind::UnitValue) return newton_u_eq_1(*d.system, d.unit, z0, y0, ctx);
  return newton_char(*d.system, d.component, d.linear, z0, y0, ctx);
}

bool solved(const ConstantDefinition& d, int k) {
  return !(d.linear && std::find(d.component.begin(), d.component.end(), k) != d.component.end());
}

void fill_box(CertifiedConstant& c, const CharResult& r) {
  const auto& d = *c.def;
  Real floor = ldexp2(-static_cast<int>(c.bits) + 40);
  Real w = 8 * r.step_norm;
  c.box.clear();
  c.box.push_back(c.interval);
  for (int k = 0; k < d.system->dim(); ++k) {
    Real v = c.values[k];
    if (!solved(d, k)) {
      c.box.push_back({v, v});
      continue;
    }
    Real wk = std::max<Real>(w, floor) * (1 + abs(v));
    c.box.push_back({v - wk, v + wk});
  }
  c.box_verified = r.regular;
}

// Enclose the Newton point by two value-iteration certificates, widening when undecided.
bool certify(CertifiedConstant& c, const PrecisionContext& ctx) {
  PrecisionContext cx = ctx.with_bits(c.bits);
  Real delta = ldexp2(-static_cast<int>(c.bits / 2) + 24);
  Real limit = ldexp2(-20);
  for (; delta <= limit; delta *= 16) {
    Real lo = c.point * (1 - delta), hi = c.point * (1 + delta);
    auto pl = probe(*c.def, lo, cx);
    auto ph = probe(*c.def, hi, cx);
    if (pl.side == Side::Above || ph.side == Side::Below) return false;
    if (pl.side == Side::Below && ph.side == Side::Above) {
      c.interval = {lo, hi};
      c.certified = pl.certified && ph.certified;
      if (c.certified) return true;
    }
  }
  return false;
}

CertifiedConstant attempt(std::shared_ptr<const ConstantDefinition> def, const Real& z0, const std::vector<Real>& y0,
                          const PrecisionContext& ctx, std::string* why = nullptr) {
  CertifiedConstant c;
  auto r = solve(*def, z0, y0, ctx);
  if (!r.ok()) {
    if (why) *why = r.reason;
    return c;
  }
  c.def = def;
  c.point = r.z;
  c.values = r.y;
  c.bits = ctx.bits;
  c.interval = {r.z, r.z};
  c.finite = true;
  if (!certify(c, ctx)) {
    if (why) *why = "enclosure not certified";
    c.finite = false;
    return c;
  }
  fill_box(c, r);
  return c;
}

struct Bracket {
  Real lo, hi;
  std::vector<Real> ylo;
};

// Doubling search for a first point above the constant.
Bracket unbounded_bracket(const ConstantDefinition& d, const PrecisionContext& ctx) {
  Bracket b{Real(0), Real(1), std::vector<Real>(d.system->dim(), Real(0))};
  for (int k = 0; k < 64; ++k) {
    auto p = probe(d, b.hi, ctx);
    if (p.side != Side::Below) return b;
    b.lo = b.hi;
    b.ylo = std::move(p.y);
    b.hi *= 2;
  }
  throw PrecisionExhausted("no finite radius found below 2^64");
}

// Starting-point protocol: bisect the bracket to d digits (d = 2, 4, 8, ...) and retry Newton from the lower end.
CertifiedConstant locate(std::shared_ptr<const ConstantDefinition> def, Bracket b, const PrecisionContext& ctx) {
  std::string why = "no attempt";
  for (int d = 2; d <= 32; d *= 2) {
    Real target = pow(Real(10), -d);
    while (b.hi - b.lo > target * b.hi) {
      Real mid = (b.lo + b.hi) / 2;
      auto p = probe(*def, mid, ctx);
      if (p.side == Side::Below) {
        b.lo = mid;
        b.ylo = std::move(p.y);
      } else {
        b.hi = mid;
      }
    }
    if (b.lo <= 0) continue;
    auto c = attempt(def, b.lo, b.ylo, ctx, &why);
    Real slack = b.hi - b.lo;
    if (c.finite && c.point >= b.lo - slack && c.point <= b.hi + slack) return c;
  }
  throw PrecisionExhausted("characteristic Newton iteration failed from every starting point (" + why + ")");
}

ComponentRadius inherited(CertifiedConstant r_u, const std::string& note) {
  ComponentRadius cr;
  cr.rule = r_u.finite ? ComponentRadius::Rule::Inherited : ComponentRadius::Rule::Entire;
  cr.value = std::move(r_u);
  cr.note = note;
  return cr;
}

// A point certified below r_u where the probe decides; backs off when undecided.
Probe probe_below(const ConstantDefinition& d, const CertifiedConstant& r_u, Real& a, const PrecisionContext& ctx) {
  Probe p;
  for (int k : {0, 20, 10, 5}) {
    a = k == 0 ? r_u.interval.lo : r_u.interval.lo * (1 - pow(Real(10), -k));
    p = probe(d, a, ctx);
    if (p.side != Side::Unknown) return p;
  }
  return p;
}

Real digits_apart(const Real& diff, const Real& scale) {
  return -log10(diff / scale);
}

// Value of coordinate u at the finite constant r, or nullopt-like `infinite` when u blows up there.
struct ValueAt {
  bool infinite = false;
  Real value;
};

ValueAt value_at(const NormalSystem& sys, const CertifiedConstant& r, int u, unsigned bits,
                 const PrecisionContext& ctx) {
  const auto& d = *r.def;
  // poles of Seq/Cyc and of linear blocks: everything depending on them is infinite there
  if (d.kind != ConstantDefinition::Kind::Characteristic || d.linear) return {true, 0};
  PrecisionScope scope(bits);
  PrecisionContext cx = ctx.with_bits(bits);
  std::vector<int> block;
  for (int k : d.component) block.push_back(d.system->unknowns()[k]);
  std::vector<int> seeds = d.system->unknowns();
  seeds.push_back(u);
  auto A = std::make_shared<AnalyticSystem>(AnalyticSystem::closure(sys, seeds));
  std::vector<int> pos;
  for (int c : block) pos.push_back(A->position(c));
  // start below the constant, on the extended system
  Real a = with_bits(r.interval.lo, bits);
  auto v = newton_value(*A, a, cx);
  if (!v.converged()) throw PrecisionExhausted("no value below the inherited radius");
  auto res = newton_char(*A, pos, false, a, v.y, cx);
  if (!res.ok()) throw PrecisionExhausted("extended characteristic system: " + res.reason);
  return {false, A->coordinate(u, res.z, res.y)};
}

}  // namespace

std::string to_string(OracleDecision::Outcome o) {
  switch (o) {
    case OracleDecision::Outcome::Equal: return "equal";
    case OracleDecision::Outcome::Less: return "less";
    case OracleDecision::Outcome::Greater: return "greater";
    case OracleDecision::Outcome::SolutionExists: return "solution-exists";
    case OracleDecision::Outcome::NoSolution: return "no-solution";
  }
  return "";
}

std::string to_string(ComponentRadius::Rule r) {
  switch (r) {
    case ComponentRadius::Rule::Entire: return "entire";
    case ComponentRadius::Rule::Inherited: return "inherited";
    case ComponentRadius::Rule::Characteristic: return "characteristic";
    case ComponentRadius::Rule::UnitValue: return "unit-value";
    case ComponentRadius::Rule::Exact: return "exact";
  }
  return "";
}

std::string ConstantDefinition::unknown_name(int k) const {
  if (k == 0) return "z";
  return system->normal().eqs[system->unknowns()[k - 1]].name;
}

std::vector<std::string> ConstantDefinition::equations() const {
  std::vector<std::string> out;
  if (kind == Kind::Exact) {
    out.push_back("z = " + to_string(exact, 20));
    return out;
  }
  const auto& sys = system->normal();
  std::vector<int> seeds = system->unknowns();
  if (unit >= 0) seeds.push_back(unit);
  for (int c : reachable(sys, seeds)) {
    if (linear && kind == Kind::Characteristic) {
      int p = system->position(c);
      if (p >= 0 && !solved(*this, p)) continue;
    }
    out.push_back(sys.equation_string(c));
  }
  if (kind == Kind::Characteristic) {
    std::string names;
    for (std::size_t i = 0; i < component.size(); ++i)
      names += (i ? "," : "") + sys.eqs[system->unknowns()[component[i]]].name;
    out.push_back("det(Id - dH/dY)[" + names + "] = 0");
  } else {
    out.push_back(sys.eqs[unit].name + " = 1");
  }
  return out;
}

CertifiedConstant CertifiedConstant::infinite() { return CertifiedConstant{}; }

CertifiedConstant CertifiedConstant::exact(const Real& v) {
  auto d = std::make_shared<ConstantDefinition>();
  d->kind = ConstantDefinition::Kind::Exact;
  d->exact = v;
  CertifiedConstant c;
  c.finite = true;
  c.def = d;
  c.point = v;
  c.interval = {v, v};
  c.certified = true;
  c.box = {c.interval};
  c.box_verified = true;
  c.bits = current_bits();
  return c;
}

CertifiedConstant establish(std::shared_ptr<const ConstantDefinition> def, const Real& z0,
                            const std::vector<Real>& y0, const PrecisionContext& ctx) {
  return attempt(std::move(def), z0, y0, ctx);
}

void recompute(CertifiedConstant& c, unsigned bits, const PrecisionContext& ctx) {
  if (!c.finite || c.is_exact() || bits <= c.bits) return;
  if (bits > MAX_BITS) throw PrecisionExhausted("precision limit reached");
  PrecisionScope scope(bits);
  PrecisionContext cx = ctx.with_bits(bits);
  auto r = solve(*c.def, with_bits(c.point, bits), with_bits(c.values, bits), cx);
  if (!r.ok()) throw PrecisionExhausted("Newton iteration failed at " + std::to_string(bits) + " bits: " + r.reason);
  CertifiedConstant n = c;
  n.point = r.z;
  n.values = r.y;
  n.bits = bits;
  if (!certify(n, cx)) throw PrecisionExhausted("enclosure not certified at " + std::to_string(bits) + " bits");
  fill_box(n, r);
  c = std::move(n);
}

void refine(CertifiedConstant& c, int digits, const PrecisionContext& ctx) {
  if (!c.finite || c.is_exact()) return;
  Real target = pow(Real(10), -digits) * abs(c.point);
  if (c.interval.width() <= target) return;
  // the enclosure half-width is about 2^-(bits/2 - 24) relative
  unsigned bits = static_cast<unsigned>(2 * (digits / LOG10_2 + 26));
  bits = std::max(bits, c.bits + 64);
  bits = (bits + 63) / 64 * 64;
  while (c.interval.width() > target) {
    recompute(c, bits, ctx);
    bits += bits / 2;
  }
}

OracleDecision oracle_compare(CertifiedConstant& a, CertifiedConstant& b, const PrecisionContext& ctx) {
  using O = OracleDecision::Outcome;
  if (!a.finite && !b.finite) return {O::Equal, false, 0, "both infinite"};
  if (!a.finite) return {O::Greater, false, 0, "infinite vs finite"};
  if (!b.finite) return {O::Less, false, 0, "finite vs infinite"};
  if (a.def == b.def) return {O::Equal, false, 0, "same defining system"};
  if (a.is_exact() && b.is_exact()) {
    if (a.point == b.point) return {O::Equal, false, 0, "exact values"};
    return {a.point < b.point ? O::Less : O::Greater, false, 0, "exact values"};
  }
  unsigned want = ctx.oracle_digits;
  for (int round = 0; round < 32; ++round) {
    bool cert = a.certified && b.certified;
    if (a.interval.hi < b.interval.lo) return {O::Less, !cert, 0, "disjoint enclosures"};
    if (b.interval.hi < a.interval.lo) return {O::Greater, !cert, 0, "disjoint enclosures"};
    unsigned bits = a.is_exact() ? b.bits : b.is_exact() ? a.bits : std::min(a.bits, b.bits);
    Real scale = std::max<Real>(abs(a.point), abs(b.point));
    Real diff = abs(a.point - b.point);
    Real resolution = ldexp2(-static_cast<int>(bits) + 40) * scale;
    if (diff > resolution) {
      int need = static_cast<int>(std::ceil(static_cast<double>(digits_apart(diff, scale)))) + 2;
      refine(a, need, ctx);
      refine(b, need, ctx);
      continue;
    }
    unsigned agree = static_cast<unsigned>((bits - 40) * LOG10_2);
    if (agree >= want) return {O::Equal, true, want, "agree to " + std::to_string(want) + " digits"};
    unsigned nb = static_cast<unsigned>((want + 5) / LOG10_2) + 40;
    nb = (nb + 63) / 64 * 64;
    recompute(a, nb, ctx);
    recompute(b, nb, ctx);
    if ((a.is_exact() || a.bits < nb) && (b.is_exact() || b.bits < nb))
      throw PrecisionExhausted("oracle could not raise precision");
  }
  throw PrecisionExhausted("oracle comparison did not terminate");
}

ComponentRadius nr_radius(const NormalSystem& sys, int coord, CertifiedConstant r_u, const PrecisionContext& ctx) {
  const auto& eq = sys.eqs[coord];
  if (eq.op != Op::Seq && eq.op != Op::Cyc) {
    std::string note = r_u.finite ? "radius of the arguments" : "polynomial or exponential of entire functions";
    return inherited(std::move(r_u), note);
  }
  const Ref& arg = eq.args[0];
  if (arg.kind == Ref::Kind::Z) {
    ComponentRadius cr;
    cr.rule = ComponentRadius::Rule::Exact;
    cr.value = CertifiedConstant::exact(Real(1));
    cr.note = op_name(eq.op) + " of Z: pole at 1";
    return cr;
  }
  int u = arg.index;
  auto def = std::make_shared<ConstantDefinition>();
  def->kind = ConstantDefinition::Kind::UnitValue;
  def->system = std::make_shared<AnalyticSystem>(AnalyticSystem::closure(sys, {u}));
  def->unit = u;
  const std::string uname = sys.eqs[u].name;

  ComponentRadius cr;
  cr.rule = ComponentRadius::Rule::UnitValue;
  if (!r_u.finite) {
    cr.value = locate(def, unbounded_bracket(*def, ctx), ctx);
    cr.note = uname + " = 1 (argument entire)";
    return cr;
  }
  Real a;
  auto p = probe_below(*def, r_u, a, ctx);
  using O = OracleDecision::Outcome;
  if (p.side == Side::Above) {
    cr.decisions.push_back({O::Greater, !p.certified, 0, uname + " exceeds 1 below the inherited radius"});
    cr.value = locate(def, {Real(0), a, std::vector<Real>(def->system->dim(), Real(0))}, ctx);
    cr.note = uname + " = 1 before the inherited radius";
    return cr;
  }
  if (p.side == Side::Unknown) throw PrecisionExhausted("cannot evaluate " + uname + " below the inherited radius");

  // compare U(r_U) with 1, raising precision for the heuristic equality
  unsigned bits = r_u.bits;
  for (;;) {
    auto v = value_at(sys, r_u, u, bits, ctx);
    OracleDecision dec;
    if (v.infinite) {
      dec = {O::Greater, false, 0, uname + " is infinite at the inherited radius"};
    } else {
      Real diff = v.value - 1;
      Real resolution = ldexp2(-static_cast<int>(bits) + 40);
      if (abs(diff) > resolution) {
        dec = {diff < 0 ? O::Less : O::Greater, abs(diff) < noise_of(bits), 0,
               uname + " = " + to_string(v.value, 12) + " at the inherited radius"};
      } else {
        unsigned agree = static_cast<unsigned>((bits - 40) * LOG10_2);
        if (agree < ctx.oracle_digits) {
          bits = static_cast<unsigned>((ctx.oracle_digits + 5) / LOG10_2) + 40;
          bits = (bits + 63) / 64 * 64;
          if (bits > MAX_BITS) throw PrecisionExhausted("precision limit reached");
          continue;
        }
        dec = {O::Equal, true, ctx.oracle_digits, uname + " = 1 at the inherited radius"};
      }
    }
    cr.decisions.push_back(dec);
    if (dec.outcome != O::Greater) {
      auto out = inherited(std::move(r_u), uname + " <= 1 at the inherited radius");
      out.decisions = cr.decisions;
      return out;
    }
    // the root lies between a and the inherited radius
    cr.value = locate(def, {a, r_u.interval.hi, p.y}, ctx);
    cr.note = uname + " = 1 just below the inherited radius";
    return cr;
  }
}

ComponentRadius irr_radius(const NormalSystem& sys, const Component& comp, CertifiedConstant r_u,
                           const PrecisionContext& ctx) {
  auto def = std::make_shared<ConstantDefinition>();
  def->kind = ConstantDefinition::Kind::Characteristic;
  auto A = std::make_shared<AnalyticSystem>(AnalyticSystem::closure(sys, comp.coords));
  def->system = A;
  for (int c : comp.coords)
    if (A->position(c) >= 0) def->component.push_back(A->position(c));
  def->linear = A->linear_in(def->component, def->component);

  ComponentRadius cr;
  cr.rule = ComponentRadius::Rule::Characteristic;
  using O = OracleDecision::Outcome;
  if (!r_u.finite) {
    cr.decisions.push_back({O::SolutionExists, false, 0, "recursive component with entire arguments"});
    cr.value = locate(def, unbounded_bracket(*def, ctx), ctx);
    cr.note = def->linear ? "linear block: det(Id - B) = 0" : "characteristic system";
    return cr;
  }
  Real a;
  auto p = probe_below(*def, r_u, a, ctx);
  if (p.side == Side::Above) {
    cr.decisions.push_back({O::SolutionExists, false, 0, "value iteration fails below the inherited radius"});
    cr.value = locate(def, {Real(0), a, std::vector<Real>(A->dim(), Real(0))}, ctx);
    cr.note = def->linear ? "linear block: det(Id - B) = 0" : "characteristic system";
    return cr;
  }
  if (p.side == Side::Unknown) throw PrecisionExhausted("value iteration undecided below the inherited radius");
  Real lambda = dominant_eigenvalue(submatrix(A->jacobian(a, p.y), def->component), ctx).lambda;
  auto out = inherited(std::move(r_u), "no characteristic solution below the inherited radius");
  out.lambda = lambda;
  out.decisions.push_back({O::NoSolution, true, 0, "Perron root " + to_string(lambda, 6) + " < 1 at the inherited radius"});
  return out;
}

RadiusResult radius(const NormalSystem& sys, const PrecisionContext& ctx) {
  RadiusResult res;
  res.dag = condense(sys);
  const auto& comps = res.dag.components;
  res.components.resize(comps.size());
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    const auto& comp = comps[ci];
    std::set<int> preds;
    for (int c : comp.predecessors) preds.insert(res.dag.component_of[c]);
    CertifiedConstant r_u = CertifiedConstant::infinite();
    std::vector<OracleDecision> decisions;
    for (int p : preds) {
      CertifiedConstant cand = res.components[p].value;
      if (!cand.finite) continue;
      if (!r_u.finite) {
        r_u = cand;
        continue;
      }
      auto d = oracle_compare(cand, r_u, ctx);
      if (d.heuristic || d.outcome != OracleDecision::Outcome::Equal || cand.def != r_u.def) decisions.push_back(d);
      if (d.outcome == OracleDecision::Outcome::Less) r_u = cand;
    }
    ComponentRadius cr = comp.irreducible ? irr_radius(sys, comp, r_u, ctx) : nr_radius(sys, comp.coords[0], r_u, ctx);
    decisions.insert(decisions.end(), cr.decisions.begin(), cr.decisions.end());
    cr.decisions = std::move(decisions);
    res.components[ci] = std::move(cr);
  }
  CertifiedConstant best = CertifiedConstant::infinite();
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    CertifiedConstant cand = res.components[ci].value;
    if (!cand.finite) continue;
    if (!best.finite || oracle_compare(cand, best, ctx).outcome == OracleDecision::Outcome::Less) {
      best = cand;
      res.overall = static_cast<int>(ci);
    }
  }
  return res;
}

}  // namespace combasym
