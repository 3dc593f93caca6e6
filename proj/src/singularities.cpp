#include "combasym/singularities.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "combasym/wellfounded.hpp"

namespace combasym {

namespace {

struct Series {
  int val = 0;
  int period = 0;
};

Series ref_series(const Ref& r, const std::vector<int>& val, const std::vector<int>& per) {
  switch (r.kind) {
    case Ref::Kind::One: return {0, 0};
    case Ref::Kind::Z: return {1, 0};
    default: return {val[r.index], per[r.index]};
  }
}

// gcd of the periods and of the valuation gaps to the first term
int sum_period(const std::vector<Series>& terms) {
  int g = 0;
  for (const auto& t : terms) g = std::gcd(g, std::gcd(t.period, std::abs(t.val - terms[0].val)));
  return g;
}

void normalize_turns(std::vector<Turn>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void merge(std::vector<Turn>& into, const std::vector<Turn>& from) {
  into.insert(into.end(), from.begin(), from.end());
  normalize_turns(into);
}

}  // namespace

std::vector<Turn> roots_of_unity(int p) {
  std::vector<Turn> r;
  for (int k = 0; k < std::max(p, 1); ++k) r.push_back(Turn(k) / std::max(p, 1));
  return r;
}

std::vector<int> periods(const NormalSystem& sys) {
  auto lt = leading_terms(sys);
  int n = sys.size();
  std::vector<int> val(n, 0);
  for (int i = 0; i < n; ++i)
    if (lt.terms.size() == static_cast<std::size_t>(n) && lt.terms[i].valuation) val[i] = *lt.terms[i].valuation;
  std::vector<int> q(n, 0), pi;
  do {
    pi = q;
    for (int i = 0; i < n; ++i) {
      const auto& e = sys.eqs[i];
      switch (e.op) {
        case Op::One:
        case Op::Atom: q[i] = 0; break;
        case Op::Seq:
        case Op::Set:
        case Op::Cyc: {
          auto s = ref_series(e.args[0], val, pi);
          q[i] = std::gcd(s.period, s.val);
          break;
        }
        case Op::Sum: {
          std::vector<Series> terms;
          for (const auto& a : e.args) terms.push_back(ref_series(a, val, pi));
          q[i] = sum_period(terms);
          break;
        }
        case Op::Prod: {
          int g = 0;
          for (const auto& a : e.args) g = std::gcd(g, ref_series(a, val, pi).period);
          q[i] = g;
          break;
        }
      }
    }
  } while (q != pi);
  return q;
}

std::vector<std::optional<int>> poly_valuations(const PolySystem& s) {
  std::size_t n = s.size();
  std::vector<std::optional<int>> v(n);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::optional<int> best;
      for (const auto& t : s[i]) {
        int w = t.val;
        bool zero = false;
        for (int u : t.unknowns) {
          if (!v[u]) { zero = true; break; }
          w += *v[u];
        }
        if (!zero && (!best || w < *best)) best = w;
      }
      if (best != v[i]) {
        v[i] = best;
        changed = true;
      }
    }
  }
  return v;
}

std::vector<int> poly_periods(const PolySystem& s, const std::vector<std::optional<int>>& val) {
  std::size_t n = s.size();
  std::vector<int> q(n, 0), pi;
  do {
    pi = q;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Series> terms;
      for (const auto& t : s[i]) {
        Series x{t.val, t.period};
        bool zero = false;
        for (int u : t.unknowns) {
          if (!val[u]) { zero = true; break; }
          x.val += *val[u];
          x.period = std::gcd(x.period, pi[u]);
        }
        if (!zero) terms.push_back(x);
      }
      q[i] = terms.empty() ? 0 : sum_period(terms);
    }
  } while (q != pi);
  return q;
}

bool is_linear(const NormalSystem& sys, const Component& comp) {
  auto inside = [&](const Ref& r) {
    return r.is_coord() && std::binary_search(comp.coords.begin(), comp.coords.end(), r.index);
  };
  for (int i : comp.coords) {
    const auto& e = sys.eqs[i];
    int count = 0;
    for (const auto& a : e.args) count += inside(a);
    if ((e.op == Op::Seq || e.op == Op::Set || e.op == Op::Cyc) && count > 0) return false;
    if (e.op == Op::Prod && count > 1) return false;
  }
  return true;
}

int linear_period(const NormalSystem& sys, const Component& comp, const std::vector<int>& val,
                  const std::vector<int>& per) {
  int m = static_cast<int>(comp.coords.size());
  auto local = [&](const Ref& r) -> int {
    if (!r.is_coord()) return -1;
    auto it = std::lower_bound(comp.coords.begin(), comp.coords.end(), r.index);
    return it != comp.coords.end() && *it == r.index ? static_cast<int>(it - comp.coords.begin()) : -1;
  };
  // B[i][k]: terms of the entry, each a product of series from outside the component
  std::vector<std::vector<std::vector<Series>>> B(m, std::vector<std::vector<Series>>(m));
  for (int i = 0; i < m; ++i) {
    const auto& e = sys.eqs[comp.coords[i]];
    if (e.op == Op::Sum) {
      for (const auto& a : e.args)
        if (int k = local(a); k >= 0) B[i][k].push_back({0, 0});
    } else if (e.op == Op::Prod) {
      int k = -1;
      Series t{0, 0};
      for (const auto& a : e.args) {
        if (int l = local(a); l >= 0) {
          k = l;
          continue;
        }
        auto s = ref_series(a, val, per);
        t.val += s.val;
        t.period = std::gcd(t.period, s.period);
      }
      if (k >= 0) B[i][k].push_back(t);
    }
  }
  int q = 0;
  for (const auto& row : B)
    for (const auto& entry : row)
      if (!entry.empty()) q = std::gcd(q, sum_period(entry));
  if (q != 0) return q;

  // M = Id + B M, entries flattened row-major
  PolySystem M(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      auto& terms = M[i * m + j];
      if (i == j) terms.push_back({0, 0, {}});
      for (int k = 0; k < m; ++k)
        for (const auto& t : B[i][k]) terms.push_back({t.val, t.period, {k * m + j}});
    }
  auto mv = poly_valuations(M);
  auto mp = poly_periods(M, mv);
  int g = 0;
  for (int i = 0; i < m; ++i) g = std::gcd(g, mp[i * m + i]);
  return g;
}

bool DominantSet::heuristic() const {
  for (const auto& d : decisions)
    if (d.heuristic) return true;
  for (const auto& c : radius.components)
    for (const auto& d : c.decisions)
      if (d.heuristic) return true;
  return false;
}

DominantSet dominant_singularities(const NormalSystem& sys, const PrecisionContext& ctx) {
  return dominant_singularities(sys, radius(sys, ctx), ctx);
}

DominantSet dominant_singularities(const NormalSystem& sys, RadiusResult r, const PrecisionContext& ctx) {
  DominantSet d;
  d.radius = std::move(r);
  const auto& dag = d.radius.dag;
  int n = sys.size();
  auto lt = leading_terms(sys);
  d.valuations.assign(n, 0);
  for (int i = 0; i < n && i < static_cast<int>(lt.terms.size()); ++i)
    if (lt.terms[i].valuation) d.valuations[i] = *lt.terms[i].valuation;
  d.periods = periods(sys);

  std::map<std::pair<const void*, const void*>, bool> cache;
  auto same = [&](const CertifiedConstant& a, const CertifiedConstant& b) {
    if (!a.finite || !b.finite) return !a.finite && !b.finite;
    if (a.def == b.def) return true;
    auto key = std::make_pair(static_cast<const void*>(a.def.get()), static_cast<const void*>(b.def.get()));
    if (key.first > key.second) std::swap(key.first, key.second);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    auto x = a, y = b;
    auto dec = oracle_compare(x, y, ctx);
    dec.what = "radius equality: " + dec.what;
    d.decisions.push_back(dec);
    return cache[key] = dec.outcome == OracleDecision::Outcome::Equal;
  };

  std::size_t nc = dag.components.size();
  d.components.resize(nc);
  for (std::size_t ci = 0; ci < nc; ++ci) {
    const auto& comp = dag.components[ci];
    const auto& cr = d.radius.components[ci];
    auto& out = d.components[ci];
    if (!cr.value.finite) {
      out.rule = "entire";
      continue;
    }
    // singularities of predecessors on this component's circle
    std::vector<Turn> du;
    std::vector<int> seen;
    for (int u : comp.predecessors) {
      int cu = dag.component_of[u];
      if (std::find(seen.begin(), seen.end(), cu) != seen.end()) continue;
      seen.push_back(cu);
      if (same(d.radius.components[cu].value, cr.value)) merge(du, d.components[cu].args);
    }

    if (!comp.irreducible) {
      const auto& e = sys.eqs[comp.coords[0]];
      if (e.op == Op::Seq || e.op == Op::Cyc) {
        auto s = ref_series(e.args[0], d.valuations, d.periods);
        int p = std::gcd(s.val, s.period);
        bool unit = cr.rule == ComponentRadius::Rule::UnitValue || cr.rule == ComponentRadius::Rule::Exact;
        bool tie = std::any_of(cr.decisions.begin(), cr.decisions.end(), [](const OracleDecision& x) {
          return x.outcome == OracleDecision::Outcome::Equal;
        });
        if (unit || tie) {
          out.args = roots_of_unity(p);
          out.period = p;
          out.rule = op_name(e.op) + ": argument reaches 1, p = gcd(val, period) = " + std::to_string(p);
          if (tie) merge(out.args, du);
        } else {
          out.args = du;
          out.rule = op_name(e.op) + ": inherited from argument";
        }
      } else {
        out.args = du;
        out.rule = e.op == Op::Set ? "Set: singularities of argument" : "union of arguments";
      }
    } else if (!is_linear(sys, comp)) {
      int q = 0;
      for (int c : comp.coords) q = std::gcd(q, d.periods[c]);
      out.args = roots_of_unity(q);
      out.period = q;
      out.rule = "nonlinear irreducible: period " + std::to_string(q);
    } else if (cr.rule == ComponentRadius::Rule::Inherited) {
      out.args = du;
      out.rule = "linear irreducible, Perron root below 1: inherited";
    } else {
      int q = linear_period(sys, comp, d.valuations, d.periods);
      out.args = roots_of_unity(q);
      merge(out.args, du);
      out.period = q;
      out.rule = "linear irreducible: period " + std::to_string(q);
    }
    normalize_turns(out.args);
  }

  d.at_R.assign(nc, false);
  if (d.radius.overall >= 0) {
    d.R = d.radius.components[d.radius.overall].value;
    for (std::size_t ci = 0; ci < nc; ++ci) {
      if (!d.radius.components[ci].value.finite) continue;
      d.at_R[ci] = same(d.radius.components[ci].value, d.R);
      if (d.at_R[ci]) merge(d.args, d.components[ci].args);
    }
  } else {
    d.R = CertifiedConstant::infinite();
  }
  return d;
}

}  // namespace combasym
