#include "combasym/wellfounded.hpp"

namespace combasym {

std::string to_string(const LeadingTerm& t) {
  if (t.is_zero()) return "0";
  int v = *t.valuation;
  std::string c = t.count == 1 && v > 0 ? "" : to_string(t.count);
  if (v == 0) return c;
  return c + (v == 1 ? "Z" : "Z^" + std::to_string(v));
}

std::string to_string(const LeadingTermVector& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += to_string(v[i]);
  }
  return s + "]";
}

std::string WellFoundedness::describe(const NormalSystem& sys) const {
  switch (status) {
    case Status::WellFounded: return "well founded after " + std::to_string(sweeps) + " sweeps";
    case Status::GuardFailure: {
      const auto& e = sys.eqs[failing_equation];
      return "not well founded: argument of " + e.name + " = " + op_name(e.op) +
             "(...) has valuation 0 (sweep " + std::to_string(sweeps) + ")";
    }
    case Status::NoFixedPoint:
      return "not well founded: no fixed point after " + std::to_string(sweeps) + " sweeps; last " +
             to_string(terms) + " vs " + to_string(previous);
  }
  return "";
}

static LeadingTerm term_of(const Ref& r, const LeadingTermVector& v) {
  switch (r.kind) {
    case Ref::Kind::One: return {1, 0};
    case Ref::Kind::Z: return {1, 1};
    case Ref::Kind::Coord: return v[r.index];
  }
  return {};
}

std::optional<LeadingTermVector> leading_term_update(const NormalSystem& sys, const LeadingTermVector& v,
                                                     int* failing) {
  LeadingTermVector w(v.size());
  for (int i = 0; i < sys.size(); ++i) {
    const auto& e = sys.eqs[i];
    switch (e.op) {
      case Op::One: w[i] = {1, 0}; break;
      case Op::Atom: w[i] = {1, 1}; break;
      case Op::Seq:
      case Op::Set:
      case Op::Cyc: {
        LeadingTerm a = term_of(e.args[0], v);
        if (a.valuation == 0) {
          if (failing) *failing = i;
          return std::nullopt;
        }
        w[i] = e.op == Op::Cyc ? a : LeadingTerm{1, 0};
        break;
      }
      case Op::Prod: {
        LeadingTerm p{1, 0};
        for (const auto& r : e.args) {
          LeadingTerm a = term_of(r, v);
          if (a.is_zero()) { p = LeadingTerm::zero(); break; }
          p.count *= a.count;
          *p.valuation += *a.valuation;
        }
        w[i] = p;
        break;
      }
      case Op::Sum: {
        LeadingTerm s = LeadingTerm::zero();
        for (const auto& r : e.args) {
          LeadingTerm a = term_of(r, v);
          if (a.is_zero()) continue;
          if (s.is_zero() || *a.valuation < *s.valuation) {
            s = a;
          } else if (*a.valuation == *s.valuation) {
            s.count += a.count;
          }
        }
        w[i] = s;
        break;
      }
    }
  }
  return w;
}

WellFoundedness leading_terms(const NormalSystem& sys) {
  WellFoundedness res;
  int m = sys.size();
  LeadingTermVector w(m);
  for (int sweep = 1; sweep <= m + 1; ++sweep) {
    LeadingTermVector v = w;
    int failing = -1;
    auto next = leading_term_update(sys, v, &failing);
    res.sweeps = sweep;
    if (!next) {
      res.status = WellFoundedness::Status::GuardFailure;
      res.failing_equation = failing;
      res.terms = v;
      return res;
    }
    w = std::move(*next);
    res.trace.push_back(w);
    if (v == w) {
      res.terms = w;
      return res;
    }
    res.previous = v;
  }
  res.status = WellFoundedness::Status::NoFixedPoint;
  res.terms = w;
  return res;
}

NormalSystem strip_zero_coords(const NormalSystem& sys, const LeadingTermVector& lt) {
  int m = sys.size();
  std::vector<int> remap(m, -1);
  NormalSystem out;
  for (int i = 0; i < m; ++i)
    if (!lt[i].is_zero()) remap[i] = static_cast<int>(out.eqs.size()), out.eqs.push_back(sys.eqs[i]);
  for (const auto& n : sys.original) {
    int i = sys.index(n);
    (remap[i] >= 0 ? out.original : out.removed).push_back(n);
  }
  for (const auto& n : sys.removed) out.removed.push_back(n);

  for (auto& e : out.eqs) {
    auto is_zero_ref = [&](const Ref& r) { return r.is_coord() && remap[r.index] < 0; };
    switch (e.op) {
      case Op::Sum: {
        std::vector<Ref> kept;
        for (const auto& r : e.args)
          if (!is_zero_ref(r)) kept.push_back(r);
        e.args = std::move(kept);
        break;
      }
      case Op::Seq:
      case Op::Set:
        // F(0) = 1
        if (is_zero_ref(e.args[0])) { e.op = Op::One; e.args.clear(); }
        break;
      default:
        // a nonzero product or cycle cannot reference a zero coordinate
        break;
    }
    for (auto& r : e.args)
      if (r.is_coord()) r.index = remap[r.index];
  }
  return out;
}

}  // namespace combasym
