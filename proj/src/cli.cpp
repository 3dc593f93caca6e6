#include "combasym/cli.hpp"

#include <mpfr.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "combasym/analytic.hpp"
#include "combasym/localexp.hpp"
#include "combasym/series.hpp"
#include "combasym/transfer.hpp"
#include "combasym/wellfounded.hpp"

namespace combasym {

using Json = nlohmann::ordered_json;

std::string decimal(const Real& x, int digits, int dir) {
  if (x == 0) return "0";
  digits = std::max(digits, 2);
  mpfr_exp_t e = 0;
  mpfr_rnd_t rnd = dir < 0 ? MPFR_RNDD : dir > 0 ? MPFR_RNDU : MPFR_RNDN;
  char* raw = mpfr_get_str(nullptr, &e, 10, digits, x.backend().data(), rnd);
  std::string m(raw);
  mpfr_free_str(raw);
  std::string sign;
  if (m[0] == '-') {
    sign = "-";
    m.erase(0, 1);
  }
  // x = 0.m * 10^e
  if (e > 0 && e <= digits) {
    std::string s = m.substr(0, e);
    if (static_cast<int>(m.size()) > e) s += "." + m.substr(e);
    return sign + s;
  }
  if (e <= 0 && e > -5) return sign + "0." + std::string(-e, '0') + m;
  return sign + m.substr(0, 1) + "." + m.substr(1) + "e" + std::to_string(e - 1);
}

namespace {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command, file;
  bool json = false, no_timings = false;
  unsigned bits = 0;
  unsigned oracle_digits = 100;
  int count = 10;
  int digits = 15;
  int order = 8;
  int terms = 3;
  std::vector<long> eval;
  std::vector<std::string> coords;
};

constexpr long kSeriesCap = 1000;

const char* tag(bool exact, bool certified) { return exact ? "exact" : certified ? "certified" : "heuristic"; }

// q with denominator <= 24 within 2^{-bits/2} of x
std::optional<Rational> small_rational(const Real& x) {
  Real tol = ldexp2(-static_cast<int>(current_bits() / 2));
  for (int q = 1; q <= 24; ++q) {
    Real m = boost::multiprecision::round(x * q);
    if (boost::multiprecision::abs(x - m / q) < tol) return Rational(m.convert_to<Integer>(), q);
  }
  return std::nullopt;
}

struct Report {
  const Options& o;
  int digits = 30;
  Json j;
  std::ostringstream text;
  std::vector<std::pair<std::string, double>> timings;

  explicit Report(const Options& opt) : o(opt) {}

  template <class F>
  auto stage(const std::string& name, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      timings.emplace_back(name, ms_since(t0));
    } else {
      auto r = f();
      timings.emplace_back(name, ms_since(t0));
      return r;
    }
  }
  static double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }

  Json num(const Real& x, const char* cert) const { return {{"value", decimal(x, digits)}, {"cert", cert}}; }
  Json cnum(const Complex& z, const char* cert) const {
    return {{"re", decimal(z.re, digits)}, {"im", decimal(z.im, digits)}, {"cert", cert}};
  }
  static Json exact(const std::string& s) { return {{"value", s}, {"cert", "exact"}}; }

  void emit(std::ostream& out) {
    if (o.json) {
      if (!o.no_timings) {
        Json t = Json::object();
        for (const auto& [k, v] : timings) t[k] = std::round(v * 1000) / 1000;
        j["timings_ms"] = t;
      }
      out << j.dump(2) << "\n";
      return;
    }
    out << text.str();
    if (!o.no_timings && !timings.empty()) {
      out << "timings:";
      for (const auto& [k, v] : timings) out << " " << k << " " << std::fixed << std::setprecision(1) << v << " ms";
      out << "\n";
    }
  }
};

std::string name_of(const NormalSystem& sys, int i) { return sys.eqs[i].name; }

std::vector<std::string> names(const NormalSystem& sys, const std::vector<int>& coords) {
  std::vector<std::string> v;
  for (int i : coords) v.push_back(name_of(sys, i));
  return v;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

// Requested coordinates, default the original identifiers. Zero species map to -1.
std::vector<std::pair<std::string, int>> selected(const NormalSystem& sys, const Options& o) {
  std::vector<std::pair<std::string, int>> out;
  const auto& want = o.coords.empty() ? sys.original : o.coords;
  for (const auto& n : want) {
    int i = sys.index(n);
    bool removed = std::find(sys.removed.begin(), sys.removed.end(), n) != sys.removed.end();
    if (i < 0 && !removed) throw ValidationError("unknown coordinate '" + n + "'");
    out.emplace_back(n, i);
  }
  return out;
}

Json leading_json(const LeadingTerm& t) {
  if (t.is_zero()) return {{"zero", true}, {"cert", "exact"}};
  return {{"count", to_string(t.count)}, {"valuation", *t.valuation}, {"cert", "exact"}};
}

Json decisions_json(const std::vector<OracleDecision>& ds) {
  Json a = Json::array();
  for (const auto& d : ds)
    a.push_back({{"outcome", to_string(d.outcome)},
                 {"what", d.what},
                 {"digits", d.digits},
                 {"heuristic", d.heuristic},
                 {"cert", d.heuristic ? "heuristic" : "certified"}});
  return a;
}

void decisions_text(std::ostream& os, const std::vector<OracleDecision>& ds, const std::string& indent) {
  for (const auto& d : ds) {
    os << indent << "decision: " << to_string(d.outcome) << " (" << d.what << ")";
    if (d.heuristic) os << " [heuristic, " << d.digits << " digits]";
    os << "\n";
  }
}

Json interval_json(const Interval& iv, int digits, const char* cert) {
  return {{"lo", decimal(iv.lo, digits, -1)}, {"hi", decimal(iv.hi, digits, 1)},
          {"radix", 10},                       {"digits", digits},
          {"cert", cert}};
}

std::string interval_text(const Interval& iv, int digits) {
  return "[" + decimal(iv.lo, digits, -1) + ", " + decimal(iv.hi, digits, 1) + "]";
}

const char* constant_tag(const CertifiedConstant& c) {
  if (!c.finite) return "exact";
  return tag(c.is_exact(), c.certified);
}

Json constant_json(const CertifiedConstant& c, int digits, bool system) {
  if (!c.finite) return {{"infinite", true}, {"cert", "exact"}};
  Json j = interval_json(c.interval, digits, constant_tag(c));
  if (c.is_exact()) return j;
  j["box_verified"] = c.box_verified;
  if (system && c.def) {
    Json eqs = Json::array();
    for (const auto& e : c.def->equations()) eqs.push_back(e);
    Json box = Json::array();
    for (std::size_t k = 0; k < c.box.size(); ++k) {
      Json b = interval_json(c.box[k], digits, c.box_verified ? "certified" : "heuristic");
      b["unknown"] = c.def->unknown_name(static_cast<int>(k));
      box.push_back(b);
    }
    j["system"] = {{"equations", eqs}, {"box", box}};
  }
  return j;
}

std::string approx(const CertifiedConstant& c, int digits) {
  if (!c.finite) return "∞";
  return decimal(c.interval.mid(), digits) + (c.is_exact() ? "" : "…");
}

std::string exponent_text(const Complex& a, int digits) {
  if (a.im == 0)
    if (auto q = small_rational(a.re)) return "{" + to_string(*q) + "}";
  return "{" + to_string(a, digits) + "}";
}

std::string order_text(const Real& x) {
  if (auto q = small_rational(x)) return to_string(*q);
  return decimal(x, 6);
}

std::string value_text(const Complex& z, int digits) {
  if (boost::multiprecision::abs(z.im) <= boost::multiprecision::abs(z.re) * Real("1e-40")) return decimal(z.re, digits);
  return "(" + decimal(z.re, digits) + (z.im < 0 ? "-" : "+") + decimal(boost::multiprecision::abs(z.im), digits) + "i)";
}

// ---- commands ----

int cmd_check(Report& r, const NormalSystem& sys, const WellFoundedness& wf) {
  auto& t = r.text;
  auto& j = r.j;
  j["status"] = wf.ok() ? "ok" : "not_well_founded";
  j["well_founded"] = wf.ok();
  j["description"] = wf.describe(sys);
  j["sweeps"] = wf.sweeps;
  t << wf.describe(sys) << "\n";
  if (wf.status == WellFoundedness::Status::GuardFailure) {
    j["failing_equation"] = sys.equation_string(wf.failing_equation);
    t << "failing guard: " << sys.equation_string(wf.failing_equation) << "\n";
  }
  bool full = wf.terms.size() == static_cast<std::size_t>(sys.size());
  Json eqs = Json::array();
  t << "normal system (" << sys.size() << " equations):\n";
  for (int i = 0; i < sys.size(); ++i) {
    Json e = {{"name", name_of(sys, i)}, {"equation", sys.equation_string(i)}, {"auxiliary", sys.eqs[i].auxiliary}};
    t << "  ";
    if (full && wf.ok()) {
      e["leading"] = leading_json(wf.terms[i]);
      t << std::left << std::setw(32) << sys.equation_string(i) << " leading " << to_string(wf.terms[i]);
    } else {
      t << sys.equation_string(i);
    }
    t << "\n";
    eqs.push_back(e);
  }
  j["equations"] = eqs;
  Json trace = Json::array();
  t << "sweeps:\n";
  for (std::size_t s = 0; s < wf.trace.size(); ++s) {
    trace.push_back(to_string(wf.trace[s]));
    t << "  " << s + 1 << ": " << to_string(wf.trace[s]) << "\n";
  }
  j["trace"] = trace;
  j["removed"] = sys.removed;
  if (!sys.removed.empty()) t << "zero species removed: " << join(sys.removed, ", ") << "\n";
  auto dag = condense(sys);
  Json comps = Json::array();
  t << "strongly connected components (dependencies first):\n";
  for (std::size_t c = 0; c < dag.components.size(); ++c) {
    const auto& comp = dag.components[c];
    comps.push_back({{"coordinates", names(sys, comp.coords)}, {"irreducible", comp.irreducible}});
    t << "  " << c << ": {" << join(names(sys, comp.coords), ", ") << "}"
      << (comp.irreducible ? " irreducible" : "") << "\n";
  }
  j["components"] = comps;
  return wf.ok() ? kExitOk : kExitNotWellFounded;
}

int cmd_coeffs(Report& r, const NormalSystem& sys) {
  if (r.o.count < 1) throw ValidationError("--count must be positive");
  auto series = r.stage("series", [&] { return expand_coefficients(sys, r.o.count - 1); });
  Json coords = Json::array();
  for (const auto& [name, i] : selected(sys, r.o)) {
    Json egf = Json::array(), counts = Json::array();
    r.text << name << ":\n";
    for (int n = 0; n < r.o.count; ++n) {
      Rational c = i < 0 ? Rational(0) : series[i].c[n];
      Integer k = i < 0 ? Integer(0) : series[i].count(n);
      egf.push_back(to_string(c));
      counts.push_back(k.str());
      r.text << "  n=" << std::left << std::setw(4) << n << " " << std::setw(24) << k.str() << " egf " << to_string(c)
             << "\n";
    }
    coords.push_back({{"name", name}, {"counts", counts}, {"egf", egf}, {"cert", "exact"}});
  }
  r.j["status"] = "ok";
  r.j["count"] = r.o.count;
  r.j["coordinates"] = coords;
  return kExitOk;
}

int cmd_radius(Report& r, const NormalSystem& sys, const PrecisionContext& ctx) {
  if (r.o.digits < 1) throw ValidationError("--digits must be positive");
  auto res = r.stage("radius", [&] { return radius(sys, ctx); });
  r.stage("refine", [&] {
    for (auto& c : res.components) refine(c.value, r.o.digits, ctx);
  });
  int d = r.o.digits + 3;
  auto& t = r.text;
  Json comps = Json::array();
  for (std::size_t c = 0; c < res.components.size(); ++c) {
    const auto& cr = res.components[c];
    const auto& comp = res.dag.components[c];
    Json e = {{"coordinates", names(sys, comp.coords)},
              {"irreducible", comp.irreducible},
              {"rule", to_string(cr.rule)},
              {"note", cr.note},
              {"radius", constant_json(cr.value, d, true)}};
    if (cr.lambda >= 0) e["perron_root"] = r.num(cr.lambda, "heuristic");
    e["decisions"] = decisions_json(cr.decisions);
    comps.push_back(e);
    t << "component " << c << " {" << join(names(sys, comp.coords), ", ") << "}: " << to_string(cr.rule);
    if (!cr.value.finite) {
      t << "\n";
    } else {
      t << ", " << constant_tag(cr.value) << "\n  radius in " << interval_text(cr.value.interval, d) << "\n";
      if (cr.value.def && !cr.value.is_exact() && cr.rule != ComponentRadius::Rule::Inherited) {
        t << "  isolating system:\n";
        for (const auto& eq : cr.value.def->equations()) t << "    " << eq << "\n";
        for (std::size_t k = 0; k < cr.value.box.size(); ++k)
          t << "    " << cr.value.def->unknown_name(static_cast<int>(k)) << " in " << interval_text(cr.value.box[k], d)
            << "\n";
      }
    }
    if (!cr.note.empty()) t << "  " << cr.note << "\n";
    decisions_text(t, cr.decisions, "  ");
  }
  Json coords = Json::array();
  for (const auto& [name, i] : selected(sys, r.o)) {
    if (i < 0) {
      coords.push_back({{"name", name}, {"zero", true}, {"radius", {{"infinite", true}, {"cert", "exact"}}}});
      t << "ρ_" << name << " = ∞ (zero species)\n";
      continue;
    }
    int c = res.dag.component_of[i];
    const auto& v = res.components[c].value;
    coords.push_back({{"name", name}, {"component", c}, {"radius", constant_json(v, d, false)}});
    t << "ρ_" << name << " ≈ " << approx(v, r.o.digits) << "\n";
  }
  r.j["status"] = "ok";
  r.j["digits"] = r.o.digits;
  r.j["overall_component"] = res.overall < 0 ? Json(nullptr) : Json(res.overall);
  r.j["components"] = comps;
  r.j["coordinates"] = coords;
  return kExitOk;
}

Json turns_json(const std::vector<Turn>& args) {
  Json a = Json::array();
  for (const auto& q : args) a.push_back(to_string(q));
  return a;
}

std::string turns_text(const std::vector<Turn>& args) {
  std::vector<std::string> v;
  for (const auto& q : args) v.push_back(to_string(q));
  return "{" + join(v, ", ") + "}";
}

int cmd_singularities(Report& r, const NormalSystem& sys, const DominantSet& d) {
  auto& t = r.text;
  const char* args_tag = d.heuristic() ? "heuristic" : "exact";
  r.j["status"] = "ok";
  r.j["R"] = constant_json(d.R, r.digits, false);
  r.j["args"] = {{"turns", turns_json(d.args)}, {"cert", args_tag}};
  r.j["heuristic"] = d.heuristic();
  t << "R ≈ " << approx(d.R, r.digits) << " (" << constant_tag(d.R) << ")\n";
  if (d.R.finite) t << "  in " << interval_text(d.R.interval, r.digits) << "\n";
  t << "dominant arguments (turns): " << turns_text(d.args) << (d.heuristic() ? " [heuristic]" : "") << "\n";
  Json comps = Json::array();
  for (std::size_t c = 0; c < d.components.size(); ++c) {
    const auto& cs = d.components[c];
    const auto& comp = d.radius.dag.components[c];
    comps.push_back({{"coordinates", names(sys, comp.coords)},
                     {"at_R", static_cast<bool>(d.at_R[c])},
                     {"args", turns_json(cs.args)},
                     {"period", cs.period},
                     {"rule", cs.rule}});
    t << "component " << c << " {" << join(names(sys, comp.coords), ", ") << "}: " << (d.at_R[c] ? "radius R" : "radius > R")
      << ", args " << turns_text(cs.args) << ", period " << cs.period << (cs.rule.empty() ? "" : ", " + cs.rule) << "\n";
  }
  r.j["components"] = comps;
  Json coords = Json::array();
  for (const auto& [name, i] : selected(sys, r.o)) {
    if (i < 0) {
      coords.push_back({{"name", name}, {"zero", true}});
      continue;
    }
    coords.push_back({{"name", name}, {"period", d.periods[i]}, {"valuation", d.valuations[i]}, {"cert", "exact"}});
    t << name << ": period " << d.periods[i] << ", valuation " << d.valuations[i] << "\n";
  }
  r.j["coordinates"] = coords;
  r.j["decisions"] = decisions_json(d.decisions);
  decisions_text(t, d.decisions, "");
  for (const auto& cr : d.radius.components) decisions_text(t, cr.decisions, "");
  return kExitOk;
}

Json expansion_json(const Report& r, const Expansion& e) {
  if (e.superpolynomial) return {{"exp", true}};
  Json terms = Json::array();
  for (const auto& key : e.sorted_keys()) {
    const Complex& a = e.classes[key.cls];
    Json ex = a.re == 0 && a.im == 0 ? Report::exact(to_string(Rational(key.i, e.r))) : r.cnum(e.exponent(key), "heuristic");
    terms.push_back({{"exponent", ex}, {"log", key.k}, {"coef", r.cnum(e.terms.at(key), "heuristic")}});
  }
  Json j = {{"exp", false}, {"exact", e.exact()}, {"terms", terms}};
  if (!e.exact()) j["error"] = {{"order", order_text(e.order)}, {"log", e.order_log}};
  return j;
}

int cmd_expand(Report& r, const NormalSystem& sys, const DominantSet& d, const PrecisionContext& ctx) {
  if (r.o.order < 1) throw ValidationError("--order must be positive");
  auto& t = r.text;
  auto sel = selected(sys, r.o);
  auto lbs = r.stage("expansions", [&] { return singular_expansions(sys, d, r.o.order, ctx); });
  r.j["status"] = "ok";
  r.j["order"] = r.o.order;
  r.j["R"] = constant_json(d.R, r.digits, false);
  if (lbs.empty()) t << "no finite singularity: every coordinate is entire\n";
  Json sings = Json::array();
  for (const auto& lb : lbs) {
    Json s = {{"arg", to_string(lb.arg)}, {"sigma", r.cnum(lb.sigma, "heuristic")}};
    t << "σ = R·e^{2πi·" << to_string(lb.arg) << "} ≈ " << to_string(lb.sigma, 12) << "  (Z = 1 - z/σ, L = ln(1/Z))\n";
    Json coords = Json::array();
    for (const auto& [name, i] : sel) {
      if (i < 0) continue;
      Json c = {{"name", name}};
      c.update(expansion_json(r, lb.coords[i]));
      coords.push_back(c);
      t << "  " << name << " = " << lb.coords[i].to_string(12) << "\n";
    }
    s["coordinates"] = coords;
    Json comps = Json::array();
    for (std::size_t c = 0; c < lb.components.size(); ++c)
      comps.push_back({{"coordinates", names(sys, d.radius.dag.components[c].coords)}, {"branch", lb.components[c].branch}});
    s["components"] = comps;
    auto res = residual(sys, lb);
    s["residual"] = {{"max", decimal(res.max, 6)}, {"through_order", order_text(res.order)}, {"cert", "heuristic"}};
    t << "  residual " << decimal(res.max, 6) << " through Z^" << order_text(res.order) << "\n";
    sings.push_back(s);
  }
  r.j["singularities"] = sings;
  return kExitOk;
}

std::string group_text(const DisplayGroup& g, int digits) {
  std::string s;
  if (g.paired) s += "2 Re[";
  s += g.arg == 0 ? "ρ^{-n}" : "(ρ e^{2πi·" + to_string(g.arg) + "})^{-n}";
  s += " n^" + exponent_text(-g.alpha0 - Complex(1), digits) + " (";
  bool first = true;
  for (std::size_t j = 0; j < g.coef.size(); ++j)
    for (std::size_t l = 0; l < g.coef[j].size(); ++l) {
      if (abs(g.coef[j][l]) == 0) continue;
      std::string v = value_text(g.coef[j][l], digits);
      if (first) s += v;
      else if (v[0] == '-') s += " - " + v.substr(1);
      else s += " + " + v;
      first = false;
      if (l == 1) s += " ln n";
      if (l > 1) s += " ln^" + std::to_string(l) + " n";
      if (j == 1) s += "/n";
      if (j > 1) s += "/n^" + std::to_string(j);
    }
  if (first) s += "0";
  s += ")";
  if (g.paired) s += "]";
  return s;
}

int cmd_asympt(Report& r, const NormalSystem& sys, const DominantSet& d, const PrecisionContext& ctx) {
  if (r.o.terms < 1) throw ValidationError("--terms must be positive");
  for (long n : r.o.eval)
    if (n < 0) throw ValidationError("--eval values must be nonnegative");
  auto& t = r.text;
  auto sel = selected(sys, r.o);
  std::vector<int> coords;
  for (const auto& [name, i] : sel)
    if (i >= 0) coords.push_back(i);
  auto lbs = r.stage("expansions", [&] { return expansions_for_terms(sys, d, coords, r.o.terms, ctx); });

  long want = -1;
  for (long n : r.o.eval)
    if (n <= kSeriesCap) want = std::max(want, n);
  std::vector<SeriesTruncation> series;
  if (want >= 0) series = r.stage("series", [&] { return expand_coefficients(sys, static_cast<int>(want)); });

  r.j["status"] = "ok";
  r.j["terms"] = r.o.terms;
  r.j["R"] = constant_json(d.R, r.digits, false);
  r.j["series_cap"] = kSeriesCap;
  Json out = Json::array();
  for (const auto& [name, i] : sel) {
    Json cj = {{"name", name}};
    if (i < 0) {
      cj["zero"] = true;
      out.push_back(cj);
      t << name << ": zero species\n";
      continue;
    }
    AsymptoticExpansion a;
    try {
      a = r.stage("transfer " + name, [&] { return coeff_asymptotics(lbs, i, r.o.terms); });
    } catch (const SuperpolynomialRegime& e) {
      throw SuperpolynomialRegime(name + ": " + e.what());
    }
    cj["entire"] = a.entire;
    t << name << ":";
    if (a.entire) {
      t << " entire, coefficients decay faster than any geometric sequence\n";
    } else {
      t << " ρ ≈ " << approx(d.R, 12) << "\n";
      Json contribs = Json::array();
      for (const auto& c : a.contributions)
        contribs.push_back({{"arg", to_string(c.arg)},
                            {"rank", c.rank},
                            {"alpha", r.cnum(c.alpha, "heuristic")},
                            {"log", c.k},
                            {"coef", r.cnum(c.c, "heuristic")}});
      cj["contributions"] = contribs;
      Json groups = Json::array();
      for (const auto& g : a.display) {
        Json coef = Json::array();
        for (const auto& row : g.coef) {
          Json jr = Json::array();
          for (const auto& v : row) jr.push_back(r.cnum(v, "heuristic"));
          coef.push_back(jr);
        }
        groups.push_back({{"arg", to_string(g.arg)}, {"paired", g.paired}, {"alpha0", r.cnum(g.alpha0, "heuristic")}, {"coef", coef}});
        t << "  + " << group_text(g, 10) << "\n";
      }
      cj["display"] = groups;
      Json err = {{"exponentially_small", a.exponentially_small}};
      if (a.exponentially_small) {
        t << "  + exponentially smaller than ρ^{-n}\n";
      } else {
        auto q = small_rational(a.error_exponent);
        err["exponent"] = q ? Report::exact(to_string(*q)) : r.num(a.error_exponent, "heuristic");
        err["log"] = a.error_log;
        t << "  + O(ρ^{-n} n^" << exponent_text(Complex(-a.error_exponent - 1), 10);
        if (a.error_log == 1) t << " ln n";
        if (a.error_log > 1) t << " ln^" << a.error_log << " n";
        t << ")\n";
      }
      cj["error"] = err;
    }
    Json evals = Json::array();
    for (long n : r.o.eval) {
      Json e = {{"n", n}};
      t << "  n = " << n << "\n";
      std::optional<Real> exact;
      if (n <= want) {
        Rational c = series[i].c[n];
        exact = to_real(c);
        e["exact"] = {{"value", to_string(c)}, {"decimal", decimal(*exact, r.digits)}, {"cert", "exact"}};
        t << "    exact                 " << decimal(*exact, 16) << "\n";
      } else {
        e["exact"] = nullptr;
      }
      auto rel = [&](const Complex& v) -> std::optional<Real> {
        if (!exact || *exact == 0) return std::nullopt;
        return abs(v - Complex(*exact)) / boost::multiprecision::abs(*exact);
      };
      auto row = [&](const std::string& label, const Complex& v) {
        Json jv = r.cnum(v, "heuristic");
        auto re = rel(v);
        jv["relative_error"] = re ? Json(decimal(*re, 6)) : Json(nullptr);
        t << "    " << std::left << std::setw(22) << label << value_text(v, 16);
        if (re) t << "  rel. err " << decimal(*re, 3);
        t << "\n";
        return jv;
      };
      if (a.entire) {
        evals.push_back(e);
        continue;
      }
      Json st = Json::array();
      int J = 0;
      for (const auto& g : a.display) J = std::max(J, static_cast<int>(g.coef.size()));
      for (int k = 1; k <= J; ++k) {
        Json jv = row(std::to_string(k) + (k == 1 ? " order" : " orders"), evaluate_stirling(a, n, k));
        Json o = {{"orders", k}};
        o.update(jv);
        st.push_back(o);
      }
      e["stirling"] = st;
      e["transfer"] = row("exact C_n, " + std::to_string(r.o.terms) + " terms", evaluate_asympt(a, n, r.o.terms));
      evals.push_back(e);
    }
    if (!r.o.eval.empty()) cj["eval"] = evals;
    out.push_back(cj);
  }
  r.j["coordinates"] = out;
  return kExitOk;
}

int run_command(Report& r, const Options& o, std::ostream& out) {
  PrecisionContext ctx = PrecisionContext::from_env();
  if (o.bits) ctx = ctx.with_bits(o.bits);
  ctx.oracle_digits = o.oracle_digits;
  PrecisionScope scope(ctx);
  r.digits = std::min<int>(30, static_cast<int>(ctx.digits()));
  r.j["precision"] = {{"bits", ctx.bits}, {"oracle_digits", ctx.oracle_digits}};
  if (!o.json) r.text << o.file << ": " << o.command << " at " << ctx.bits << " bits\n";

  auto sys = r.stage("parse", [&] { return normalize(parse_spec_file(o.file)); });
  auto wf = r.stage("wellfounded", [&] { return leading_terms(sys); });
  int status = kExitOk;
  if (o.command == "check") {
    status = cmd_check(r, sys, wf);
  } else {
    if (!wf.ok()) throw NotWellFoundedError(wf.describe(sys));
    if (o.command == "coeffs") {
      status = cmd_coeffs(r, sys);
    } else if (o.command == "radius") {
      status = cmd_radius(r, sys, ctx);
    } else {
      auto d = r.stage("singularities", [&] { return dominant_singularities(sys, ctx); });
      if (o.command == "singularities") status = cmd_singularities(r, sys, d);
      if (o.command == "expand") status = cmd_expand(r, sys, d, ctx);
      if (o.command == "asympt") status = cmd_asympt(r, sys, d, ctx);
    }
  }
  r.emit(out);
  return status;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Enumeration and coefficient asymptotics of combinatorial specifications", "combasym"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  app.add_flag("--json", o.json, "machine-readable report");
  app.add_flag("--no-timings", o.no_timings, "omit timings (byte-identical output)");
  app.add_option("--precision", o.bits, "working precision in bits (default COMBASYM_PREC or 256)")
      ->check(CLI::Range(64u, 1u << 20));
  app.add_option("--oracle-digits", o.oracle_digits, "agreement digits for heuristic equality")
      ->check(CLI::Range(1u, 100000u));

  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("file", o.file, "specification file")->required();
    return s;
  };
  sub("check", "well-foundedness, leading terms and strongly connected components");
  sub("coeffs", "exact counts")->add_option("--count", o.count, "number of coefficients")->capture_default_str();
  sub("radius", "certified radii of convergence")->add_option("--digits", o.digits, "decimal digits")->capture_default_str();
  sub("singularities", "dominant singularities");
  auto* ex = sub("expand", "singular expansions at the dominant singularities");
  ex->add_option("--order", o.order, "expansions to O(Z^{p/2})")->capture_default_str();
  ex->add_option("--coord", o.coords, "coordinates to report (default: all named)");
  auto* as = sub("asympt", "asymptotic expansions of the coefficients");
  as->add_option("--terms", o.terms, "terms per singularity")->capture_default_str();
  as->add_option("--eval", o.eval, "evaluate at n,...")->delimiter(',');
  as->add_option("--coord", o.coords, "coordinates to report (default: all named)");
  for (auto* s : {"coeffs", "radius", "singularities"})
    app.get_subcommand(s)->add_option("--coord", o.coords, "coordinates to report (default: all named)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }
  o.command = app.get_subcommands().front()->get_name();

  Report r(o);
  r.j["schema"] = 1;
  r.j["command"] = o.command;
  r.j["file"] = o.file;
  auto fail = [&](int code, const char* kind, const std::string& msg, Json extra = Json::object()) {
    if (o.json) {
      Json j = {{"schema", 1}, {"command", o.command}, {"file", o.file}, {"status", "error"}};
      Json e = {{"kind", kind}, {"message", msg}, {"exit", code}};
      e.update(extra);
      j["error"] = e;
      out << j.dump(2) << "\n";
    }
    err << "combasym: " << msg << "\n";
    return code;
  };
  try {
    return run_command(r, o, out);
  } catch (const ParseError& e) {
    return fail(kExitInvalid, "parse", e.what(), {{"line", e.line}, {"col", e.col}});
  } catch (const ValidationError& e) {
    return fail(kExitInvalid, "validation", e.what());
  } catch (const NotWellFoundedError& e) {
    return fail(kExitNotWellFounded, "not_well_founded", e.what());
  } catch (const SuperpolynomialRegime& e) {
    return fail(kExitSuperpolynomial, "superpolynomial", e.what());
  } catch (const PrecisionExhausted& e) {
    return fail(kExitPrecision, "precision_exhausted", e.what());
  }
}

}  // namespace combasym
