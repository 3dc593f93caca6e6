#include "combasym/localexp.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "combasym/newton.hpp"

namespace combasym {

namespace {

Real tiny() { return ldexp2(-static_cast<int>(current_bits() / 2)); }
Real rabs(const Real& x) { return boost::multiprecision::abs(x); }
Real rmin(const Real& a, const Real& b) { return a < b ? a : b; }
Real rmax(const Real& a, const Real& b) { return a < b ? b : a; }
bool is_zero(const Complex& c) { return c.re == 0 && c.im == 0; }

struct Lead {
  Expansion::Key key;
  Complex e, c;
};

// Unique leading term of a cleaned expansion.
Lead leading(const Expansion& x) {
  if (x.terms.empty()) throw std::domain_error("expansion indistinguishable from zero");
  auto keys = x.sorted_keys();
  Real eps = tiny();
  if (keys.size() > 1 && x.real_exponent(keys[1]) <= x.real_exponent(keys[0]) + eps)
    throw std::domain_error("expansion has no single leading term");
  return {keys[0], x.exponent(keys[0]), x.terms.at(keys[0])};
}

// x / (c Z^e) - 1
Expansion unit_part(const Expansion& x, const Lead& l) {
  Expansion g = x;
  g.terms.erase(l.key);
  return (Complex(1) / l.c) * g.shifted(-l.e);
}

}  // namespace

Expansion Expansion::exp_sentinel() {
  Expansion e;
  e.superpolynomial = true;
  return e;
}

Expansion Expansion::constant(const Complex& c, const Real& order) { return monomial(c, Complex(), 0, order); }

Expansion Expansion::monomial(const Complex& c, const Complex& e, int k, const Real& order) {
  Expansion x;
  x.order = order;
  x.add_term(e, k, c);
  return x;
}

Expansion Expansion::variable(const Complex& sigma) {
  Expansion x;
  x.add_term(Complex(), 0, sigma);
  x.add_term(Complex(1), 0, -sigma);
  return x;
}

int Expansion::class_of(const Complex& e, long& shift) {
  Real eps = tiny();
  Real f = floor(e.re * r + eps);
  shift = f.convert_to<long>();
  Complex a(e.re - f / r, e.im);
  if (rabs(a.re) <= eps) a.re = 0;
  if (rabs(a.im) <= eps) a.im = 0;
  for (std::size_t j = 0; j < classes.size(); ++j)
    if (abs(classes[j] - a) <= eps) return static_cast<int>(j);
  classes.push_back(a);
  return static_cast<int>(classes.size()) - 1;
}

Complex Expansion::exponent(const Key& key) const { return classes[key.cls] + Complex(Real(key.i) / r); }

Real Expansion::real_exponent(const Key& key) const { return classes[key.cls].re + Real(key.i) / r; }

Real Expansion::valuation() const {
  Real v = order;
  for (const auto& [key, c] : terms)
    if (!is_zero(c)) v = rmin(v, real_exponent(key));
  return v;
}

Complex Expansion::coefficient(const Complex& e, int k) const {
  Complex s;
  for (const auto& [key, c] : terms)
    if (key.k == k && abs(exponent(key) - e) <= tiny()) s += c;
  return s;
}

int Expansion::max_log() const {
  int m = 0;
  for (const auto& t : terms) m = std::max(m, t.first.k);
  return m;
}

Real Expansion::magnitude() const {
  Real m = 0;
  for (const auto& t : terms) m = rmax(m, abs(t.second));
  return m;
}

void Expansion::add_term(const Complex& e, int k, const Complex& c) {
  if (is_zero(c) || e.re >= order - tiny()) return;
  long m = 0;
  int cls = class_of(e, m);
  auto [it, fresh] = terms.try_emplace(Key{cls, m, k}, c);
  if (!fresh) it->second += c;
}

void Expansion::lift(int r2) {
  if (r2 == r) return;
  Expansion out;
  out.r = r2;
  out.order = order;
  out.order_log = order_log;
  for (const auto& [key, c] : terms) out.add_term(exponent(key), key.k, c);
  *this = std::move(out);
}

void Expansion::truncate(const Real& o) {
  if (o >= order) return;
  order = o;
  Real eps = tiny();
  for (auto it = terms.begin(); it != terms.end();)
    it = real_exponent(it->first) >= o - eps ? terms.erase(it) : std::next(it);
}

void Expansion::clean(const Real& eps) {
  for (auto it = terms.begin(); it != terms.end();) it = abs(it->second) <= eps ? terms.erase(it) : std::next(it);
}

Expansion Expansion::shifted(const Complex& e) const {
  if (superpolynomial) return *this;
  Expansion out;
  out.r = r;
  out.order = order + e.re;
  out.order_log = order_log;
  for (const auto& [key, c] : terms) out.add_term(exponent(key) + e, key.k, c);
  return out;
}

std::vector<Expansion::Key> Expansion::sorted_keys() const {
  std::vector<Key> keys;
  for (const auto& t : terms) keys.push_back(t.first);
  std::sort(keys.begin(), keys.end(), [&](const Key& a, const Key& b) {
    Real ea = real_exponent(a), eb = real_exponent(b);
    if (rabs(ea - eb) > tiny()) return ea < eb;
    return a < b;
  });
  return keys;
}

std::string Expansion::to_string(int digits) const {
  if (superpolynomial) return "EXP";
  std::ostringstream os;
  bool first = true;
  for (const auto& key : sorted_keys()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << combasym::to_string(terms.at(key), digits) << ")";
    const Complex& a = classes[key.cls];
    if (is_zero(a)) {
      Rational q(key.i, r);
      if (q == 1) os << "*Z";
      else if (denominator(q) == 1 && q != 0) os << "*Z^" << combasym::to_string(q);
      else if (q != 0) os << "*Z^(" << combasym::to_string(q) << ")";
    } else {
      os << "*Z^(" << combasym::to_string(exponent(key), digits) << ")";
    }
    if (key.k == 1) os << "*L";
    if (key.k > 1) os << "*L^" << key.k;
  }
  if (!exact()) {
    if (!first) os << " + ";
    os << "O(Z^" << combasym::to_string(order, 6);
    if (order_log > 0) os << " L^" << order_log;
    os << ")";
  }
  if (first && exact()) os << "0";
  return os.str();
}

Expansion operator+(const Expansion& a, const Expansion& b) {
  if (a.superpolynomial || b.superpolynomial) return Expansion::exp_sentinel();
  Expansion out = a;
  out.lift(std::lcm(a.r, b.r));
  out.order_log = a.order < b.order ? a.order_log : b.order < a.order ? b.order_log : std::max(a.order_log, b.order_log);
  out.truncate(b.order);
  for (const auto& [key, c] : b.terms) out.add_term(b.exponent(key), key.k, c);
  return out;
}

Expansion operator-(const Expansion& a) { return Complex(-1) * a; }

Expansion operator-(const Expansion& a, const Expansion& b) { return a + (-b); }

Expansion operator*(const Complex& c, const Expansion& a) {
  Expansion out = a;
  if (out.superpolynomial) return out;
  if (is_zero(c)) {
    out.terms.clear();
    return out;
  }
  for (auto& t : out.terms) t.second *= c;
  return out;
}

Expansion operator*(const Expansion& a, const Expansion& b) {
  if (a.superpolynomial || b.superpolynomial) return Expansion::exp_sentinel();
  Expansion out;
  out.r = std::lcm(a.r, b.r);
  Real oa = a.order + b.valuation(), ob = b.order + a.valuation();
  out.order = rmin(oa, ob);
  int la = a.order_log + b.max_log(), lb = b.order_log + a.max_log();
  out.order_log = oa < ob ? la : ob < oa ? lb : std::max(la, lb);
  struct T {
    Complex e;
    int k;
    const Complex* c;
  };
  auto flat = [](const Expansion& x) {
    std::vector<T> v;
    for (const auto& [key, c] : x.terms) v.push_back({x.exponent(key), key.k, &c});
    return v;
  };
  auto fa = flat(a), fb = flat(b);
  for (const auto& s : fa)
    for (const auto& t : fb) out.add_term(s.e + t.e, s.k + t.k, *s.c * *t.c);
  return out;
}

Expansion compose(const Expansion& w0, const std::function<Complex(int)>& a, const Real& cap) {
  if (w0.superpolynomial) return w0;
  Expansion w = w0;
  w.truncate(cap);
  Real v = w.valuation();
  if (w.terms.empty() || v >= w.order) return Expansion::constant(a(0), w.order);
  if (v <= tiny()) throw std::logic_error("composition with a term that does not tend to 0");
  Real q = ceil(w.order / v);
  int J = q.convert_to<int>();
  Expansion res = Expansion::constant(a(J));
  for (int j = J - 1; j >= 0; --j) res = res * w + Expansion::constant(a(j));
  res.truncate(w.order);
  return res;
}

Expansion inverse(const Expansion& d, const Real& cap) {
  if (d.superpolynomial) return d;
  Expansion x = d;
  x.truncate(cap);
  x.clean(tiny() * rmax(Real(1), x.magnitude()));
  auto l = leading(x);
  if (l.key.k != 0) throw std::domain_error("inverse of a logarithmic leading term");
  auto g = unit_part(x, l);
  auto s = compose(g, [](int j) { return Complex(j % 2 ? -1 : 1); }, g.order);
  return (Complex(1) / l.c) * s.shifted(-l.e);
}

Expansion exp(const Expansion& u, const Real& cap) {
  if (u.superpolynomial) return u;
  Expansion x = u;
  x.truncate(cap);
  x.clean(tiny() * rmax(Real(1), x.magnitude()));
  Real eps = tiny();
  Complex a, u0;
  Expansion w = x;
  w.terms.clear();
  for (const auto& [key, c] : x.terms) {
    Real re = x.real_exponent(key);
    if (re < -eps) return Expansion::exp_sentinel();
    if (re <= eps) {
      if (rabs(x.exponent(key).im) > eps || key.k >= 2) return Expansion::exp_sentinel();
      (key.k == 1 ? a : u0) += c;
    } else {
      w.terms.emplace(key, c);
    }
  }
  Complex e0 = combasym::exp(u0);
  std::vector<Complex> coef{e0};
  auto res = compose(
      w,
      [&](int j) {
        while (static_cast<int>(coef.size()) <= j) coef.push_back(coef.back() / Complex(static_cast<int>(coef.size())));
        return coef[j];
      },
      w.order);
  return is_zero(a) ? res : res.shifted(-a);
}

Expansion inv_one_minus(const Expansion& u, const Real& cap) { return inverse(Expansion::constant(1) - u, cap); }

Expansion log_inv_one_minus(const Expansion& u, const Real& cap) {
  if (u.superpolynomial) return u;
  Expansion x = Expansion::constant(1) - u;
  x.truncate(cap);
  x.clean(tiny() * rmax(Real(1), x.magnitude()));
  auto l = leading(x);
  if (l.key.k != 0 || rabs(l.e.im) > tiny()) throw std::domain_error("logarithm of an unsupported leading term");
  auto g = unit_part(x, l);
  auto s = compose(g, [](int j) { return j == 0 ? Complex() : Complex(j % 2 ? -1 : 1) / Complex(j); }, g.order);
  s = s + Expansion::constant(-combasym::log(l.c));
  if (rabs(l.e.re) > tiny()) s = s + Expansion::monomial(Complex(l.e.re), Complex(), 1);
  return s;
}

namespace {

// ---- bivariate series in v with coefficients polynomial in delta ----

using Poly = std::vector<Complex>;

struct Bi {
  std::vector<Poly> c;  // c[j][d]: v^j delta^d
  int size() const { return static_cast<int>(c.size()); }
};

Complex at(const Bi& b, int j, int d) {
  if (j >= b.size() || d >= static_cast<int>(b.c[j].size())) return Complex();
  return b.c[j][d];
}

Bi bi_const(int n, const Complex& x) {
  Bi b;
  b.c.assign(n, {});
  if (n > 0) b.c[0] = {x};
  return b;
}

Bi truncated(const Bi& a, int n) {
  Bi b = a;
  if (b.size() > n) b.c.resize(n);
  return b;
}

void padd(Poly& a, const Poly& b, const Complex& f = Complex(1)) {
  if (a.size() < b.size()) a.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += f * b[i];
}

Bi bi_add(const Bi& a, const Bi& b, const Complex& f = Complex(1)) {
  int n = std::min(a.size(), b.size());
  Bi out = truncated(a, n);
  for (int j = 0; j < n; ++j) padd(out.c[j], b.c[j], f);
  return out;
}

Bi bi_mul(const Bi& a, const Bi& b) {
  int n = std::min(a.size(), b.size());
  Bi out;
  out.c.assign(n, {});
  for (int i = 0; i < n; ++i) {
    if (a.c[i].empty()) continue;
    for (int k = 0; i + k < n; ++k) {
      const auto& q = b.c[k];
      if (q.empty()) continue;
      auto& o = out.c[i + k];
      if (o.size() < a.c[i].size() + q.size() - 1) o.resize(a.c[i].size() + q.size() - 1);
      for (std::size_t x = 0; x < a.c[i].size(); ++x) {
        if (is_zero(a.c[i][x])) continue;
        for (std::size_t y = 0; y < q.size(); ++y) o[x + y] += a.c[i][x] * q[y];
      }
    }
  }
  return out;
}

// sum_j a_j (x - x0)^j, x0 the constant term
Bi bi_compose(const Bi& x, const std::function<Complex(int, const Complex&)>& a) {
  int n = x.size();
  Complex x0 = at(x, 0, 0);
  Bi w = x;
  if (n > 0) w.c[0].clear();
  Bi res = bi_const(n, a(n - 1, x0));
  for (int j = n - 2; j >= 0; --j) res = bi_add(bi_mul(res, w), bi_const(n, a(j, x0)));
  return res;
}

// Substitute delta = D(v) (univariate) into b, keeping n orders.
std::vector<Complex> subst(const Bi& b, const std::vector<Complex>& D, int n) {
  std::size_t deg = 0;
  for (int j = 0; j < std::min(n, b.size()); ++j) deg = std::max(deg, b.c[j].size());
  std::vector<std::vector<Complex>> pw(std::max<std::size_t>(deg, 1));
  pw[0].assign(n, Complex());
  pw[0][0] = Complex(1);
  for (std::size_t d = 1; d < pw.size(); ++d) {
    pw[d].assign(n, Complex());
    for (int i = 0; i < n; ++i)
      for (int k = 0; i + k < n && k < static_cast<int>(D.size()); ++k) pw[d][i + k] += pw[d - 1][i] * D[k];
  }
  std::vector<Complex> out(n);
  for (int i = 0; i < std::min(n, b.size()); ++i)
    for (std::size_t d = 0; d < b.c[i].size(); ++d) {
      if (is_zero(b.c[i][d])) continue;
      for (int k = 0; i + k < n; ++k) out[i + k] += b.c[i][d] * pw[d][k];
    }
  return out;
}

Bi bi_from(const std::vector<Complex>& s) {
  Bi b;
  for (const auto& x : s) b.c.push_back({x});
  return b;
}

// ---- the three algebras behind one equation evaluator ----

struct ExpansionOps {
  Expansion z;
  Real cap;
  Expansion one() const { return Expansion::constant(1); }
  Expansion var() const { return z; }
  Expansion add(const Expansion& a, const Expansion& b) const { return a + b; }
  Expansion mul(const Expansion& a, const Expansion& b) const { return a * b; }
  Expansion seq(const Expansion& a) const { return inv_one_minus(a, cap); }
  Expansion set(const Expansion& a) const { return exp(a, cap); }
  Expansion cyc(const Expansion& a) const { return log_inv_one_minus(a, cap); }
};

struct BiOps {
  Bi z;
  int n() const { return z.size(); }
  Bi one() const { return bi_const(n(), Complex(1)); }
  Bi var() const { return z; }
  Bi add(const Bi& a, const Bi& b) const { return bi_add(a, b); }
  Bi mul(const Bi& a, const Bi& b) const { return bi_mul(a, b); }
  Bi seq(const Bi& a) const {
    return bi_compose(a, [](int j, const Complex& x0) { return combasym::pow(Complex(1) / (Complex(1) - x0), j + 1); });
  }
  Bi set(const Bi& a) const {
    return bi_compose(a, [](int j, const Complex& x0) {
      Complex f = combasym::exp(x0);
      for (int i = 2; i <= j; ++i) f /= Complex(i);
      return f;
    });
  }
  Bi cyc(const Bi& a) const {
    return bi_compose(a, [](int j, const Complex& x0) {
      if (j == 0) return -combasym::log(Complex(1) - x0);
      return combasym::pow(Complex(1) / (Complex(1) - x0), j) / Complex(j);
    });
  }
};

struct ComplexOps {
  Complex z;
  Complex one() const { return Complex(1); }
  Complex var() const { return z; }
  Complex add(const Complex& a, const Complex& b) const { return a + b; }
  Complex mul(const Complex& a, const Complex& b) const { return a * b; }
  Complex seq(const Complex& a) const { return Complex(1) / (Complex(1) - a); }
  Complex set(const Complex& a) const { return combasym::exp(a); }
  Complex cyc(const Complex& a) const { return -combasym::log(Complex(1) - a); }
};

template <class T, class O>
T apply_eq(const NormalEquation& e, const std::vector<T>& v, const O& ops) {
  auto ref = [&](const Ref& r) -> T {
    switch (r.kind) {
      case Ref::Kind::One: return ops.one();
      case Ref::Kind::Z: return ops.var();
      default: return v[r.index];
    }
  };
  switch (e.op) {
    case Op::One: return ops.one();
    case Op::Atom: return ops.var();
    case Op::Sum:
    case Op::Prod: {
      T s = ref(e.args[0]);
      for (std::size_t i = 1; i < e.args.size(); ++i)
        s = e.op == Op::Sum ? ops.add(s, ref(e.args[i])) : ops.mul(s, ref(e.args[i]));
      return s;
    }
    case Op::Seq: return ops.seq(ref(e.args[0]));
    case Op::Set: return ops.set(ref(e.args[0]));
    case Op::Cyc: return ops.cyc(ref(e.args[0]));
  }
  return ops.one();
}

// Original identifiers of a component are its unknowns; auxiliaries are substituted.
struct Layout {
  std::vector<int> unknowns;
  std::vector<int> aux;  // dependencies first
};

Layout layout_of(const NormalSystem& sys, const Component& comp) {
  Layout l;
  int n = sys.size();
  std::vector<char> in(n, 0), done(n, 0);
  for (int c : comp.coords) {
    in[c] = 1;
    if (!sys.eqs[c].auxiliary) l.unknowns.push_back(c);
  }
  std::function<void(int)> visit = [&](int c) {
    if (done[c]) return;
    done[c] = 1;
    for (int d : sys.dependencies(c))
      if (in[d] && sys.eqs[d].auxiliary) visit(d);
    l.aux.push_back(c);
  };
  for (int c : comp.coords)
    if (sys.eqs[c].auxiliary) visit(c);
  return l;
}

// Fills the auxiliaries of v and returns H at the unknowns.
template <class T, class O>
std::vector<T> eval_component(const NormalSystem& sys, const Layout& l, std::vector<T>& v, const O& ops) {
  for (int a : l.aux) v[a] = apply_eq(sys.eqs[a], v, ops);
  std::vector<T> h;
  for (int u : l.unknowns) h.push_back(apply_eq(sys.eqs[u], v, ops));
  return h;
}

// dH/dY over the unknowns at the point v, with z and the predecessors fixed.
Matrix<Complex> jacobian_at(const NormalSystem& sys, const Layout& l, const std::vector<Complex>& v,
                            const Complex& z) {
  int m = static_cast<int>(l.unknowns.size());
  std::vector<Bi> b;
  for (const auto& x : v) b.push_back(bi_const(2, x));
  BiOps ops{bi_const(2, z)};
  Matrix<Complex> J(m, m);
  for (int k = 0; k < m; ++k) {
    auto w = b;
    w[l.unknowns[k]].c[1] = {Complex(1)};
    auto h = eval_component(sys, l, w, ops);
    for (int i = 0; i < m; ++i) J(i, k) = at(h[i], 1, 0);
  }
  return J;
}

Real norm(const std::vector<Complex>& v) {
  Real m = 0;
  for (const auto& x : v) m = rmax(m, abs(x));
  return m;
}

// Newton on the component alone at z with the predecessors fixed in v.
std::vector<Complex> polish(const NormalSystem& sys, const Layout& l, std::vector<Complex>& v, const Complex& z,
                            std::vector<Complex> y, const PrecisionContext& ctx) {
  int m = static_cast<int>(y.size());
  ComplexOps ops{z};
  for (int it = 0; it < 80; ++it) {
    for (int k = 0; k < m; ++k) v[l.unknowns[k]] = y[k];
    auto h = eval_component(sys, l, v, ops);
    std::vector<Complex> f(m);
    for (int k = 0; k < m; ++k) f[k] = y[k] - h[k];
    LU<Complex> lu(identity_minus(jacobian_at(sys, l, v, z)));
    if (lu.singular) throw PrecisionExhausted("singular Jacobian in a regular block");
    auto step = lu.solve(f);
    for (int k = 0; k < m; ++k) y[k] -= step[k];
    if (norm(step) <= ctx.tolerance() * rmax(Real(1), norm(y))) break;
  }
  for (int k = 0; k < m; ++k) v[l.unknowns[k]] = y[k];
  eval_component(sys, l, v, ops);
  return y;
}

// Starting values for the component at sigma: the positive solution just inside
// |sigma|, carried along the circle to arg sigma.
std::vector<Complex> continued_values(const NormalSystem& sys, const Component& comp, const Layout& l,
                                      const Complex& sigma, const Turn& arg, const PrecisionContext& ctx) {
  auto A = AnalyticSystem::closure(sys, comp.coords);
  Real a = abs(sigma) * (1 - ldexp2(-40));
  auto val = newton_value(A, a, ctx);
  if (!val.converged()) throw PrecisionExhausted("no solution inside the circle of a singularity");
  std::vector<Complex> y(val.y.begin(), val.y.end());
  Rational t = arg > Rational(1, 2) ? Rational(arg - 1) : arg;
  Real theta = 2 * pi() * to_real(t);
  Real turns = rabs(to_real(t));
  int steps = static_cast<int>(ceil(turns * 720).convert_to<long>());
  for (int s = 1; s <= steps; ++s) {
    Complex z = polar(a, theta * s / steps);
    for (int it = 0; it < 40; ++it) {
      auto h = A.H(z, y);
      std::vector<Complex> f(y.size());
      for (std::size_t k = 0; k < y.size(); ++k) f[k] = y[k] - h[k];
      LU<Complex> lu(identity_minus(A.jacobian(z, y)));
      if (lu.singular) throw PrecisionExhausted("continuation met a singular point");
      auto step = lu.solve(f);
      for (std::size_t k = 0; k < y.size(); ++k) y[k] -= step[k];
      if (norm(step) <= ctx.tolerance() * rmax(Real(1), norm(y))) break;
    }
  }
  std::vector<Complex> out;
  for (int u : l.unknowns) out.push_back(y[A.position(u)]);
  return out;
}

Bi to_bi(const Expansion& e, int R, int n) {
  if (e.superpolynomial) throw std::domain_error("EXP argument of a recursive block");
  Bi b;
  b.c.assign(n, {});
  for (const auto& [key, c] : e.terms) {
    if (!is_zero(e.classes[key.cls]) || key.k != 0 || key.i < 0)
      throw std::domain_error("recursive block over a non-Puiseux argument is not supported");
    long j = key.i * (R / e.r);
    if (j < n) padd(b.c[j], {c});
  }
  return b;
}

Expansion from_bi(const Bi& b, int R, int n) {
  Expansion e;
  e.r = R;
  e.order = Real(n) / R;
  for (int j = 0; j < std::min(n, b.size()); ++j) e.add_term(Complex(Real(j) / R), 0, at(b, j, 0));
  return e;
}

// Number of v = Z^{1/R} orders the predecessors support, capped by the working order.
int orders_available(const Component& comp, const std::vector<Expansion>& S, int R, const Real& work) {
  Real n = ceil(work * R) + 2;
  for (int u : comp.predecessors)
    if (!S[u].exact()) n = rmin(n, floor(S[u].order * R + tiny()));
  return std::max(2, n.convert_to<int>());
}

int ramification(const Component& comp, const std::vector<Expansion>& S) {
  int r = 1;
  for (int u : comp.predecessors) r = std::lcm(r, S[u].r);
  return r;
}

Bi z_series(const Complex& sigma, int R, int n) {
  Bi z = bi_const(n, sigma);
  if (R < n) z.c[R] = {-sigma};
  return z;
}

// Undetermined coefficients for the unknowns at positions `free`; the other unknowns
// are fixed series already in v. J0 is dH/dY at the constant terms.
void solve_regular(const NormalSystem& sys, const Layout& l, std::vector<Bi>& v, const Bi& z,
                   const std::vector<int>& free, const Matrix<Complex>& J0, int N) {
  int f = static_cast<int>(free.size());
  if (f == 0) return;
  Matrix<Complex> M(f, f);
  for (int a = 0; a < f; ++a)
    for (int b = 0; b < f; ++b) M(a, b) = Complex(a == b ? 1 : 0) - J0(free[a], free[b]);
  LU<Complex> lu(M);
  if (lu.singular) throw PrecisionExhausted("singular linear system in undetermined coefficients");
  for (int j = 1; j < N; ++j) {
    std::vector<Bi> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = truncated(v[i], j + 1);
    auto h = eval_component(sys, l, w, BiOps{truncated(z, j + 1)});
    std::size_t deg = 0;
    for (int a = 0; a < f; ++a) deg = std::max(deg, j < h[free[a]].size() ? h[free[a]].c[j].size() : 0);
    for (std::size_t d = 0; d < deg; ++d) {
      std::vector<Complex> rhs(f);
      for (int a = 0; a < f; ++a) rhs[a] = at(h[free[a]], j, d) - at(v[l.unknowns[free[a]]], j, d);
      auto x = lu.solve(rhs);
      for (int a = 0; a < f; ++a) {
        auto& p = v[l.unknowns[free[a]]].c[j];
        if (p.size() <= d) p.resize(d + 1);
        p[d] += x[a];
      }
    }
  }
}

struct Context {
  const NormalSystem& sys;
  const DominantSet& d;
  const PrecisionContext& ctx;
  Real work;
};

void regular_branch(const Context& cx, std::size_t ci, const Layout& l, LocalBehavior& lb) {
  const auto& comp = cx.d.radius.dag.components[ci];
  auto& S = lb.coords;
  int R = ramification(comp, S);
  int N = orders_available(comp, S, R, cx.work);
  int n = cx.sys.size();
  std::vector<Bi> v(n);
  std::vector<Complex> pt(n);
  for (int u : comp.predecessors) {
    v[u] = to_bi(S[u], R, N);
    pt[u] = at(v[u], 0, 0);
  }
  auto start = continued_values(cx.sys, comp, l, lb.sigma, lb.arg, cx.ctx);
  auto y0 = polish(cx.sys, l, pt, lb.sigma, start, cx.ctx);
  auto J0 = jacobian_at(cx.sys, l, pt, lb.sigma);
  int m = static_cast<int>(l.unknowns.size());
  std::vector<int> free(m);
  std::iota(free.begin(), free.end(), 0);
  for (int k = 0; k < m; ++k) v[l.unknowns[k]] = bi_const(N, y0[k]);
  Bi z = z_series(lb.sigma, R, N);
  solve_regular(cx.sys, l, v, z, free, J0, N);
  eval_component(cx.sys, l, v, BiOps{z});
  for (int c : comp.coords) S[c] = from_bi(v[c], R, N);
}

void singular_branch(const Context& cx, std::size_t ci, const Layout& l, LocalBehavior& lb, HalvingTrace& tr) {
  const auto& comp = cx.d.radius.dag.components[ci];
  const auto& cr = cx.d.radius.components[ci];
  auto& S = lb.coords;
  int r = ramification(comp, S);
  int R = 2 * r;
  int N = orders_available(comp, S, R, cx.work);
  if (N < 4) throw PrecisionExhausted("not enough orders for the halving procedure");
  int n = cx.sys.size();
  std::vector<Bi> v(n);
  std::vector<Complex> pt(n);
  for (int u : comp.predecessors) {
    v[u] = to_bi(S[u], R, N);
    pt[u] = at(v[u], 0, 0);
  }
  const auto& A = *cr.value.def->system;
  int m = static_cast<int>(l.unknowns.size());
  std::vector<Complex> y0(m);
  for (int k = 0; k < m; ++k) y0[k] = Complex(cr.value.values[A.position(l.unknowns[k])]);
  for (int k = 0; k < m; ++k) pt[l.unknowns[k]] = y0[k];
  auto J0 = jacobian_at(cx.sys, l, pt, lb.sigma);

  int u1 = l.unknowns[0];
  tr.first = u1;
  tr.rest.assign(l.unknowns.begin() + 1, l.unknowns.end());
  tr.ramification = R;
  v[u1] = bi_const(N, y0[0]);
  v[u1].c[1] = {Complex(), Complex(1)};
  for (int k = 1; k < m; ++k) v[l.unknowns[k]] = bi_const(N, y0[k]);
  Bi z = z_series(lb.sigma, R, N);
  std::vector<int> free(m - 1);
  std::iota(free.begin(), free.end(), 1);
  solve_regular(cx.sys, l, v, z, free, J0, N);
  for (int u : tr.rest) tr.S.push_back(v[u].c);

  auto h = eval_component(cx.sys, l, v, BiOps{z});
  Bi E = bi_add(h[0], v[u1], Complex(-1));
  tr.E = E.c;
  for (const auto& x : E.c[0]) tr.eps1 = rmax(tr.eps1, abs(x));
  for (const auto& x : E.c[1]) tr.eps2 = rmax(tr.eps2, abs(x));
  Real bound = pow(Real(10), -static_cast<int>(cx.ctx.digits() / 2));
  if (tr.eps1 > bound || tr.eps2 > bound)
    throw PrecisionExhausted("halving: the orders v^0 and v^1 of E do not vanish numerically");

  // F = E / v^2, the orders v^0, v^1 being dropped
  Bi F;
  F.c.assign(E.c.begin() + 2, E.c.end());
  int NF = F.size();
  tr.c = at(F, 0, 0);
  tr.d = -at(F, 0, 2);
  if (abs(tr.c) <= tiny() || abs(tr.d) <= tiny())
    throw PrecisionExhausted("halving: c or d indistinguishable from 0");
  std::vector<Complex> D(NF);
  D[0] = -sqrt(tr.c / tr.d);
  Complex fp;
  for (std::size_t k = 1; k < F.c[0].size(); ++k) fp += Complex(static_cast<int>(k)) * F.c[0][k] * pow(D[0], static_cast<long>(k - 1));
  for (int j = 1; j < NF; ++j) {
    auto g = subst(F, D, j + 1);
    D[j] = -g[j] / fp;
  }
  tr.Delta = D;

  // back-substitution: the unknowns are known to O(v^{NF+1})
  int NY = NF + 1;
  std::vector<Complex> y1(NY);
  y1[0] = y0[0];
  for (int j = 0; j < NF; ++j) y1[j + 1] = D[j];
  v[u1] = bi_from(y1);
  for (int u : tr.rest) v[u] = bi_from(subst(v[u], D, NY));
  for (int u : comp.predecessors) v[u] = truncated(v[u], NY);
  eval_component(cx.sys, l, v, BiOps{truncated(z, NY)});
  for (int c : comp.coords) S[c] = from_bi(v[c], R, NY);
}

// Gaussian elimination over expansions, pivoting on the smallest valuation.
std::vector<Expansion> solve_linear(std::vector<std::vector<Expansion>> M, std::vector<Expansion> b, const Real& cap) {
  int m = static_cast<int>(b.size());
  auto cleaned = [](Expansion& e) { e.clean(tiny() * rmax(Real(1), e.magnitude())); };
  std::vector<Expansion> inv(m);
  for (int k = 0; k < m; ++k) {
    int p = -1;
    for (int i = k; i < m; ++i) {
      cleaned(M[i][k]);
      if (M[i][k].terms.empty()) continue;
      if (p < 0 || M[i][k].valuation() < M[p][k].valuation()) p = i;
    }
    if (p < 0) throw std::domain_error("linear block: Id - B is singular");
    std::swap(M[k], M[p]);
    std::swap(b[k], b[p]);
    inv[k] = inverse(M[k][k], cap);
    for (int i = k + 1; i < m; ++i) {
      if (M[i][k].terms.empty()) continue;
      auto f = M[i][k] * inv[k];
      for (int j = k + 1; j < m; ++j) M[i][j] = M[i][j] - f * M[k][j];
      b[i] = b[i] - f * b[k];
      M[i][k].terms.clear();
    }
  }
  std::vector<Expansion> x(m);
  for (int k = m - 1; k >= 0; --k) {
    Expansion s = b[k];
    for (int j = k + 1; j < m; ++j) s = s - M[k][j] * x[j];
    x[k] = inv[k] * s;
  }
  return x;
}

void linear_branch(const Context& cx, std::size_t ci, const Layout& l, LocalBehavior& lb) {
  const auto& comp = cx.d.radius.dag.components[ci];
  ExpansionOps ops{Expansion::variable(lb.sigma), cx.work};
  auto w = lb.coords;
  int m = static_cast<int>(l.unknowns.size());
  for (int u : l.unknowns) w[u] = Expansion();
  auto A = eval_component(cx.sys, l, w, ops);
  std::vector<std::vector<Expansion>> M(m, std::vector<Expansion>(m));
  for (int k = 0; k < m; ++k) {
    w[l.unknowns[k]] = Expansion::constant(1);
    auto h = eval_component(cx.sys, l, w, ops);
    for (int i = 0; i < m; ++i) M[i][k] = (i == k ? Expansion::constant(1) : Expansion()) - (h[i] - A[i]);
    w[l.unknowns[k]] = Expansion();
  }
  auto y = solve_linear(M, A, cx.work);
  for (int k = 0; k < m; ++k) w[l.unknowns[k]] = y[k];
  eval_component(cx.sys, l, w, ops);
  for (int c : comp.coords) lb.coords[c] = w[c];
}

LocalBehavior compute(const Context& cx, const Turn& arg, int p) {
  const auto& d = cx.d;
  const auto& dag = d.radius.dag;
  LocalBehavior lb;
  lb.arg = arg;
  lb.p = p;
  lb.sigma = turn(arg) * Complex(d.R.point);
  lb.coords.assign(cx.sys.size(), Expansion());
  lb.components.resize(dag.components.size());
  ExpansionOps eops{Expansion::variable(lb.sigma), cx.work};
  std::optional<LocalBehavior> at_rho;

  for (std::size_t ci = 0; ci < dag.components.size(); ++ci) {
    const auto& comp = dag.components[ci];
    auto& cb = lb.components[ci];
    bool exp_pred = std::any_of(comp.predecessors.begin(), comp.predecessors.end(),
                                [&](int u) { return lb.coords[u].superpolynomial; });
    if (exp_pred) {
      for (int c : comp.coords) lb.coords[c] = Expansion::exp_sentinel();
      cb.branch = "superpolynomial";
      continue;
    }
    if (!comp.irreducible) {
      int c = comp.coords[0];
      lb.coords[c] = apply_eq(cx.sys.eqs[c], lb.coords, eops);
      cb.branch = lb.coords[c].superpolynomial ? "superpolynomial" : "nonrecursive";
      continue;
    }
    auto l = layout_of(cx.sys, comp);
    if (is_linear(cx.sys, comp)) {
      linear_branch(cx, ci, l, lb);
      cb.branch = "linear";
      continue;
    }
    const auto& own = d.components[ci].args;
    bool singular = d.at_R[ci] && d.radius.components[ci].rule == ComponentRadius::Rule::Characteristic &&
                    std::binary_search(own.begin(), own.end(), arg);
    if (!singular) {
      regular_branch(cx, ci, l, lb);
      cb.branch = "regular";
    } else if (arg == 0) {
      HalvingTrace tr;
      singular_branch(cx, ci, l, lb, tr);
      cb.branch = "singular";
      cb.halving = std::move(tr);
    } else {
      // Y_i(z) = z^{val_i} V_i(z^q): the expansion at rho times (sigma/rho)^{val_i}
      if (!at_rho) at_rho = compute(cx, Turn(0), p);
      for (int c : comp.coords) lb.coords[c] = turn(arg * d.valuations[c]) * at_rho->coords[c];
      cb.branch = "rotated";
      cb.halving = at_rho->components[ci].halving;
    }
  }
  return lb;
}

}  // namespace

LocalBehavior localbehavior(const NormalSystem& sys, const DominantSet& d, const Turn& arg, int p,
                            const PrecisionContext& ctx) {
  if (!d.R.finite) throw std::invalid_argument("the system is entire: no dominant singularity");
  PrecisionScope scope(ctx);
  Real need = Real(p) / 2;
  Context cx{sys, d, ctx, need + 1};
  for (int attempt = 0;; ++attempt) {
    auto lb = compute(cx, arg, p);
    Real got = Expansion::exact_order();
    for (const auto& e : lb.coords)
      if (!e.superpolynomial) got = rmin(got, e.order);
    if (got >= need - tiny() || attempt == 4) {
      for (auto& e : lb.coords)
        if (!e.exact()) e.truncate(need);
      return lb;
    }
    cx.work += need - got + Real(1) / 2;
  }
}

std::vector<LocalBehavior> singular_expansions(const NormalSystem& sys, const DominantSet& d, int p,
                                               const PrecisionContext& ctx) {
  std::vector<LocalBehavior> out;
  if (!d.R.finite) return out;
  out.push_back(localbehavior(sys, d, Turn(0), p, ctx));
  for (const auto& t : d.args)
    if (t != 0) out.push_back(localbehavior(sys, d, t, p, ctx));
  return out;
}

Residual residual(const NormalSystem& sys, const LocalBehavior& lb) {
  Residual res;
  res.order = Expansion::exact_order();
  for (int i = 0; i < sys.size(); ++i) {
    const auto& y = lb.coords[i];
    if (y.superpolynomial) continue;
    ExpansionOps ops{Expansion::variable(lb.sigma), y.order};
    Expansion h;
    try {
      h = apply_eq(sys.eqs[i], lb.coords, ops);
    } catch (const std::domain_error&) {
      continue;
    }
    if (h.superpolynomial) continue;
    auto diff = y - h;
    for (const auto& t : diff.terms)
      if (abs(t.second) > res.max) {
        res.max = abs(t.second);
        res.coord = i;
      }
    res.order = rmin(res.order, diff.order);
  }
  return res;
}

}  // namespace combasym
