#include "combasym/analytic.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace combasym {

unsigned current_bits() { return static_cast<unsigned>(Real::default_precision() * 3.3219280948873623); }

AnalyticSystem::AnalyticSystem(const NormalSystem& sys, std::vector<int> unknowns, const std::vector<int>& targets)
    : sys_(std::make_shared<NormalSystem>(sys)), unknowns_(std::move(unknowns)), position_(sys.size(), -1) {
  for (std::size_t k = 0; k < unknowns_.size(); ++k) position_[unknowns_[k]] = static_cast<int>(k);
  std::vector<int> state(sys.size(), 0);
  std::function<void(int)> visit = [&](int c) {
    if (position_[c] >= 0 || state[c] == 2) return;
    if (state[c] == 1) throw std::logic_error("substituted coordinates form a cycle");
    state[c] = 1;
    for (int d : sys.dependencies(c)) visit(d);
    state[c] = 2;
    order_.push_back(c);
  };
  for (int u : unknowns_)
    for (int d : sys.dependencies(u)) visit(d);
  for (int t : targets) visit(t);
}

AnalyticSystem AnalyticSystem::reduced(const NormalSystem& sys) {
  std::vector<int> u;
  for (int i = 0; i < sys.size(); ++i)
    if (!sys.eqs[i].auxiliary) u.push_back(i);
  return AnalyticSystem(sys, u);
}

AnalyticSystem AnalyticSystem::closure(const NormalSystem& sys, const std::vector<int>& coords) {
  std::vector<bool> seen(sys.size(), false);
  std::vector<int> stack(coords.begin(), coords.end());
  while (!stack.empty()) {
    int c = stack.back();
    stack.pop_back();
    if (seen[c]) continue;
    seen[c] = true;
    for (int d : sys.dependencies(c)) stack.push_back(d);
  }
  std::vector<int> u;
  for (int i = 0; i < sys.size(); ++i)
    if (seen[i] && !sys.eqs[i].auxiliary) u.push_back(i);
  return AnalyticSystem(sys, u, coords);
}

bool AnalyticSystem::linear_in(const std::vector<int>& rows, const std::vector<int>& vars) const {
  const int INF = 1 << 20;
  std::vector<bool> is_var(sys_->size(), false);
  for (int p : vars) is_var[unknowns_[p]] = true;
  std::function<int(int, bool)> degree = [&](int c, bool top) -> int {
    if (!top && position_[c] >= 0) return is_var[c] ? 1 : 0;
    const auto& e = sys_->eqs[c];
    auto ref_deg = [&](const Ref& r) { return r.is_coord() ? degree(r.index, false) : 0; };
    switch (e.op) {
      case Op::One:
      case Op::Atom: return 0;
      case Op::Sum: {
        int d = 0;
        for (const auto& r : e.args) d = std::max(d, ref_deg(r));
        return d;
      }
      case Op::Prod: {
        int d = 0;
        for (const auto& r : e.args) d = std::min(INF, d + ref_deg(r));
        return d;
      }
      default: return ref_deg(e.args[0]) > 0 ? INF : 0;
    }
  };
  for (int r : rows)
    if (degree(unknowns_[r], true) > 1) return false;
  return true;
}

namespace {

Real value_part(const Real& x) { return x; }
Real value_part(const Complex& x) { return abs(x); }
template <class T>
Real value_part(const Dual<T>& x) {
  return value_part(x.v);
}
bool is_complex(const Real&) { return false; }
bool is_complex(const Complex&) { return true; }
template <class T>
bool is_complex(const Dual<T>& x) {
  return is_complex(x.v);
}

template <class T>
void check_domain(const T& x, int coord, DomainStatus* st) {
  if (!st) return;
  Real u = value_part(x);
  Domain d = Domain::Inside;
  if (is_complex(x)) {
    Real thr = ldexp2(-static_cast<int>(current_bits() / 2));
    if (u > 1 + thr) d = Domain::Outside;
    else if (u >= 1 - thr) d = Domain::Boundary;
  } else if (u >= 1) {
    d = Domain::Outside;
  }
  if (d != Domain::Inside && (st->status == Domain::Inside || (d == Domain::Outside && st->status == Domain::Boundary))) {
    st->status = d;
    st->witness = coord;
  }
}

}  // namespace

template <class T>
T AnalyticSystem::apply(int c, const T& z, const std::vector<T>& v, DomainStatus* st) const {
  using std::exp;
  using std::log;
  const auto& e = sys_->eqs[c];
  auto ref = [&](const Ref& r) -> T {
    if (r.kind == Ref::Kind::One) return T(1);
    if (r.kind == Ref::Kind::Z) return z;
    return v[r.index];
  };
  switch (e.op) {
    case Op::One: return T(1);
    case Op::Atom: return z;
    case Op::Sum: {
      T s = ref(e.args[0]);
      for (std::size_t k = 1; k < e.args.size(); ++k) s += ref(e.args[k]);
      return s;
    }
    case Op::Prod: {
      T p = ref(e.args[0]);
      for (std::size_t k = 1; k < e.args.size(); ++k) p *= ref(e.args[k]);
      return p;
    }
    case Op::Seq: {
      T x = ref(e.args[0]);
      check_domain(x, c, st);
      return T(1) / (T(1) - x);
    }
    case Op::Set: return exp(ref(e.args[0]));
    case Op::Cyc: {
      T x = ref(e.args[0]);
      check_domain(x, c, st);
      return -log(T(1) - x);
    }
  }
  return T(0);
}

template <class T>
std::vector<T> AnalyticSystem::values(const T& z, const std::vector<T>& y, DomainStatus* st) const {
  std::vector<T> v(sys_->size(), T(0));
  for (std::size_t k = 0; k < unknowns_.size(); ++k) v[unknowns_[k]] = y[k];
  for (int c : order_) v[c] = apply(c, z, v, st);
  return v;
}

template <class T>
std::vector<T> AnalyticSystem::H(const T& z, const std::vector<T>& y, DomainStatus* st) const {
  std::vector<T> v = values(z, y, st);
  std::vector<T> h(unknowns_.size());
  for (std::size_t k = 0; k < unknowns_.size(); ++k) h[k] = apply(unknowns_[k], z, v, st);
  return h;
}

template <class T>
T AnalyticSystem::coordinate(int coord, const T& z, const std::vector<T>& y) const {
  if (position_[coord] >= 0) return y[position_[coord]];
  return values(z, y)[coord];
}

template <class T>
Matrix<T> AnalyticSystem::jacobian(const T& z, const std::vector<T>& y) const {
  int n = dim();
  Matrix<T> J(n, n);
  std::vector<Dual<T>> yd(n);
  for (int k = 0; k < n; ++k) yd[k] = Dual<T>(y[k]);
  Dual<T> zd(z);
  for (int j = 0; j < n; ++j) {
    yd[j].d = T(1);
    auto h = H(zd, yd);
    for (int i = 0; i < n; ++i) J(i, j) = h[i].d;
    yd[j].d = T(0);
  }
  return J;
}

template <class T>
std::vector<T> AnalyticSystem::dz(const T& z, const std::vector<T>& y) const {
  int n = dim();
  std::vector<Dual<T>> yd(n);
  for (int k = 0; k < n; ++k) yd[k] = Dual<T>(y[k]);
  auto h = H(Dual<T>(z, T(1)), yd);
  std::vector<T> out(n);
  for (int i = 0; i < n; ++i) out[i] = h[i].d;
  return out;
}

std::vector<Real> AnalyticSystem::hessian_rowsums(const Real& z, const std::vector<Real>& y) const {
  using D2 = Dual<Dual<Real>>;
  int n = dim();
  std::vector<D2> yd(n);
  for (int k = 0; k < n; ++k) yd[k] = D2(Dual<Real>(y[k], Real(1)), Dual<Real>(Real(1), Real(0)));
  auto h = H(D2(Dual<Real>(z)), yd);
  std::vector<Real> out(n);
  for (int i = 0; i < n; ++i) out[i] = h[i].d.d;
  return out;
}

Matrix<Dual<Real>> AnalyticSystem::jacobian_directional(const Real& z, const std::vector<Real>& y, const Real& dz,
                                                        const std::vector<Real>& dy) const {
  using D1 = Dual<Real>;
  using D2 = Dual<D1>;
  int n = dim();
  Matrix<D1> J(n, n);
  // outer dual: direction (dz, dy); inner dual: column seed
  std::vector<D2> yd(n);
  for (int k = 0; k < n; ++k) yd[k] = D2(D1(y[k]), D1(dy[k]));
  D2 zd{D1(z), D1(dz)};
  for (int j = 0; j < n; ++j) {
    yd[j].v.d = 1;
    auto h = H(zd, yd);
    for (int i = 0; i < n; ++i) J(i, j) = D1(h[i].v.d, h[i].d.d);
    yd[j].v.d = 0;
  }
  return J;
}

#define COMBASYM_INSTANTIATE(T)                                                                   \
  template std::vector<T> AnalyticSystem::values(const T&, const std::vector<T>&, DomainStatus*) const; \
  template std::vector<T> AnalyticSystem::H(const T&, const std::vector<T>&, DomainStatus*) const;      \
  template T AnalyticSystem::coordinate(int, const T&, const std::vector<T>&) const;

COMBASYM_INSTANTIATE(Real)
COMBASYM_INSTANTIATE(Complex)
COMBASYM_INSTANTIATE(Dual<Real>)
COMBASYM_INSTANTIATE(Dual<Complex>)
COMBASYM_INSTANTIATE(Dual<Dual<Real>>)
template Matrix<Real> AnalyticSystem::jacobian(const Real&, const std::vector<Real>&) const;
template Matrix<Complex> AnalyticSystem::jacobian(const Complex&, const std::vector<Complex>&) const;
template std::vector<Real> AnalyticSystem::dz(const Real&, const std::vector<Real>&) const;
template std::vector<Complex> AnalyticSystem::dz(const Complex&, const std::vector<Complex>&) const;

// Perron root

namespace {

PerronResult perron_block(const Matrix<Real>& M, const PrecisionContext& ctx, bool decide_vs_one) {
  int n = M.rows;
  PerronResult r;
  r.vector.assign(n, Real(1));
  Real tol = ldexp2(-static_cast<int>(ctx.bits / 2));
  const int cap = 10000;
  for (int it = 1; it <= cap; ++it) {
    std::vector<Real> w = M * r.vector;
    Real lo = -1, hi = -1;
    for (int i = 0; i < n; ++i) {
      Real q = w[i] / r.vector[i];
      if (lo < 0 || q < lo) lo = q;
      if (hi < 0 || q > hi) hi = q;
    }
    r.lower = lo;
    r.upper = hi;
    r.iterations = it;
    Real mx = 0;
    for (int i = 0; i < n; ++i) {
      w[i] += r.vector[i];
      if (w[i] > mx) mx = w[i];
    }
    for (int i = 0; i < n; ++i) r.vector[i] = w[i] / mx;
    if (decide_vs_one && (hi < 1 || lo > 1)) break;
    if (hi - lo <= tol * (hi > 1 ? hi : Real(1))) break;
  }
  r.lambda = (r.lower + r.upper) / 2;
  r.converged = r.upper - r.lower <= tol * (r.upper > 1 ? r.upper : Real(1)) ||
                (decide_vs_one && (r.upper < 1 || r.lower > 1));
  return r;
}

}  // namespace

static PerronResult perron(const Matrix<Real>& M, const PrecisionContext& ctx, bool decide_vs_one) {
  int n = M.rows;
  PerronResult best;
  best.vector.assign(n, Real(0));
  if (n == 0) return best;
  // irreducible blocks from the nonzero pattern
  NormalSystem pattern;
  pattern.eqs.resize(n);
  for (int i = 0; i < n; ++i) {
    pattern.eqs[i].op = Op::Sum;
    for (int j = 0; j < n; ++j)
      if (M(i, j) != 0) pattern.eqs[i].args.push_back(Ref::coord(j));
  }
  auto dag = condense(pattern);
  bool first = true;
  for (const auto& c : dag.components) {
    int k = static_cast<int>(c.coords.size());
    Matrix<Real> B(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) B(a, b) = M(c.coords[a], c.coords[b]);
    PerronResult r = perron_block(B, ctx, decide_vs_one);
    if (first || r.upper > best.upper) {
      std::vector<Real> v(n, Real(0));
      for (int a = 0; a < k; ++a) v[c.coords[a]] = r.vector[a];
      int iters = best.iterations + r.iterations;
      bool conv = best.converged && r.converged;
      best = r;
      best.vector = v;
      best.iterations = iters;
      best.converged = conv;
    } else {
      best.iterations += r.iterations;
      best.converged = best.converged && r.converged;
      if (r.lower > best.lower) best.lower = r.lower;
    }
    first = false;
  }
  // sandwich: max diagonal <= lambda <= max row sum
  Real maxdiag = 0, maxrow = 0;
  for (int i = 0; i < n; ++i) {
    Real s = 0;
    for (int j = 0; j < n; ++j) s += M(i, j);
    if (s > maxrow) maxrow = s;
    if (M(i, i) > maxdiag) maxdiag = M(i, i);
  }
  Real slack = ldexp2(-static_cast<int>(ctx.bits / 2)) * (maxrow + 1);
  if (best.upper < maxdiag - slack || best.lower > maxrow + slack)
    throw std::logic_error("Perron root outside [max diagonal, max row sum]");
  return best;
}

PerronResult dominant_eigenvalue(const Matrix<Real>& M, const PrecisionContext& ctx) { return perron(M, ctx, false); }

int compare_perron_to_one(const Matrix<Real>& M, const PrecisionContext& ctx) {
  PerronResult r = perron(M, ctx, true);
  if (r.upper < 1) return -1;
  if (r.lower > 1) return 1;
  return 0;
}

}  // namespace combasym
