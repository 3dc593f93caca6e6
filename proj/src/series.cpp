#include "combasym/series.hpp"

#include <functional>

#include "combasym/wellfounded.hpp"

namespace combasym {

Integer SeriesTruncation::count(int n) const {
  Integer f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  Rational v = c[n] * f;
  return boost::multiprecision::numerator(v);
}

Rational eval_truncation(const SeriesTruncation& s, const Rational& a) {
  Rational acc = 0;
  for (int n = s.order(); n >= 0; --n) acc = acc * a + s.c[n];
  return acc;
}

namespace qseries {

std::vector<Rational> mul(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  std::size_t N = a.size();
  std::vector<Rational> c(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j < N && j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

std::vector<Rational> exp(const std::vector<Rational>& y) {
  std::size_t N = y.size();
  std::vector<Rational> e(N);
  if (!N) return e;
  e[0] = 1;
  for (std::size_t n = 1; n < N; ++n) {
    Rational s = 0;
    for (std::size_t k = 1; k <= n; ++k) s += Rational(static_cast<long>(k)) * y[k] * e[n - k];
    e[n] = s / static_cast<long>(n);
  }
  return e;
}

std::vector<Rational> inv_one_minus(const std::vector<Rational>& y) {
  std::size_t N = y.size();
  std::vector<Rational> s(N);
  if (!N) return s;
  s[0] = 1;
  for (std::size_t n = 1; n < N; ++n)
    for (std::size_t k = 1; k <= n; ++k) s[n] += y[k] * s[n - k];
  return s;
}

std::vector<Rational> log_inv_one_minus(const std::vector<Rational>& y) {
  std::size_t N = y.size();
  std::vector<Rational> l(N);
  for (std::size_t n = 1; n < N; ++n) {
    Rational s = Rational(static_cast<long>(n)) * y[n];
    for (std::size_t k = 1; k < n; ++k) s += y[k] * Rational(static_cast<long>(n - k)) * l[n - k];
    l[n] = s / static_cast<long>(n);
  }
  return l;
}

}  // namespace qseries

namespace {

// Binary form of the system: products split into chains of two-factor nodes,
// plus constant nodes for 1 and Z. Integer structure counts a_n = n! c_n.
struct Node {
  enum class Kind { One, Atom, Sum, Mul, Seq, Set, Cyc } kind;
  std::vector<int> in;
};

std::vector<SeriesTruncation> expand_recurrence(const NormalSystem& sys, const LeadingTermVector& lt, int N) {
  int m = sys.size();
  std::vector<Node> nodes(m + 2);
  const int ONE = m, ATOM = m + 1;
  nodes[ONE] = {Node::Kind::One, {}};
  nodes[ATOM] = {Node::Kind::Atom, {}};
  auto node_of = [&](const Ref& r) { return r.kind == Ref::Kind::One ? ONE : r.kind == Ref::Kind::Z ? ATOM : r.index; };
  for (int i = 0; i < m; ++i) {
    const auto& e = sys.eqs[i];
    switch (e.op) {
      case Op::One: nodes[i] = {Node::Kind::Sum, {ONE}}; break;
      case Op::Atom: nodes[i] = {Node::Kind::Sum, {ATOM}}; break;
      case Op::Sum: {
        Node nd{Node::Kind::Sum, {}};
        for (const auto& r : e.args) nd.in.push_back(node_of(r));
        nodes[i] = nd;
        break;
      }
      case Op::Prod: {
        if (e.args.size() == 1) { nodes[i] = {Node::Kind::Sum, {node_of(e.args[0])}}; break; }
        int acc = node_of(e.args[0]);
        for (std::size_t t = 1; t + 1 < e.args.size(); ++t) {
          nodes.push_back({Node::Kind::Mul, {acc, node_of(e.args[t])}});
          acc = static_cast<int>(nodes.size()) - 1;
        }
        nodes[i] = {Node::Kind::Mul, {acc, node_of(e.args.back())}};
        break;
      }
      case Op::Seq: nodes[i] = {Node::Kind::Seq, {node_of(e.args[0])}}; break;
      case Op::Set: nodes[i] = {Node::Kind::Set, {node_of(e.args[0])}}; break;
      case Op::Cyc: nodes[i] = {Node::Kind::Cyc, {node_of(e.args[0])}}; break;
    }
  }
  int total = static_cast<int>(nodes.size());
  std::vector<std::vector<Integer>> A(total, std::vector<Integer>(N + 1));

  // order 0 from the leading terms; intermediates in creation order
  for (int i = 0; i < m; ++i)
    if (lt[i].valuation == 0) A[i][0] = boost::multiprecision::numerator(lt[i].count);
  A[ONE][0] = 1;
  if (N >= 1) A[ATOM][1] = 1;
  for (int i = m + 2; i < total; ++i) A[i][0] = A[nodes[i].in[0]][0] * A[nodes[i].in[1]][0];

  // dependencies at positive order (nonzero pattern of the Jacobian at 0)
  std::vector<std::vector<int>> deps(total);
  for (int i = 0; i < total; ++i) {
    const auto& nd = nodes[i];
    if (nd.kind == Node::Kind::Mul) {
      if (A[nd.in[1]][0] != 0) deps[i].push_back(nd.in[0]);
      if (A[nd.in[0]][0] != 0) deps[i].push_back(nd.in[1]);
    } else {
      deps[i] = nd.in;
    }
  }
  std::vector<int> order, state(total, 0);
  std::function<void(int)> visit = [&](int v) {
    if (state[v] == 2) return;
    if (state[v] == 1) throw NotWellFoundedError("system is not well founded (cyclic linear dependency at 0)");
    state[v] = 1;
    for (int w : deps[v]) visit(w);
    state[v] = 2;
    order.push_back(v);
  };
  for (int v = 0; v < total; ++v) visit(v);

  std::vector<std::vector<Integer>> binom(N + 1);
  for (int n = 0; n <= N; ++n) {
    binom[n].assign(n + 1, 1);
    for (int k = 1; k < n; ++k) binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
  }

  for (int n = 1; n <= N; ++n) {
    for (int i : order) {
      const auto& nd = nodes[i];
      Integer v = 0;
      switch (nd.kind) {
        case Node::Kind::One:
        case Node::Kind::Atom: continue;
        case Node::Kind::Sum:
          for (int j : nd.in) v += A[j][n];
          break;
        case Node::Kind::Mul: {
          const auto &a = A[nd.in[0]], &b = A[nd.in[1]];
          for (int k = 0; k <= n; ++k)
            if (a[k] != 0 && b[n - k] != 0) v += binom[n][k] * a[k] * b[n - k];
          break;
        }
        case Node::Kind::Seq: {
          const auto& y = A[nd.in[0]];
          for (int k = 1; k <= n; ++k)
            if (y[k] != 0) v += binom[n][k] * y[k] * A[i][n - k];
          break;
        }
        case Node::Kind::Set: {
          const auto& y = A[nd.in[0]];
          for (int k = 1; k <= n; ++k)
            if (y[k] != 0) v += binom[n - 1][k - 1] * y[k] * A[i][n - k];
          break;
        }
        case Node::Kind::Cyc: {
          const auto& y = A[nd.in[0]];
          v = y[n];
          for (int k = 1; k < n; ++k)
            if (y[k] != 0) v += binom[n - 1][k] * y[k] * A[i][n - k];
          break;
        }
      }
      A[i][n] = v;
    }
  }

  std::vector<SeriesTruncation> out(m);
  Integer fact = 1;
  for (int i = 0; i < m; ++i) out[i].c.resize(N + 1);
  for (int n = 0; n <= N; ++n) {
    if (n > 1) fact *= n;
    for (int i = 0; i < m; ++i) out[i].c[n] = Rational(A[i][n], fact);
  }
  return out;
}

std::vector<SeriesTruncation> expand_fixed_point(const NormalSystem& sys, int N) {
  int m = sys.size();
  std::size_t len = static_cast<std::size_t>(N) + 1;
  std::vector<std::vector<Rational>> Y(m, std::vector<Rational>(len));
  std::vector<Rational> one(len), atom(len);
  one[0] = 1;
  if (N >= 1) atom[1] = 1;
  auto val = [&](const Ref& r) -> const std::vector<Rational>& {
    return r.kind == Ref::Kind::One ? one : r.kind == Ref::Kind::Z ? atom : Y[r.index];
  };
  long cap = static_cast<long>(m + 1) * (N + 2) + 10;
  for (long it = 0; it < cap; ++it) {
    std::vector<std::vector<Rational>> next(m);
    for (int i = 0; i < m; ++i) {
      const auto& e = sys.eqs[i];
      switch (e.op) {
        case Op::One: next[i] = one; break;
        case Op::Atom: next[i] = atom; break;
        case Op::Sum:
          next[i].assign(len, Rational(0));
          for (const auto& r : e.args)
            for (std::size_t n = 0; n < len; ++n) next[i][n] += val(r)[n];
          break;
        case Op::Prod:
          next[i] = val(e.args[0]);
          for (std::size_t t = 1; t < e.args.size(); ++t) next[i] = qseries::mul(next[i], val(e.args[t]));
          break;
        case Op::Seq:
        case Op::Set:
        case Op::Cyc: {
          const auto& y = val(e.args[0]);
          if (y[0] != 0) throw NotWellFoundedError("constructor argument with nonzero constant term");
          next[i] = e.op == Op::Seq ? qseries::inv_one_minus(y)
                    : e.op == Op::Set ? qseries::exp(y)
                                      : qseries::log_inv_one_minus(y);
          break;
        }
      }
    }
    if (next == Y) {
      std::vector<SeriesTruncation> out(m);
      for (int i = 0; i < m; ++i) out[i].c = std::move(Y[i]);
      return out;
    }
    Y = std::move(next);
  }
  throw NotWellFoundedError("fixed-point iteration did not stabilize");
}

}  // namespace

std::vector<SeriesTruncation> expand_coefficients(const NormalSystem& sys, int N, SeriesMethod method) {
  auto wf = leading_terms(sys);
  if (!wf.ok()) throw NotWellFoundedError(wf.describe(sys));
  if (method == SeriesMethod::FixedPoint) return expand_fixed_point(sys, N);
  return expand_recurrence(sys, wf.terms, N);
}

}  // namespace combasym
