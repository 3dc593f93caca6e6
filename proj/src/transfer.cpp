#include "combasym/transfer.hpp"

#include <algorithm>
#include <cmath>

namespace combasym {

namespace {

Real tiny() { return ldexp2(-static_cast<int>(current_bits() / 2)); }
Real rabs(const Real& x) { return boost::multiprecision::abs(x); }

// Truncated Taylor series in a small parameter eps.
using Jet = std::vector<Complex>;

Jet jet(const Complex& x0, int K, const Complex& dx = Complex()) {
  Jet j(K + 1);
  j[0] = x0;
  if (K > 0) j[1] = dx;
  return j;
}

Jet operator+(Jet a, const Jet& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

Jet operator-(Jet a, const Jet& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

Jet operator*(const Complex& c, Jet a) {
  for (auto& x : a) x *= c;
  return a;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

Jet recip(const Jet& a) {
  Jet b(a.size());
  Complex inv = Complex(1) / a[0];
  b[0] = inv;
  for (std::size_t i = 1; i < a.size(); ++i) {
    Complex s;
    for (std::size_t j = 1; j <= i; ++j) s += a[j] * b[i - j];
    b[i] = -(inv * s);
  }
  return b;
}

Jet jexp(const Jet& a) {
  Jet e(a.size());
  e[0] = 1;
  for (std::size_t i = 1; i < a.size(); ++i) {
    Complex s;
    for (std::size_t j = 1; j <= i; ++j) s += Complex(static_cast<int>(j)) * a[j] * e[i - j];
    e[i] = s / Complex(static_cast<int>(i));
  }
  return exp(a[0]) * e;
}

Jet jlog(const Jet& a) {
  Jet q = (Complex(1) / a[0]) * a;
  Jet l(a.size());
  l[0] = log(a[0]);
  for (std::size_t i = 1; i < a.size(); ++i) {
    Complex s;
    for (std::size_t j = 1; j < i; ++j) s += Complex(static_cast<int>(j)) * l[j] * q[i - j];
    l[i] = q[i] - s / Complex(static_cast<int>(i));
  }
  return l;
}

Real jmag(const Jet& a) {
  Real m = 0;
  for (const auto& x : a) m = std::max(m, abs(x));
  return m;
}

const Rational& bernoulli(int m) {
  static std::vector<Rational> B{Rational(1)};
  while (static_cast<int>(B.size()) <= m) {
    int n = static_cast<int>(B.size());
    Rational s = 0;
    Integer binom = 1;  // C(n+1, j)
    for (int j = 0; j < n; ++j) {
      s += Rational(binom) * B[j];
      binom = binom * (n + 1 - j) / (j + 1);
    }
    B.push_back(-s / (n + 1));
  }
  return B[m];
}

Jet rgamma_jet(const Jet& w) {
  int K = static_cast<int>(w.size()) - 1;
  unsigned bits = current_bits();
  Real target = Real(bits) * Real("0.35") + 10;
  long M = 0;
  if (w[0].re < target) M = static_cast<long>(ceil(target - w[0].re).convert_to<double>());
  Jet P = jet(1, K);
  for (long j = 0; j < M; ++j) P = P * (w + jet(Complex(static_cast<int>(j)), K));
  Jet u = w + jet(Complex(Real(M)), K);
  Jet lg = (u - jet(Complex(Real(1) / 2), K)) * jlog(u) - u + jet(Complex(log(2 * pi()) / 2), K);
  Jet r = recip(u), r2 = r * r, pw = r;
  Real eps = ldexp2(-static_cast<int>(bits) - 8) * (1 + jmag(lg));
  for (int m = 1; m < 400; ++m) {
    Jet t = Complex(to_real(bernoulli(2 * m) / (2 * m * (2 * m - 1)))) * pw;
    lg = lg + t;
    if (jmag(t) < eps) break;
    pw = pw * r2;
  }
  Jet neg(lg.size());
  for (std::size_t i = 0; i < lg.size(); ++i) neg[i] = -lg[i];
  return P * jexp(neg);
}

bool is_natural(const Complex& a) {
  Real eps = tiny();
  Real n = round(a.re);
  return n >= 0 && rabs(a.im) <= eps && rabs(a.re - n) <= eps;
}

// Exponents that differ by an integer combine into one Stirling series.
bool integer_apart(const Complex& a, const Complex& b) {
  Real eps = tiny();
  Complex d = a - b;
  return rabs(d.im) <= eps && rabs(d.re - round(d.re)) <= eps;
}

struct Candidate {
  Complex alpha;
  int k;
  Complex c;
  Real re;
};

}  // namespace

Complex rgamma(const Complex& w) { return rgamma_jet(jet(w, 0))[0]; }

Complex cn(long n, const Complex& alpha, int k) {
  if (k == 0 && is_natural(alpha)) return Complex();
  // prod_{j<n} (j - alpha - eps)/(j + 1), a polynomial in eps
  Jet p = jet(1, k);
  for (long j = 0; j < n; ++j) {
    Complex f0 = (Complex(Real(j)) - alpha) / Complex(Real(j + 1));
    Complex f1 = Complex(Real(-1) / Real(j + 1));
    for (int i = k; i >= 0; --i) p[i] = f0 * p[i] + (i > 0 ? f1 * p[i - 1] : Complex());
  }
  Real fact = 1;
  for (int i = 2; i <= k; ++i) fact *= i;
  return Complex((k % 2 ? -fact : fact)) * p[k];
}

std::vector<std::vector<Complex>> cn_stirling(const Complex& alpha, int k, int J) {
  std::vector<std::vector<Complex>> D(J, std::vector<Complex>(k + 1));
  if (J <= 0 || (k == 0 && is_natural(alpha))) return D;
  // x = -alpha - eps
  Jet x = jet(-alpha, k, Complex(-1));
  Jet rg = rgamma_jet(x);
  // ln Gamma(n - alpha) - ln Gamma(n + 1) = (-alpha - 1) ln n + sum_m A_m / n^m
  std::vector<Jet> A(J), E(J);
  for (int m = 1; m < J; ++m) {
    Jet b = jet(0, k), xp = jet(1, k);
    // Bernoulli polynomial B_{m+1}(x) = sum_j C(m+1, j) B_j x^{m+1-j}
    Integer binom = 1;
    std::vector<Jet> powers{xp};
    for (int i = 1; i <= m + 1; ++i) powers.push_back(powers.back() * x);
    for (int j = 0; j <= m + 1; ++j) {
      b = b + Complex(to_real(Rational(binom) * bernoulli(j))) * powers[m + 1 - j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    b = b - jet(Complex(to_real(bernoulli(m + 1))), k);
    Real f = Real(m % 2 ? 1 : -1) / (m * (m + 1));
    A[m] = Complex(f) * b;
  }
  E[0] = jet(1, k);
  for (int j = 1; j < J; ++j) {
    E[j] = jet(0, k);
    for (int m = 1; m <= j; ++m) E[j] = E[j] + Complex(m) * (A[m] * E[j - m]);
    E[j] = Complex(Real(1) / j) * E[j];
  }
  // (-1)^k k! [eps^k] n^{-eps} rg E_j, with n^{-eps} = sum_i (-ln n)^i eps^i / i!
  Real kf = 1;
  for (int i = 2; i <= k; ++i) kf *= i;
  for (int j = 0; j < J; ++j) {
    Jet g = rg * E[j];
    Real ifact = 1;
    for (int i = 0; i <= k; ++i) {
      if (i > 0) ifact *= i;
      Real s = ((k + i) % 2 ? -kf : kf) / ifact;
      D[j][i] = Complex(s) * g[k - i];
    }
  }
  return D;
}

AsymptoticExpansion coeff_asymptotics(const std::vector<LocalBehavior>& lbs, int coord, int terms) {
  AsymptoticExpansion a;
  a.coord = coord;
  a.terms = terms;
  if (lbs.empty()) {
    a.entire = true;
    a.exponentially_small = true;
    return a;
  }
  a.radius = abs(lbs[0].sigma);
  Real eps = tiny();
  bool first = true;
  bool all_exact = true;
  for (const auto& lb : lbs) {
    const Expansion& e = lb.coords.at(coord);
    if (e.superpolynomial) throw SuperpolynomialRegime("superpolynomial growth at arg " + to_string(lb.arg));
    std::vector<Candidate> cs;
    for (const auto& [key, c] : e.terms) {
      Complex al = e.exponent(key);
      if (key.k == 0 && is_natural(al)) continue;
      cs.push_back({al, key.k, c, e.real_exponent(key)});
    }
    // increasing real exponent, higher log power first
    std::sort(cs.begin(), cs.end(), [&](const Candidate& x, const Candidate& y) {
      if (rabs(x.re - y.re) > eps) return x.re < y.re;
      return x.k > y.k;
    });
    std::size_t used = std::min<std::size_t>(cs.size(), static_cast<std::size_t>(std::max(terms, 0)));
    Real f;
    int b;
    if (used < cs.size()) {
      f = cs[used].re;
      b = cs[used].k;
      all_exact = false;
    } else if (!e.exact()) {
      f = e.order;
      b = e.order_log;
      all_exact = false;
    } else {
      f = Expansion::exact_order();
      b = 0;
    }
    if (first || f < a.error_exponent) a.error_exponent = f;
    a.error_log = first ? b : std::max(a.error_log, b);
    first = false;
    for (std::size_t i = 0; i < used; ++i)
      a.contributions.push_back({lb.arg, lb.sigma, cs[i].alpha, cs[i].k, cs[i].c, static_cast<int>(i)});

    // Stirling display; a singularity in the lower half is shown through its conjugate
    Turn conj_arg = lb.arg == 0 ? Turn(0) : Turn(1) - lb.arg;
    bool has_conj = conj_arg != lb.arg &&
                    std::any_of(lbs.begin(), lbs.end(), [&](const LocalBehavior& o) { return o.arg == conj_arg; });
    if (has_conj && lb.arg > Turn(1, 2)) continue;
    std::vector<bool> done(used, false);
    for (std::size_t g = 0; g < used; ++g) {
      if (done[g]) continue;
      std::vector<std::size_t> members;
      for (std::size_t i = g; i < used; ++i)
        if (!done[i] && integer_apart(cs[i].alpha, cs[g].alpha)) {
          members.push_back(i);
          done[i] = true;
        }
      Complex a0 = cs[members[0]].alpha;
      for (auto i : members)
        if (cs[i].re < a0.re) a0 = cs[i].alpha;
      long max_m = 0;
      int K = 0;
      for (auto i : members) {
        max_m = std::max(max_m, round(cs[i].re - a0.re).convert_to<long>());
        K = std::max(K, cs[i].k);
      }
      long J = max_m + terms;
      if (f < Expansion::exact_order() / 2) {
        long jf = 0;
        while (a0.re + jf < f - eps) ++jf;
        J = std::min(J, jf);
      }
      DisplayGroup dg{lb.arg, a0, has_conj, std::vector<std::vector<Complex>>(J, std::vector<Complex>(K + 1))};
      for (auto i : members) {
        long m = round(cs[i].re - a0.re).convert_to<long>();
        auto D = cn_stirling(cs[i].alpha, cs[i].k, static_cast<int>(J - m));
        for (long j = 0; j + m < J; ++j)
          for (int l = 0; l <= cs[i].k; ++l) dg.coef[j + m][l] += cs[i].c * D[j][l];
      }
      a.display.push_back(std::move(dg));
    }
  }
  a.exponentially_small = all_exact;
  return a;
}

Complex evaluate_asympt(const AsymptoticExpansion& a, long n, int terms) {
  Complex s;
  for (const auto& t : a.contributions) {
    if (t.rank >= terms) continue;
    Rational q = -t.arg * n;
    Integer num = numerator(q), den = denominator(q);
    Integer rem = num % den;
    if (rem < 0) rem += den;
    Complex w = Complex(pow(abs(t.sigma), Real(-n))) * turn(Rational(rem, den));
    s += t.c * w * cn(n, t.alpha, t.k);
  }
  return s;
}

Complex evaluate_stirling(const AsymptoticExpansion& a, long n, int J) {
  Complex s;
  Real ln = log(Real(n));
  for (const auto& g : a.display) {
    Complex part;
    for (int j = 0; j < J && j < static_cast<int>(g.coef.size()); ++j)
      for (std::size_t l = 0; l < g.coef[j].size(); ++l)
        part += g.coef[j][l] * Complex(pow(ln, Real(static_cast<long>(l))) * pow(Real(n), Real(-j)));
    Rational q = -g.arg * n;
    Integer num = numerator(q), den = denominator(q);
    Integer rem = num % den;
    if (rem < 0) rem += den;
    Complex w = Complex(pow(a.radius, Real(-n))) * turn(Rational(rem, den)) * exp(Complex(-ln) * (g.alpha0 + Complex(1)));
    part = part * w;
    if (g.paired) part = Complex(2 * part.re);
    s += part;
  }
  return s;
}

namespace {

int contribution_count(const Expansion& e) {
  int count = 0;
  for (const auto& [key, v] : e.terms)
    if (key.k > 0 || !is_natural(e.exponent(key))) ++count;
  return count;
}

}  // namespace

std::vector<LocalBehavior> expansions_for_terms(const NormalSystem& sys, const DominantSet& d,
                                                const std::vector<int>& coords, int terms,
                                                const PrecisionContext& ctx) {
  if (d.args.empty()) return {};
  std::vector<LocalBehavior> lbs;
  std::vector<int> last;
  // Deepen until every count reaches `terms`; a count that does not move between two
  // depths belongs to an expansion with finitely many contributions (analytic or exact).
  for (int p = 2 * (terms + 1); p <= 32; p += 4) {
    lbs = singular_expansions(sys, d, p, ctx);
    std::vector<int> counts;
    bool enough = true, stalled = !last.empty();
    for (int c : coords)
      for (const auto& lb : lbs) {
        const Expansion& e = lb.coords.at(c);
        int n = e.superpolynomial || e.exact() ? terms : contribution_count(e);
        if (n < terms) {
          enough = false;
          if (last.empty() || last[counts.size()] != n) stalled = false;
        }
        counts.push_back(n);
      }
    if (enough || stalled) break;
    last = counts;
  }
  return lbs;
}

}  // namespace combasym
