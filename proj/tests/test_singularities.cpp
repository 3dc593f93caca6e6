#include <gtest/gtest.h>

#include <map>
#include <numeric>

#include "combasym/series.hpp"
#include "combasym/singularities.hpp"
#include "test_util.hpp"

using namespace combasym;

namespace {

struct Prec {
  PrecisionContext ctx;
  PrecisionScope scope{ctx.bits};
};

std::vector<Turn> turns(std::initializer_list<const char*> xs) {
  std::vector<Turn> r;
  for (const char* x : xs) r.push_back(parse_rational(x));
  return r;
}

NormalSystem spec(const char* s) { return normalize(parse_spec(s)); }

// gcd of (n - val) over the support up to N; 0 for a monomial
int empirical_period(const SeriesTruncation& s) {
  int first = -1, g = 0;
  for (int n = 0; n <= s.order(); ++n) {
    if (s.c[n] == 0) continue;
    if (first < 0) first = n;
    else g = std::gcd(g, n - first);
  }
  return g;
}

struct CircleScan {
  DominantSet d;
  Real r;
  std::vector<std::vector<Real>> mod;      // |Y_c| per sample and coordinate
  std::vector<std::vector<Complex>> y;     // unknowns of the reduced system per sample
};

const Real& two_pi() {
  static Real v = 2 * boost::multiprecision::acos(Real(-1));
  return v;
}

void newton_at(const AnalyticSystem& A, const Complex& z, std::vector<Complex>& y) {
  for (int it = 0; it < 60; ++it) {
    auto h = A.H(z, y);
    std::vector<Complex> F(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) F[i] = y[i] - h[i];
    auto step = LU<Complex>(identity_minus(A.jacobian(z, y))).solve(F);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= step[i];
    if (norm_inf(step) < Real("1e-30")) break;
  }
}

// dY/dz of the unknowns
Real derivative_norm(const AnalyticSystem& A, const Complex& z, const std::vector<Complex>& y) {
  return norm_inf(LU<Complex>(identity_minus(A.jacobian(z, y))).solve(A.dz(z, y)));
}

const PrecisionContext& scan_ctx() {
  static PrecisionContext ctx = [] {
    PrecisionContext c;
    c.bits = 128;
    return c;
  }();
  return ctx;
}

// |Y_c(z)| for every coordinate at M equally spaced points of |z| = R(1 - 10^-3), continuing
// the solution from the positive real axis.
const CircleScan& circle_scan(const std::string& file, int M) {
  static std::map<std::string, CircleScan> cache;
  if (auto it = cache.find(file); it != cache.end()) return it->second;
  const auto& ctx = scan_ctx();
  PrecisionScope scope(ctx.bits);
  auto sys = load_normal(file);
  CircleScan sc{dominant_singularities(sys, ctx), 0, {}, {}};
  sc.r = sc.d.R.point * (1 - Real("1e-3"));
  auto A = AnalyticSystem::reduced(sys);
  auto v = newton_value(A, sc.r, ctx);
  EXPECT_TRUE(v.converged()) << file;
  std::vector<Complex> y(v.y.begin(), v.y.end());
  const int sub = 4;
  for (int k = 0; k < M; ++k) {
    for (int s = 1; s <= (k == 0 ? 0 : sub); ++s)
      newton_at(A, polar(sc.r, two_pi() * ((k - 1) * sub + s) / (M * sub)), y);
    auto vals = A.values(polar(sc.r, two_pi() * k / M), y);
    std::vector<Real> m;
    for (const auto& x : vals) m.push_back(abs(x));
    sc.mod.push_back(m);
    sc.y.push_back(y);
  }
  return cache[file] = std::move(sc);
}

// strict local maxima of |Y_c| farther than 2 samples from every reported argument
std::vector<std::pair<int, int>> off_argument_maxima(const NormalSystem& sys, const CircleScan& sc, int M) {
  std::vector<std::pair<int, int>> out;
  for (int c = 0; c < sys.size(); ++c) {
    if (!sc.d.at_R[sc.d.radius.dag.component_of[c]]) continue;
    const auto& args = sc.d.of(c).args;
    for (int k = 0; k < M; ++k) {
      const Real& here = sc.mod[k][c];
      if (!(here > sc.mod[(k + M - 1) % M][c] && here > sc.mod[(k + 1) % M][c])) continue;
      bool near = false;
      for (const auto& t : args) {
        double pos = static_cast<double>(t) * M;
        double dist = std::min(std::abs(pos - k), M - std::abs(pos - k));
        if (dist <= 2) near = true;
      }
      if (!near) out.emplace_back(c, k);
    }
  }
  return out;
}

}  // namespace

TEST(Periods, QuadraticPair) {
  auto sys = load_normal("periodic_quadratic.spec");
  auto q = periods(sys);
  EXPECT_EQ(q[sys.index("A")], 2);
  EXPECT_EQ(q[sys.index("B")], 2);
}

TEST(Periods, Basic) {
  auto g = spec("G = Z + G*G;");
  EXPECT_EQ(periods(g)[g.index("G")], 1);
  auto y = spec("Y = Z;");
  EXPECT_EQ(periods(y)[y.index("Y")], 0);
  auto t = spec("T = Z + Z*T*T;");
  EXPECT_EQ(periods(t)[t.index("T")], 2);
}

TEST(Periods, LinearPairGivesOne) {
  auto sys = load_normal("periodic_linear.spec");
  auto q = periods(sys);
  EXPECT_EQ(q[sys.index("A")], 1);
  EXPECT_EQ(q[sys.index("B")], 1);
}

TEST(Periods, MatrixSystemOfLinearPair) {
  // M = Id + J M with J = ((0, z^2), (z^3, 0)), flattened row-major
  PolySystem M(4);
  M[0] = {{0, 0, {}}, {2, 0, {2}}};
  M[1] = {{2, 0, {3}}};
  M[2] = {{3, 0, {0}}};
  M[3] = {{0, 0, {}}, {3, 0, {1}}};
  auto v = poly_valuations(M);
  ASSERT_TRUE(v[0] && v[1] && v[2] && v[3]);
  EXPECT_EQ(*v[0], 0);
  EXPECT_EQ(*v[1], 2);
  EXPECT_EQ(*v[2], 3);
  EXPECT_EQ(*v[3], 0);
  auto p = poly_periods(M, v);
  EXPECT_EQ(p, (std::vector<int>{5, 5, 5, 5}));
}

TEST(Periods, DivideEmpiricalSupportPeriod) {
  for (const char* f : {"catalan.spec", "burris.spec", "forest.spec", "cayley.spec", "ordered_forest.spec",
                        "periodic_quadratic.spec", "periodic_linear.spec", "four_singularities.spec",
                        "set_cyc4.spec", "lindemann.spec", "forest_inherited.spec", "permutations.spec"}) {
    auto sys = load_normal(f);
    auto q = periods(sys);
    auto series = expand_coefficients(sys, 100);
    auto dag = condense(sys);
    for (int i = 0; i < sys.size(); ++i) {
      int e = empirical_period(series[i]);
      if (q[i] == 0) {
        EXPECT_EQ(e, 0) << f << " " << sys.eqs[i].name;
      } else {
        EXPECT_EQ(e % q[i], 0) << f << " " << sys.eqs[i].name;
      }
      const auto& comp = dag.components[dag.component_of[i]];
      if (comp.irreducible && !is_linear(sys, comp)) EXPECT_EQ(e, q[i]) << f << " " << sys.eqs[i].name;
    }
  }
}

TEST(Dominant, FourSingularities) {
  Prec p;
  auto sys = load_normal("four_singularities.spec");
  auto d = dominant_singularities(sys, p.ctx);
  ASSERT_TRUE(d.R.finite);
  EXPECT_TRUE(d.R.interval.contains(pow(Real(2), Real(-0.25))));
  auto four = turns({"0", "1/4", "1/2", "3/4"});
  EXPECT_EQ(d.args, four);
  EXPECT_EQ(d.of(sys.index("C")).args, four);
  EXPECT_EQ(d.of(sys.index("E")).args, four);
  EXPECT_EQ(d.of(sys.index("C")).period, 4);
  EXPECT_FALSE(d.at_R[d.radius.dag.component_of[sys.index("D")]]);
  EXPECT_TRUE(d.of(sys.index("A")).args.empty());
  // D sits on its own circle of radius 1
  EXPECT_EQ(d.of(sys.index("D")).args, turns({"0"}));
}

TEST(Dominant, SetOfCycles) {
  Prec p;
  auto d = dominant_singularities(load_normal("set_cyc4.spec"), p.ctx);
  EXPECT_TRUE(d.R.interval.contains(Real(1)));
  EXPECT_EQ(d.args, turns({"0", "1/4", "1/2", "3/4"}));
}

TEST(Dominant, ForestOnlyPositiveAxis) {
  Prec p;
  auto sys = load_normal("forest.spec");
  auto d = dominant_singularities(sys, p.ctx);
  EXPECT_EQ(d.args, turns({"0"}));
  EXPECT_EQ(d.of(sys.index("T_r")).args, turns({"0"}));
  EXPECT_EQ(d.of(sys.index("T_r")).period, 1);
  EXPECT_EQ(d.of(sys.index("F")).args, d.of(sys.index("T_r")).args);
  EXPECT_TRUE(d.of(sys.index("F")).rule.rfind("Set", 0) == 0);
}

TEST(Dominant, LinearPairFiveSingularities) {
  Prec p;
  auto sys = load_normal("periodic_linear.spec");
  auto d = dominant_singularities(sys, p.ctx);
  EXPECT_TRUE(d.R.interval.contains(Real(1)));
  EXPECT_EQ(d.args, turns({"0", "1/5", "2/5", "3/5", "4/5"}));
  EXPECT_EQ(d.of(sys.index("A")).period, 5);
}

TEST(Dominant, QuadraticPairTwoSingularities) {
  Prec p;
  auto sys = load_normal("periodic_quadratic.spec");
  auto d = dominant_singularities(sys, p.ctx);
  EXPECT_EQ(d.args, turns({"0", "1/2"}));
}

TEST(Dominant, SmallCases) {
  Prec p;
  auto g = dominant_singularities(spec("G = Z + G*G;"), p.ctx);
  EXPECT_EQ(g.args, turns({"0"}));
  auto y = dominant_singularities(spec("Y = Z;"), p.ctx);
  EXPECT_FALSE(y.R.finite);
  EXPECT_TRUE(y.args.empty());
  auto l = dominant_singularities(load_normal("lindemann.spec"), p.ctx);
  EXPECT_TRUE(l.R.interval.contains(1 / sqrt(Real(2))));
  EXPECT_EQ(l.args, turns({"0", "1/2"}));
}

TEST(Dominant, InheritedSeqKeepsArgumentSingularities) {
  Prec p;
  // U = Z + Z*U*U has radius 1/2 with U(1/2) = 1, so Seq(Z*U) never reaches 1 inside
  auto sys = spec("S = Seq(V); V = Z*U; U = Z + Z*U*U;");
  auto d = dominant_singularities(sys, p.ctx);
  EXPECT_EQ(d.radius.of(sys.index("S")).rule, ComponentRadius::Rule::Inherited);
  EXPECT_EQ(d.of(sys.index("S")).args, d.of(sys.index("U")).args);
  EXPECT_EQ(d.of(sys.index("U")).args, turns({"0", "1/2"}));
}

std::vector<std::string> corpus_files() {
  return {"catalan.spec", "burris.spec", "forest.spec", "cayley.spec", "ordered_forest.spec",
          "periodic_quadratic.spec", "periodic_linear.spec", "four_singularities.spec", "set_cyc4.spec",
          "lindemann.spec", "forest_inherited.spec", "permutations.spec"};
}

TEST(Dominant, ZeroAlwaysPresent) {
  Prec p;
  for (const auto& f : corpus_files()) {
    auto d = dominant_singularities(load_normal(f), p.ctx);
    ASSERT_TRUE(d.R.finite) << f;
    ASSERT_FALSE(d.args.empty()) << f;
    EXPECT_EQ(d.args.front(), Turn(0)) << f;
  }
}

TEST(Dominant, SupersetOfModulusMaxima) {
  const int M = 720;
  for (const auto& f : corpus_files()) {
    auto sys = load_normal(f);
    const auto& sc = circle_scan(f, M);
    for (auto [c, k] : off_argument_maxima(sys, sc, M))
      ADD_FAILURE() << f << " " << sys.eqs[c].name << " local maximum at sample " << k;
  }
}

// Maxima away from the reported arguments are regular points: the derivative stays
// bounded when moving from R(1 - 10^-3) to R(1 - 10^-6), while it grows at least
// like (1 - |z|/R)^{-1/2} toward a singularity.
TEST(Dominant, OffArgumentMaximaAreRegular) {
  const int M = 720;
  const auto& ctx = scan_ctx();
  for (const auto& f : corpus_files()) {
    auto sys = load_normal(f);
    const auto& sc = circle_scan(f, M);
    PrecisionScope scope(ctx.bits);
    auto A = AnalyticSystem::reduced(sys);
    std::vector<int> done;
    for (auto [c, k] : off_argument_maxima(sys, sc, M)) {
      if (std::find(done.begin(), done.end(), k) != done.end()) continue;
      done.push_back(k);
      Real theta = two_pi() * k / M;
      auto y = sc.y[k];
      Real d1 = derivative_norm(A, polar(sc.r, theta), y);
      Real gap = Real("1e-3");
      for (int s = 0; s < 12; ++s) {
        gap /= pow(Real(10), Real(0.25));
        newton_at(A, polar(sc.d.R.point * (1 - gap), theta), y);
      }
      Real d2 = derivative_norm(A, polar(sc.d.R.point * (1 - gap), theta), y);
      EXPECT_LT(d2, 2 * d1) << f << " sample " << k;
    }
  }
}
