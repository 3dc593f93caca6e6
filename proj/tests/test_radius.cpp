#include <gtest/gtest.h>

#include "combasym/radius.hpp"
#include "combasym/series.hpp"
#include "test_util.hpp"

using namespace combasym;

namespace {

struct Prec {
  PrecisionContext ctx;
  PrecisionScope scope{ctx.bits};
};

const CertifiedConstant& rho(const RadiusResult& r, const NormalSystem& sys, const std::string& name) {
  return r.of(sys.index(name)).value;
}

// tools/oracles/forest_polynomial.py: bisection on the printed degree-21 polynomial
const char* FOREST_POLY_ROOT = "0.170391671557980767793820283237734808756257749";
// tools/oracles/forest_inherited_lambda.py
const char* INHERITED_LAMBDA = "0.0127350040475";

}  // namespace

TEST(Radius, BinaryTreesQuarter) {
  Prec p;
  auto sys = normalize(parse_spec("G = Z + G*G;"));
  auto r = radius(sys, p.ctx);
  const auto& g = rho(r, sys, "G");
  ASSERT_TRUE(g.finite);
  EXPECT_TRUE(g.certified);
  EXPECT_TRUE(g.interval.contains(Real(1) / 4));
  EXPECT_LT(g.interval.width(), Real("1e-30"));
  EXPECT_EQ(r.of(0).rule, ComponentRadius::Rule::Characteristic);
}

TEST(Radius, ColoredForest) {
  Prec p;
  auto sys = load_normal("forest.spec");
  auto r = radius(sys, p.ctx);
  const auto& t = rho(r, sys, "T_r");
  const auto& br = rho(r, sys, "R");
  const auto& g = rho(r, sys, "G");
  EXPECT_GE(br.interval.lo, Real("0.2462661"));
  EXPECT_LE(br.interval.hi, Real("0.2462662"));
  EXPECT_EQ(rho(r, sys, "B").def, br.def);
  EXPECT_TRUE(g.interval.contains(Real(1) / 4));
  EXPECT_GE(t.interval.lo, Real("0.1703916"));
  EXPECT_LE(t.interval.hi, Real("0.1703917"));
  for (const char* n : {"F", "T_b", "T_g"}) EXPECT_EQ(rho(r, sys, n).def, t.def) << n;
  Real root(FOREST_POLY_ROOT);
  EXPECT_TRUE(t.interval.contains(root));
  EXPECT_LT(abs(t.point - root), Real("1e-30"));
  EXPECT_EQ(r.of(sys.index("F")).rule, ComponentRadius::Rule::Inherited);
  ASSERT_GE(r.overall, 0);
  EXPECT_EQ(r.components[r.overall].value.def, t.def);
}

TEST(Radius, DefiningSystemIsReported) {
  Prec p;
  auto sys = load_normal("forest.spec");
  auto r = radius(sys, p.ctx);
  auto eqs = rho(r, sys, "T_r").def->equations();
  ASSERT_FALSE(eqs.empty());
  EXPECT_EQ(eqs.back(), "det(Id - dH/dY)[T_r,T_b,T_g] = 0");
  const auto& c = rho(r, sys, "T_r");
  ASSERT_EQ(static_cast<int>(c.box.size()), c.def->system->dim() + 1);
  EXPECT_TRUE(c.box_verified);
  for (std::size_t k = 1; k < c.box.size(); ++k) EXPECT_TRUE(c.box[k].contains(c.values[k - 1]));
}

TEST(Radius, OrderedForestUnitValue) {
  Prec p;
  auto sys = load_normal("ordered_forest.spec");
  auto r = radius(sys, p.ctx);
  const auto& f = r.of(sys.index("F"));
  EXPECT_EQ(f.rule, ComponentRadius::Rule::UnitValue);
  EXPECT_GE(f.value.interval.lo, Real("0.2457166"));
  EXPECT_LE(f.value.interval.hi, Real("0.2457167"));
  EXPECT_EQ(f.value.def->equations().back(), "T_r = 1");
  // tree component of this variant
  const auto& t = rho(r, sys, "T_r");
  EXPECT_GE(t.interval.lo, Real("0.246067"));
  EXPECT_LE(t.interval.hi, Real("0.246068"));
}

TEST(Radius, InheritedWhenPerronBelowOne) {
  Prec p;
  auto sys = load_normal("forest_inherited.spec");
  auto r = radius(sys, p.ctx);
  const auto& t = r.of(sys.index("T_r"));
  EXPECT_EQ(t.rule, ComponentRadius::Rule::Inherited);
  EXPECT_EQ(t.value.def, rho(r, sys, "R").def);
  EXPECT_GT(t.lambda, 0);
  EXPECT_LT(t.lambda, 1);
  ASSERT_FALSE(t.decisions.empty());
  EXPECT_EQ(t.decisions.back().outcome, OracleDecision::Outcome::NoSolution);
  EXPECT_TRUE(t.decisions.back().heuristic);

  // the Perron root at 0.2462661 against the fixed-point oracle
  auto A = AnalyticSystem::closure(sys, {sys.index("T_r")});
  Real a("0.2462661");
  auto v = newton_value(A, a, p.ctx);
  ASSERT_TRUE(v.converged());
  std::vector<int> block;
  for (const char* n : {"T_r", "T_b", "T_g"}) block.push_back(A.position(sys.index(n)));
  Real lambda = dominant_eigenvalue(submatrix(A.jacobian(a, v.y), block), p.ctx).lambda;
  EXPECT_LT(abs(lambda - Real(INHERITED_LAMBDA)), Real("1e-10"));
}

TEST(Radius, ClosedForms) {
  Prec p;
  struct Case { const char* spec; const char* name; Real value; };
  std::vector<Case> cases = {{"T = Z*Set(T);", "T", exp(Real(-1))},
                             {"Y = Seq(Z + Z);", "Y", Real(1) / 2},
                             {"Y = Cyc(Z*Z);", "Y", Real(1)},
                             {"P = Set(Cyc(Z));", "P", Real(1)},
                             {"A = Z + Z*A + Z*A;", "A", Real(1) / 2},
                             {"C = Seq(B); B = A + A; A = Z^4;", "C", pow(Real(2), Real(-0.25))}};
  for (const auto& c : cases) {
    auto sys = normalize(parse_spec(c.spec));
    auto r = radius(sys, p.ctx);
    const auto& k = rho(r, sys, c.name);
    ASSERT_TRUE(k.finite) << c.spec;
    EXPECT_TRUE(k.interval.contains(c.value)) << c.spec << " " << to_string(k.point, 30);
    EXPECT_LT(abs(k.point - c.value), Real("1e-60")) << c.spec;
  }
}

TEST(Radius, EntireSystems) {
  Prec p;
  for (const char* s : {"Y = Set(Z);", "Y = Z;", "Y = Z*Z + Set(Z*Z);"}) {
    auto sys = normalize(parse_spec(s));
    auto r = radius(sys, p.ctx);
    EXPECT_FALSE(r.of(sys.index("Y")).value.finite) << s;
    EXPECT_EQ(r.overall, -1);
  }
}

TEST(Oracle, Comparisons) {
  Prec p;
  auto sys = load_normal("forest.spec");
  auto r = radius(sys, p.ctx);
  auto g = rho(r, sys, "G");
  auto br = rho(r, sys, "R");
  auto d = oracle_compare(g, br, p.ctx);
  EXPECT_EQ(d.outcome, OracleDecision::Outcome::Greater);
  EXPECT_FALSE(d.heuristic);
  auto g2 = g;
  EXPECT_EQ(oracle_compare(g, g2, p.ctx).outcome, OracleDecision::Outcome::Equal);

  // 1/4 from 1 - 4z = 0 and from the characteristic system of G = Z + G^2
  auto s2 = normalize(parse_spec("Y = Seq(Z + Z + Z + Z);"));
  auto r2 = radius(s2, p.ctx);
  auto quarter = rho(r2, s2, "Y");
  auto eq = oracle_compare(quarter, g, p.ctx);
  EXPECT_EQ(eq.outcome, OracleDecision::Outcome::Equal);
  EXPECT_TRUE(eq.heuristic);
  EXPECT_EQ(eq.digits, p.ctx.oracle_digits);
  EXPECT_GE(quarter.bits, 332u);
}

TEST(Oracle, InfiniteOrdering) {
  Prec p;
  auto inf = CertifiedConstant::infinite();
  auto one = CertifiedConstant::exact(Real(1));
  EXPECT_EQ(oracle_compare(one, inf, p.ctx).outcome, OracleDecision::Outcome::Less);
  EXPECT_EQ(oracle_compare(inf, one, p.ctx).outcome, OracleDecision::Outcome::Greater);
}

TEST(Radius, RefinementNarrows) {
  Prec p;
  auto sys = load_normal("burris.spec");
  auto c = radius(sys, p.ctx).of(0).value;
  Real prev = c.interval.width();
  ASSERT_GT(prev, Real("1e-80"));
  Real third = with_bits(Real(1), 1024) / 3;
  for (int digits : {80, 100, 120}) {
    refine(c, digits, p.ctx);
    EXPECT_LE(c.interval.width(), prev / 2);
    EXPECT_LE(c.interval.width(), pow(Real(10), -digits));
    EXPECT_TRUE(c.interval.contains(third));
    prev = c.interval.width();
  }
}

std::vector<std::string> radius_corpus() {
  return {"catalan.spec", "burris.spec", "forest.spec", "cayley.spec", "ordered_forest.spec",
          "periodic_quadratic.spec", "periodic_linear.spec", "four_singularities.spec", "set_cyc4.spec",
          "lindemann.spec", "forest_inherited.spec", "permutations.spec"};
}

TEST(Radius, SoundnessSandwich) {
  Prec p;
  for (const auto& f : radius_corpus()) {
    auto sys = load_normal(f);
    auto r = radius(sys, p.ctx);
    auto A = AnalyticSystem::reduced(sys);
    for (const auto& cr : r.components) {
      if (!cr.value.finite) continue;
      // the whole system converges below every component radius at or above the overall one
      const auto& all = r.components[r.overall].value;
      if (cr.value.def != all.def) continue;
      auto below = newton_value(A, cr.value.interval.lo * (1 - Real("1e-6")), p.ctx);
      EXPECT_TRUE(below.converged() && below.certified) << f;
      auto above = newton_value(A, cr.value.interval.hi * (1 + Real("1e-4")), p.ctx);
      EXPECT_TRUE(above.above()) << f;
    }
  }
}

TEST(Radius, CoefficientGrowth) {
  Prec p;
  for (const auto& f : radius_corpus()) {
    auto sys = load_normal(f);
    auto r = radius(sys, p.ctx);
    ASSERT_GE(r.overall, 0) << f;
    int coord = r.dag.components[r.overall].coords.front();
    const auto& c = r.of(coord).value;
    auto series = expand_coefficients(sys, 200);
    double best = 0;
    for (int n = 180; n <= 200; ++n) {
      Real cn = to_real(series[coord].c[n]);
      if (cn > 0) best = std::max(best, static_cast<double>(exp(log(cn) / n)));
    }
    double expected = static_cast<double>(1 / c.point);
    EXPECT_NEAR(best / expected, 1.0, 0.05) << f;
  }
}

TEST(Radius, PerronMonotoneUpToRadius) {
  Prec p;
  for (const char* f : {"catalan.spec", "burris.spec", "forest.spec", "cayley.spec", "periodic_quadratic.spec"}) {
    auto sys = load_normal(f);
    auto r = radius(sys, p.ctx);
    for (std::size_t ci = 0; ci < r.dag.components.size(); ++ci) {
      const auto& comp = r.dag.components[ci];
      if (!comp.irreducible || r.components[ci].rule != ComponentRadius::Rule::Characteristic) continue;
      const auto& k = r.components[ci].value;
      auto A = *k.def->system;
      Real prev = -1;
      for (int step = 1; step <= 10; ++step) {
        Real a = step == 10 ? k.interval.lo : k.point * step / 10;
        auto v = newton_value(A, a, p.ctx);
        ASSERT_TRUE(v.converged()) << f;
        Real lambda = dominant_eigenvalue(submatrix(A.jacobian(a, v.y), k.def->component), p.ctx).lambda;
        EXPECT_GT(lambda, prev) << f;
        prev = lambda;
      }
      EXPECT_LE(prev, 1 + Real("1e-20")) << f;
      EXPECT_GT(prev, Real("0.999")) << f;
    }
  }
}
