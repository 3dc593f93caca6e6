#include <gtest/gtest.h>

#include <random>

#include "combasym/analytic.hpp"
#include "combasym/series.hpp"
#include "combasym/wellfounded.hpp"
#include "test_util.hpp"

using namespace combasym;

namespace {

struct Prec {
  PrecisionContext ctx;
  PrecisionScope scope{ctx.bits};
};

std::vector<std::string> analytic_corpus() {
  return {"catalan.spec", "burris.spec", "forest.spec", "cayley.spec", "permutations.spec",
          "ordered_forest.spec", "periodic_quadratic.spec", "periodic_linear.spec",
          "four_singularities.spec", "set_cyc4.spec", "lindemann.spec", "forest_normal.spec"};
}

}  // namespace

TEST(Eval, BinaryTreesFixedPoint) {
  Prec p;
  auto sys = normalize(parse_spec("B = Z + B*B;"));
  auto A = AnalyticSystem::reduced(sys);
  Real a("0.2");
  Real y = (1 - sqrt(1 - 4 * a)) / 2;
  auto h = A.H(a, std::vector<Real>{y});
  EXPECT_LT(abs(h[0] - y), Real("1e-70"));
  EXPECT_LT(abs(y - Real("0.27639320225002103")), Real("1e-16"));
}

TEST(Eval, ForestIterationFromZero) {
  Prec p;
  auto sys = load_normal("forest.spec");
  auto A = AnalyticSystem::reduced(sys);
  ASSERT_EQ(A.dim(), 7);
  std::vector<Real> y(7, Real(0));
  for (int k = 0; k < 7; ++k) y = A.H(Real(0), y);
  std::vector<Real> expected{1, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(y, expected);
  auto J = A.jacobian(Real(0), y);
  // nonzero entries: F<-T_r, T_r<-R, T_b<-B, T_g<-G
  int ones[7][7] = {{0, 1, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 0, 1, 0}, {0, 0, 0, 0, 0, 0, 1},
                    {0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0}};
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) EXPECT_EQ(J(i, j), Real(ones[i][j])) << i << "," << j;
}

TEST(Eval, SeqOutsideDomain) {
  Prec p;
  auto sys = normalize(parse_spec("S = Seq(Y); Y = Z*Y + Z;"));
  auto A = AnalyticSystem::reduced(sys);
  DomainStatus st;
  A.H(Real("0.5"), std::vector<Real>{Real(0), Real("1.2")}, &st);
  EXPECT_EQ(st.status, Domain::Outside);
  EXPECT_EQ(st.witness, sys.index("S"));
  DomainStatus ok;
  A.H(Real("0.5"), std::vector<Real>{Real(0), Real("0.9")}, &ok);
  EXPECT_TRUE(ok.inside());
}

TEST(Jacobian, QuadraticAtOne) {
  Prec p;
  auto A = AnalyticSystem::reduced(normalize(parse_spec("Y = Z + Y*Y;")));
  auto J = A.jacobian(Real(0), std::vector<Real>{Real(1)});
  EXPECT_EQ(J(0, 0), Real(2));
}

TEST(Jacobian, Burris) {
  Prec p;
  auto A = AnalyticSystem::reduced(load_normal("burris.spec"));
  Real third = Real(1) / 3;
  auto J = A.jacobian(third, std::vector<Real>{Real(1), Real(1)});
  Real tol("1e-70");
  EXPECT_LT(abs(J(0, 0) - Real(2) / 3), tol);
  EXPECT_LT(abs(J(0, 1) - third), tol);
  EXPECT_LT(abs(J(1, 0) - third), tol);
  EXPECT_LT(abs(J(1, 1) - Real(2) / 3), tol);
}

TEST(Jacobian, NilpotentAtZeroOnCorpus) {
  Prec p;
  for (const auto& f : analytic_corpus()) {
    auto sys = load_normal(f);
    auto wf = leading_terms(sys);
    ASSERT_TRUE(wf.ok()) << f;
    auto s = strip_zero_coords(sys, wf.terms);
    auto A = AnalyticSystem::reduced(s);
    int m = A.dim();
    std::vector<Real> y(m, Real(0));
    for (int k = 0; k < m; ++k) y = A.H(Real(0), y);
    auto J = A.jacobian(Real(0), y);
    auto P = J;
    for (int k = 1; k < m; ++k) P = P * J;
    for (const auto& x : P.a) EXPECT_EQ(x, 0) << f;
  }
}

TEST(Jacobian, MatchesFiniteDifferences) {
  Prec p;
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unif(0.2, 0.8);
  for (const auto& f : analytic_corpus()) {
    auto sys = strip_zero_coords(load_normal(f), leading_terms(load_normal(f)).terms);
    auto A = AnalyticSystem::reduced(sys);
    int m = A.dim();
    auto coeffs = expand_coefficients(sys, 40);
    for (int trial = 0; trial < 3; ++trial) {
      // interior point: scaled partial sums at a small z keep Seq/Cyc arguments below 1
      Rational zr(static_cast<long>(unif(rng) * 1000), 20000);
      Real z = to_real(zr);
      std::vector<Real> y(m);
      for (int k = 0; k < m; ++k) y[k] = to_real(eval_truncation(coeffs[A.unknowns()[k]], zr)) * Real(unif(rng));
      DomainStatus st;
      A.H(z, y, &st);
      if (!st.inside()) continue;
      auto J = A.jacobian(z, y);
      Real h("1e-8");
      for (int j = 0; j < m; ++j) {
        auto yp = y, ym = y;
        yp[j] += h;
        ym[j] -= h;
        auto hp = A.H(z, yp), hm = A.H(z, ym);
        for (int i = 0; i < m; ++i) {
          Real fd = (hp[i] - hm[i]) / (2 * h);
          Real scale = abs(J(i, j)) > 1 ? abs(J(i, j)) : Real(1);
          EXPECT_LE(abs(fd - J(i, j)) / scale, Real("1e-6")) << f << " " << i << "," << j;
        }
      }
    }
  }
}

TEST(Hessian, RowSumsQuadratic) {
  Prec p;
  // H = z + y1^2 + y1 y2, second directional derivative along (1,1) is 2 + 2 = 4
  auto A = AnalyticSystem::reduced(normalize(parse_spec("Y1 = Z + Y1*Y1 + Y1*Y2; Y2 = Z;")));
  auto h = A.hessian_rowsums(Real("0.1"), std::vector<Real>{Real("0.3"), Real("0.1")});
  EXPECT_EQ(h[0], Real(4));
  EXPECT_EQ(h[1], Real(0));
}

TEST(Perron, Burris) {
  Prec p;
  Matrix<Real> M(2, 2);
  M(0, 0) = M(1, 1) = Real(2) / 3;
  M(0, 1) = M(1, 0) = Real(1) / 3;
  auto r = dominant_eigenvalue(M, p.ctx);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(abs(r.lambda - 1), Real("1e-38"));
  EXPECT_LE(r.lower, Real(1));
  EXPECT_GE(r.upper, Real(1) - Real("1e-60"));
}

TEST(Perron, ZeroMatrix) {
  Prec p;
  auto r = dominant_eigenvalue(Matrix<Real>(3, 3), p.ctx);
  EXPECT_EQ(r.lambda, 0);
}

TEST(Perron, BinaryTrees) {
  Prec p;
  auto A = AnalyticSystem::reduced(normalize(parse_spec("B = Z + B*B;")));
  EXPECT_EQ(dominant_eigenvalue(A.jacobian(Real(0), std::vector<Real>{Real(0)}), p.ctx).lambda, 0);
  EXPECT_EQ(dominant_eigenvalue(A.jacobian(Real(0), std::vector<Real>{Real(1)}), p.ctx).lambda, 2);
}

TEST(Perron, ReducibleTakesMaximumBlock) {
  Prec p;
  Matrix<Real> M(3, 3);
  M(0, 0) = Real("0.5");
  M(0, 1) = 1;
  M(1, 2) = 2;
  M(2, 1) = 2;
  auto r = dominant_eigenvalue(M, p.ctx);
  EXPECT_LT(abs(r.lambda - 2), Real("1e-30"));
  EXPECT_EQ(compare_perron_to_one(M, p.ctx), 1);
  Matrix<Real> S(2, 2);
  S(0, 1) = Real("0.25");
  S(1, 0) = Real("0.25");
  EXPECT_EQ(compare_perron_to_one(S, p.ctx), -1);
}
