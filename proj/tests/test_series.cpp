#include <gtest/gtest.h>

#include <filesystem>

#include "combasym/series.hpp"
#include "combasym/wellfounded.hpp"
#include "series_oracle.hpp"
#include "test_util.hpp"

using namespace combasym;

static std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(COMBASYM_CORPUS))
    if (e.path().extension() == ".spec") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

static bool well_founded(const NormalSystem& sys) { return leading_terms(sys).ok(); }

TEST(Series, BinaryTreesCatalan) {
  auto sys = normalize(parse_spec("B = Z + B*B;"));
  auto s = expand_coefficients(sys, 12);
  // Catalan recurrence as independent check: C_0 = 1, C_{n+1} = sum C_i C_{n-i}
  std::vector<Integer> C{1};
  for (int n = 0; n < 12; ++n) {
    Integer t = 0;
    for (int i = 0; i <= n; ++i) t += C[i] * C[n - i];
    C.push_back(t);
  }
  EXPECT_EQ(s[0].c[0], 0);
  for (int n = 1; n <= 12; ++n) EXPECT_EQ(s[0].c[n], Rational(C[n - 1])) << n;
}

TEST(Series, ForestTenthCoefficient) {
  auto sys = load_normal("forest.spec");
  auto s = expand_coefficients(sys, 10);
  EXPECT_EQ(s[sys.index("F")].c[10], Rational(Integer(5767537729LL), Integer(14175)));
}

TEST(Series, Permutations) {
  auto sys = normalize(parse_spec("P = Set(Cyc(Z));"));
  auto s = expand_coefficients(sys, 30);
  for (int n = 0; n <= 30; ++n) EXPECT_EQ(s[0].c[n], 1) << n;
}

TEST(Series, MethodsAgreeOnCorpus) {
  for (const auto& f : corpus_files()) {
    auto sys = normalize(parse_spec_file(f));
    if (!well_founded(sys)) continue;
    auto a = expand_coefficients(sys, 30, SeriesMethod::Recurrence);
    auto b = expand_coefficients(sys, 30, SeriesMethod::FixedPoint);
    for (int i = 0; i < sys.size(); ++i) EXPECT_EQ(a[i].c, b[i].c) << f << " " << sys.eqs[i].name;
  }
}

TEST(Series, NormalFormPreservesCoefficients) {
  for (const auto& f : corpus_files()) {
    auto spec = parse_spec_file(f);
    auto sys = normalize(spec);
    if (!well_founded(sys)) continue;
    auto a = expand_coefficients(sys, 30);
    auto ref = oracle::coefficients(spec, 30);
    for (const auto& name : sys.original) EXPECT_EQ(a[sys.index(name)].c, ref.at(name)) << f << " " << name;
  }
}

TEST(Series, NonnegativeCoefficients) {
  for (const auto& f : corpus_files()) {
    auto sys = normalize(parse_spec_file(f));
    if (!well_founded(sys)) continue;
    auto a = expand_coefficients(sys, 60);
    for (const auto& s : a)
      for (const auto& c : s.c) EXPECT_GE(c, 0) << f;
  }
}

TEST(Series, LeadingTermsMatchFirstNonzeroCoefficient) {
  for (const auto& f : corpus_files()) {
    auto sys = normalize(parse_spec_file(f));
    auto wf = leading_terms(sys);
    if (!wf.ok()) continue;
    int maxv = 0;
    for (const auto& t : wf.terms)
      if (!t.is_zero()) maxv = std::max(maxv, *t.valuation);
    auto a = expand_coefficients(sys, maxv + 1);
    for (int i = 0; i < sys.size(); ++i) {
      int first = -1;
      for (int n = 0; n <= maxv + 1 && first < 0; ++n)
        if (a[i].c[n] != 0) first = n;
      if (wf.terms[i].is_zero()) {
        EXPECT_EQ(first, -1) << f << " " << sys.eqs[i].name;
      } else {
        EXPECT_EQ(first, *wf.terms[i].valuation) << f << " " << sys.eqs[i].name;
        EXPECT_EQ(a[i].c[first], wf.terms[i].count) << f << " " << sys.eqs[i].name;
      }
    }
  }
}

TEST(Series, RejectsIllFounded) {
  EXPECT_THROW(expand_coefficients(load_normal("badforest.spec"), 10), NotWellFoundedError);
  EXPECT_THROW(expand_coefficients(load_normal("badforest2.spec"), 10), NotWellFoundedError);
}

TEST(EvalTruncation, AtZero) {
  auto sys = load_normal("forest.spec");
  auto s = expand_coefficients(sys, 10);
  for (const auto& t : s) EXPECT_EQ(eval_truncation(t, 0), t.c[0]);
}

TEST(EvalTruncation, CatalanBelowClosedForm) {
  auto sys = normalize(parse_spec("B = Z + B*B;"));
  auto s = expand_coefficients(sys, 6);
  Rational v = eval_truncation(s[0], Rational(1, 5));
  // closed form (1 - sqrt(1 - 4a))/2 at a = 1/5 is (1 - sqrt(1/5))/2 = 0.27639320225...
  EXPECT_LT(v, Rational(Integer("27639320225"), Integer("100000000000")));
  EXPECT_GT(v, Rational(27, 100));
}

TEST(EvalTruncation, PartialSumsIncrease) {
  auto sys = load_normal("forest.spec");
  auto s = expand_coefficients(sys, 30);
  Rational a(17, 100);
  int F = sys.index("F");
  Rational prev = -1;
  for (int N = 0; N <= 30; ++N) {
    SeriesTruncation t;
    t.c.assign(s[F].c.begin(), s[F].c.begin() + N + 1);
    Rational v = eval_truncation(t, a);
    EXPECT_GE(v, prev);
    prev = v;
  }
}
