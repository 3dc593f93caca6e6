#include <gtest/gtest.h>

#include "combasym/wellfounded.hpp"
#include "test_util.hpp"

using namespace combasym;

TEST(LeadingTerms, ForestTrace) {
  auto sys = load_normal("forest.spec");
  auto wf = leading_terms(sys);
  ASSERT_TRUE(wf.ok());
  EXPECT_EQ(wf.sweeps, 6);
  ASSERT_EQ(wf.trace.size(), 6u);
  const char* rows[] = {
      "[1, Z, 0, 1, 0, 1, 0, 1, 0, Z^3, 0, 1, 0, 1, Z, 0]",
      "[1, Z, 0, 1, 0, 1, Z, 1, Z^3, Z^3, Z, 1, Z, 1, Z, Z^2]",
      "[1, Z, Z^3, 1, Z, 1, Z, 1, Z, Z^3, Z, 1, Z, 1, Z, Z^2]",
      "[1, Z, Z, 1, Z, 1, Z, 1, Z, Z^3, Z, 1, Z, 1, Z, Z^2]",
      "[1, 2Z, Z, 1, Z, 1, Z, 1, Z, Z^3, Z, 1, Z, 1, Z, Z^2]",
      "[1, 2Z, Z, 1, Z, 1, Z, 1, Z, Z^3, Z, 1, Z, 1, Z, Z^2]",
  };
  for (int k = 0; k < 6; ++k) EXPECT_EQ(to_string(wf.trace[k]), rows[k]) << "sweep " << k + 1;
  EXPECT_EQ(to_string(wf.terms), rows[5]);
}

TEST(LeadingTerms, Atom) {
  auto wf = leading_terms(normalize(parse_spec("Y = Z;")));
  ASSERT_TRUE(wf.ok());
  EXPECT_EQ(wf.terms[0], (LeadingTerm{1, 1}));
}

TEST(LeadingTerms, GuardFailure) {
  auto sys = load_normal("badforest.spec");
  auto wf = leading_terms(sys);
  EXPECT_EQ(wf.status, WellFoundedness::Status::GuardFailure);
  EXPECT_EQ(sys.eqs[wf.failing_equation].name, "_N3");
  EXPECT_EQ(wf.sweeps, 3);
  // after the second sweep the leading term of T_g is 1
  EXPECT_EQ(to_string(wf.terms), "[1, Z, 0, 1, 0, 1, 1, 1, Z^3, Z^3, Z, 1, Z, 1, 1, Z]");
}

TEST(LeadingTerms, NoFixedPoint) {
  auto sys = load_normal("badforest2.spec");
  ASSERT_EQ(sys.size(), 17);
  auto wf = leading_terms(sys);
  EXPECT_EQ(wf.status, WellFoundedness::Status::NoFixedPoint);
  EXPECT_EQ(wf.sweeps, 18);
  EXPECT_FALSE(wf.terms == wf.previous);
  // T_b and N3 keep growing
  int n3 = sys.index("N3");
  EXPECT_EQ(wf.terms[n3].valuation, 0);
  EXPECT_EQ(wf.previous[n3].valuation, 0);
  EXPECT_EQ(wf.terms[n3].count, wf.previous[n3].count + 1);
}

TEST(LeadingTerms, Idempotent) {
  for (const char* name : {"forest.spec", "burris.spec", "forest_normal.spec"}) {
    auto sys = load_normal(name);
    auto wf = leading_terms(sys);
    ASSERT_TRUE(wf.ok()) << name;
    auto again = leading_term_update(sys, wf.terms);
    ASSERT_TRUE(again.has_value());
    EXPECT_EQ(*again, wf.terms) << name;
  }
}

TEST(LeadingTerms, RationalCounts) {
  // Set(Z*Z) leading term beyond constant: Z^2/2 in Set(Z^2) - 1
  auto sys = normalize(parse_spec("A = Cyc(Z*Z + Z*Z); B = A*A;"));
  auto wf = leading_terms(sys);
  ASSERT_TRUE(wf.ok());
  EXPECT_EQ(to_string(wf.terms[sys.index("A")]), "2Z^2");
  EXPECT_EQ(to_string(wf.terms[sys.index("B")]), "4Z^4");
}

TEST(StripZero, ZeroCoordinateRemoved) {
  auto sys = normalize(parse_spec("Y1 = Z*Y1; Y2 = Z;"));
  auto wf = leading_terms(sys);
  ASSERT_TRUE(wf.ok());
  EXPECT_TRUE(wf.terms[0].is_zero());
  auto s = strip_zero_coords(sys, wf.terms);
  ASSERT_EQ(s.size(), 1);
  EXPECT_EQ(s.to_string(), "Y2 = Z;\n");
  EXPECT_EQ(s.original, (std::vector<std::string>{"Y2"}));
  EXPECT_EQ(s.removed, (std::vector<std::string>{"Y1"}));
}

TEST(StripZero, ForestUnchanged) {
  auto sys = load_normal("forest.spec");
  auto s = strip_zero_coords(sys, leading_terms(sys).terms);
  EXPECT_EQ(s.to_string(), sys.to_string());
}

TEST(StripZero, EverythingZero) {
  auto sys = normalize(parse_spec("Y = Y + Z*Y;"));
  auto wf = leading_terms(sys);
  ASSERT_TRUE(wf.ok());
  auto s = strip_zero_coords(sys, wf.terms);
  EXPECT_EQ(s.size(), 0);
}

TEST(StripZero, ZeroArgumentsRewritten) {
  auto sys = normalize(parse_spec("Y = Z*Y; A = Seq(Y) + Set(Y) + Y + Z;"));
  auto wf = leading_terms(sys);
  ASSERT_TRUE(wf.ok());
  auto s = strip_zero_coords(sys, wf.terms);
  EXPECT_EQ(s.to_string(), "A = _N1 + _N2 + Z;\n_N1 = 1;\n_N2 = 1;\n");
}

TEST(LeadingTerms, SetOfSequenceIsRejected) {
  // Seq(Z^3) contains the empty sequence, so Set(Seq(Z^3)) is not well founded
  auto sys = normalize(parse_spec("Y = Set(Z*Cyc(Z^2 + Z^2)*Set(Seq(Z^3)));"));
  auto wf = leading_terms(sys);
  EXPECT_EQ(wf.status, WellFoundedness::Status::GuardFailure);
  EXPECT_EQ(sys.eqs[wf.failing_equation].op, Op::Set);
}
