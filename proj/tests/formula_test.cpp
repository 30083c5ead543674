#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "qbfcert/formula.hpp"

namespace qbfcert {
namespace {

LitVec lits(std::initializer_list<long> xs) {
  LitVec out;
  for (long x : xs) out.push_back(Lit::from_dimacs(x));
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Lit, PackingAndDimacs) {
  const Lit a = Lit::from_dimacs(-7);
  EXPECT_EQ(a.var(), 7u);
  EXPECT_TRUE(a.is_negated());
  EXPECT_EQ(a.dimacs(), -7);
  EXPECT_EQ(~a, Lit::positive(7));
  EXPECT_EQ(~~a, a);
  EXPECT_THROW(Lit::from_dimacs(0), FormulaError);
}

TEST(Clause, NormalizeSortsDedupsAndDetectsTautology) {
  LitVec c{Lit::positive(3), Lit::negative(1), Lit::positive(3)};
  EXPECT_TRUE(normalize_clause(c));
  EXPECT_EQ(c, (LitVec{Lit::negative(1), Lit::positive(3)}));
  LitVec t{Lit::positive(2), Lit::negative(2)};
  EXPECT_FALSE(normalize_clause(t));
  EXPECT_TRUE(is_subset(lits({1}), lits({1, -2})));
  EXPECT_FALSE(is_subset(lits({2}), lits({1, -2})));
}

TEST(Parse, UeIff) {
  Formula f = oracle::formula(fixtures::kUeIff);
  ASSERT_EQ(f.prefix().blocks().size(), 2u);
  EXPECT_EQ(f.prefix().blocks()[0], (QuantBlock{Quantifier::kForall, {1}}));
  EXPECT_EQ(f.prefix().blocks()[1], (QuantBlock{Quantifier::kExists, {2}}));
  EXPECT_EQ(f.live_ids(), (std::vector<ClauseId>{1, 2}));
  EXPECT_EQ(f.lits(1), lits({-1, 2}));
  EXPECT_EQ(f.lits(2), lits({1, -2}));
}

TEST(Parse, EmptyFormula) {
  Formula f = oracle::formula("p cnf 0 0\n");
  EXPECT_TRUE(f.empty_matrix());
  EXPECT_TRUE(f.prefix().blocks().empty());
  EXPECT_EQ(to_qdimacs(f), "p cnf 0 0\n");
}

TEST(Parse, TautologyDroppedAtLoad) {
  Formula f = oracle::formula("p cnf 1 1\ne 1 0\n1 -1 0\n");
  EXPECT_TRUE(f.empty_matrix());
}

TEST(Parse, DuplicateLiteralsMerged) {
  Formula f = oracle::formula("p cnf 2 1\ne 1 2 0\n1 2 1 0\n");
  EXPECT_EQ(f.lits(1), lits({1, 2}));
}

TEST(Parse, FreeVariablesBecomeOutermostExistentials) {
  Formula f = oracle::formula("p cnf 3 1\na 2 0\n1 2 3 0\n");
  ASSERT_EQ(f.prefix().blocks().size(), 2u);
  EXPECT_EQ(f.prefix().blocks()[0].quant, Quantifier::kExists);
  EXPECT_EQ(f.prefix().blocks()[0].vars, (std::vector<Var>{1, 3}));
  EXPECT_TRUE(f.prefix().less(Var{3}, Var{2}));
}

TEST(Parse, AdjacentEqualQuantifierLinesMerge) {
  Formula f = oracle::formula("p cnf 3 1\ne 1 0\ne 2 0\na 3 0\n1 2 3 0\n");
  ASSERT_EQ(f.prefix().blocks().size(), 2u);
  EXPECT_EQ(f.prefix().blocks()[0].vars, (std::vector<Var>{1, 2}));
}

TEST(Parse, VariableBeyondBoundWarnsAndExtends) {
  std::vector<std::string> warnings;
  Formula f = parse_qdimacs_string("p cnf 1 1\ne 1 0\n1 5 0\n", &warnings);
  EXPECT_FALSE(warnings.empty());
  EXPECT_GE(f.max_var(), 5u);
  EXPECT_TRUE(f.prefix().contains(5));
}

TEST(Parse, ErrorsCarryLineNumbers) {
  try {
    parse_qdimacs_string("p cnf 2 1\ne 1 2 0\n1 x 0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_qdimacs_string("e 1 0\n1 0\n"), ParseError);
  EXPECT_THROW(parse_qdimacs_string("p cnf 1 1\ne 1 0\n1\n"), ParseError);
  EXPECT_THROW(parse_qdimacs_string("p cnf 1 1\ne 1 0\na 1 0\n1 0\n"), ParseError);
  EXPECT_THROW(parse_qdimacs_string("p cnf 1 1\n1 0\ne 1 0\n"), ParseError);
}

TEST(Write, RoundTripIsIsomorphic) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    Formula f = gen_random_qcnf(oracle::corpus_params(i));
    const std::string text = to_qdimacs(f);
    Formula g = parse_qdimacs_string(text);
    EXPECT_TRUE(isomorphic(f, g)) << i;
    EXPECT_EQ(to_qdimacs(g), text) << i;
    EXPECT_EQ(digest(f), digest(g));
  }
}

TEST(Write, UeIffText) { EXPECT_EQ(to_qdimacs(oracle::formula(fixtures::kUeIff)), fixtures::kUeIff); }

TEST(Prefix, LiteralLess) {
  Formula ex = oracle::formula(fixtures::kUeIff);
  EXPECT_TRUE(literal_less(ex.prefix(), Lit::negative(1), Lit::positive(2)));
  EXPECT_FALSE(literal_less(ex.prefix(), Lit::positive(2), Lit::positive(2)));
  Formula fam = gen_iff_family(2);  // u1=1 e1=2 u2=3 e2=4
  EXPECT_TRUE(literal_less(fam.prefix(), Lit::positive(2), Lit::positive(3)));
  EXPECT_FALSE(literal_less(fam.prefix(), Lit::positive(4), Lit::positive(3)));
  EXPECT_THROW(literal_less(fam.prefix(), Lit::positive(9), Lit::positive(1)), FormulaError);
}

TEST(Prefix, OrderIsStrictAndTotalOnVariables) {
  Formula f = gen_random_qcnf(oracle::corpus_params(17));
  const Prefix& p = f.prefix();
  auto vars = p.vars_in_order();
  for (Var a : vars)
    for (Var b : vars) {
      EXPECT_EQ(p.less(a, b) + p.less(b, a) + (a == b), 1);
      for (Var c : vars)
        if (p.less(a, b) && p.less(b, c)) EXPECT_TRUE(p.less(a, c));
    }
}

TEST(Prefix, RemovalKeepsRelativeOrder) {
  Formula f = gen_iff_family(3);
  Prefix& p = f.prefix();
  p.remove_var(3);
  EXPECT_FALSE(p.contains(3));
  EXPECT_EQ(p.vars_in_order(), (std::vector<Var>{1, 2, 4, 5, 6}));
  EXPECT_TRUE(p.less(Var{2}, Var{4}));
  EXPECT_THROW(p.position(3), FormulaError);
}

TEST(Formula, IdsAreNeverReusedAndDeadClausesStayReadable) {
  Formula f = oracle::formula("p cnf 2 2\ne 1 2 0\n1 2 0\n-1 0\n");
  f.remove_clause(1);
  EXPECT_FALSE(f.is_live(1));
  EXPECT_EQ(f.lits(1), lits({1, 2}));
  EXPECT_EQ(f.add_clause(lits({2})), 3u);
  EXPECT_EQ(f.num_clauses(), 2u);
  EXPECT_THROW(f.remove_clause(1), FormulaError);
  EXPECT_THROW(f.add_clause(lits({1, -1})), FormulaError);
  EXPECT_THROW(f.add_clause(lits({7})), FormulaError);
}

TEST(Formula, OccurrencesTrackLiveClauses) {
  Formula f = oracle::formula("p cnf 2 3\ne 1 2 0\n1 2 0\n1 -2 0\n-1 0\n");
  EXPECT_EQ(f.occurrences(Lit::positive(1)).size(), 2u);
  f.remove_clause(2);
  EXPECT_EQ(f.occurrences(Lit::positive(1)).size(), 1u);
  EXPECT_EQ(f.occurrence_count(2), 1u);
  EXPECT_EQ(f.total_literals(), 3u);
}

TEST(EvalMatrix, Examples) {
  Formula f = oracle::formula(fixtures::kUeIff);
  Assignment a;
  a.set(1, true);
  a.set(2, true);
  EXPECT_TRUE(eval_matrix(f, a));
  a.set(2, false);
  EXPECT_FALSE(eval_matrix(f, a));
  a.unset(2);
  EXPECT_THROW(eval_matrix(f, a), FormulaError);
  Formula empty = oracle::formula("p cnf 1 0\ne 1 0\n");
  Assignment b;
  b.set(1, false);
  EXPECT_TRUE(eval_matrix(empty, b));
}

TEST(Digest, DependsOnContent) {
  Formula a = oracle::formula(fixtures::kUeIff);
  Formula b = oracle::formula("p cnf 2 2\na 1 0\ne 2 0\n-1 2 0\n1 2 0\n");
  EXPECT_NE(digest(a), digest(b));
  EXPECT_EQ(digest_hex(0x1234).size(), 16u);
}

}  // namespace
}  // namespace qbfcert
