#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qbfcert/families.hpp"
#include "qbfcert/solve.hpp"

namespace qbfcert {
namespace {

TEST(IffFamily, ShapeForSmallN) {
  Formula f1 = gen_iff_family(1);
  EXPECT_EQ(to_qdimacs(f1), "p cnf 2 2\na 1 0\ne 2 0\n-1 2 0\n1 -2 0\n");

  Formula f2 = gen_iff_family(2);
  EXPECT_EQ(f2.prefix().num_vars(), 4u);
  EXPECT_EQ(f2.num_clauses(), 4u);
  const auto& blocks = f2.prefix().blocks();
  ASSERT_EQ(blocks.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(blocks[i].quant, i % 2 == 0 ? Quantifier::kForall : Quantifier::kExists);
    EXPECT_EQ(blocks[i].vars, std::vector<Var>{static_cast<Var>(i + 1)});
  }
}

TEST(IffFamily, TrueUpToEight) {
  for (std::uint32_t n = 1; n <= 8; ++n) {
    Formula f = gen_iff_family(n);
    EXPECT_EQ(f.num_clauses(), 2 * n);
    EXPECT_TRUE(brute_force_game(f)) << n;
  }
  EXPECT_TRUE(oracle::value(gen_iff_family(3)));
}

TEST(IffFamily, RejectsZero) { EXPECT_THROW(gen_iff_family(0), std::invalid_argument); }

TEST(RandomQcnf, Deterministic) {
  RandomQcnfParams p;
  p.seed = 1;
  p.num_vars = 6;
  p.num_clauses = 10;
  EXPECT_EQ(to_qdimacs(gen_random_qcnf(p)), to_qdimacs(gen_random_qcnf(p)));
  RandomQcnfParams q = p;
  q.seed = 2;
  EXPECT_NE(to_qdimacs(gen_random_qcnf(p)), to_qdimacs(gen_random_qcnf(q)));
}

TEST(RandomQcnf, ZeroUniversalRatioGivesPlainSat) {
  RandomQcnfParams p;
  p.universal_ratio = 0.0;
  Formula f = gen_random_qcnf(p);
  for (Var v : f.prefix().vars_in_order()) EXPECT_TRUE(f.prefix().is_existential(v));
  EXPECT_EQ(f.prefix().blocks().size(), 1u);
}

TEST(RandomQcnf, RespectsParameters) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    RandomQcnfParams p;
    p.seed = seed;
    p.num_vars = 8;
    p.num_clauses = 30;
    p.min_len = 2;
    p.max_len = 4;
    p.universal_ratio = 0.6;
    Formula f = gen_random_qcnf(p);
    EXPECT_EQ(f.num_clauses(), 30u);
    EXPECT_EQ(f.prefix().num_vars(), 8u);
    for (ClauseId id : f.live_ids()) {
      const auto& c = f.lits(id);
      EXPECT_GE(c.size(), 2u);
      EXPECT_LE(c.size(), 4u);
      EXPECT_TRUE(std::any_of(c.begin(), c.end(), [&](Lit l) { return f.prefix().is_existential(l); }));
    }
  }
}

TEST(RandomQcnf, AllowsUniversalOnlyClausesWhenAsked) {
  RandomQcnfParams p;
  p.universal_ratio = 1.0;
  p.existential_per_clause = false;
  Formula f = gen_random_qcnf(p);
  for (Var v : f.prefix().vars_in_order()) EXPECT_TRUE(f.prefix().is_universal(v));
  EXPECT_FALSE(brute_force_game(f));
  p.existential_per_clause = true;
  Formula g = gen_random_qcnf(p);
  EXPECT_TRUE(g.prefix().is_existential(p.num_vars));
}

TEST(RandomQcnf, RejectsInfeasibleParameters) {
  RandomQcnfParams p;
  p.num_vars = 0;
  EXPECT_THROW(gen_random_qcnf(p), std::invalid_argument);
  p = {};
  p.min_len = 5;
  p.max_len = 3;
  EXPECT_THROW(gen_random_qcnf(p), std::invalid_argument);
  p = {};
  p.num_vars = 3;
  p.max_len = 4;
  EXPECT_THROW(gen_random_qcnf(p), std::invalid_argument);
  p = {};
  p.universal_ratio = 1.5;
  EXPECT_THROW(gen_random_qcnf(p), std::invalid_argument);
}

}  // namespace
}  // namespace qbfcert
