// Small hand-written formulas shared by the unit tests and the acceptance
// binary.
#pragma once

#include <cstddef>
#include <vector>

namespace qbfcert::fixtures {

/// forall u exists e. (-u | e) & (u | -e)
inline constexpr const char* kUeIff = "p cnf 2 2\na 1 0\ne 2 0\n-1 2 0\n1 -2 0\n";

struct FalsityFixture {
  const char* name;
  const char* qdimacs;
  int expected_case;
};

/// Formulas whose equivalence classes prove falsity on their own.
inline std::vector<FalsityFixture> els_falsity() {
  return {
      {"case1-universal-cycle", "p cnf 3 3\na 1 2 0\ne 3 0\n-1 2 0\n-2 1 0\n1 3 0\n", 1},
      {"case1", "p cnf 4 4\na 1 2 0\ne 3 4 0\n-1 3 0\n-3 2 0\n-2 4 0\n-4 1 0\n", 1},
      {"case1-chain", "p cnf 5 6\na 1 0\ne 2 0\na 3 0\ne 4 5 0\n-1 2 0\n-2 3 0\n-3 4 0\n-4 5 0\n-5 1 0\n1 2 4 0\n", 1},
      {"case1-complementary", "p cnf 3 4\na 1 0\ne 2 3 0\n-1 2 0\n-2 -1 0\n1 3 0\n-3 1 0\n", 1},
      {"case2", "p cnf 2 2\ne 1 0\na 2 0\n-1 2 0\n-2 1 0\n", 2},
      {"case2-chain", "p cnf 4 4\ne 1 2 0\na 3 0\ne 4 0\n-1 2 0\n-2 3 0\n-3 4 0\n-4 1 0\n", 2},
      {"case3", "p cnf 2 4\ne 1 2 0\n-1 2 0\n-2 -1 0\n1 -2 0\n2 1 0\n", 3},
      {"case3-chain", "p cnf 4 7\na 1 0\ne 2 3 4 0\n-2 3 0\n-3 4 0\n-4 -2 0\n2 -3 0\n3 -4 0\n4 2 0\n1 2 3 0\n", 3},
  };
}

struct TechniqueFixture {
  const char* name;
  const char* qdimacs;
  const char* techniques;
  const char* step;  // keyword of a trace step the technique must emit
  bool expect_true;
};

/// One true and one false formula per technique, each small enough for the
/// oracles and built so that the technique fires.
inline std::vector<TechniqueFixture> technique_fixtures() {
  return {
      {"subsumption-true", "p cnf 3 3\ne 1 2 3 0\n1 2 0\n1 2 3 0\n-1 3 0\n", "subsumption", "SUBS", true},
      {"subsumption-false", "p cnf 3 5\na 1 0\ne 2 3 0\n2 3 0\n1 2 3 0\n-2 3 0\n2 -3 0\n-2 -3 0\n", "subsumption",
       "SUBS", false},
      {"selfsub-true", "p cnf 3 2\ne 1 2 3 0\n1 2 3 0\n-1 2 0\n", "selfsub", "RES", true},
      {"selfsub-universal-pivot", "p cnf 3 2\ne 1 0\na 2 0\ne 3 0\n1 2 3 0\n1 -2 0\n", "selfsub", "RES", true},
      {"selfsub-false", "p cnf 3 4\na 1 0\ne 2 3 0\n1 2 3 0\n-2 3 0\n1 -3 0\n-1 -3 0\n", "selfsub", "RES", false},
      {"unit-true", "p cnf 2 2\ne 1 2 0\n1 0\n-1 2 0\n", "unit", "RES", true},
      {"unit-false", "p cnf 3 3\na 1 0\ne 2 3 0\n2 0\n-2 3 0\n-3 1 0\n", "unit", "RES", false},
      {"upure-true", "p cnf 3 2\na 1 0\ne 2 3 0\n1 2 3 0\n-2 -3 0\n", "pure", "UPURE", true},
      {"upure-inner-true", "p cnf 3 3\ne 1 0\na 2 0\ne 3 0\n1 2 3 0\n-1 -3 0\n1 -3 0\n", "pure", "UPURE", true},
      {"upure-false", "p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n1 -2 0\n", "pure", "UPURE", false},
      {"bce-true", kUeIff, "bce", "BLOCK", true},
      {"bce-false", "p cnf 3 4\ne 1 2 3 0\n1 2 0\n-1 2 0\n-2 0\n3 1 0\n", "bce", "BLOCK", false},
      {"ve-true", kUeIff, "ve", "VE", true},
      {"ve-universal-true", "p cnf 3 3\na 1 0\ne 2 3 0\n1 2 0\n-2 3 0\n-1 -3 0\n", "ve", "VE", true},
      {"ve-false", "p cnf 2 3\ne 1 2 0\n1 2 0\n-1 2 0\n-2 0\n", "ve", "VE", false},
      {"els-true", "p cnf 4 4\ne 1 2 3 4 0\n-1 2 0\n-2 1 0\n1 3 0\n-2 4 0\n", "els", "ELSSUB", true},
      {"els-universal-rep-true", kUeIff, "els", "ELSSUB", true},
      {"els-false", "p cnf 4 10\ne 1 2 3 4 0\n-1 2 0\n-2 1 0\n1 3 4 0\n1 3 -4 0\n1 -3 4 0\n2 -3 -4 0\n"
       "-1 3 4 0\n-1 3 -4 0\n-2 -3 4 0\n-2 -3 -4 0\n", "els", "ELSSUB",
       false},
      {"els-universal-rep-false", "p cnf 3 4\na 1 0\ne 2 3 0\n-1 2 0\n1 -2 0\n2 3 0\n2 -3 0\n", "els", "ELSSUB",
       false},
  };
}

}  // namespace qbfcert::fixtures
