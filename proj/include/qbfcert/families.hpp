#pragma once

#include <cstdint>

#include "qbfcert/formula.hpp"

namespace qbfcert {

/// forall u1 exists e1 ... forall un exists en . AND_i (-ui | ei) & (ui | -ei),
/// with ui = 2i-1 and ei = 2i. True for every n; n = 0 is rejected.
Formula gen_iff_family(std::uint32_t n);

struct RandomQcnfParams {
  std::uint64_t seed = 1;
  std::uint32_t num_vars = 10;
  std::uint32_t num_clauses = 20;
  std::uint32_t min_len = 2;
  std::uint32_t max_len = 4;
  double universal_ratio = 0.3;
  /// Resample clauses until each has an existential literal; if no variable
  /// drew existential, the last one is made existential.
  bool existential_per_clause = true;
};

/// Seeded random prenex CNF. Each variable is universal with probability
/// `universal_ratio`; consecutive equal quantifiers form one block. Clause
/// literals are over distinct variables, so no clause is tautologous.
/// Uses std::mt19937_64; identical seeds give identical formulas on one
/// standard library implementation.
Formula gen_random_qcnf(const RandomQcnfParams& params);

}  // namespace qbfcert
