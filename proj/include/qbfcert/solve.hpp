#pragma once

#include <cstddef>
#include <stdexcept>

#include "qbfcert/certs.hpp"
#include "qbfcert/formula.hpp"

namespace qbfcert {

/// Exact game-tree evaluation in prefix order with early cutoffs on
/// falsified and satisfied matrices. Throws std::length_error if the prefix
/// has more than `max_vars` variables.
bool brute_force_game(const Formula& f, std::size_t max_vars = 24);

struct SolveResult {
  bool verdict = false;
  /// Refutation when false, Model when true.
  Certificate certificate;
};

struct DpOptions {
  /// Abort with std::runtime_error once the working clause set exceeds this.
  std::size_t max_clauses = 2'000'000;
};

/// Davis-Putnam style solver working from the innermost quantifier block
/// outwards: universal blocks are removed by universal reduction, existential
/// variables by full resolution (last variable of the block first). The
/// refutation is the lineage of the first empty clause; the model is built by
/// replaying the eliminations outwards with psi_x = M'(clauses that held ~x).
SolveResult dp_solve(const Formula& f, const DpOptions& options = {});

}  // namespace qbfcert
