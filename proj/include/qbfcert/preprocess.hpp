#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qbfcert/formula.hpp"
#include "qbfcert/trace.hpp"

namespace qbfcert {

struct PreprocessConfig {
  bool unit = true;
  bool pure = true;
  bool subsumption = true;
  bool self_subsumption = true;
  bool els = true;
  bool bce = true;
  bool ve = true;
  /// VE is applied only if it adds at most this many clauses net.
  std::int64_t ve_growth = 0;
  /// Skip VE candidates with more than this many candidate resolvents.
  std::size_t ve_max_resolvents = 4096;
  /// Scheduler rounds; 0 means run to fixpoint.
  std::size_t max_iterations = 0;
};

/// Comma-separated technique names (unit, pure, subsumption, selfsub, els,
/// bce, ve, or all/none). Unlisted techniques are disabled. Throws
/// std::invalid_argument on unknown names.
PreprocessConfig parse_techniques(std::string_view list, PreprocessConfig base = {});

/// Applies techniques to a formula in place, recording every change as a
/// trace step. Each step is validated by apply_step before it is recorded,
/// so the trace always replays.
class Preprocessor {
 public:
  Preprocessor(Formula& f, Trace& trace, PreprocessConfig config = {});

  // Each returns true if the formula changed.
  bool unit_propagate();
  bool subsumption();
  bool self_subsumption();
  bool pure_literals();
  bool blocked_clauses();
  bool eliminate_variables();
  bool eliminate_variable(Var x);
  bool equivalent_literals();
  /// Drops prefix variables without occurrences.
  bool drop_vanished();

  /// Runs the enabled techniques in the order unit, pure, subsumption,
  /// selfsub, els, bce, ve until nothing changes or a verdict is known.
  void run_to_fixpoint();

  /// False once a clause without existential literals appears or an
  /// equivalence class proves falsity; true once the matrix is empty.
  std::optional<bool> verdict() const;

 private:
  bool unit_round();
  void emit(TraceStep step);
  bool stopped() const { return conflict_ || refuted_; }
  void note_clause(const LitVec& lits);

  Formula& f_;
  Trace& trace_;
  PreprocessConfig config_;
  // set when the input holds a clause without existential literals; passes
  // called directly still run, the scheduler does not
  bool input_conflict_ = false;
  bool conflict_ = false;
  bool refuted_ = false;
};

struct PreprocessResult {
  Formula formula;
  Trace trace;
  std::optional<bool> verdict;
};

/// Copies `f`, runs the preprocessor to fixpoint and fills both digests.
PreprocessResult preprocess(const Formula& f, const PreprocessConfig& config = {});

}  // namespace qbfcert
