#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qbfcert/formula.hpp"

namespace qbfcert {

/// A clause as recorded in a trace step: its id and its literals at that time.
struct ClauseRecord {
  ClauseId id = 0;
  LitVec lits;
  friend bool operator==(const ClauseRecord&, const ClauseRecord&) = default;
};

/// Clause `new_id` = resolvent of antecedent1 (containing `pivot`) and
/// antecedent2 (containing ~pivot).
struct AddResolvent {
  ClauseId new_id = 0;
  LitVec lits;
  ClauseId antecedent1 = 0;
  ClauseId antecedent2 = 0;
  Lit pivot;
  friend bool operator==(const AddResolvent&, const AddResolvent&) = default;
};

struct DeleteSubsumed {
  ClauseId victim = 0;
  ClauseId witness = 0;
  friend bool operator==(const DeleteSubsumed&, const DeleteSubsumed&) = default;
};

/// `blocking_lit` is blocked in the victim; `witnesses` holds every k in the
/// victim with k < blocking_lit and ~k in some clause containing ~blocking_lit.
struct DeleteBlocked {
  ClauseId victim = 0;
  LitVec victim_lits;
  Lit blocking_lit;
  LitVec witnesses;
  friend bool operator==(const DeleteBlocked&, const DeleteBlocked&) = default;
};

struct UniversalRewrite {
  ClauseId before = 0;
  ClauseId after = 0;
  LitVec lits_after;
  friend bool operator==(const UniversalRewrite&, const UniversalRewrite&) = default;
};

/// Pure universal literal removed from every clause holding it.
struct RemoveUniversalLit {
  Lit lit;
  std::vector<UniversalRewrite> affected;
  friend bool operator==(const RemoveUniversalLit&, const RemoveUniversalLit&) = default;
};

/// Final step of eliminating `var`: deletes every clause mentioning it.
struct DeleteVE {
  Var var = 0;
  std::vector<ClauseRecord> pos_clauses;
  std::vector<ClauseRecord> neg_clauses;
  friend bool operator==(const DeleteVE&, const DeleteVE&) = default;
};

/// `new_id == 0` marks a rewrite that became tautologous and was dropped.
struct ClauseRewrite {
  ClauseId old_id = 0;
  LitVec old_lits;
  ClauseId new_id = 0;
  LitVec new_lits;
  friend bool operator==(const ClauseRewrite&, const ClauseRewrite&) = default;
};

struct ElsSubst {
  LitVec component;
  Lit representative;
  std::vector<ClauseRecord> binary_clauses;
  std::vector<ClauseRewrite> rewrites;
  friend bool operator==(const ElsSubst&, const ElsSubst&) = default;
};

/// An equivalence class proving falsity. Case 1: two universal literals;
/// case 2: existential < universal; case 3: complementary existentials.
struct ElsRefute {
  int falsity_case = 0;
  LitVec pivot_literals;
  std::vector<ClauseRecord> binary_clauses;
  friend bool operator==(const ElsRefute&, const ElsRefute&) = default;
};

struct DropVar {
  Var var = 0;
  friend bool operator==(const DropVar&, const DropVar&) = default;
};

using TraceStep =
    std::variant<AddResolvent, DeleteSubsumed, DeleteBlocked, RemoveUniversalLit, DeleteVE, ElsSubst, ElsRefute, DropVar>;

struct Trace {
  std::vector<TraceStep> steps;
  std::uint64_t digest_in = 0;
  std::uint64_t digest_out = 0;
  friend bool operator==(const Trace&, const Trace&) = default;
};

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Resolvent of `a` (holding `pivot`) and `b` (holding ~pivot). Returns
/// false if the resolution is undefined (pivot missing or the union is
/// tautologous).
bool resolve(std::span<const Lit> a, std::span<const Lit> b, Lit pivot, LitVec& out);

/// Blocking witnesses of `lit` in `clause` w.r.t. the live clauses of `f`.
/// Returns false if `lit` is not blocked.
bool blocked_witnesses(const Formula& f, std::span<const Lit> clause, Lit lit, ClauseId self, LitVec& witnesses);

/// Both-sided prefix side-condition for eliminating `x`, comparing
/// quantifier blocks: x counts as the last variable of its block.
bool ve_side_condition(const Prefix& p, Var x, const std::vector<ClauseRecord>& pos,
                       const std::vector<ClauseRecord>& neg);

/// Applies one step, validating every recorded invariant against `f`.
/// Throws TraceError on dangling ids or literal-set mismatches.
void apply_step(Formula& f, const TraceStep& step);
/// Replays the whole trace and checks both digests.
Formula replay(const Formula& initial, const Trace& trace);

void write_trace(std::ostream& out, const Trace& t);
std::string to_string(const Trace& t);
/// Throws ParseError carrying the offending line number.
Trace parse_trace(std::istream& in);
Trace parse_trace_string(const std::string& text);

const char* step_keyword(const TraceStep& step);

}  // namespace qbfcert
