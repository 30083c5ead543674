#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "qbfcert/expr.hpp"
#include "qbfcert/formula.hpp"

namespace qbfcert {

// ---------------------------------------------------------------------------
// QU-resolution refutations

struct ProofNode {
  enum class Kind : std::uint8_t { kInput, kResolvent, kForallRed };
  Kind kind = Kind::kInput;
  LitVec lits;
  ClauseId clause_id = 0;    // kInput
  std::uint32_t left = 0;    // kResolvent: holds pivot; kForallRed: child
  std::uint32_t right = 0;   // kResolvent: holds ~pivot
  Lit pivot;                 // kResolvent

  static ProofNode input(ClauseId id, LitVec lits);
  static ProofNode resolvent(LitVec lits, std::uint32_t left, std::uint32_t right, Lit pivot);
  static ProofNode reduction(LitVec lits, std::uint32_t child);
  friend bool operator==(const ProofNode&, const ProofNode&) = default;
};

/// DAG in topological order; antecedents precede their consumers and the
/// last node is the root (the empty clause).
struct Refutation {
  std::vector<ProofNode> nodes;

  std::uint32_t add(ProofNode n) {
    nodes.push_back(std::move(n));
    return static_cast<std::uint32_t>(nodes.size() - 1);
  }
  std::uint32_t root() const { return static_cast<std::uint32_t>(nodes.size() - 1); }
  friend bool operator==(const Refutation&, const Refutation&) = default;
};

/// Keeps only nodes reachable from `root`, renumbered in topological order
/// with the root last. Accepts arbitrary (acyclic) index order on input.
Refutation compact(const Refutation& proof, std::uint32_t root);

enum class ProofFault {
  kNone,
  kEmptyProof,
  kBadAntecedent,      // index does not precede the node
  kUnknownVariable,
  kInputNotInFormula,
  kPivotMissing,
  kResolventUndefined, // complementary pair or pivot variable in the union
  kResolventMismatch,
  kInvalidReduction,   // removed literal not universal/reducible, or lits not a subset
  kRootNotEmpty,
};

const char* to_string(ProofFault fault);

struct ProofCheck {
  bool ok = false;
  ProofFault fault = ProofFault::kNone;
  std::uint32_t node = 0;
  std::string message;
};

/// Validates every node against the QU-resolution rules over `f`. Input
/// nodes are matched by literal set; clause ids are informational.
ProofCheck check_refutation(const Formula& f, const Refutation& proof);

/// Number of resolution steps.
std::size_t refutation_size(const Refutation& proof);

void write_refutation(std::ostream& out, const Refutation& proof);
std::string to_string(const Refutation& proof);
Refutation parse_refutation(std::istream& in);

// ---------------------------------------------------------------------------
// Strategy models

/// Each existential variable mapped to an expression over the universal
/// variables preceding it.
struct Model {
  std::map<Var, Expr> defs;

  const Expr* find(Var v) const {
    auto it = defs.find(v);
    return it == defs.end() ? nullptr : &it->second;
  }
  void set(Var v, Expr e) { defs.insert_or_assign(v, std::move(e)); }
};

/// Literal under the model: universal literals stay as variables, existential
/// ones are replaced by (negated) definitions. Throws FormulaError on a
/// missing definition.
Expr substitute_model(const Model& m, const Prefix& p, Lit l);
Expr substitute_model(const Model& m, const Prefix& p, std::span<const Lit> clause);
Expr substitute_model(const Model& m, const Formula& f);
/// Substitutes existential variables inside an arbitrary expression.
Expr substitute_model(const Model& m, const Prefix& p, const Expr& e);

enum class ModelVerdict { kAccept, kReject, kScopeViolation, kTooLarge };

struct ModelCheck {
  ModelVerdict verdict = ModelVerdict::kReject;
  /// Falsifying universal assignment (kReject), lexicographically smallest
  /// in prefix order.
  std::vector<std::pair<Var, bool>> counterexample;
  std::string message;
  bool ok() const { return verdict == ModelVerdict::kAccept; }
};

inline constexpr std::uint64_t kDefaultMaxEnum = std::uint64_t{1} << 20;

ModelCheck check_model(const Formula& f, const Model& m, std::uint64_t max_enum = kDefaultMaxEnum);

/// Binary AND gate list with free negation. Refs: constants, variables, or
/// earlier gates, each with a sign.
struct GateRef {
  enum class Kind : std::uint8_t { kConst, kVar, kGate };
  Kind kind = Kind::kConst;
  std::uint32_t index = 0;  // variable id, gate index, or constant value
  bool negated = false;
  friend bool operator==(const GateRef&, const GateRef&) = default;
};

struct GateList {
  std::vector<std::pair<GateRef, GateRef>> gates;
  std::map<Var, GateRef> defs;
};

/// And of k children becomes a chain of k-1 gates; Or(a,b,...) is encoded as
/// !And(!a,!b,...). Shared subexpressions yield shared gates.
GateList to_gates(const Model& m);
std::size_t model_size(const Model& m);

void write_model(std::ostream& out, const Model& m);
std::string to_string(const Model& m);
Model parse_model(std::istream& in);

// ---------------------------------------------------------------------------
// Term-resolution proofs

struct TermNode {
  enum class Kind : std::uint8_t { kModelGen, kResolvent, kExistsRed };
  Kind kind = Kind::kModelGen;
  LitVec lits;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  Lit pivot;
};

struct TermProof {
  std::vector<TermNode> nodes;
  std::uint32_t add(TermNode n) {
    nodes.push_back(std::move(n));
    return static_cast<std::uint32_t>(nodes.size() - 1);
  }
  std::size_t leaf_count() const;
};

struct TermCheck {
  bool ok = false;
  std::uint32_t node = 0;
  std::string message;
};

TermCheck check_term_proof(const Formula& f, const TermProof& proof);

/// Builds a term proof by walking the game tree: model-generation leaves are
/// total satisfying assignments. Returns nullopt when the formula is false.
/// Throws std::length_error when the formula has more than `max_universals`
/// universal variables.
std::optional<TermProof> naive_term_prover(const Formula& f, std::size_t max_universals = 16);

// ---------------------------------------------------------------------------

using Certificate = std::variant<Refutation, Model>;

/// Reads either certificate format, dispatching on the header line.
Certificate parse_certificate(std::istream& in);
void write_certificate(std::ostream& out, const Certificate& c);

/// Graphviz rendering of a refutation DAG or a model's gate list.
void write_dot(std::ostream& out, const Certificate& c);

}  // namespace qbfcert
