#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbfcert {

using Var = std::uint32_t;
using ClauseId = std::uint32_t;

/// A literal packed as 2*var + sign; sign bit set means negated.
class Lit {
 public:
  constexpr Lit() = default;
  static constexpr Lit positive(Var v) { return Lit(2 * v); }
  static constexpr Lit negative(Var v) { return Lit(2 * v + 1); }
  static constexpr Lit make(Var v, bool negated) { return Lit(2 * v + (negated ? 1u : 0u)); }
  static Lit from_dimacs(long value);
  static constexpr Lit from_code(std::uint32_t code) { return Lit(code); }

  constexpr Var var() const { return code_ >> 1; }
  constexpr bool is_negated() const { return (code_ & 1u) != 0; }
  constexpr std::uint32_t code() const { return code_; }
  constexpr long dimacs() const { return is_negated() ? -static_cast<long>(var()) : static_cast<long>(var()); }
  constexpr Lit operator~() const { return Lit(code_ ^ 1u); }

  friend constexpr auto operator<=>(Lit, Lit) = default;

 private:
  constexpr explicit Lit(std::uint32_t code) : code_(code) {}
  std::uint32_t code_ = 0;
};

std::ostream& operator<<(std::ostream& os, Lit lit);

/// Sorted, duplicate-free literal sequence.
using LitVec = std::vector<Lit>;

/// Sorts and deduplicates in place. Returns false if the clause is tautologous.
bool normalize_clause(LitVec& lits);
bool is_subset(std::span<const Lit> small, std::span<const Lit> big);
bool contains_lit(std::span<const Lit> lits, Lit lit);
std::string to_string(std::span<const Lit> lits);

enum class Quantifier : std::uint8_t { kExists, kForall };

struct QuantBlock {
  Quantifier quant;
  std::vector<Var> vars;
  friend bool operator==(const QuantBlock&, const QuantBlock&) = default;
};

class FormulaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered quantifier blocks. Relative order of surviving variables never
/// changes when variables are removed, so positions stay comparable.
class Prefix {
 public:
  void add_block(Quantifier q, std::span<const Var> vars);
  void remove_var(Var v);

  bool contains(Var v) const { return v < pos_.size() && pos_[v] != 0; }
  Quantifier quant(Var v) const;
  bool is_universal(Var v) const { return quant(v) == Quantifier::kForall; }
  bool is_existential(Var v) const { return quant(v) == Quantifier::kExists; }
  bool is_universal(Lit l) const { return is_universal(l.var()); }
  bool is_existential(Lit l) const { return is_existential(l.var()); }
  /// Order key; smaller means outer.
  std::uint64_t position(Var v) const;
  /// Index of the block holding `v` (0 = outermost).
  std::size_t block_index(Var v) const;
  bool less(Lit a, Lit b) const { return position(a.var()) < position(b.var()); }
  bool less(Var a, Var b) const { return position(a) < position(b); }

  const std::vector<QuantBlock>& blocks() const { return blocks_; }
  std::vector<Var> vars_in_order() const;
  std::size_t num_vars() const { return num_vars_; }
  Var max_var() const;

  friend bool operator==(const Prefix& a, const Prefix& b) { return a.blocks_ == b.blocks_; }

 private:
  void ensure_size(Var v);
  std::vector<QuantBlock> blocks_;
  std::vector<std::uint64_t> pos_;  // 0 = absent
  std::vector<Quantifier> quant_;
  std::uint64_t next_pos_ = 1;
  std::size_t num_vars_ = 0;
};

/// True iff vars(l1) precedes vars(l2) in the prefix. Throws on unknown variables.
bool literal_less(const Prefix& p, Lit l1, Lit l2);

struct Clause {
  ClauseId id = 0;
  LitVec lits;
};

/// Prenex CNF formula. Clause ids are monotone and never reused; the
/// literals of deleted clauses stay retrievable by id.
class Formula {
 public:
  Formula() = default;

  Prefix& prefix() { return prefix_; }
  const Prefix& prefix() const { return prefix_; }

  /// Adds a normalized, non-tautologous clause. Throws on tautologies or
  /// variables missing from the prefix.
  ClauseId add_clause(LitVec lits);
  void remove_clause(ClauseId id);

  bool is_live(ClauseId id) const { return id >= 1 && id <= store_.size() && live_[id - 1] != 0; }
  bool exists(ClauseId id) const { return id >= 1 && id <= store_.size(); }
  /// Literals of any clause ever added, live or not.
  const LitVec& lits(ClauseId id) const;
  ClauseId next_clause_id() const { return static_cast<ClauseId>(store_.size() + 1); }

  std::vector<ClauseId> live_ids() const;
  std::size_t num_clauses() const { return num_live_; }
  bool empty_matrix() const { return num_live_ == 0; }
  /// Live clauses containing `l`, in unspecified order.
  const std::vector<ClauseId>& occurrences(Lit l) const;
  std::size_t occurrence_count(Var v) const {
    return occurrences(Lit::positive(v)).size() + occurrences(Lit::negative(v)).size();
  }
  std::size_t total_literals() const;

  Var max_var() const { return max_var_; }
  void set_max_var(Var v) { max_var_ = v; }

 private:
  Prefix prefix_;
  std::vector<LitVec> store_;
  std::vector<char> live_;
  std::vector<std::vector<ClauseId>> occ_;
  std::size_t num_live_ = 0;
  Var max_var_ = 0;
};

/// Total or partial assignment over variables.
class Assignment {
 public:
  void set(Var v, bool value);
  void unset(Var v);
  std::optional<bool> get(Var v) const;
  bool value(Lit l) const;  // throws if unassigned
  bool complete_for(const Prefix& p) const;

 private:
  std::vector<std::int8_t> vals_;  // -1 unassigned
};

/// 1 iff every live clause has a true literal. Throws on incomplete assignment.
bool eval_matrix(const Formula& f, const Assignment& a);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parses QDIMACS. Tautologies are dropped, duplicate literals merged, and
/// free variables moved into an outermost existential block. Non-fatal
/// issues are appended to `warnings` when given.
Formula parse_qdimacs(std::istream& in, std::vector<std::string>* warnings = nullptr);
Formula parse_qdimacs_string(const std::string& text, std::vector<std::string>* warnings = nullptr);
void write_qdimacs(std::ostream& out, const Formula& f);
std::string to_qdimacs(const Formula& f);

/// Same prefix and same multiset of clause literal sets, ignoring ids.
bool isomorphic(const Formula& a, const Formula& b);

/// FNV-1a 64 over the canonical QDIMACS text.
std::uint64_t digest(const Formula& f);
std::string digest_hex(std::uint64_t d);

}  // namespace qbfcert
