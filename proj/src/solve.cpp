#include "qbfcert/solve.hpp"

#include <algorithm>
#include <cstdint>

#include "qbfcert/trace.hpp"

namespace qbfcert {

namespace {

class Game {
 public:
  explicit Game(const Formula& f) : prefix_(f.prefix()), order_(f.prefix().vars_in_order()) {
    for (ClauseId id : f.live_ids()) {
      const auto& c = f.lits(id);
      const auto idx = static_cast<std::uint32_t>(size_.size());
      size_.push_back(static_cast<std::uint32_t>(c.size()));
      for (Lit l : c) {
        if (occ_.size() <= l.code()) occ_.resize((l.code() | 1u) + 1);
        occ_[l.code()].push_back(idx);
      }
      if (c.empty()) ++conflicts_;
    }
    true_.assign(size_.size(), 0);
    false_.assign(size_.size(), 0);
  }

  bool value(std::size_t depth) {
    if (conflicts_ > 0) return false;
    if (satisfied_ == size_.size()) return true;
    const Var v = order_[depth];
    const bool exists = prefix_.is_existential(v);
    for (bool val : {false, true}) {
      assign(Lit::make(v, !val), +1);
      bool r = value(depth + 1);
      assign(Lit::make(v, !val), -1);
      if (r == exists) return r;
    }
    return !exists;
  }

 private:
  const std::vector<std::uint32_t>& occ(Lit l) const {
    static const std::vector<std::uint32_t> kNone;
    return l.code() < occ_.size() ? occ_[l.code()] : kNone;
  }

  void assign(Lit true_lit, int delta) {
    for (std::uint32_t c : occ(true_lit)) {
      if (delta > 0 && true_[c]++ == 0) ++satisfied_;
      if (delta < 0 && --true_[c] == 0) --satisfied_;
    }
    for (std::uint32_t c : occ(~true_lit)) {
      if (delta > 0 && ++false_[c] == size_[c]) ++conflicts_;
      if (delta < 0 && false_[c]-- == size_[c]) --conflicts_;
    }
  }

  const Prefix& prefix_;
  std::vector<Var> order_;
  std::vector<std::uint32_t> size_;
  std::vector<std::uint32_t> true_;
  std::vector<std::uint32_t> false_;
  std::vector<std::vector<std::uint32_t>> occ_;
  std::size_t satisfied_ = 0;
  std::size_t conflicts_ = 0;
};

struct WorkClause {
  LitVec lits;
  std::uint32_t node;
};

struct Elimination {
  Var var;
  std::vector<LitVec> neg_rest;  // clauses that held ~var, without it
};

bool all_universal(const Prefix& p, const LitVec& lits) {
  return std::none_of(lits.begin(), lits.end(), [&](Lit l) { return p.is_existential(l); });
}

}  // namespace

bool brute_force_game(const Formula& f, std::size_t max_vars) {
  if (f.prefix().num_vars() > max_vars) throw std::length_error("too many variables for brute-force evaluation");
  Game game(f);
  return game.value(0);
}

SolveResult dp_solve(const Formula& f, const DpOptions& options) {
  Prefix prefix = f.prefix();
  Refutation proof;
  std::vector<WorkClause> clauses;
  for (ClauseId id : f.live_ids()) {
    std::uint32_t node = proof.add(ProofNode::input(id, f.lits(id)));
    clauses.push_back({f.lits(id), node});
  }
  std::vector<Elimination> eliminations;

  auto refute_with = [&](const WorkClause& c) {
    std::uint32_t root = c.node;
    if (!c.lits.empty()) root = proof.add(ProofNode::reduction({}, c.node));
    return SolveResult{false, compact(proof, root)};
  };

  while (true) {
    for (const auto& c : clauses)
      if (all_universal(prefix, c.lits)) return refute_with(c);
    if (clauses.empty() || prefix.blocks().empty()) break;

    const QuantBlock& inner = prefix.blocks().back();
    if (inner.quant == Quantifier::kForall) {
      const std::vector<Var> vars = inner.vars;
      for (auto& c : clauses) {
        LitVec kept;
        for (Lit l : c.lits)
          if (std::find(vars.begin(), vars.end(), l.var()) == vars.end()) kept.push_back(l);
        if (kept.size() == c.lits.size()) continue;
        c.node = proof.add(ProofNode::reduction(kept, c.node));
        c.lits = std::move(kept);
      }
      for (Var v : vars) prefix.remove_var(v);
      continue;
    }

    const Var x = inner.vars.back();
    const Lit pos = Lit::positive(x);
    std::vector<WorkClause> with_pos, with_neg, rest;
    for (auto& c : clauses) {
      if (contains_lit(c.lits, pos)) with_pos.push_back(std::move(c));
      else if (contains_lit(c.lits, ~pos)) with_neg.push_back(std::move(c));
      else rest.push_back(std::move(c));
    }
    Elimination elim{x, {}};
    for (const auto& c : with_neg) {
      LitVec r = c.lits;
      r.erase(std::find(r.begin(), r.end(), ~pos));
      elim.neg_rest.push_back(std::move(r));
    }
    eliminations.push_back(std::move(elim));

    LitVec resolvent;
    for (const auto& a : with_pos) {
      for (const auto& b : with_neg) {
        if (!resolve(a.lits, b.lits, pos, resolvent)) continue;
        bool subsumed = std::any_of(rest.begin(), rest.end(), [&](const WorkClause& d) {
          return is_subset(d.lits, resolvent);
        });
        if (subsumed) continue;
        std::erase_if(rest, [&](const WorkClause& d) { return is_subset(resolvent, d.lits); });
        std::uint32_t node = proof.add(ProofNode::resolvent(resolvent, a.node, b.node, pos));
        rest.push_back({resolvent, node});
        if (rest.size() > options.max_clauses) throw std::runtime_error("dp_solve: clause limit exceeded");
      }
    }
    clauses = std::move(rest);
    prefix.remove_var(x);
  }

  // True: replay the eliminations outwards.
  Model model;
  for (Var v : prefix.vars_in_order())
    if (prefix.is_existential(v)) model.set(v, Expr::constant(false));
  for (auto it = eliminations.rbegin(); it != eliminations.rend(); ++it) {
    std::vector<Expr> conj;
    for (const auto& c : it->neg_rest) conj.push_back(substitute_model(model, f.prefix(), c));
    model.set(it->var, Expr::conjunction(std::move(conj)));
  }
  return SolveResult{true, std::move(model)};
}

}  // namespace qbfcert
