#include "qbfcert/reconstruct.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <unordered_map>

#include "qbfcert/solve.hpp"

namespace qbfcert {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ReconstructError(msg); }

/// Implication graph over recorded binary clauses; clause (a | b) yields
/// edges ~a -> b and ~b -> a.
class Implications {
 public:
  explicit Implications(const std::vector<ClauseRecord>& binaries) {
    for (const auto& c : binaries) {
      if (c.lits.size() != 2) fail("implication clause is not binary");
      succ_[(~c.lits[0]).code()].push_back({c.lits[1], &c});
      succ_[(~c.lits[1]).code()].push_back({c.lits[0], &c});
    }
  }

  /// Shortest edge sequence from `from` to `to`.
  std::vector<const ClauseRecord*> path(Lit from, Lit to) const {
    std::unordered_map<std::uint32_t, std::pair<Lit, const ClauseRecord*>> parent;
    std::deque<Lit> queue{from};
    parent.emplace(from.code(), std::make_pair(from, nullptr));
    while (!queue.empty()) {
      Lit cur = queue.front();
      queue.pop_front();
      if (cur == to) break;
      auto it = succ_.find(cur.code());
      if (it == succ_.end()) continue;
      for (const auto& [next, clause] : it->second)
        if (parent.emplace(next.code(), std::make_pair(cur, clause)).second) queue.push_back(next);
    }
    if (!parent.contains(to.code()) || from == to) fail("no implication path from " + std::to_string(from.dimacs()) +
                                                        " to " + std::to_string(to.dimacs()));
    std::vector<const ClauseRecord*> edges;
    for (Lit cur = to; cur != from;) {
      const auto& [prev, clause] = parent.at(cur.code());
      edges.push_back(clause);
      cur = prev;
    }
    std::reverse(edges.begin(), edges.end());
    return edges;
  }

 private:
  std::unordered_map<std::uint32_t, std::vector<std::pair<Lit, const ClauseRecord*>>> succ_;
};

/// Appends nodes to a refutation, sharing input nodes by clause id.
class ProofBuilder {
 public:
  explicit ProofBuilder(Refutation& out) : out_(out) {}

  std::uint32_t input(ClauseId id, const LitVec& lits) {
    auto [it, fresh] = inputs_.try_emplace(id, 0);
    if (fresh) it->second = out_.add(ProofNode::input(id, lits));
    return it->second;
  }

  std::uint32_t resolve_on(std::uint32_t left, std::uint32_t right, Lit pivot) {
    LitVec r;
    if (!resolve(out_.nodes[left].lits, out_.nodes[right].lits, pivot, r))
      fail("resolution on " + std::to_string(pivot.dimacs()) + " undefined while rebuilding proof");
    return out_.add(ProofNode::resolvent(std::move(r), left, right, pivot));
  }

  /// Clause (~from | to) chained along the shortest implication path.
  std::uint32_t derive(const Implications& g, Lit from, Lit to) {
    auto key = std::make_pair(from.code(), to.code());
    if (auto it = derived_.find(key); it != derived_.end()) return it->second;
    auto edges = g.path(from, to);
    std::uint32_t node = input(edges[0]->id, edges[0]->lits);
    Lit head = edges[0]->lits[0] == ~from ? edges[0]->lits[1] : edges[0]->lits[0];
    for (std::size_t i = 1; i < edges.size(); ++i) {
      std::uint32_t e = input(edges[i]->id, edges[i]->lits);
      node = resolve_on(node, e, head);
      head = edges[i]->lits[0] == ~head ? edges[i]->lits[1] : edges[i]->lits[0];
    }
    derived_.emplace(key, node);
    return node;
  }

  const LitVec& lits(std::uint32_t node) const { return out_.nodes[node].lits; }

 private:
  Refutation& out_;
  std::unordered_map<ClauseId, std::uint32_t> inputs_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> derived_;
};

/// Rebuilds `proof`, letting `replace` substitute input nodes. Inner nodes
/// are copied with remapped antecedents.
Refutation rebuild(const Refutation& proof,
                   const std::function<std::optional<std::uint32_t>(const ProofNode&, ProofBuilder&)>& replace) {
  Refutation out;
  ProofBuilder b(out);
  std::vector<std::uint32_t> map(proof.nodes.size(), 0);
  for (std::size_t i = 0; i < proof.nodes.size(); ++i) {
    const ProofNode& n = proof.nodes[i];
    switch (n.kind) {
      case ProofNode::Kind::kInput: {
        auto r = replace(n, b);
        if (r && b.lits(*r) != n.lits) fail("rebuilt derivation of clause " + std::to_string(n.clause_id) +
                                            " yields " + to_string(b.lits(*r)) + " instead of " + to_string(n.lits));
        map[i] = r ? *r : b.input(n.clause_id, n.lits);
        break;
      }
      case ProofNode::Kind::kResolvent:
        map[i] = out.add(ProofNode::resolvent(n.lits, map[n.left], map[n.right], n.pivot));
        break;
      case ProofNode::Kind::kForallRed:
        map[i] = out.add(ProofNode::reduction(n.lits, map[n.left]));
        break;
    }
  }
  return compact(out, map.empty() ? 0 : map.back());
}

bool reducible(const Prefix& p, const LitVec& clause, Lit u) {
  return std::none_of(clause.begin(), clause.end(),
                      [&](Lit k) { return p.is_existential(k) && p.less(u, k); });
}

/// Puts a pure universal literal back into the clauses it was removed from
/// and reduces it again as soon as that is allowed.
Refutation reinsert_universal(const Prefix& p, const Refutation& proof, const RemoveUniversalLit& step) {
  std::unordered_map<ClauseId, const UniversalRewrite*> by_after;
  for (const auto& a : step.affected) by_after.emplace(a.after, &a);
  const Lit u = step.lit;

  Refutation out;
  ProofBuilder b(out);
  std::vector<std::uint32_t> map(proof.nodes.size(), 0);
  auto with_u = [&](LitVec lits) {
    lits.push_back(u);
    normalize_clause(lits);
    return lits;
  };
  auto settle = [&](std::uint32_t node) {
    const LitVec& lits = out.nodes[node].lits;
    if (!contains_lit(lits, u) || !reducible(p, lits, u)) return node;
    LitVec reduced = lits;
    reduced.erase(std::find(reduced.begin(), reduced.end(), u));
    return out.add(ProofNode::reduction(std::move(reduced), node));
  };
  for (std::size_t i = 0; i < proof.nodes.size(); ++i) {
    const ProofNode& n = proof.nodes[i];
    switch (n.kind) {
      case ProofNode::Kind::kInput: {
        auto it = by_after.find(n.clause_id);
        map[i] = it == by_after.end() ? b.input(n.clause_id, n.lits) : settle(b.input(it->second->before, with_u(n.lits)));
        break;
      }
      case ProofNode::Kind::kResolvent: {
        const std::uint32_t l = map[n.left], r = map[n.right];
        const bool extra = contains_lit(out.nodes[l].lits, u) || contains_lit(out.nodes[r].lits, u);
        map[i] = settle(out.add(ProofNode::resolvent(extra ? with_u(n.lits) : n.lits, l, r, n.pivot)));
        break;
      }
      case ProofNode::Kind::kForallRed: {
        const std::uint32_t c = map[n.left];
        const bool extra = contains_lit(out.nodes[c].lits, u);
        map[i] = settle(out.add(ProofNode::reduction(extra ? with_u(n.lits) : n.lits, c)));
        break;
      }
    }
  }
  return compact(out, map.empty() ? 0 : map.back());
}

/// Derivation of an ElsSubst rewrite from the old clause and the recorded
/// binary clauses, one resolution per replaced literal.
std::uint32_t derive_rewrite(ProofBuilder& b, const Implications& g, const ElsSubst& step, const ClauseRewrite& rw) {
  const Lit r = step.representative;
  std::uint32_t node = b.input(rw.old_id, rw.old_lits);
  for (Lit l : rw.old_lits) {
    Lit target = l;
    if (l != r && contains_lit(step.component, l)) target = r;
    else if (~l != r && contains_lit(step.component, ~l)) target = ~r;
    if (target == l) continue;
    node = b.resolve_on(node, b.derive(g, l, target), l);
  }
  return node;
}

/// Resolvent steps are handled by the caller, which knows the antecedents.
Refutation undo_refutation(const Prefix& p, const Refutation& proof, const TraceStep& step) {
  if (const auto* s = std::get_if<RemoveUniversalLit>(&step)) return reinsert_universal(p, proof, *s);
  if (const auto* s = std::get_if<ElsSubst>(&step)) {
    Implications g(s->binary_clauses);
    std::unordered_map<ClauseId, const ClauseRewrite*> by_new;
    for (const auto& rw : s->rewrites)
      if (rw.new_id != 0) by_new.emplace(rw.new_id, &rw);
    return rebuild(proof, [&](const ProofNode& n, ProofBuilder& b) -> std::optional<std::uint32_t> {
      auto it = by_new.find(n.clause_id);
      if (it == by_new.end()) return std::nullopt;
      return derive_rewrite(b, g, *s, *it->second);
    });
  }
  return proof;
}

/// `ve_kept` holds, for a VE step, the negative clauses restricted to literals in
/// x's block or earlier, as seen by the prefix at the time of the step.
Model undo_model(const Prefix& p, Model m, const TraceStep& step, const std::vector<LitVec>& ve_kept) {
  auto def_or = [&](Var x, bool fallback) {
    const Expr* d = m.find(x);
    return d ? *d : Expr::constant(fallback);
  };
  if (const auto* s = std::get_if<DeleteBlocked>(&step)) {
    const Lit l = s->blocking_lit;
    const Var x = l.var();
    std::vector<Expr> parts;
    if (!l.is_negated()) {
      for (Lit k : s->witnesses) parts.push_back(!substitute_model(m, p, k));
      m.set(x, Expr::disjunction({def_or(x, false), Expr::conjunction(std::move(parts))}));
    } else {
      for (Lit k : s->witnesses) parts.push_back(substitute_model(m, p, k));
      m.set(x, Expr::conjunction({def_or(x, true), Expr::disjunction(std::move(parts))}));
    }
  } else if (const auto* s = std::get_if<DeleteVE>(&step)) {
    std::vector<Expr> conj;
    for (const LitVec& c : ve_kept) {
      std::vector<Expr> disj;
      for (Lit k : c) disj.push_back(substitute_model(m, p, k));
      conj.push_back(Expr::disjunction(std::move(disj)));
    }
    m.set(s->var, Expr::conjunction(std::move(conj)));
  } else if (const auto* s = std::get_if<ElsSubst>(&step)) {
    const Expr rep = substitute_model(m, p, s->representative);
    for (Lit l : s->component) {
      if (l == s->representative) continue;
      m.set(l.var(), l.is_negated() ? !rep : rep);
    }
  } else if (const auto* s = std::get_if<DropVar>(&step)) {
    if (m.find(s->var)) fail("dropped variable " + std::to_string(s->var) + " already has a definition");
    if (p.is_existential(s->var)) m.set(s->var, Expr::constant(false));
  }
  return m;
}

/// Maps input nodes of a certificate for `f` onto live clause ids of `f`.
Refutation bind_inputs(const Formula& f, const Refutation& proof) {
  std::map<LitVec, ClauseId> ids;
  for (ClauseId id : f.live_ids()) ids.emplace(f.lits(id), id);
  Refutation out = proof;
  for (auto& n : out.nodes) {
    if (n.kind != ProofNode::Kind::kInput) continue;
    auto it = ids.find(n.lits);
    if (it == ids.end()) fail("input clause " + to_string(n.lits) + " is not in the preprocessed formula");
    n.clause_id = it->second;
  }
  return out;
}

void recheck(const Formula& f, const Certificate& cert, const ReconstructOptions& options, const std::string& where) {
  if (const auto* r = std::get_if<Refutation>(&cert)) {
    ProofCheck c = check_refutation(f, *r);
    if (!c.ok) fail(where + ": refutation rejected at node " + std::to_string(c.node) + ": " + c.message);
  } else {
    ModelCheck c = check_model(f, std::get<Model>(cert), options.max_enum);
    if (c.verdict == ModelVerdict::kTooLarge) return;
    if (!c.ok()) fail(where + ": model rejected: " + c.message);
  }
}

}  // namespace

Refutation build_els_refutation(const Formula& f, const ElsRefute& step) {
  (void)f;
  Implications g(step.binary_clauses);
  Refutation out;
  ProofBuilder b(out);
  const auto& pl = step.pivot_literals;
  std::uint32_t root = 0;
  auto reduce_all = [&](std::uint32_t node, LitVec keep) { return out.add(ProofNode::reduction(std::move(keep), node)); };
  switch (step.falsity_case) {
    case 1:
      root = reduce_all(b.derive(g, pl.at(0), pl.at(1)), {});
      break;
    case 2: {
      const Lit e = pl.at(0), u = pl.at(1);
      std::uint32_t neg_e = reduce_all(b.derive(g, e, u), {~e});
      std::uint32_t pos_e = reduce_all(b.derive(g, u, e), {e});
      root = b.resolve_on(pos_e, neg_e, e);
      break;
    }
    case 3: {
      const Lit e = pl.at(0);
      std::uint32_t neg_e = b.derive(g, e, ~e);
      std::uint32_t pos_e = b.derive(g, ~e, e);
      root = b.resolve_on(pos_e, neg_e, e);
      break;
    }
    default:
      fail("unknown falsity case " + std::to_string(step.falsity_case));
  }
  return compact(out, root);
}

Certificate final_certificate(const Formula& preprocessed, const Trace& trace) {
  if (!trace.steps.empty())
    if (const auto* r = std::get_if<ElsRefute>(&trace.steps.back())) return build_els_refutation(preprocessed, *r);
  return dp_solve(preprocessed).certificate;
}

Certificate reconstruct(const Formula& original, const Trace& trace, const Certificate& final_cert,
                        const ReconstructOptions& options) {
  const Prefix& p = original.prefix();
  if (digest(original) != trace.digest_in) throw TraceError("initial formula digest mismatch");

  // Forward replay validates the trace and yields every clause ever created.
  std::vector<Formula> snapshots;
  // Blocks merge as variables vanish, so VE's block comparison must use the prefix of its own step.
  std::vector<std::vector<LitVec>> ve_kept(trace.steps.size());
  Formula cur = original;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    if (options.recheck_steps) snapshots.push_back(cur);
    if (const auto* s = std::get_if<DeleteVE>(&trace.steps[i]); s && cur.prefix().contains(s->var)) {
      const Prefix& q = cur.prefix();
      for (const auto& c : s->neg_clauses) {
        LitVec keep;
        for (Lit k : c.lits)
          if (k.var() != s->var && q.contains(k.var()) && q.block_index(k.var()) <= q.block_index(s->var))
            keep.push_back(k);
        ve_kept[i].push_back(std::move(keep));
      }
    }
    try {
      apply_step(cur, trace.steps[i]);
    } catch (const TraceError& e) {
      throw TraceError("step " + std::to_string(i) + " (" + step_keyword(trace.steps[i]) + "): " + e.what());
    }
  }
  if (digest(cur) != trace.digest_out) throw TraceError("final formula digest mismatch");

  Certificate cert = final_cert;
  if (std::holds_alternative<Model>(cert))
    for (ClauseId id : cur.live_ids())
      if (cur.lits(id).empty()) fail("a model cannot certify a preprocessed formula with an empty clause");
  if (auto* r = std::get_if<Refutation>(&cert)) *r = bind_inputs(cur, *r);
  if (options.recheck_steps) recheck(cur, cert, options, "preprocessed formula");

  for (std::size_t i = trace.steps.size(); i-- > 0;) {
    const TraceStep& step = trace.steps[i];
    if (auto* r = std::get_if<Refutation>(&cert)) {
      if (const auto* s = std::get_if<AddResolvent>(&step)) {
        *r = rebuild(*r, [&](const ProofNode& n, ProofBuilder& b) -> std::optional<std::uint32_t> {
          if (n.clause_id != s->new_id) return std::nullopt;
          return b.resolve_on(b.input(s->antecedent1, cur.lits(s->antecedent1)),
                              b.input(s->antecedent2, cur.lits(s->antecedent2)), s->pivot);
        });
      } else {
        *r = undo_refutation(p, *r, step);
      }
    } else {
      cert = undo_model(p, std::get<Model>(std::move(cert)), step, ve_kept[i]);
    }
    if (options.recheck_steps)
      recheck(snapshots[i], cert, options, "step " + std::to_string(i) + " (" + step_keyword(step) + ")");
  }

  if (auto* m = std::get_if<Model>(&cert))
    for (Var v : p.vars_in_order())
      if (p.is_existential(v) && !m->find(v)) m->set(v, Expr::constant(false));
  return cert;
}

CertifiedResult solve_certified(const Formula& f, const PreprocessConfig& config, const ReconstructOptions& options) {
  CertifiedResult out;
  out.preprocessed = preprocess(f, config);
  Certificate fin = final_certificate(out.preprocessed.formula, out.preprocessed.trace);
  out.certificate = reconstruct(f, out.preprocessed.trace, fin, options);
  out.verdict = std::holds_alternative<Model>(out.certificate);
  return out;
}

}  // namespace qbfcert
