#include "qbfcert/preprocess.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace qbfcert {

PreprocessConfig parse_techniques(std::string_view list, PreprocessConfig base) {
  PreprocessConfig c = base;
  c.unit = c.pure = c.subsumption = c.self_subsumption = c.els = c.bce = c.ve = false;
  std::string item;
  std::istringstream ss{std::string(list)};
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item == "none") continue;
    if (item == "all") {
      c.unit = c.pure = c.subsumption = c.self_subsumption = c.els = c.bce = c.ve = true;
    } else if (item == "unit") {
      c.unit = true;
    } else if (item == "pure") {
      c.pure = true;
    } else if (item == "subsumption") {
      c.subsumption = true;
    } else if (item == "selfsub") {
      c.self_subsumption = true;
    } else if (item == "els") {
      c.els = true;
    } else if (item == "bce") {
      c.bce = true;
    } else if (item == "ve") {
      c.ve = true;
    } else {
      throw std::invalid_argument("unknown technique '" + item + "'");
    }
  }
  return c;
}

Preprocessor::Preprocessor(Formula& f, Trace& trace, PreprocessConfig config)
    : f_(f), trace_(trace), config_(config) {
  const Prefix& p = f_.prefix();
  for (ClauseId id : f_.live_ids()) {
    const LitVec& c = f_.lits(id);
    if (std::none_of(c.begin(), c.end(), [&](Lit l) { return p.is_existential(l); })) input_conflict_ = true;
  }
}

void Preprocessor::note_clause(const LitVec& lits) {
  const Prefix& p = f_.prefix();
  if (std::none_of(lits.begin(), lits.end(), [&](Lit l) { return p.is_existential(l); })) conflict_ = true;
}

void Preprocessor::emit(TraceStep step) {
  apply_step(f_, step);
  if (const auto* r = std::get_if<AddResolvent>(&step)) note_clause(r->lits);
  if (const auto* u = std::get_if<RemoveUniversalLit>(&step))
    for (const auto& a : u->affected) note_clause(a.lits_after);
  if (const auto* e = std::get_if<ElsSubst>(&step))
    for (const auto& rw : e->rewrites)
      if (rw.new_id != 0) note_clause(rw.new_lits);
  if (std::holds_alternative<ElsRefute>(step)) refuted_ = true;
  trace_.steps.push_back(std::move(step));
}

std::optional<bool> Preprocessor::verdict() const {
  if (input_conflict_ || stopped()) return false;
  if (f_.empty_matrix()) return true;
  return std::nullopt;
}

bool Preprocessor::drop_vanished() {
  bool changed = false;
  for (Var v : f_.prefix().vars_in_order()) {
    if (f_.occurrence_count(v) != 0) continue;
    emit(DropVar{v});
    changed = true;
  }
  return changed;
}

bool Preprocessor::unit_propagate() {
  bool changed = false;
  while (unit_round()) changed = true;
  return changed;
}

bool Preprocessor::unit_round() {
  bool changed = false;
  const Prefix& p = f_.prefix();
  for (ClauseId u : f_.live_ids()) {
    if (stopped()) break;
    if (!f_.is_live(u) || f_.lits(u).size() != 1) continue;
    const Lit l = f_.lits(u)[0];
    if (!p.is_existential(l)) continue;
    const std::vector<ClauseId> negs = f_.occurrences(~l);
    for (ClauseId d : negs) {
      LitVec r = f_.lits(d);
      r.erase(std::find(r.begin(), r.end(), ~l));
      const ClauseId id = f_.next_clause_id();
      emit(AddResolvent{id, r, u, d, l});
      emit(DeleteSubsumed{d, id});
    }
    const std::vector<ClauseId> poss = f_.occurrences(l);
    for (ClauseId d : poss)
      if (d != u) emit(DeleteSubsumed{d, u});
    emit(DeleteBlocked{u, {l}, l, {}});
    emit(DropVar{l.var()});
    changed = true;
  }
  return changed;
}

bool Preprocessor::subsumption() {
  std::vector<ClauseId> ids = f_.live_ids();
  std::stable_sort(ids.begin(), ids.end(),
                   [&](ClauseId a, ClauseId b) { return f_.lits(a).size() < f_.lits(b).size(); });
  bool changed = false;
  for (ClauseId c : ids) {
    if (!f_.is_live(c)) continue;
    const LitVec& lits = f_.lits(c);
    if (lits.empty()) continue;
    Lit best = *std::min_element(lits.begin(), lits.end(), [&](Lit a, Lit b) {
      return f_.occurrences(a).size() < f_.occurrences(b).size();
    });
    const std::vector<ClauseId> cands = f_.occurrences(best);
    for (ClauseId d : cands) {
      if (d == c || !is_subset(lits, f_.lits(d))) continue;
      emit(DeleteSubsumed{d, c});
      changed = true;
    }
  }
  return changed;
}

bool Preprocessor::self_subsumption() {
  bool changed = false;
  for (ClauseId c : f_.live_ids()) {
    if (stopped()) break;
    if (!f_.is_live(c)) continue;
    const LitVec lits = f_.lits(c);
    for (Lit l : lits) {
      LitVec rest = lits;
      rest.erase(std::find(rest.begin(), rest.end(), l));
      const std::vector<ClauseId> cands = f_.occurrences(~l);
      for (ClauseId d : cands) {
        if (!f_.is_live(c)) break;
        LitVec r = f_.lits(d);
        r.erase(std::find(r.begin(), r.end(), ~l));
        if (!is_subset(rest, r)) continue;
        const ClauseId id = f_.next_clause_id();
        emit(AddResolvent{id, r, c, d, l});
        emit(DeleteSubsumed{d, id});
        changed = true;
        // C itself is subsumed by the new clause when C \ {l} equals it
        if (rest == r) emit(DeleteSubsumed{c, id});
        if (stopped()) return changed;
      }
      if (!f_.is_live(c)) break;
    }
  }
  return changed;
}

bool Preprocessor::pure_literals() {
  bool changed = false;
  const Prefix& p = f_.prefix();
  for (Var v : p.vars_in_order()) {
    if (stopped()) break;
    const auto& pos = f_.occurrences(Lit::positive(v));
    const auto& neg = f_.occurrences(Lit::negative(v));
    if (pos.empty() == neg.empty()) continue;
    const Lit l = pos.empty() ? Lit::negative(v) : Lit::positive(v);
    if (p.is_existential(v)) {
      const std::vector<ClauseId> occ = f_.occurrences(l);
      for (ClauseId c : occ) emit(DeleteBlocked{c, f_.lits(c), l, {}});
    } else {
      std::vector<ClauseId> occ = f_.occurrences(l);
      std::sort(occ.begin(), occ.end());
      RemoveUniversalLit step{l, {}};
      ClauseId next = f_.next_clause_id();
      for (ClauseId c : occ) {
        LitVec after = f_.lits(c);
        after.erase(std::find(after.begin(), after.end(), l));
        step.affected.push_back({c, next++, std::move(after)});
      }
      emit(std::move(step));
    }
    emit(DropVar{v});
    changed = true;
  }
  return changed;
}

bool Preprocessor::blocked_clauses() {
  bool changed = false;
  const Prefix& p = f_.prefix();
  LitVec witnesses;
  for (ClauseId c : f_.live_ids()) {
    const LitVec lits = f_.lits(c);
    for (Lit l : lits) {
      if (!p.is_existential(l)) continue;
      if (!blocked_witnesses(f_, lits, l, c, witnesses)) continue;
      emit(DeleteBlocked{c, lits, l, witnesses});
      changed = true;
      break;
    }
  }
  return changed;
}

bool Preprocessor::eliminate_variable(Var x) {
  const Prefix& p = f_.prefix();
  if (stopped() || !p.contains(x) || !p.is_existential(x)) return false;
  DeleteVE step{x, {}, {}};
  for (ClauseId id : f_.occurrences(Lit::positive(x))) step.pos_clauses.push_back({id, f_.lits(id)});
  for (ClauseId id : f_.occurrences(Lit::negative(x))) step.neg_clauses.push_back({id, f_.lits(id)});
  if (step.pos_clauses.empty() && step.neg_clauses.empty()) return false;
  if (step.pos_clauses.size() * step.neg_clauses.size() > config_.ve_max_resolvents) return false;
  auto by_id = [](const ClauseRecord& a, const ClauseRecord& b) { return a.id < b.id; };
  std::sort(step.pos_clauses.begin(), step.pos_clauses.end(), by_id);
  std::sort(step.neg_clauses.begin(), step.neg_clauses.end(), by_id);
  if (!ve_side_condition(p, x, step.pos_clauses, step.neg_clauses)) return false;

  const Lit pivot = Lit::positive(x);
  std::vector<AddResolvent> resolvents;
  LitVec r;
  for (const auto& a : step.pos_clauses)
    for (const auto& b : step.neg_clauses)
      if (resolve(a.lits, b.lits, pivot, r)) resolvents.push_back({0, r, a.id, b.id, pivot});
  const auto removed = static_cast<std::int64_t>(step.pos_clauses.size() + step.neg_clauses.size());
  if (static_cast<std::int64_t>(resolvents.size()) - removed > config_.ve_growth) return false;

  for (auto& res : resolvents) {
    res.new_id = f_.next_clause_id();
    emit(std::move(res));
  }
  emit(std::move(step));
  return true;
}

bool Preprocessor::eliminate_variables() {
  const Prefix& p = f_.prefix();
  std::vector<Var> cands;
  for (Var v : p.vars_in_order())
    if (p.is_existential(v)) cands.push_back(v);
  std::stable_sort(cands.begin(), cands.end(), [&](Var a, Var b) {
    std::size_t ba = p.block_index(a), bb = p.block_index(b);
    return ba != bb ? ba > bb : a < b;
  });
  bool changed = false;
  for (Var v : cands) {
    if (stopped()) break;
    if (!p.contains(v)) continue;
    if (eliminate_variable(v)) {
      changed = true;
      if (f_.occurrence_count(v) == 0) emit(DropVar{v});
    }
  }
  return changed;
}

namespace {

/// Strongly connected components of the binary implication graph, as lists
/// of literal codes. Iterative Tarjan.
class ImplicationGraph {
 public:
  explicit ImplicationGraph(const Formula& f) {
    const std::size_t n = 2 * (static_cast<std::size_t>(f.prefix().max_var()) + 1);
    succ_.resize(n);
    for (ClauseId id : f.live_ids()) {
      const LitVec& c = f.lits(id);
      if (c.size() != 2) continue;
      succ_[(~c[0]).code()].push_back(c[1].code());
      succ_[(~c[1]).code()].push_back(c[0].code());
    }
  }

  std::vector<std::vector<std::uint32_t>> components() {
    const std::size_t n = succ_.size();
    index_.assign(n, kUnvisited);
    low_.assign(n, 0);
    on_stack_.assign(n, 0);
    std::vector<std::vector<std::uint32_t>> out;
    for (std::uint32_t root = 0; root < n; ++root) {
      if (index_[root] != kUnvisited || succ_[root].empty()) continue;
      visit(root, out);
    }
    return out;
  }

 private:
  static constexpr std::uint32_t kUnvisited = ~0u;

  void visit(std::uint32_t root, std::vector<std::vector<std::uint32_t>>& out) {
    std::vector<std::pair<std::uint32_t, std::size_t>> frames{{root, 0}};
    open(root);
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next < succ_[v].size()) {
        const std::uint32_t w = succ_[v][next++];
        if (index_[w] == kUnvisited) {
          open(w);
          frames.emplace_back(w, 0);
        } else if (on_stack_[w]) {
          low_[v] = std::min(low_[v], index_[w]);
        }
        continue;
      }
      const std::uint32_t done = v;
      frames.pop_back();
      if (!frames.empty()) low_[frames.back().first] = std::min(low_[frames.back().first], low_[done]);
      if (low_[done] != index_[done]) continue;
      std::vector<std::uint32_t> comp;
      std::uint32_t w;
      do {
        w = stack_.back();
        stack_.pop_back();
        on_stack_[w] = 0;
        comp.push_back(w);
      } while (w != done);
      if (comp.size() > 1) out.push_back(std::move(comp));
    }
  }

  void open(std::uint32_t v) {
    index_[v] = low_[v] = counter_++;
    stack_.push_back(v);
    on_stack_[v] = 1;
  }

  std::vector<std::vector<std::uint32_t>> succ_;
  std::vector<std::uint32_t> index_, low_;
  std::vector<char> on_stack_;
  std::vector<std::uint32_t> stack_;
  std::uint32_t counter_ = 0;
};

}  // namespace

bool Preprocessor::equivalent_literals() {
  const Prefix& p = f_.prefix();
  ImplicationGraph graph(f_);
  auto comps = graph.components();
  std::vector<char> seen(2 * (static_cast<std::size_t>(p.max_var()) + 1), 0);
  bool changed = false;

  for (auto& codes : comps) {
    if (stopped()) break;
    LitVec comp;
    for (std::uint32_t c : codes) comp.push_back(Lit::from_code(c));
    std::sort(comp.begin(), comp.end());
    // a component and its dual carry the same information
    if (seen[comp[0].code()] || seen[(~comp[0]).code()]) continue;
    for (Lit l : comp) seen[l.code()] = 1;

    std::vector<ClauseRecord> binaries;
    std::vector<ClauseId> edge_ids;
    for (Lit l : comp)
      for (ClauseId id : f_.occurrences(~l))
        if (f_.lits(id).size() == 2) edge_ids.push_back(id);
    std::sort(edge_ids.begin(), edge_ids.end());
    edge_ids.erase(std::unique(edge_ids.begin(), edge_ids.end()), edge_ids.end());
    for (ClauseId id : edge_ids) {
      const LitVec& c = f_.lits(id);
      if (contains_lit(comp, ~c[0]) && contains_lit(comp, c[1])) binaries.push_back({id, c});
      else if (contains_lit(comp, ~c[1]) && contains_lit(comp, c[0])) binaries.push_back({id, c});
    }

    Lit self_dual;
    bool has_self_dual = false;
    for (std::size_t i = 1; i < comp.size(); ++i)
      if (comp[i].var() == comp[i - 1].var()) {
        self_dual = comp[i - 1];
        has_self_dual = true;
        break;
      }
    LitVec universals;
    for (Lit l : comp)
      if (p.is_universal(l)) universals.push_back(l);
    const Lit rep = *std::min_element(comp.begin(), comp.end(), [&](Lit a, Lit b) { return p.less(a, b); });

    if (universals.size() >= 2) {
      emit(ElsRefute{1, {universals[0], universals[1]}, binaries});
      break;
    }
    if (universals.size() == 1 && !p.is_universal(rep)) {
      emit(ElsRefute{2, {rep, universals[0]}, binaries});
      break;
    }
    // a self-dual class with a universal holds both its literals: case 1
    if (has_self_dual) {
      emit(ElsRefute{3, {self_dual}, binaries});
      break;
    }

    ElsSubst step{comp, rep, binaries, {}};
    auto substitute = [&](Lit l) {
      if (l != rep && contains_lit(comp, l)) return rep;
      if (~l != rep && contains_lit(comp, ~l)) return ~rep;
      return l;
    };
    std::vector<ClauseId> touched;
    for (Lit l : comp) {
      if (l == rep) continue;
      for (ClauseId id : f_.occurrences(l)) touched.push_back(id);
      for (ClauseId id : f_.occurrences(~l)) touched.push_back(id);
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    ClauseId next = f_.next_clause_id();
    for (ClauseId id : touched) {
      LitVec lits;
      for (Lit l : f_.lits(id)) lits.push_back(substitute(l));
      const bool keep = normalize_clause(lits);
      step.rewrites.push_back({id, f_.lits(id), keep ? next++ : 0, keep ? lits : LitVec{}});
    }
    emit(std::move(step));
    for (Lit l : comp)
      if (l != rep && f_.occurrence_count(l.var()) == 0 && p.contains(l.var())) emit(DropVar{l.var()});
    changed = true;
  }
  return changed;
}

void Preprocessor::run_to_fixpoint() {
  // the input already reduces to the empty clause
  if (input_conflict_) return;
  using Pass = bool (Preprocessor::*)();
  const std::pair<bool, Pass> passes[] = {
      {config_.unit, &Preprocessor::unit_propagate},
      {config_.pure, &Preprocessor::pure_literals},
      {config_.subsumption, &Preprocessor::subsumption},
      {config_.self_subsumption, &Preprocessor::self_subsumption},
      {config_.els, &Preprocessor::equivalent_literals},
      {config_.bce, &Preprocessor::blocked_clauses},
      {config_.ve, &Preprocessor::eliminate_variables},
  };
  for (std::size_t round = 0; config_.max_iterations == 0 || round < config_.max_iterations; ++round) {
    bool changed = false;
    for (const auto& [enabled, pass] : passes) {
      if (stopped() || f_.empty_matrix()) break;
      if (!enabled) continue;
      changed |= (this->*pass)();
      if (!stopped()) changed |= drop_vanished();
    }
    if (!changed || stopped() || f_.empty_matrix()) break;
  }
  if (!stopped()) drop_vanished();
}

PreprocessResult preprocess(const Formula& f, const PreprocessConfig& config) {
  PreprocessResult out{f, {}, std::nullopt};
  out.trace.digest_in = digest(f);
  Preprocessor pre(out.formula, out.trace, config);
  pre.run_to_fixpoint();
  out.verdict = pre.verdict();
  out.trace.digest_out = digest(out.formula);
  return out;
}

}  // namespace qbfcert
