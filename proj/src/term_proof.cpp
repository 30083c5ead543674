#include <algorithm>
#include <stdexcept>

#include "qbfcert/certs.hpp"
#include "qbfcert/trace.hpp"

namespace qbfcert {

std::size_t TermProof::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TermNode& n) { return n.kind == TermNode::Kind::kModelGen; }));
}

TermCheck check_term_proof(const Formula& f, const TermProof& proof) {
  const Prefix& p = f.prefix();
  auto reject = [](std::uint32_t node, std::string msg) { return TermCheck{false, node, std::move(msg)}; };
  if (proof.nodes.empty()) return reject(0, "proof has no nodes");

  LitVec scratch;
  for (std::uint32_t i = 0; i < proof.nodes.size(); ++i) {
    const TermNode& n = proof.nodes[i];
    LitVec norm = n.lits;
    if (!normalize_clause(norm) || norm != n.lits) return reject(i, "term is not a normalized consistent literal set");
    for (Lit l : n.lits)
      if (!p.contains(l.var())) return reject(i, "unknown variable " + std::to_string(l.var()));
    switch (n.kind) {
      case TermNode::Kind::kModelGen:
        for (ClauseId id : f.live_ids()) {
          const auto& c = f.lits(id);
          if (std::none_of(c.begin(), c.end(), [&](Lit l) { return contains_lit(n.lits, l); }))
            return reject(i, "leaf misses clause " + to_string(c));
        }
        break;
      case TermNode::Kind::kResolvent: {
        if (n.left >= i || n.right >= i) return reject(i, "antecedent does not precede node");
        // the resolution rule on terms has the same shape as on clauses
        if (!resolve(proof.nodes[n.left].lits, proof.nodes[n.right].lits, n.pivot, scratch))
          return reject(i, "term resolution undefined");
        if (scratch != n.lits) return reject(i, "term resolvent mismatch");
        break;
      }
      case TermNode::Kind::kExistsRed: {
        if (n.left >= i) return reject(i, "antecedent does not precede node");
        const auto& child = proof.nodes[n.left].lits;
        if (!is_subset(n.lits, child)) return reject(i, "reduced term is not a subset of its child");
        for (Lit l : child) {
          if (contains_lit(n.lits, l)) continue;
          if (!p.is_existential(l)) return reject(i, "reduction removed universal literal " + std::to_string(l.dimacs()));
          for (Lit k : child)
            if (p.is_universal(k) && p.less(l, k))
              return reject(i, "existential " + std::to_string(l.dimacs()) + " precedes universal " +
                                   std::to_string(k.dimacs()));
        }
        break;
      }
    }
  }
  if (!proof.nodes.back().lits.empty()) return reject(static_cast<std::uint32_t>(proof.nodes.size() - 1), "root term is not empty");
  return {true, 0, {}};
}

namespace {

class TermProver {
 public:
  explicit TermProver(const Formula& f) : f_(f), order_(f.prefix().vars_in_order()) {
    for (ClauseId id : f.live_ids()) clauses_.push_back(f.lits(id));
  }

  std::optional<std::uint32_t> solve(std::size_t depth) {
    if (falsified()) return std::nullopt;
    if (depth == order_.size()) {
      TermNode leaf;
      for (Var v : order_) leaf.lits.push_back(Lit::make(v, !*values_.get(v)));
      std::sort(leaf.lits.begin(), leaf.lits.end());
      return proof_.add(std::move(leaf));
    }
    const Var v = order_[depth];
    if (f_.prefix().is_existential(v)) {
      for (bool value : {false, true}) {
        values_.set(v, value);
        auto sub = solve(depth + 1);
        values_.unset(v);
        if (sub) return reduce(*sub, v);
      }
      return std::nullopt;
    }
    values_.set(v, false);
    auto low = solve(depth + 1);
    std::optional<std::uint32_t> high;
    if (low) {
      values_.set(v, true);
      high = solve(depth + 1);
    }
    values_.unset(v);
    if (!low || !high) return std::nullopt;
    if (!contains_lit(proof_.nodes[*low].lits, Lit::negative(v))) return low;
    if (!contains_lit(proof_.nodes[*high].lits, Lit::positive(v))) return high;
    TermNode r;
    r.kind = TermNode::Kind::kResolvent;
    r.left = *high;
    r.right = *low;
    r.pivot = Lit::positive(v);
    if (!resolve(proof_.nodes[*high].lits, proof_.nodes[*low].lits, r.pivot, r.lits))
      throw std::logic_error("branch terms disagree outside the pivot");
    return proof_.add(std::move(r));
  }

  TermProof take(std::uint32_t root) {
    // drop nodes from abandoned branches
    std::vector<char> keep(proof_.nodes.size(), 0);
    keep[root] = 1;
    for (std::uint32_t i = root + 1; i-- > 0;) {
      if (!keep[i]) continue;
      const TermNode& n = proof_.nodes[i];
      if (n.kind != TermNode::Kind::kModelGen) keep[n.left] = 1;
      if (n.kind == TermNode::Kind::kResolvent) keep[n.right] = 1;
    }
    std::vector<std::uint32_t> remap(proof_.nodes.size(), 0);
    TermProof out;
    for (std::uint32_t i = 0; i <= root; ++i) {
      if (!keep[i]) continue;
      TermNode n = proof_.nodes[i];
      n.left = remap[n.left];
      n.right = remap[n.right];
      remap[i] = out.add(std::move(n));
    }
    return out;
  }

 private:
  std::uint32_t reduce(std::uint32_t node, Var v) {
    const auto& lits = proof_.nodes[node].lits;
    auto it = std::find_if(lits.begin(), lits.end(), [&](Lit l) { return l.var() == v; });
    if (it == lits.end()) return node;
    TermNode r;
    r.kind = TermNode::Kind::kExistsRed;
    r.left = node;
    r.lits = lits;
    r.lits.erase(r.lits.begin() + (it - lits.begin()));
    return proof_.add(std::move(r));
  }

  bool falsified() const {
    for (const auto& c : clauses_) {
      bool dead = std::all_of(c.begin(), c.end(), [&](Lit l) {
        auto val = values_.get(l.var());
        return val && *val == l.is_negated();
      });
      if (dead) return true;
    }
    return false;
  }

  const Formula& f_;
  std::vector<Var> order_;
  std::vector<LitVec> clauses_;
  Assignment values_;
  TermProof proof_;
};

}  // namespace

std::optional<TermProof> naive_term_prover(const Formula& f, std::size_t max_universals) {
  std::size_t universals = 0;
  for (Var v : f.prefix().vars_in_order())
    if (f.prefix().is_universal(v)) ++universals;
  if (universals > max_universals) throw std::length_error("too many universal variables for the naive term prover");
  TermProver prover(f);
  auto root = prover.solve(0);
  if (!root) return std::nullopt;
  return prover.take(*root);
}

}  // namespace qbfcert
