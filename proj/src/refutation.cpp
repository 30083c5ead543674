#include <algorithm>
#include <set>
#include <sstream>

#include "qbfcert/certs.hpp"
#include "qbfcert/trace.hpp"

namespace qbfcert {

ProofNode ProofNode::input(ClauseId id, LitVec lits) {
  ProofNode n;
  n.kind = Kind::kInput;
  n.clause_id = id;
  n.lits = std::move(lits);
  return n;
}

ProofNode ProofNode::resolvent(LitVec lits, std::uint32_t left, std::uint32_t right, Lit pivot) {
  ProofNode n;
  n.kind = Kind::kResolvent;
  n.lits = std::move(lits);
  n.left = left;
  n.right = right;
  n.pivot = pivot;
  return n;
}

ProofNode ProofNode::reduction(LitVec lits, std::uint32_t child) {
  ProofNode n;
  n.kind = Kind::kForallRed;
  n.lits = std::move(lits);
  n.left = child;
  return n;
}

Refutation compact(const Refutation& proof, std::uint32_t root) {
  const auto n = proof.nodes.size();
  constexpr std::uint32_t kUnset = ~std::uint32_t{0};
  std::vector<std::uint32_t> remap(n, kUnset);
  std::vector<char> on_stack(n, 0);
  Refutation out;
  // iterative post-order DFS
  std::vector<std::pair<std::uint32_t, int>> stack{{root, 0}};
  while (!stack.empty()) {
    auto& [idx, state] = stack.back();
    const ProofNode& node = proof.nodes.at(idx);
    std::vector<std::uint32_t> kids;
    if (node.kind == ProofNode::Kind::kResolvent) kids = {node.left, node.right};
    if (node.kind == ProofNode::Kind::kForallRed) kids = {node.left};
    if (state < static_cast<int>(kids.size())) {
      std::uint32_t kid = kids[static_cast<std::size_t>(state)];
      ++state;
      if (remap.at(kid) == kUnset) {
        if (on_stack[kid]) throw std::invalid_argument("cycle in proof DAG");
        on_stack[kid] = 1;
        stack.emplace_back(kid, 0);
      }
      continue;
    }
    ProofNode copy = node;
    if (copy.kind == ProofNode::Kind::kResolvent) {
      copy.left = remap[node.left];
      copy.right = remap[node.right];
    } else if (copy.kind == ProofNode::Kind::kForallRed) {
      copy.left = remap[node.left];
    }
    remap[idx] = out.add(std::move(copy));
    on_stack[idx] = 0;
    stack.pop_back();
  }
  return out;
}

const char* to_string(ProofFault fault) {
  switch (fault) {
    case ProofFault::kNone: return "none";
    case ProofFault::kEmptyProof: return "empty proof";
    case ProofFault::kBadAntecedent: return "antecedent does not precede node";
    case ProofFault::kUnknownVariable: return "unknown variable";
    case ProofFault::kInputNotInFormula: return "input clause not in formula";
    case ProofFault::kPivotMissing: return "pivot missing from antecedent";
    case ProofFault::kResolventUndefined: return "resolution undefined";
    case ProofFault::kResolventMismatch: return "resolvent mismatch";
    case ProofFault::kInvalidReduction: return "invalid universal reduction";
    case ProofFault::kRootNotEmpty: return "root is not the empty clause";
  }
  return "?";
}

ProofCheck check_refutation(const Formula& f, const Refutation& proof) {
  const Prefix& p = f.prefix();
  auto reject = [](ProofFault fault, std::uint32_t node, std::string msg) {
    return ProofCheck{false, fault, node, std::move(msg)};
  };
  if (proof.nodes.empty()) return reject(ProofFault::kEmptyProof, 0, "proof has no nodes");

  std::set<LitVec> matrix;
  for (ClauseId id : f.live_ids()) matrix.insert(f.lits(id));

  LitVec scratch;
  for (std::uint32_t i = 0; i < proof.nodes.size(); ++i) {
    const ProofNode& n = proof.nodes[i];
    for (Lit l : n.lits)
      if (!p.contains(l.var())) return reject(ProofFault::kUnknownVariable, i, "variable " + std::to_string(l.var()));
    switch (n.kind) {
      case ProofNode::Kind::kInput:
        if (!matrix.contains(n.lits)) return reject(ProofFault::kInputNotInFormula, i, to_string(n.lits));
        break;
      case ProofNode::Kind::kResolvent: {
        if (n.left >= i || n.right >= i) return reject(ProofFault::kBadAntecedent, i, "resolvent antecedent");
        const auto& a = proof.nodes[n.left].lits;
        const auto& b = proof.nodes[n.right].lits;
        if (!contains_lit(a, n.pivot) || !contains_lit(b, ~n.pivot))
          return reject(ProofFault::kPivotMissing, i, "pivot " + std::to_string(n.pivot.dimacs()));
        if (!resolve(a, b, n.pivot, scratch))
          return reject(ProofFault::kResolventUndefined, i, to_string(a) + " x " + to_string(b));
        if (scratch != n.lits)
          return reject(ProofFault::kResolventMismatch, i, "expected " + to_string(scratch) + ", got " + to_string(n.lits));
        break;
      }
      case ProofNode::Kind::kForallRed: {
        if (n.left >= i) return reject(ProofFault::kBadAntecedent, i, "reduction child");
        const auto& child = proof.nodes[n.left].lits;
        if (!std::is_sorted(n.lits.begin(), n.lits.end()) || !is_subset(n.lits, child))
          return reject(ProofFault::kInvalidReduction, i, "literals are not a subset of the child clause");
        for (Lit l : child) {
          if (contains_lit(n.lits, l)) continue;
          if (!p.is_universal(l))
            return reject(ProofFault::kInvalidReduction, i, "removed existential literal " + std::to_string(l.dimacs()));
          for (Lit k : child) {
            if (p.is_existential(k) && p.less(l, k))
              return reject(ProofFault::kInvalidReduction, i,
                            "literal " + std::to_string(l.dimacs()) + " blocked by " + std::to_string(k.dimacs()));
          }
        }
        break;
      }
    }
  }
  if (!proof.nodes.back().lits.empty())
    return reject(ProofFault::kRootNotEmpty, proof.root(), to_string(proof.nodes.back().lits));
  return {true, ProofFault::kNone, 0, {}};
}

std::size_t refutation_size(const Refutation& proof) {
  return static_cast<std::size_t>(std::count_if(proof.nodes.begin(), proof.nodes.end(), [](const ProofNode& n) {
    return n.kind == ProofNode::Kind::kResolvent;
  }));
}

void write_refutation(std::ostream& out, const Refutation& proof) {
  out << "r qbf-refutation 1\n";
  for (std::uint32_t i = 0; i < proof.nodes.size(); ++i) {
    const ProofNode& n = proof.nodes[i];
    out << i + 1;
    for (Lit l : n.lits) out << ' ' << l.dimacs();
    out << " 0";
    switch (n.kind) {
      case ProofNode::Kind::kInput:
        out << " 0 " << n.clause_id;
        break;
      case ProofNode::Kind::kResolvent:
        out << ' ' << n.left + 1 << ' ' << n.right + 1 << " 0 p " << n.pivot.dimacs();
        break;
      case ProofNode::Kind::kForallRed:
        out << ' ' << n.left + 1 << " 0";
        break;
    }
    out << '\n';
  }
}

std::string to_string(const Refutation& proof) {
  std::ostringstream ss;
  write_refutation(ss, proof);
  return ss.str();
}

namespace {

long next_int(std::istringstream& ss, std::size_t line_no) {
  std::string tok;
  if (!(ss >> tok)) throw ParseError(line_no, "unexpected end of line");
  char* end = nullptr;
  long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') throw ParseError(line_no, "expected integer, got '" + tok + "'");
  return v;
}

}  // namespace

Refutation parse_refutation(std::istream& in) {
  Refutation proof;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == 'c') continue;
    std::istringstream ss(line);
    if (!header) {
      std::string r, kind, version;
      ss >> r >> kind >> version;
      if (r != "r" || kind != "qbf-refutation" || version != "1")
        throw ParseError(line_no, "expected 'r qbf-refutation 1'");
      header = true;
      continue;
    }
    long idx = next_int(ss, line_no);
    if (idx != static_cast<long>(proof.nodes.size()) + 1) throw ParseError(line_no, "node index out of sequence");
    LitVec lits;
    for (long v = next_int(ss, line_no); v != 0; v = next_int(ss, line_no)) lits.push_back(Lit::from_dimacs(v));
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    std::vector<std::uint32_t> ants;
    for (long v = next_int(ss, line_no); v != 0; v = next_int(ss, line_no)) {
      if (v < 1 || v > idx - 1) throw ParseError(line_no, "antecedent index out of range");
      ants.push_back(static_cast<std::uint32_t>(v - 1));
    }
    std::string extra;
    if (ants.empty()) {
      long cid = next_int(ss, line_no);
      if (cid < 0) throw ParseError(line_no, "negative clause id");
      proof.add(ProofNode::input(static_cast<ClauseId>(cid), std::move(lits)));
    } else if (ants.size() == 1) {
      proof.add(ProofNode::reduction(std::move(lits), ants[0]));
    } else if (ants.size() == 2) {
      std::string marker;
      if (!(ss >> marker) || marker != "p") throw ParseError(line_no, "expected 'p <pivot>'");
      long piv = next_int(ss, line_no);
      if (piv == 0) throw ParseError(line_no, "pivot must be a literal");
      proof.add(ProofNode::resolvent(std::move(lits), ants[0], ants[1], Lit::from_dimacs(piv)));
    } else {
      throw ParseError(line_no, "too many antecedents");
    }
    if (ss >> extra) throw ParseError(line_no, "trailing token '" + extra + "'");
  }
  if (!header) throw ParseError(line_no, "missing refutation header");
  return proof;
}

}  // namespace qbfcert
