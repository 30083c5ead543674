#include <sstream>

#include "qbfcert/certs.hpp"

namespace qbfcert {

Certificate parse_certificate(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::istringstream probe(text);
  std::string line;
  while (std::getline(probe, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == 'c') continue;
    std::istringstream ss(text);
    if (line[first] == 'm') return parse_model(ss);
    if (line[first] == 'r') return parse_refutation(ss);
    break;
  }
  throw ParseError(1, "unrecognized certificate header");
}

void write_certificate(std::ostream& out, const Certificate& c) {
  if (const auto* r = std::get_if<Refutation>(&c)) {
    write_refutation(out, *r);
  } else {
    write_model(out, std::get<Model>(c));
  }
}

namespace {

std::string clause_label(const LitVec& lits) {
  if (lits.empty()) return "&#8869;";
  std::string s;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(lits[i].dimacs());
  }
  return s;
}

}  // namespace

void write_dot(std::ostream& out, const Certificate& c) {
  if (const auto* proof = std::get_if<Refutation>(&c)) {
    out << "digraph refutation {\n  rankdir=BT;\n  node [shape=box, fontname=monospace];\n";
    for (std::uint32_t i = 0; i < proof->nodes.size(); ++i) {
      const ProofNode& n = proof->nodes[i];
      out << "  n" << i << " [label=\"" << clause_label(n.lits) << "\"";
      if (n.kind == ProofNode::Kind::kInput) out << ", style=filled, fillcolor=lightgrey";
      if (n.kind == ProofNode::Kind::kForallRed) out << ", shape=ellipse";
      out << "];\n";
      if (n.kind == ProofNode::Kind::kResolvent) {
        out << "  n" << n.left << " -> n" << i << " [label=\"" << n.pivot.dimacs() << "\"];\n";
        out << "  n" << n.right << " -> n" << i << ";\n";
      } else if (n.kind == ProofNode::Kind::kForallRed) {
        out << "  n" << n.left << " -> n" << i << " [style=dashed];\n";
      }
    }
    out << "}\n";
    return;
  }
  const GateList gl = to_gates(std::get<Model>(c));
  auto ref_node = [](const GateRef& r) -> std::string {
    switch (r.kind) {
      case GateRef::Kind::kConst: return r.index ? "T" : "F";
      case GateRef::Kind::kVar: return "v" + std::to_string(r.index);
      case GateRef::Kind::kGate: return "g" + std::to_string(r.index);
    }
    return "?";
  };
  auto edge = [&](const GateRef& from, const std::string& to) {
    out << "  " << ref_node(from) << " -> " << to << (from.negated ? " [arrowhead=odot]" : "") << ";\n";
  };
  out << "digraph model {\n  rankdir=BT;\n  T [shape=plaintext]; F [shape=plaintext];\n";
  for (std::size_t i = 0; i < gl.gates.size(); ++i) {
    out << "  g" << i << " [label=\"AND\", shape=circle];\n";
    edge(gl.gates[i].first, "g" + std::to_string(i));
    edge(gl.gates[i].second, "g" + std::to_string(i));
  }
  for (const auto& [v, r] : gl.defs) {
    out << "  d" << v << " [label=\"e" << v << "\", shape=doublecircle];\n";
    edge(r, "d" + std::to_string(v));
  }
  out << "}\n";
}

}  // namespace qbfcert
