#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "qbfcert/certs.hpp"

namespace qbfcert {

Expr substitute_model(const Model& m, const Prefix& p, Lit l) {
  if (p.is_universal(l)) return Expr::literal(l);
  const Expr* def = m.find(l.var());
  if (!def) throw FormulaError("missing definition for existential variable " + std::to_string(l.var()));
  return l.is_negated() ? !*def : *def;
}

Expr substitute_model(const Model& m, const Prefix& p, std::span<const Lit> clause) {
  std::vector<Expr> parts;
  parts.reserve(clause.size());
  for (Lit l : clause) parts.push_back(substitute_model(m, p, l));
  return Expr::disjunction(std::move(parts));
}

Expr substitute_model(const Model& m, const Formula& f) {
  std::vector<Expr> parts;
  for (ClauseId id : f.live_ids()) parts.push_back(substitute_model(m, f.prefix(), f.lits(id)));
  return Expr::conjunction(std::move(parts));
}

Expr substitute_model(const Model& m, const Prefix& p, const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::kConst:
      return e;
    case Expr::Kind::kVar:
      return substitute_model(m, p, Lit::positive(e.var()));
    case Expr::Kind::kNot:
      return !substitute_model(m, p, e.children().front());
    case Expr::Kind::kAnd:
    case Expr::Kind::kOr: {
      std::vector<Expr> kids;
      for (const auto& c : e.children()) kids.push_back(substitute_model(m, p, c));
      return e.kind() == Expr::Kind::kAnd ? Expr::conjunction(std::move(kids)) : Expr::disjunction(std::move(kids));
    }
  }
  return e;
}

namespace {

/// Flattened expression DAG evaluated bottom-up for one universal assignment.
class Program {
 public:
  std::uint32_t compile(const Expr& e) {
    if (auto it = slot_.find(e.id()); it != slot_.end()) return it->second;
    Op op{e.kind(), e.value(), e.kind() == Expr::Kind::kVar ? e.var() : 0, {}};
    for (const auto& c : e.children()) op.args.push_back(compile(c));
    ops_.push_back(std::move(op));
    auto s = static_cast<std::uint32_t>(ops_.size() - 1);
    slot_.emplace(e.id(), s);
    return s;
  }

  void run(const std::vector<char>& universal_values, std::vector<char>& out) const {
    out.resize(ops_.size());
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      const Op& op = ops_[i];
      switch (op.kind) {
        case Expr::Kind::kConst: out[i] = op.value; break;
        case Expr::Kind::kVar: out[i] = universal_values[op.var]; break;
        case Expr::Kind::kNot: out[i] = !out[op.args[0]]; break;
        case Expr::Kind::kAnd:
          out[i] = std::all_of(op.args.begin(), op.args.end(), [&](std::uint32_t a) { return out[a] != 0; });
          break;
        case Expr::Kind::kOr:
          out[i] = std::any_of(op.args.begin(), op.args.end(), [&](std::uint32_t a) { return out[a] != 0; });
          break;
      }
    }
  }

 private:
  struct Op {
    Expr::Kind kind;
    bool value;
    Var var;
    std::vector<std::uint32_t> args;
  };
  std::vector<Op> ops_;
  std::unordered_map<const void*, std::uint32_t> slot_;
};

}  // namespace

ModelCheck check_model(const Formula& f, const Model& m, std::uint64_t max_enum) {
  const Prefix& p = f.prefix();
  ModelCheck result;
  auto scope_error = [&](std::string msg) {
    result.verdict = ModelVerdict::kScopeViolation;
    result.message = std::move(msg);
    return result;
  };

  for (const auto& [v, def] : m.defs) {
    if (!p.contains(v) || !p.is_existential(v))
      return scope_error("definition for " + std::to_string(v) + ", which is not an existential variable");
    for (Var u : def.vars()) {
      if (!p.contains(u) || !p.is_universal(u))
        return scope_error("definition of " + std::to_string(v) + " mentions non-universal variable " + std::to_string(u));
      if (!p.less(u, v))
        return scope_error("definition of " + std::to_string(v) + " mentions later universal " + std::to_string(u));
    }
  }

  std::vector<Var> universals;
  Program prog;
  std::vector<std::uint32_t> def_slot(p.max_var() + 1, 0);
  for (Var v : p.vars_in_order()) {
    if (p.is_universal(v)) {
      universals.push_back(v);
      continue;
    }
    const Expr* def = m.find(v);
    if (!def) return scope_error("missing definition for existential variable " + std::to_string(v));
    def_slot[v] = prog.compile(*def);
  }

  const std::size_t k = universals.size();
  if (k >= 64 || (std::uint64_t{1} << k) > max_enum) {
    result.verdict = ModelVerdict::kTooLarge;
    result.message = std::to_string(k) + " universal variables exceed the enumeration bound";
    return result;
  }

  std::vector<LitVec> clauses;
  for (ClauseId id : f.live_ids()) clauses.push_back(f.lits(id));

  std::vector<char> uval(p.max_var() + 1, 0);
  std::vector<char> slots;
  const std::uint64_t total = std::uint64_t{1} << k;
  for (std::uint64_t t = 0; t < total; ++t) {
    for (std::size_t i = 0; i < k; ++i) uval[universals[i]] = static_cast<char>((t >> (k - 1 - i)) & 1u);
    prog.run(uval, slots);
    auto lit_value = [&](Lit l) {
      bool v = p.is_universal(l) ? uval[l.var()] != 0 : slots[def_slot[l.var()]] != 0;
      return v != l.is_negated();
    };
    for (const auto& c : clauses) {
      if (std::any_of(c.begin(), c.end(), lit_value)) continue;
      result.verdict = ModelVerdict::kReject;
      for (Var u : universals) result.counterexample.emplace_back(u, uval[u] != 0);
      result.message = "clause " + to_string(c) + " falsified";
      return result;
    }
  }
  result.verdict = ModelVerdict::kAccept;
  return result;
}

// ---------------------------------------------------------------------------
// Gate lists

namespace {

class GateBuilder {
 public:
  explicit GateBuilder(GateList& out) : out_(out) {}

  GateRef build(const Expr& e) {
    switch (e.kind()) {
      case Expr::Kind::kConst:
        return {GateRef::Kind::kConst, e.value() ? 1u : 0u, false};
      case Expr::Kind::kVar:
        return {GateRef::Kind::kVar, e.var(), false};
      case Expr::Kind::kNot: {
        GateRef r = build(e.children().front());
        r.negated = !r.negated;
        return r;
      }
      case Expr::Kind::kAnd:
      case Expr::Kind::kOr:
        break;
    }
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    const bool is_or = e.kind() == Expr::Kind::kOr;
    auto child = [&](std::size_t i) {
      GateRef r = build(e.children()[i]);
      if (is_or) r.negated = !r.negated;
      return r;
    };
    // children are built in chain order so a re-parsed chain yields the same numbering
    GateRef acc = child(0);
    for (std::size_t i = 1; i < e.children().size(); ++i) {
      GateRef next = child(i);
      out_.gates.emplace_back(acc, next);
      acc = {GateRef::Kind::kGate, static_cast<std::uint32_t>(out_.gates.size() - 1), false};
    }
    if (is_or) acc.negated = !acc.negated;
    memo_.emplace(e.id(), acc);
    return acc;
  }

 private:
  GateList& out_;
  std::unordered_map<const void*, GateRef> memo_;
};

}  // namespace

GateList to_gates(const Model& m) {
  GateList gl;
  GateBuilder builder(gl);
  for (const auto& [v, def] : m.defs) gl.defs.emplace(v, builder.build(def));
  return gl;
}

std::size_t model_size(const Model& m) { return to_gates(m).gates.size(); }

void write_model(std::ostream& out, const Model& m) {
  GateList gl = to_gates(m);
  std::uint32_t max_id = 0;
  auto bump = [&](const GateRef& r) {
    if (r.kind == GateRef::Kind::kVar) max_id = std::max(max_id, r.index);
  };
  for (const auto& [a, b] : gl.gates) {
    bump(a);
    bump(b);
  }
  for (const auto& [v, r] : gl.defs) {
    max_id = std::max(max_id, v);
    bump(r);
  }
  const std::uint32_t base = max_id + 1;
  auto ref = [&](const GateRef& r) -> std::string {
    switch (r.kind) {
      case GateRef::Kind::kConst:
        return (r.index != 0) != r.negated ? "T" : "F";
      case GateRef::Kind::kVar:
        return (r.negated ? "-" : "") + std::to_string(r.index);
      case GateRef::Kind::kGate:
        return (r.negated ? "-" : "") + std::to_string(base + r.index);
    }
    return "?";
  };
  out << "m qbf-model 1\n";
  for (std::size_t i = 0; i < gl.gates.size(); ++i)
    out << "g " << base + i << " = AND " << ref(gl.gates[i].first) << ' ' << ref(gl.gates[i].second) << '\n';
  for (const auto& [v, r] : gl.defs) out << "d " << v << " = " << ref(r) << '\n';
}

std::string to_string(const Model& m) {
  std::ostringstream ss;
  write_model(ss, m);
  return ss.str();
}

Model parse_model(std::istream& in) {
  Model m;
  std::unordered_map<long, Expr> gates;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;

  auto parse_ref = [&](const std::string& tok) -> Expr {
    bool neg = !tok.empty() && tok[0] == '-';
    std::string body = neg ? tok.substr(1) : tok;
    Expr e;
    if (body == "T" || body == "F") {
      e = Expr::constant(body == "T");
    } else {
      char* end = nullptr;
      long v = std::strtol(body.c_str(), &end, 10);
      if (body.empty() || *end != '\0' || v <= 0) throw ParseError(line_no, "malformed reference '" + tok + "'");
      auto it = gates.find(v);
      e = it != gates.end() ? it->second : Expr::variable(static_cast<Var>(v));
    }
    return neg ? !e : e;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == 'c') continue;
    std::istringstream ss(line);
    std::string kind;
    ss >> kind;
    if (!header) {
      std::string name, version;
      ss >> name >> version;
      if (kind != "m" || name != "qbf-model" || version != "1") throw ParseError(line_no, "expected 'm qbf-model 1'");
      header = true;
      continue;
    }
    std::string id_tok, eq, extra;
    ss >> id_tok >> eq;
    char* end = nullptr;
    long id = std::strtol(id_tok.c_str(), &end, 10);
    if (id_tok.empty() || *end != '\0' || id <= 0 || eq != "=") throw ParseError(line_no, "malformed line");
    if (kind == "g") {
      std::string op, a, b;
      if (!(ss >> op >> a >> b) || op != "AND") throw ParseError(line_no, "expected 'AND <ref> <ref>'");
      if (gates.contains(id)) throw ParseError(line_no, "gate " + id_tok + " defined twice");
      gates.emplace(id, Expr::conjunction({parse_ref(a), parse_ref(b)}));
    } else if (kind == "d") {
      std::string r;
      if (!(ss >> r)) throw ParseError(line_no, "missing definition");
      if (m.find(static_cast<Var>(id))) throw ParseError(line_no, "variable " + id_tok + " defined twice");
      m.set(static_cast<Var>(id), parse_ref(r));
    } else {
      throw ParseError(line_no, "unknown line kind '" + kind + "'");
    }
    if (ss >> extra) throw ParseError(line_no, "trailing token '" + extra + "'");
  }
  if (!header) throw ParseError(line_no, "missing model header");
  return m;
}

}  // namespace qbfcert
