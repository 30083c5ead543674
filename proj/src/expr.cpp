#include "qbfcert/expr.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace qbfcert {

Expr Expr::constant(bool value) {
  static const Expr kFalse(std::make_shared<const Node>(Node{Kind::kConst, false, 0, {}}));
  static const Expr kTrue(std::make_shared<const Node>(Node{Kind::kConst, true, 0, {}}));
  return value ? kTrue : kFalse;
}

Expr Expr::variable(Var v) { return Expr(std::make_shared<const Node>(Node{Kind::kVar, false, v, {}})); }

Expr Expr::literal(Lit l) {
  Expr v = variable(l.var());
  return l.is_negated() ? negation(v) : v;
}

Expr Expr::negation(const Expr& e) {
  if (e.is_const()) return constant(!e.value());
  if (e.kind() == Kind::kNot) return e.children().front();
  return Expr(std::make_shared<const Node>(Node{Kind::kNot, false, 0, {e}}));
}

Expr Expr::make(Kind k, std::vector<Expr> children) {
  const bool absorbing = k == Kind::kOr;  // constant that decides the result
  std::vector<Expr> kept;
  kept.reserve(children.size());
  for (auto& c : children) {
    if (c.is_const()) {
      if (c.value() == absorbing) return constant(absorbing);
      continue;
    }
    kept.push_back(std::move(c));
  }
  if (kept.empty()) return constant(!absorbing);
  if (kept.size() == 1) return kept.front();
  return Expr(std::make_shared<const Node>(Node{k, false, 0, std::move(kept)}));
}

Expr Expr::conjunction(std::vector<Expr> children) { return make(Kind::kAnd, std::move(children)); }
Expr Expr::disjunction(std::vector<Expr> children) { return make(Kind::kOr, std::move(children)); }

Expr operator!(const Expr& e) { return Expr::negation(e); }

bool Expr::eval(const std::function<bool(Var)>& assignment) const {
  switch (kind()) {
    case Kind::kConst:
      return value();
    case Kind::kVar:
      return assignment(var());
    case Kind::kNot:
      return !children().front().eval(assignment);
    case Kind::kAnd:
      return std::all_of(children().begin(), children().end(), [&](const Expr& c) { return c.eval(assignment); });
    case Kind::kOr:
      return std::any_of(children().begin(), children().end(), [&](const Expr& c) { return c.eval(assignment); });
  }
  return false;
}

std::vector<Var> Expr::vars() const {
  std::vector<Var> out;
  std::unordered_set<const void*> seen;
  std::vector<Expr> stack{*this};
  while (!stack.empty()) {
    Expr e = stack.back();
    stack.pop_back();
    if (!seen.insert(e.id()).second) continue;
    if (e.kind() == Kind::kVar) out.push_back(e.var());
    for (const auto& c : e.children()) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::kConst:
      return a.value() == b.value();
    case Expr::Kind::kVar:
      return a.var() == b.var();
    default:
      break;
  }
  if (a.children().size() != b.children().size()) return false;
  for (std::size_t i = 0; i < a.children().size(); ++i)
    if (!structurally_equal(a.children()[i], b.children()[i])) return false;
  return true;
}

std::string to_string(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::kConst:
      return e.value() ? "1" : "0";
    case Expr::Kind::kVar:
      return std::to_string(e.var());
    case Expr::Kind::kNot:
      return "!" + to_string(e.children().front());
    case Expr::Kind::kAnd:
    case Expr::Kind::kOr: {
      const char* op = e.kind() == Expr::Kind::kAnd ? " & " : " | ";
      std::string s = "(";
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i) s += op;
        s += to_string(e.children()[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

}  // namespace qbfcert
