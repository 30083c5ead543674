#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qbfcert/formula.hpp"

namespace qbfcert {

/// Immutable boolean expression with shared subterms. Constructors fold
/// constants, cancel double negation and collapse single-child And/Or;
/// nothing else is simplified.
class Expr {
 public:
  enum class Kind { kConst, kVar, kNot, kAnd, kOr };

  Expr() : Expr(constant(false)) {}
  static Expr constant(bool value);
  static Expr variable(Var v);
  static Expr literal(Lit l);
  static Expr negation(const Expr& e);
  static Expr conjunction(std::vector<Expr> children);
  static Expr disjunction(std::vector<Expr> children);

  Kind kind() const { return node_->kind; }
  bool is_const() const { return kind() == Kind::kConst; }
  bool value() const { return node_->value; }
  Var var() const { return node_->var; }
  const std::vector<Expr>& children() const { return node_->children; }
  /// Stable identity of the shared node.
  const void* id() const { return node_.get(); }

  bool eval(const std::function<bool(Var)>& assignment) const;
  /// Variables occurring anywhere in the expression, sorted.
  std::vector<Var> vars() const;

 private:
  struct Node {
    Kind kind = Kind::kConst;
    bool value = false;
    Var var = 0;
    std::vector<Expr> children;
  };
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Kind k, std::vector<Expr> children);
  std::shared_ptr<const Node> node_;
};

Expr operator!(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);
std::string to_string(const Expr& e);

}  // namespace qbfcert
