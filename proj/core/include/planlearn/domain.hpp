#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "planlearn/errors.hpp"

namespace planlearn {

// A schema-level atom: head name plus action-parameter indices (?arg0..?argN).
struct LiftedKey {
  std::string name;
  std::vector<int> params;

  auto operator<=>(const LiftedKey&) const = default;
};

enum class ParamStyle {
  Internal,  // ?arg0  (dataset / debug rendering)
  Pddl,      // ?arg_0 (emitted PDDL)
};

std::string to_string(const LiftedKey& k, ParamStyle style = ParamStyle::Internal);

enum class BinOp { Add, Sub, Mul, Div };

char op_char(BinOp op);

// Immutable arithmetic expression tree over lifted fluent keys and constants.
// Copies share nodes, so growing search frontiers stay cheap.
class Expression {
 public:
  enum class Kind { Constant, Variable, Binary };

  Expression() = default;
  static Expression constant(double value);
  static Expression variable(LiftedKey key);
  static Expression binary(BinOp op, Expression lhs, Expression rhs);

  Kind kind() const;
  double constant_value() const;
  const LiftedKey& key() const;
  BinOp op() const;
  Expression lhs() const;
  Expression rhs() const;

  int size() const;  // node count

  // Evaluates against a variable lookup. Returns nullopt when a variable is
  // unavailable or a division hits a zero denominator.
  template <class Lookup>
  std::optional<double> evaluate(Lookup&& lookup) const;

  std::string render(ParamStyle style = ParamStyle::Internal) const;

  // Normal form invariant under commutativity/associativity of + and *:
  // same-operator chains are flattened and operands sorted.
  std::string canonical() const;

  bool operator==(const Expression& other) const;
  bool valid() const { return node_ != nullptr; }

 private:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  template <class Lookup>
  static std::optional<double> eval_node(const Node* n, Lookup& lookup);

  std::shared_ptr<const Node> node_;
};

struct Expression::Node {
  Kind kind;
  int size = 1;
  double value = 0;
  LiftedKey key;
  BinOp op = BinOp::Add;
  std::shared_ptr<const Node> lhs, rhs;
};

template <class Lookup>
std::optional<double> Expression::eval_node(const Node* n, Lookup& lookup) {
  switch (n->kind) {
    case Kind::Constant:
      return n->value;
    case Kind::Variable:
      return lookup(n->key);
    case Kind::Binary: {
      auto a = eval_node(n->lhs.get(), lookup);
      if (!a) return std::nullopt;
      auto b = eval_node(n->rhs.get(), lookup);
      if (!b) return std::nullopt;
      switch (n->op) {
        case BinOp::Add: return *a + *b;
        case BinOp::Sub: return *a - *b;
        case BinOp::Mul: return *a * *b;
        case BinOp::Div:
          if (*b == 0.0) return std::nullopt;
          return *a / *b;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

template <class Lookup>
std::optional<double> Expression::evaluate(Lookup&& lookup) const {
  return eval_node(node_.get(), lookup);
}

enum class Comparator { Ge, Le, Gt, Lt, Eq };

std::string to_string(Comparator c);

struct LogicalCondition {
  LiftedKey key;
  bool truth = true;
};

struct NumericCondition {
  Comparator cmp = Comparator::Ge;
  Expression lhs, rhs;
};

using Condition = std::variant<LogicalCondition, NumericCondition>;

enum class NumericEffectKind { Increase, Decrease, Assign };

std::string to_string(NumericEffectKind k);

struct AddEffect {
  LiftedKey key;
};
struct DeleteEffect {
  LiftedKey key;
};
struct NumericEffect {
  NumericEffectKind kind = NumericEffectKind::Assign;
  LiftedKey target;
  Expression amount;
};

using Effect = std::variant<AddEffect, DeleteEffect, NumericEffect>;

// Canonical renderings used for ordering, deduplication, and structural
// comparison (expressions via Expression::canonical).
std::string canonical(const Condition& c);
std::string canonical(const Effect& e);
std::string render(const Condition& c, ParamStyle style);
std::string render(const Effect& e, ParamStyle style);

struct ActionModel {
  std::string name;
  int arity = 0;
  std::vector<Condition> preconditions;
  std::vector<Effect> effects;
};

struct Domain {
  std::string name;
  std::vector<ActionModel> actions;

  const ActionModel* find(const std::string& action_name) const;
};

// Emits the PDDL subset (requirements :typing :fluents). Deterministic:
// actions sorted by name, conditions and effects in canonical order; equal
// domains produce byte-equal text.
std::string serialize_domain(const Domain& d);

// Reads the same subset back; parse(serialize(d)) is structurally d.
// Throws DomainError, naming unsupported constructs (e.g. "when").
Domain parse_reference_domain(const std::string& text);

}  // namespace planlearn
