#include "planlearn/domain.hpp"

#include <algorithm>

#include "planlearn/text.hpp"

namespace planlearn {

std::string to_string(const LiftedKey& k, ParamStyle style) {
  std::string s = "(" + k.name;
  for (int p : k.params)
    s += (style == ParamStyle::Pddl ? " ?arg_" : " ?arg") + std::to_string(p);
  s += ")";
  return s;
}

char op_char(BinOp op) {
  switch (op) {
    case BinOp::Add: return '+';
    case BinOp::Sub: return '-';
    case BinOp::Mul: return '*';
    case BinOp::Div: return '/';
  }
  return '?';
}

Expression Expression::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expression(std::move(n));
}

Expression Expression::variable(LiftedKey key) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->key = std::move(key);
  return Expression(std::move(n));
}

Expression Expression::binary(BinOp op, Expression lhs, Expression rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->size = 1 + lhs.size() + rhs.size();
  n->lhs = lhs.node_;
  n->rhs = rhs.node_;
  return Expression(std::move(n));
}

Expression::Kind Expression::kind() const { return node_->kind; }
double Expression::constant_value() const { return node_->value; }
const LiftedKey& Expression::key() const { return node_->key; }
BinOp Expression::op() const { return node_->op; }
Expression Expression::lhs() const { return Expression(node_->lhs); }
Expression Expression::rhs() const { return Expression(node_->rhs); }
int Expression::size() const { return node_->size; }

std::string Expression::render(ParamStyle style) const {
  switch (kind()) {
    case Kind::Constant:
      return format_number(constant_value());
    case Kind::Variable:
      return to_string(key(), style);
    case Kind::Binary:
      return std::string("(") + op_char(op()) + " " + lhs().render(style) + " " +
             rhs().render(style) + ")";
  }
  return "";
}

namespace {

void collect_operands(const Expression& e, BinOp op, std::vector<std::string>& out) {
  if (e.kind() == Expression::Kind::Binary && e.op() == op) {
    collect_operands(e.lhs(), op, out);
    collect_operands(e.rhs(), op, out);
  } else {
    out.push_back(e.canonical());
  }
}

}  // namespace

std::string Expression::canonical() const {
  switch (kind()) {
    case Kind::Constant:
      return format_number(constant_value());
    case Kind::Variable:
      return to_string(key());
    case Kind::Binary: {
      if (op() == BinOp::Add || op() == BinOp::Mul) {
        std::vector<std::string> parts;
        collect_operands(*this, op(), parts);
        std::sort(parts.begin(), parts.end());
        std::string s = std::string("(") + op_char(op());
        for (const auto& p : parts) s += " " + p;
        return s + ")";
      }
      return std::string("(") + op_char(op()) + " " + lhs().canonical() + " " +
             rhs().canonical() + ")";
    }
  }
  return "";
}

bool Expression::operator==(const Expression& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::Constant: return constant_value() == other.constant_value();
    case Kind::Variable: return key() == other.key();
    case Kind::Binary:
      return op() == other.op() && lhs() == other.lhs() && rhs() == other.rhs();
  }
  return false;
}

std::string to_string(Comparator c) {
  switch (c) {
    case Comparator::Ge: return ">=";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Lt: return "<";
    case Comparator::Eq: return "=";
  }
  return "?";
}

std::string to_string(NumericEffectKind k) {
  switch (k) {
    case NumericEffectKind::Increase: return "increase";
    case NumericEffectKind::Decrease: return "decrease";
    case NumericEffectKind::Assign: return "assign";
  }
  return "?";
}

std::string render(const Condition& c, ParamStyle style) {
  if (const auto* lc = std::get_if<LogicalCondition>(&c)) {
    std::string atom = to_string(lc->key, style);
    return lc->truth ? atom : "(not " + atom + ")";
  }
  const auto& nc = std::get<NumericCondition>(c);
  return "(" + to_string(nc.cmp) + " " + nc.lhs.render(style) + " " + nc.rhs.render(style) + ")";
}

std::string render(const Effect& e, ParamStyle style) {
  if (const auto* add = std::get_if<AddEffect>(&e)) return to_string(add->key, style);
  if (const auto* del = std::get_if<DeleteEffect>(&e))
    return "(not " + to_string(del->key, style) + ")";
  const auto& ne = std::get<NumericEffect>(e);
  return "(" + to_string(ne.kind) + " " + to_string(ne.target, style) + " " +
         ne.amount.render(style) + ")";
}

std::string canonical(const Condition& c) {
  if (const auto* lc = std::get_if<LogicalCondition>(&c)) {
    return std::string("(lit ") + (lc->truth ? "+" : "-") + to_string(lc->key) + ")";
  }
  const auto& nc = std::get<NumericCondition>(c);
  return "(cmp " + to_string(nc.cmp) + " " + nc.lhs.canonical() + " " + nc.rhs.canonical() + ")";
}

std::string canonical(const Effect& e) {
  if (const auto* add = std::get_if<AddEffect>(&e)) return "(add " + to_string(add->key) + ")";
  if (const auto* del = std::get_if<DeleteEffect>(&e)) return "(del " + to_string(del->key) + ")";
  const auto& ne = std::get<NumericEffect>(e);
  return "(eff " + to_string(ne.kind) + " " + to_string(ne.target) + " " +
         ne.amount.canonical() + ")";
}

const ActionModel* Domain::find(const std::string& action_name) const {
  for (const auto& a : actions)
    if (a.name == action_name) return &a;
  return nullptr;
}

}  // namespace planlearn
