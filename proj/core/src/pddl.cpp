#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "planlearn/domain.hpp"
#include "planlearn/text.hpp"

namespace planlearn {

namespace {

// ---------------------------------------------------------------------------
// Emission

void collect_heads(const Expression& e, std::map<std::string, int>& functions) {
  switch (e.kind()) {
    case Expression::Kind::Constant:
      return;
    case Expression::Kind::Variable:
      functions[e.key().name] = static_cast<int>(e.key().params.size());
      return;
    case Expression::Kind::Binary:
      collect_heads(e.lhs(), functions);
      collect_heads(e.rhs(), functions);
      return;
  }
}

std::string head_decl(const std::string& name, int arity) {
  std::string s = "(" + name;
  for (int i = 0; i < arity; ++i) s += " ?x" + std::to_string(i);
  return s + ")";
}

}  // namespace

std::string serialize_domain(const Domain& d) {
  {
    std::set<std::string> names;
    for (const auto& a : d.actions)
      if (!names.insert(a.name).second)
        throw DomainError("duplicate action name: " + a.name);
  }

  std::vector<const ActionModel*> actions;
  for (const auto& a : d.actions) actions.push_back(&a);
  std::sort(actions.begin(), actions.end(),
            [](const ActionModel* a, const ActionModel* b) { return a->name < b->name; });

  std::map<std::string, int> predicates;
  std::map<std::string, int> functions;
  for (const auto* a : actions) {
    for (const auto& c : a->preconditions) {
      if (const auto* lc = std::get_if<LogicalCondition>(&c)) {
        predicates[lc->key.name] = static_cast<int>(lc->key.params.size());
      } else {
        const auto& nc = std::get<NumericCondition>(c);
        collect_heads(nc.lhs, functions);
        collect_heads(nc.rhs, functions);
      }
    }
    for (const auto& e : a->effects) {
      if (const auto* add = std::get_if<AddEffect>(&e)) {
        predicates[add->key.name] = static_cast<int>(add->key.params.size());
      } else if (const auto* del = std::get_if<DeleteEffect>(&e)) {
        predicates[del->key.name] = static_cast<int>(del->key.params.size());
      } else {
        const auto& ne = std::get<NumericEffect>(e);
        functions[ne.target.name] = static_cast<int>(ne.target.params.size());
        collect_heads(ne.amount, functions);
      }
    }
  }

  std::ostringstream out;
  out << "(define (domain " << d.name << ")\n";
  out << "  (:requirements :typing :fluents)\n";
  out << "  (:predicates";
  for (const auto& [name, arity] : predicates) out << "\n    " << head_decl(name, arity);
  out << ")\n";
  out << "  (:functions";
  for (const auto& [name, arity] : functions) out << "\n    " << head_decl(name, arity);
  out << ")\n";

  for (const auto* a : actions) {
    out << "  (:action " << a->name << "\n";
    out << "    :parameters (";
    for (int i = 0; i < a->arity; ++i) out << (i ? " " : "") << "?arg_" << i;
    if (a->arity > 0) out << " - object";
    out << ")\n";

    std::vector<std::string> pre;
    for (const auto& c : a->preconditions) pre.push_back(render(c, ParamStyle::Pddl));
    std::sort(pre.begin(), pre.end());
    out << "    :precondition (and";
    for (const auto& p : pre) out << "\n      " << p;
    out << ")\n";

    std::vector<std::string> eff;
    for (const auto& e : a->effects) eff.push_back(render(e, ParamStyle::Pddl));
    std::sort(eff.begin(), eff.end());
    out << "    :effect (and";
    for (const auto& e : eff) out << "\n      " << e;
    out << "))\n";
  }
  out << ")\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Sexp {
  // Leaf token or parenthesised list.
  std::string token;
  std::vector<Sexp> items;
  bool is_list = false;
};

class SexpReader {
 public:
  explicit SexpReader(const std::string& text) : text_(text) {}

  std::vector<Sexp> read_all() {
    std::vector<Sexp> out;
    skip_ws();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_ws();
    }
    return out;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {  // comment to end of line
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  Sexp read() {
    skip_ws();
    if (pos_ >= text_.size()) throw DomainError("unexpected end of input");
    if (text_[pos_] == '(') {
      ++pos_;
      Sexp list;
      list.is_list = true;
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        list.items.push_back(read());
        skip_ws();
      }
      if (pos_ >= text_.size()) throw DomainError("unbalanced parenthesis");
      ++pos_;
      return list;
    }
    if (text_[pos_] == ')') throw DomainError("unexpected ')'");
    Sexp leaf;
    size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')')
      ++pos_;
    leaf.token = text_.substr(start, pos_ - start);
    return leaf;
  }

  const std::string& text_;
  size_t pos_ = 0;
};

const std::set<std::string> kUnsupported = {
    "when", "forall", "exists", "or", "imply", "oneof", "either", ":durative-action",
    ":derived", ":axiom"};

void check_supported(const std::string& token) {
  if (kUnsupported.count(token))
    throw DomainError("unsupported construct: " + token, token);
}

bool is_number(const std::string& t, double& value) {
  if (t.empty()) return false;
  auto r = std::from_chars(t.data(), t.data() + t.size(), value);
  return r.ec == std::errc{} && r.ptr == t.data() + t.size();
}

struct ActionContext {
  std::map<std::string, int> param_index;  // declared parameter name -> position
  std::string action_name;
};

LiftedKey parse_lifted(const Sexp& s, const ActionContext& ctx) {
  if (!s.is_list || s.items.empty() || s.items[0].is_list)
    throw DomainError("malformed atom in action " + ctx.action_name);
  LiftedKey key;
  key.name = s.items[0].token;
  check_supported(key.name);
  for (size_t i = 1; i < s.items.size(); ++i) {
    const auto& tok = s.items[i].token;
    auto it = ctx.param_index.find(tok);
    if (s.items[i].is_list || it == ctx.param_index.end())
      throw DomainError("unknown parameter '" + tok + "' in action " + ctx.action_name);
    key.params.push_back(it->second);
  }
  return key;
}

Expression parse_expression(const Sexp& s, const ActionContext& ctx) {
  if (!s.is_list) {
    double v;
    if (is_number(s.token, v)) return Expression::constant(v);
    throw DomainError("expected number or fluent, got '" + s.token + "'");
  }
  if (s.items.empty() || s.items[0].is_list) throw DomainError("malformed expression");
  const std::string& head = s.items[0].token;
  check_supported(head);
  if (head == "+" || head == "-" || head == "*" || head == "/") {
    if (s.items.size() != 3)
      throw DomainError("expected binary arithmetic expression, got arity " +
                        std::to_string(s.items.size() - 1));
    BinOp op = head == "+"   ? BinOp::Add
               : head == "-" ? BinOp::Sub
               : head == "*" ? BinOp::Mul
                             : BinOp::Div;
    return Expression::binary(op, parse_expression(s.items[1], ctx),
                              parse_expression(s.items[2], ctx));
  }
  return Expression::variable(parse_lifted(s, ctx));
}

std::optional<Comparator> comparator_from(const std::string& t) {
  if (t == ">=") return Comparator::Ge;
  if (t == "<=") return Comparator::Le;
  if (t == ">") return Comparator::Gt;
  if (t == "<") return Comparator::Lt;
  if (t == "=") return Comparator::Eq;
  return std::nullopt;
}

Condition parse_condition(const Sexp& s, const ActionContext& ctx) {
  if (!s.is_list || s.items.empty()) throw DomainError("malformed condition");
  const std::string& head = s.items[0].token;
  check_supported(head);
  if (head == "not") {
    if (s.items.size() != 2) throw DomainError("malformed (not ...)");
    LiftedKey key = parse_lifted(s.items[1], ctx);
    return LogicalCondition{std::move(key), false};
  }
  if (auto cmp = comparator_from(head)) {
    if (s.items.size() != 3) throw DomainError("malformed comparison");
    return NumericCondition{*cmp, parse_expression(s.items[1], ctx),
                            parse_expression(s.items[2], ctx)};
  }
  return LogicalCondition{parse_lifted(s, ctx), true};
}

Effect parse_effect(const Sexp& s, const ActionContext& ctx) {
  if (!s.is_list || s.items.empty()) throw DomainError("malformed effect");
  const std::string& head = s.items[0].token;
  check_supported(head);
  if (head == "not") {
    if (s.items.size() != 2) throw DomainError("malformed (not ...)");
    return DeleteEffect{parse_lifted(s.items[1], ctx)};
  }
  if (head == "increase" || head == "decrease" || head == "assign") {
    if (s.items.size() != 3) throw DomainError("malformed numeric effect");
    NumericEffectKind kind = head == "increase"   ? NumericEffectKind::Increase
                             : head == "decrease" ? NumericEffectKind::Decrease
                                                  : NumericEffectKind::Assign;
    return NumericEffect{kind, parse_lifted(s.items[1], ctx),
                         parse_expression(s.items[2], ctx)};
  }
  return AddEffect{parse_lifted(s, ctx)};
}

ActionModel parse_action(const Sexp& s) {
  // s.items: [:action, name, :parameters, (...), :precondition, (...), :effect, (...)]
  ActionModel model;
  ActionContext ctx;
  if (s.items.size() < 2 || s.items[1].is_list) throw DomainError("malformed :action");
  model.name = s.items[1].token;
  ctx.action_name = model.name;

  size_t i = 2;
  std::vector<Sexp> precondition_items, effect_items;
  bool have_params = false;
  while (i < s.items.size()) {
    const std::string& kw = s.items[i].token;
    if (kw == ":parameters") {
      if (i + 1 >= s.items.size() || !s.items[i + 1].is_list)
        throw DomainError("malformed :parameters");
      int index = 0;
      for (const auto& p : s.items[i + 1].items) {
        if (p.is_list) throw DomainError("malformed :parameters");
        if (p.token == "-") continue;       // type separator
        if (p.token[0] != '?') continue;    // type name
        ctx.param_index[p.token] = index++;
      }
      model.arity = index;
      have_params = true;
      i += 2;
    } else if (kw == ":precondition" || kw == ":effect") {
      if (i + 1 >= s.items.size() || !s.items[i + 1].is_list)
        throw DomainError("malformed " + kw);
      const Sexp& body = s.items[i + 1];
      std::vector<Sexp> items;
      if (!body.items.empty() && !body.items[0].is_list && body.items[0].token == "and") {
        items.assign(body.items.begin() + 1, body.items.end());
      } else if (!body.items.empty()) {
        items.push_back(body);
      }
      if (kw == ":precondition")
        precondition_items = std::move(items);
      else
        effect_items = std::move(items);
      i += 2;
    } else {
      check_supported(kw);
      throw DomainError("unsupported construct: " + kw, kw);
    }
  }
  if (!have_params) throw DomainError("action " + model.name + " lacks :parameters");

  for (const auto& c : precondition_items) model.preconditions.push_back(parse_condition(c, ctx));
  for (const auto& e : effect_items) model.effects.push_back(parse_effect(e, ctx));
  return model;
}

}  // namespace

Domain parse_reference_domain(const std::string& text) {
  SexpReader reader(text);
  auto top = reader.read_all();
  if (top.size() != 1 || !top[0].is_list || top[0].items.empty() ||
      top[0].items[0].token != "define")
    throw DomainError("expected a single (define (domain ...)) form");

  Domain d;
  const Sexp& def = top[0];
  for (size_t i = 1; i < def.items.size(); ++i) {
    const Sexp& section = def.items[i];
    if (!section.is_list || section.items.empty()) throw DomainError("malformed section");
    const std::string& head = section.items[0].token;
    if (head == "domain") {
      if (section.items.size() != 2) throw DomainError("malformed (domain NAME)");
      d.name = section.items[1].token;
    } else if (head == ":requirements" || head == ":predicates" || head == ":functions" ||
               head == ":types") {
      for (const auto& item : section.items)
        if (!item.is_list) check_supported(item.token);
      // declarations are re-derived from the models at serialization time
    } else if (head == ":action") {
      d.actions.push_back(parse_action(section));
    } else {
      throw DomainError("unsupported construct: " + head, head);
    }
  }
  {
    std::set<std::string> names;
    for (const auto& a : d.actions)
      if (!names.insert(a.name).second)
        throw DomainError("duplicate action name: " + a.name);
  }
  return d;
}

}  // namespace planlearn
