#include "planlearn/dataset.hpp"

#include <algorithm>
#include <sstream>

#include "planlearn/errors.hpp"
#include "planlearn/text.hpp"

namespace planlearn {

std::string attribute_name(const AttributeId& id) {
  if (const auto* la = std::get_if<LiftedAttribute>(&id)) return to_string(la->key);
  const auto& ca = std::get<ComparisonAttribute>(id);
  return "(" + to_string(ca.cmp) + " " + to_string(ca.lhs) + " " + ca.rhs.render() + ")";
}

AttrKind attribute_kind(const AttributeId& id) {
  if (const auto* la = std::get_if<LiftedAttribute>(&id)) return la->kind;
  return AttrKind::Logical;  // comparison columns hold truth values
}

std::string to_string(RowClass c) {
  return c == RowClass::PreState ? "pre-state" : "post-state";
}

std::optional<std::size_t> Dataset::attribute_index(const std::string& name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i)
    if (attribute_name(attributes[i]) == name) return i;
  return std::nullopt;
}

std::map<std::string, std::vector<Transition>> group_transitions(
    const std::vector<PlanTrace>& traces) {
  std::map<std::string, std::vector<Transition>> groups;
  for (const auto& trace : traces) {
    for (std::size_t k = 0; k < trace.actions.size(); ++k) {
      const auto& act = trace.actions[k];
      Transition t{trace.states[act.start], act, trace.states[act.end]};
      groups[act.name].push_back(std::move(t));
    }
  }
  return groups;
}

namespace {

// Object -> first position in the argument list.
std::map<std::string, int> param_map(const ActionInstance& a) {
  std::map<std::string, int> m;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    m.emplace(a.args[i], static_cast<int>(i));
  return m;
}

std::optional<LiftedKey> lift_atom(const GroundAtom& atom,
                                   const std::map<std::string, int>& params) {
  LiftedKey key;
  key.name = atom.name;
  for (const auto& obj : atom.args) {
    auto it = params.find(obj);
    if (it == params.end()) return std::nullopt;  // mentions a non-argument object
    key.params.push_back(it->second);
  }
  return key;
}

}  // namespace

std::map<LiftedAttribute, Cell> lift_state(const State& s, const ActionInstance& a) {
  auto params = param_map(a);
  std::map<LiftedAttribute, Cell> out;
  for (const auto& [atom, truth] : s.literals) {
    if (auto key = lift_atom(atom, params))
      out.emplace(LiftedAttribute{AttrKind::Logical, std::move(*key)}, Cell::logical(truth));
  }
  for (const auto& [atom, value] : s.fluents) {
    if (auto key = lift_atom(atom, params))
      out.emplace(LiftedAttribute{AttrKind::Numeric, std::move(*key)}, Cell::numeric(value));
  }
  return out;
}

Dataset build_dataset(const std::string& name, int arity,
                      const std::vector<Transition>& transitions) {
  Dataset d;
  d.action = name;
  d.arity = arity;

  std::vector<std::map<LiftedAttribute, Cell>> lifted;
  lifted.reserve(transitions.size() * 2);
  std::map<LiftedAttribute, Cell> empty;

  for (const auto& t : transitions) {
    if (t.action.name != name)
      throw PipelineError("transition action '" + t.action.name + "' does not match dataset '" +
                          name + "'");
    if (static_cast<int>(t.action.args.size()) != arity)
      throw PipelineError("arity mismatch for action '" + name + "': expected " +
                          std::to_string(arity) + ", got " +
                          std::to_string(t.action.args.size()));
    lifted.push_back(lift_state(t.pre, t.action));
    lifted.push_back(lift_state(t.post, t.action));
  }

  // Attribute set: union over all lifted states, lexicographic by rendering.
  std::map<std::string, LiftedAttribute> attrs;
  for (const auto& m : lifted)
    for (const auto& [attr, cell] : m) attrs.emplace(attribute_name(AttributeId{attr}), attr);
  for (const auto& [unused, attr] : attrs) d.attributes.push_back(AttributeId{attr});

  for (std::size_t i = 0; i < lifted.size(); ++i) {
    Row row;
    row.cls = (i % 2 == 0) ? RowClass::PreState : RowClass::PostState;
    row.transition_id = static_cast<int>(i / 2);
    row.cells.reserve(d.attributes.size());
    for (const auto& id : d.attributes) {
      const auto& attr = std::get<LiftedAttribute>(id);
      auto it = lifted[i].find(attr);
      row.cells.push_back(it == lifted[i].end() ? Cell::missing() : it->second);
    }
    d.rows.push_back(std::move(row));
  }
  return d;
}

std::string dataset_to_csv(const Dataset& d) {
  std::ostringstream out;
  for (const auto& id : d.attributes) out << attribute_name(id) << ",";
  out << "class\n";
  for (const auto& row : d.rows) {
    for (const auto& cell : row.cells) {
      switch (cell.type()) {
        case Cell::Type::Missing: out << "MV"; break;
        case Cell::Type::Logical: out << (cell.as_logical() ? "True" : "False"); break;
        case Cell::Type::Numeric:
        case Cell::Type::Discrete: out << format_number(cell.as_numeric()); break;
      }
      out << ",";
    }
    out << to_string(row.cls) << "\n";
  }
  return out.str();
}

std::string dataset_fingerprint(const Dataset& d) {
  std::uint64_t h = fnv1a(dataset_to_csv(d));
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[15 - i] = hex[(h >> (4 * i)) & 0xF];
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace planlearn
