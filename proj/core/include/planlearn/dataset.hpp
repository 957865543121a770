#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "planlearn/domain.hpp"
#include "planlearn/trace.hpp"

namespace planlearn {

// One observed execution: the state just before an action and just after.
struct Transition {
  State pre;
  ActionInstance action;
  State post;
};

enum class AttrKind { Logical, Numeric };

// A dataset column backed by a lifted trace atom.
struct LiftedAttribute {
  AttrKind kind = AttrKind::Logical;
  LiftedKey key;

  auto operator<=>(const LiftedAttribute&) const = default;
};

// A synthesized logical column: the truth of `lhs cmp rhs` evaluated per row.
struct ComparisonAttribute {
  Comparator cmp = Comparator::Ge;
  LiftedKey lhs;
  Expression rhs;
};

using AttributeId = std::variant<LiftedAttribute, ComparisonAttribute>;

// Canonical rendering; also the sort key for deterministic column order.
std::string attribute_name(const AttributeId& id);
AttrKind attribute_kind(const AttributeId& id);

// Missing | Logical | Numeric | Discrete. A column only ever mixes
// logical+missing or numeric/discrete+missing.
class Cell {
 public:
  enum class Type { Missing, Logical, Numeric, Discrete };

  static Cell missing() { return Cell(Type::Missing, false, 0); }
  static Cell logical(bool b) { return Cell(Type::Logical, b, 0); }
  static Cell numeric(double v) { return Cell(Type::Numeric, false, v); }
  static Cell discrete(double label) { return Cell(Type::Discrete, false, label); }

  Type type() const { return type_; }
  bool is_missing() const { return type_ == Type::Missing; }
  bool as_logical() const { return logical_; }
  double as_numeric() const { return value_; }

  bool operator==(const Cell&) const = default;

 private:
  Cell(Type t, bool b, double v) : type_(t), logical_(b), value_(v) {}
  Type type_ = Type::Missing;
  bool logical_ = false;
  double value_ = 0;
};

enum class RowClass { PreState, PostState };

std::string to_string(RowClass c);

struct Row {
  std::vector<Cell> cells;  // aligned with Dataset::attributes
  RowClass cls = RowClass::PreState;
  int transition_id = 0;
};

struct Dataset {
  std::string action;
  int arity = 0;
  std::vector<AttributeId> attributes;
  std::vector<Row> rows;  // pre/post pairs in transition order

  std::optional<std::size_t> attribute_index(const std::string& name) const;
};

// Splits every trace into per-action transitions, grouped by action name.
// Deterministic: trace order, then position within the trace.
std::map<std::string, std::vector<Transition>> group_transitions(
    const std::vector<PlanTrace>& traces);

// Lifts a grounded state against an action instance: atoms fully grounded in
// the action's arguments become schema attributes (?argK = first position of
// the object in the argument list); everything else is dropped.
std::map<LiftedAttribute, Cell> lift_state(const State& s, const ActionInstance& a);

// One pre-state row and one post-state row per transition; the attribute set
// is the union over all lifted states, unobserved cells are Missing.
// Throws PipelineError on name/arity mismatches.
Dataset build_dataset(const std::string& name, int arity,
                      const std::vector<Transition>& transitions);

// Table-style dump: header of lifted keys plus `class`, MV for Missing.
std::string dataset_to_csv(const Dataset& d);

std::string dataset_fingerprint(const Dataset& d);

}  // namespace planlearn
